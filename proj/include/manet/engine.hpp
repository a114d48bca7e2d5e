#ifndef MANET_ENGINE_HPP
#define MANET_ENGINE_HPP

#include <string>
#include <vector>

#include "manet/scenario.hpp"

namespace manet {

enum class Detector { Flood, Quorum, Confirm, Ack, LinkSpoof };

const char* to_string(Detector d);

enum class EventKind {
  DetectorOn,      // detector enabled for this run
  LinkFail,        // a, b = link endpoints
  DataSent,        // g, payload, a = src
  DataDelivered,   // g, payload, a = dst
  DataDropped,     // g, payload, a = where, note = reason
  ControlDelivered,  // a = from, b = to, note = kind
  RouteDiscovery,  // a = requester, b = dst
  RouteInstall,    // a = node, b = dst, path = full route
  RouteSwitch,     // a = src, b = dst, path = backup now in use
  BlacklistInsert,  // a = monitor, b = origin
  Accuse,          // detector, a = accuser, b = accused
  QuorumUnsafe,    // a = requester, b = dst
  QuorumSafe,      // a = requester, b = dst
  ConfirmOk,       // a = requester, b = replier
  ConfirmMismatch,  // a = requester, b = replier
  ConfirmTimeout,  // a = requester, b = replier
  FloodEmit,       // a = attacker, value = RREQs this step
  FakeRrep,        // a = attacker, b = requester
  FakeClaim,       // a = attacker, path = {fake endpoints}
  AttackerDrop,    // a = attacker, payload
  AttackerModify,  // a = attacker, payload
  MprChange,       // a = node, path = new MPR set
  UtilSample,      // value = max link load/capacity this step
};

struct Event {
  int step = 0;
  EventKind kind = EventKind::DataSent;
  Detector detector = Detector::Flood;
  NodeId a = 0;
  NodeId b = 0;
  int g = -1;
  int payload = 0;
  double value = 0.0;
  std::vector<NodeId> path;
  std::string note;
};

std::string event_line(const Event& e);

struct DetectorStats {
  int tp = 0;
  int fp = 0;
  int fn = 0;
  bool operator==(const DetectorStats&) const = default;
};

struct MetricsReport {
  long long data_sent = 0;
  long long data_delivered = 0;
  long long data_dropped = 0;
  long long in_flight = 0;  // at end of run
  long long control_msgs = 0;
  int blacklist_events = 0;
  int route_discoveries = 0;
  double delivery_ratio = 1.0;
  double max_link_utilization = 0.0;
  DetectorStats flood, quorum, confirm, ack, linkspoof;
};

// Cumulative counters at the end of each executed step.
struct StepRow {
  int step = 0;
  long long data_sent = 0;
  long long data_delivered = 0;
  long long data_dropped = 0;
  long long in_flight = 0;
  long long control_msgs = 0;
  int blacklist_events = 0;
  int route_discoveries = 0;
};

struct CommodityStats {
  int g = 0;
  NodeId src = 0;
  NodeId dst = 0;
  long long sent = 0;
  long long delivered = 0;
  long long dropped = 0;
  double ratio() const { return sent == 0 ? 1.0 : static_cast<double>(delivered) / sent; }
};

struct RunResult {
  MetricsReport metrics;
  std::vector<Event> events;
  std::vector<StepRow> steps;
  std::vector<CommodityStats> commodities;
};

// Aggregates the event log. Detector TP counts unique accused nodes that
// carry an AttackProfile, FP unique accused without one, FN attackers that
// committed an offense in the detector's scope and were never accused while
// the detector was enabled.
MetricsReport compute_metrics(const std::vector<Event>& events,
                              const std::vector<AttackProfile>& attackers);

// Round-based simulation. Per step: (1) scheduled link failures, (2)
// mobility, (3) delivery of last step's messages to in-range receivers, (4)
// per-node processing in ascending node id, (5) DATA emission at data_rate
// while step < sim.steps. After the generation window the run drains in
// flight traffic for up to sim.drain_cap extra steps. Deterministic given
// the seed.
RunResult run(const Scenario& scenario, const SimConfig& config);
RunResult run(const Scenario& scenario);

}  // namespace manet

#endif
