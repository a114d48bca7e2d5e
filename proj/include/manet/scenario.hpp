#ifndef MANET_SCENARIO_HPP
#define MANET_SCENARIO_HPP

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "manet/adversary.hpp"
#include "manet/gaopt.hpp"
#include "manet/netmodel.hpp"

namespace manet {

struct LinkFailure {
  LinkKey link;
  int step = 0;
  bool operator==(const LinkFailure&) const = default;
};

// Parsed scenario file. `params` holds only keys the file set explicitly;
// typed defaults are applied by scenario_config. Topology bounds and radio
// range are mirrored from params so the struct is usable directly.
struct Scenario {
  std::map<std::string, std::string> params;
  Topology topology;
  std::vector<Commodity> commodities;
  std::vector<AttackProfile> attackers;
  std::vector<LinkFailure> failures;
  bool operator==(const Scenario&) const = default;
};

// Parse or validation failure; message already carries "line N: ...".
struct ScenarioError : std::runtime_error {
  ScenarioError(int line_, const std::string& what_)
      : std::runtime_error("line " + std::to_string(line_) + ": " + what_),
        line(line_) {}
  int line;
};

enum class BlackholeDefense { Off, Quorum, Confirm };
enum class RouteMode { Reactive, Static };

// Fully typed view of the parameter map with defaults applied.
struct SimConfig {
  int steps = 50;
  long long seed = 1;
  double range = 250.0;
  double data_rate = 1.0;           // packets per step per commodity
  double capacity_default = 1e9;    // unit-disk link capacity
  int drain_cap = 50;               // extra steps to flush in-flight data
  int rreq_retry = 10;              // steps between discovery retries

  ElectionWeights cluster;

  GaParams ga;

  bool flood_on = false;
  int flood_window = 10;
  int flood_threshold = 10;

  BlackholeDefense blackhole = BlackholeDefense::Off;
  std::map<NodeId, BlackholeDefense> blackhole_node;  // per-node overrides
  int quorum_min_count = 2;
  int confirm_timeout = 6;

  bool ack_on = false;
  int ack_k = 1;

  bool gps_on = false;
  double gps_slack = 0.0;

  int linkadv_period = 0;  // 0 disables LINKADV broadcasts

  RouteMode route_mode = RouteMode::Reactive;
};

// Line-oriented grammar:
//   param <dotted.key> <value>
//   node <id> <x> <y> [speed]
//   link <id1> <id2> <capacity>
//   demand <g> <src> <dst> <bandwidth> [start]
//   attacker <id> flooding <rate> [spoof <victim>]
//   attacker <id> blackhole <delta>
//   attacker <id> misrelay <partner> [modify]
//   attacker <id> linkspoof <fake-neighbor>
//   failure <id1> <id2> <step>
// `#` starts a comment. Any `link` record switches the topology to explicit
// adjacency; otherwise unit-disk over sim.range. Unknown records, unknown
// param keys, malformed values, and dangling node references all raise
// ScenarioError with a 1-based line number.
Scenario parse_scenario(const std::string& text);
Scenario parse_scenario_file(const std::string& path);

// Canonical rendering: records sorted (params by key, nodes by id, links by
// endpoint pair, demands by g, attackers by node, failures by step then
// pair), doubles in shortest exact form. parse_scenario(render(s)) == s.
std::string render(const Scenario& s);

SimConfig scenario_config(const Scenario& s);

}  // namespace manet

#endif
