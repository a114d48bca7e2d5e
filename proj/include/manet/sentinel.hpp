#ifndef MANET_SENTINEL_HPP
#define MANET_SENTINEL_HPP

#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "manet/routing.hpp"

namespace manet {

// (destination, discovery broadcast id) — identifies one route discovery.
using DiscoveryKey = std::pair<NodeId, int>;

// ---- RREQ-rate blacklist -------------------------------------------------

struct BlacklistState {
  int window_len = 10;  // steps
  int threshold = 10;   // RREQs per window, strictly-greater triggers
  std::map<NodeId, int> counters;
  std::set<NodeId> blacklist;
  int current_window = 0;
};

struct MonitorVerdict {
  bool blacklisted = false;
  bool newly_listed = false;
};

// Counts one RREQ from `origin`; window counters reset when the step clock
// crosses a window boundary, the blacklist itself never shrinks.
MonitorVerdict monitor_rreq_rate(BlacklistState& st, NodeId origin, int step);

// ---- CREQ/CREP route confirmation -----------------------------------------

struct PendingConfirmation {
  std::vector<NodeId> rrep_path;  // full source->dest claim under test
  NodeId replier = 0;
  int deadline = 0;
};

struct ConfirmationState {
  int timeout = 6;  // steps to wait for a CREP
  std::map<DiscoveryKey, PendingConfirmation> pending;
};

enum class ConfirmResult { Confirmed, Mismatch, Timeout };

// Judges a pending route against the CREP (absent CREP = deadline passed).
// Paths must match as exact node sequences. Resolving removes the entry.
ConfirmResult confirm_route(ConfirmationState& st, const DiscoveryKey& key,
                            const std::optional<ControlMessage>& crep);

// Pure form used by tests and the engine alike.
ConfirmResult compare_confirmation(const std::vector<NodeId>& rrep_path,
                                   const std::optional<std::vector<NodeId>>& crep_path);

// ---- multi-RREP shared-hop quorum -----------------------------------------

struct RrepQuorumState {
  int min_count = 2;
  std::map<DiscoveryKey, std::vector<std::vector<NodeId>>> collected;
};

enum class QuorumVerdict { Safe, Unsafe, Waiting };

void quorum_add(RrepQuorumState& st, const DiscoveryKey& key,
                const std::vector<NodeId>& full_path);

// Safe iff at least two collected paths share an interior node; paths run
// source->dest and endpoints do not count as shared hops.
QuorumVerdict quorum_check(const RrepQuorumState& st, const DiscoveryKey& key);

// Interior nodes of collected paths that share no interior hop with any
// other collected path (the uncorroborated claims at a safe verdict).
std::set<NodeId> quorum_uncorroborated(const RrepQuorumState& st, const DiscoveryKey& key);

// ---- acknowledgment audit ---------------------------------------------------

struct WatchedPacket {
  std::vector<NodeId> expected_forwarders;  // route interior, in order
  int deadline = 0;
};

struct AckWatch {
  NodeId auditor = 0;
  int overhear_k = 1;  // transmission-power multiplier: audible hop radius
  std::map<int, WatchedPacket> pending;  // by payload id
};

// Suspects among expected forwarders within overhear_k hops of the auditor:
// no overheard forward and no end-to-end ACK by the deadline. Judged only
// for packets whose deadline has passed. Nodes farther than overhear_k hops
// are unobservable and never suspected.
std::set<NodeId> ack_audit(const AckWatch& watch,
                           const std::set<std::pair<int, NodeId>>& observed_forwards,
                           const std::set<int>& received_acks,
                           const Topology& topo, int now);

// BFS hop count over current adjacency; -1 when unreachable.
int hop_distance(const Topology& topo, NodeId from, NodeId to);

// ---- position-based link verification ---------------------------------------

struct PositionRecord {
  Vec2 pos;
  int time = 0;
};

struct PositionTable {
  double max_range = 250.0;
  double slack = 0.0;  // tolerance for position staleness
  std::map<NodeId, PositionRecord> records;
};

enum class LinkVerdict { Plausible, Flagged, Indeterminate };

// Ignores fixes older than the stored one.
void update_position(PositionTable& ptab, NodeId n, const Vec2& pos, int time);

// Flagged iff the recorded endpoint distance exceeds max_range + slack.
// Missing fixes make the claim indeterminate, not flagged.
LinkVerdict verify_link_claim(const PositionTable& ptab, const LinkKey& claim);

}  // namespace manet

#endif
