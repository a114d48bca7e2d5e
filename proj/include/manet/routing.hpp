#ifndef MANET_ROUTING_HPP
#define MANET_ROUTING_HPP

#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "manet/netmodel.hpp"

namespace manet {

enum class MsgKind { RREQ, RREP, CREQ, CREP, LINKADV, ACK, DATA };

const char* to_string(MsgKind k);

// One wire message. Path conventions:
//  - RREQ/DATA accumulate the traversed path origin-first; each forwarder
//    appends itself, so path.back() is the last transmitter.
//  - RREP paths are built in reverse route order [dest .. replier] and keep
//    accumulating relays on the way back, so the requester reconstructs the
//    full source->dest route as [self] + reverse(path).
//  - CREQ/CREP carry a claimed route in source->dest order; they do not
//    accumulate.
// `route`/`route_pos` hold remaining unicast hops for messages relayed along
// a known path (RREP/CREP/ACK, and DATA under static source routing).
struct ControlMessage {
  MsgKind kind = MsgKind::RREQ;
  NodeId origin = 0;
  NodeId target = 0;
  int broadcast_id = 0;   // RREQ/LINKADV dedup key, discovery id on replies
  int dst_seq = 0;
  int hop_count = 0;
  std::vector<NodeId> path;
  int payload_id = 0;     // DATA/ACK
  NodeId replier = 0;     // RREP/CREQ/CREP: node that answered the discovery
  std::set<LinkKey> claimed_links;  // LINKADV
  Vec2 pos;               // LINKADV: advertised position
  int pos_time = 0;       // LINKADV: timestamp of the position fix
  std::vector<NodeId> route;  // remaining unicast hops
  int route_pos = 0;

  bool operator==(const ControlMessage&) const = default;
};

// Last transmitter of an accumulated-path message.
inline NodeId prev_hop(const ControlMessage& m) {
  return m.path.empty() ? m.origin : m.path.back();
}

struct RouteEntry {
  NodeId dest = 0;
  NodeId next_hop = 0;
  int hop_count = 0;
  int dst_seq = 0;
  std::vector<NodeId> full_path;  // kept for defense-side path comparison
};

struct RoutingTable {
  NodeId owner = 0;
  std::map<NodeId, RouteEntry> routes;
  int own_seq = 0;
  int next_broadcast_id = 1;
  std::set<std::pair<NodeId, int>> seen_rreqs;
  std::set<std::pair<NodeId, int>> seen_advs;

  bool has_route(NodeId dst) const { return routes.count(dst) != 0; }
};

struct RreqActions {
  std::optional<ControlMessage> reply;    // RREP, unicast back along `route`
  std::optional<ControlMessage> forward;  // rebroadcast with self appended
  bool duplicate = false;
  bool loop_suppressed = false;
};

enum class RrepResult { Accepted, Rejected };

struct MprSelection {
  std::set<NodeId> mprs;
  std::set<NodeId> uncovered;  // claimed two-hop nodes no one-hop neighbor reaches
};

enum class ForwardKind { Forward, Deliver, DropNoRoute };

struct ForwardAction {
  ForwardKind kind = ForwardKind::DropNoRoute;
  NodeId next_hop = 0;
};

// Fresh route request: bumps own_seq, allocates a broadcast id, carries the
// last known sequence number for dst (0 when none).
ControlMessage originate_rreq(RoutingTable& table, NodeId dst);

// Dedup, reply-from-cache/destination, or rebroadcast. A message whose path
// already contains this node is dropped as loop-suppressed.
RreqActions handle_rreq(RoutingTable& table, const ControlMessage& m);

// Freshness rule: accept on strictly higher dst_seq, or equal dst_seq and
// strictly fewer hops, or no incumbent. The accepted entry stores the full
// reconstructed path.
RrepResult handle_rrep(RoutingTable& table, const ControlMessage& m);

// Full source->dest route as seen by the requester processing an RREP.
std::vector<NodeId> rrep_full_path(const RoutingTable& table, const ControlMessage& m);

// Greedy cover of the claimed two-hop neighborhood: repeatedly pick the
// one-hop neighbor covering the most uncovered two-hop nodes, ties to the
// lowest id.
MprSelection select_mprs(const std::set<NodeId>& one_hop,
                         const std::set<LinkKey>& claims, NodeId self);

ForwardAction forward_data(const RoutingTable& table, const ControlMessage& m);

}  // namespace manet

#endif
