#include "manet/routing.hpp"

#include <algorithm>
#include <stdexcept>

namespace manet {

const char* to_string(MsgKind k) {
  switch (k) {
    case MsgKind::RREQ: return "RREQ";
    case MsgKind::RREP: return "RREP";
    case MsgKind::CREQ: return "CREQ";
    case MsgKind::CREP: return "CREP";
    case MsgKind::LINKADV: return "LINKADV";
    case MsgKind::ACK: return "ACK";
    case MsgKind::DATA: return "DATA";
  }
  return "?";
}

namespace {

bool has_duplicate(const std::vector<NodeId>& p) {
  std::set<NodeId> seen;
  for (NodeId n : p)
    if (!seen.insert(n).second) return true;
  return false;
}

}  // namespace

ControlMessage originate_rreq(RoutingTable& table, NodeId dst) {
  table.own_seq += 1;
  ControlMessage m;
  m.kind = MsgKind::RREQ;
  m.origin = table.owner;
  m.target = dst;
  m.broadcast_id = table.next_broadcast_id++;
  m.dst_seq = table.has_route(dst) ? table.routes.at(dst).dst_seq : 0;
  m.path = {table.owner};
  m.hop_count = 0;
  return m;
}

RreqActions handle_rreq(RoutingTable& table, const ControlMessage& m) {
  RreqActions out;
  const NodeId self = table.owner;

  if (std::find(m.path.begin(), m.path.end(), self) != m.path.end()) {
    out.loop_suppressed = true;
    return out;
  }

  const auto key = std::make_pair(m.origin, m.broadcast_id);
  if (table.seen_rreqs.count(key)) {
    out.duplicate = true;
    return out;
  }
  table.seen_rreqs.insert(key);

  if (self == m.target) {
    table.own_seq = std::max(table.own_seq, m.dst_seq);
    ControlMessage rep;
    rep.kind = MsgKind::RREP;
    rep.origin = self;           // route destination
    rep.target = m.origin;
    rep.broadcast_id = m.broadcast_id;
    rep.dst_seq = table.own_seq;
    rep.replier = self;
    rep.path = {self};
    rep.hop_count = 0;
    rep.route.assign(m.path.rbegin(), m.path.rend());
    out.reply = rep;
    return out;
  }

  if (table.has_route(m.target)) {
    const RouteEntry& e = table.routes.at(m.target);
    if (e.dst_seq >= m.dst_seq) {
      // doubled node anywhere in requester-path + cached path means the
      // combined claim would loop; fall through to a plain forward
      std::vector<NodeId> combined = m.path;
      combined.insert(combined.end(), e.full_path.begin(), e.full_path.end());
      if (!has_duplicate(combined)) {
        ControlMessage rep;
        rep.kind = MsgKind::RREP;
        rep.origin = m.target;
        rep.target = m.origin;
        rep.broadcast_id = m.broadcast_id;
        rep.dst_seq = e.dst_seq;  // cached value, not bumped
        rep.replier = self;
        rep.path.assign(e.full_path.rbegin(), e.full_path.rend());
        rep.hop_count = static_cast<int>(rep.path.size()) - 1;
        rep.route.assign(m.path.rbegin(), m.path.rend());
        out.reply = rep;
        return out;
      }
    }
  }

  ControlMessage fwd = m;
  fwd.path.push_back(self);
  fwd.hop_count += 1;
  out.forward = fwd;
  return out;
}

std::vector<NodeId> rrep_full_path(const RoutingTable& table, const ControlMessage& m) {
  std::vector<NodeId> full;
  full.reserve(m.path.size() + 1);
  full.push_back(table.owner);
  full.insert(full.end(), m.path.rbegin(), m.path.rend());
  return full;
}

RrepResult handle_rrep(RoutingTable& table, const ControlMessage& m) {
  const std::vector<NodeId> full = rrep_full_path(table, m);
  if (full.size() < 2 || has_duplicate(full)) return RrepResult::Rejected;

  const int hops = static_cast<int>(full.size()) - 1;
  const NodeId dest = m.origin;
  auto it = table.routes.find(dest);
  if (it != table.routes.end()) {
    const RouteEntry& cur = it->second;
    const bool better = m.dst_seq > cur.dst_seq ||
                        (m.dst_seq == cur.dst_seq && hops < cur.hop_count);
    if (!better) return RrepResult::Rejected;
  }
  table.routes[dest] = RouteEntry{dest, full[1], hops, m.dst_seq, full};
  return RrepResult::Accepted;
}

MprSelection select_mprs(const std::set<NodeId>& one_hop,
                         const std::set<LinkKey>& claims, NodeId self) {
  MprSelection out;
  std::set<NodeId> uncovered = two_hop_neighbors(claims, self);

  // reach sets over the advertised links
  std::map<NodeId, std::set<NodeId>> reach;
  for (NodeId n : one_hop) {
    for (NodeId t : one_hop_neighbors(claims, n))
      if (uncovered.count(t)) reach[n].insert(t);
  }

  while (!uncovered.empty()) {
    NodeId best = 0;
    std::size_t best_gain = 0;
    for (NodeId n : one_hop) {
      std::size_t gain = 0;
      for (NodeId t : reach[n])
        if (uncovered.count(t)) ++gain;
      if (gain > best_gain) {
        best = n;
        best_gain = gain;
      }
    }
    if (best_gain == 0) {
      out.uncovered = uncovered;  // claimed but unreachable via any neighbor
      break;
    }
    out.mprs.insert(best);
    for (NodeId t : reach[best]) uncovered.erase(t);
  }

  // a later pick can subsume an earlier one; prune (ascending id) so that
  // every member is essential to the cover
  std::set<NodeId> goal;
  for (NodeId n : out.mprs) goal.insert(reach[n].begin(), reach[n].end());
  for (NodeId cand : std::vector<NodeId>(out.mprs.begin(), out.mprs.end())) {
    std::set<NodeId> rest;
    for (NodeId n : out.mprs)
      if (n != cand) rest.insert(reach[n].begin(), reach[n].end());
    if (rest == goal) out.mprs.erase(cand);
  }
  return out;
}

ForwardAction forward_data(const RoutingTable& table, const ControlMessage& m) {
  if (m.kind != MsgKind::DATA) throw std::invalid_argument("forward_data expects DATA");
  if (table.owner == m.target) return {ForwardKind::Deliver, table.owner};
  auto it = table.routes.find(m.target);
  if (it == table.routes.end()) return {ForwardKind::DropNoRoute, 0};
  return {ForwardKind::Forward, it->second.next_hop};
}

}  // namespace manet
