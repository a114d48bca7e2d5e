#include "manet/sentinel.hpp"

#include <algorithm>
#include <queue>

namespace manet {

MonitorVerdict monitor_rreq_rate(BlacklistState& st, NodeId origin, int step) {
  const int window = st.window_len > 0 ? step / st.window_len : 0;
  if (window != st.current_window) {
    st.counters.clear();
    st.current_window = window;
  }
  if (st.blacklist.count(origin)) return {true, false};

  const int count = ++st.counters[origin];
  if (count > st.threshold) {
    st.blacklist.insert(origin);
    return {true, true};
  }
  return {false, false};
}

ConfirmResult compare_confirmation(const std::vector<NodeId>& rrep_path,
                                   const std::optional<std::vector<NodeId>>& crep_path) {
  if (!crep_path) return ConfirmResult::Timeout;
  return rrep_path == *crep_path ? ConfirmResult::Confirmed : ConfirmResult::Mismatch;
}

ConfirmResult confirm_route(ConfirmationState& st, const DiscoveryKey& key,
                            const std::optional<ControlMessage>& crep) {
  auto it = st.pending.find(key);
  if (it == st.pending.end()) return ConfirmResult::Timeout;
  std::optional<std::vector<NodeId>> crep_path;
  if (crep) crep_path = crep->path;
  const ConfirmResult r = compare_confirmation(it->second.rrep_path, crep_path);
  st.pending.erase(it);
  return r;
}

void quorum_add(RrepQuorumState& st, const DiscoveryKey& key,
                const std::vector<NodeId>& full_path) {
  st.collected[key].push_back(full_path);
}

namespace {

std::set<NodeId> interior(const std::vector<NodeId>& path) {
  std::set<NodeId> out;
  for (std::size_t i = 1; i + 1 < path.size(); ++i) out.insert(path[i]);
  return out;
}

bool share_interior(const std::vector<NodeId>& a, const std::vector<NodeId>& b) {
  const std::set<NodeId> ia = interior(a);
  for (std::size_t i = 1; i + 1 < b.size(); ++i)
    if (ia.count(b[i])) return true;
  return false;
}

}  // namespace

QuorumVerdict quorum_check(const RrepQuorumState& st, const DiscoveryKey& key) {
  auto it = st.collected.find(key);
  const std::size_t n = it == st.collected.end() ? 0 : it->second.size();
  if (n < static_cast<std::size_t>(st.min_count)) return QuorumVerdict::Waiting;
  const auto& paths = it->second;
  for (std::size_t i = 0; i < paths.size(); ++i)
    for (std::size_t j = i + 1; j < paths.size(); ++j)
      if (share_interior(paths[i], paths[j])) return QuorumVerdict::Safe;
  return QuorumVerdict::Unsafe;
}

std::set<NodeId> quorum_uncorroborated(const RrepQuorumState& st, const DiscoveryKey& key) {
  std::set<NodeId> out;
  auto it = st.collected.find(key);
  if (it == st.collected.end()) return out;
  const auto& paths = it->second;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    bool corroborated = false;
    for (std::size_t j = 0; j < paths.size() && !corroborated; ++j)
      if (i != j && share_interior(paths[i], paths[j])) corroborated = true;
    if (!corroborated)
      for (NodeId n : interior(paths[i])) out.insert(n);
  }
  return out;
}

int hop_distance(const Topology& topo, NodeId from, NodeId to) {
  if (from == to) return 0;
  std::map<NodeId, int> distmap;
  std::queue<NodeId> q;
  distmap[from] = 0;
  q.push(from);
  while (!q.empty()) {
    const NodeId u = q.front();
    q.pop();
    for (NodeId v : neighbors(topo, u)) {
      if (distmap.count(v)) continue;
      distmap[v] = distmap[u] + 1;
      if (v == to) return distmap[v];
      q.push(v);
    }
  }
  return -1;
}

std::set<NodeId> ack_audit(const AckWatch& watch,
                           const std::set<std::pair<int, NodeId>>& observed_forwards,
                           const std::set<int>& received_acks,
                           const Topology& topo, int now) {
  std::set<NodeId> suspects;
  for (const auto& [payload, pkt] : watch.pending) {
    if (pkt.deadline > now) continue;
    if (received_acks.count(payload)) continue;
    for (NodeId f : pkt.expected_forwarders) {
      const int d = hop_distance(topo, watch.auditor, f);
      if (d < 0 || d > watch.overhear_k) continue;  // beyond earshot
      if (!observed_forwards.count({payload, f})) suspects.insert(f);
    }
  }
  return suspects;
}

void update_position(PositionTable& ptab, NodeId n, const Vec2& pos, int time) {
  auto it = ptab.records.find(n);
  if (it != ptab.records.end() && it->second.time > time) return;
  ptab.records[n] = PositionRecord{pos, time};
}

LinkVerdict verify_link_claim(const PositionTable& ptab, const LinkKey& claim) {
  auto a = ptab.records.find(claim.first);
  auto b = ptab.records.find(claim.second);
  if (a == ptab.records.end() || b == ptab.records.end())
    return LinkVerdict::Indeterminate;
  const double d = dist(a->second.pos, b->second.pos);
  return d > ptab.max_range + ptab.slack ? LinkVerdict::Flagged : LinkVerdict::Plausible;
}

}  // namespace manet
