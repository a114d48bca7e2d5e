#include "manet/netmodel.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace manet {

double dist(const Vec2& a, const Vec2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

const NodeState& Topology::node(NodeId n) const {
  auto it = nodes.find(n);
  if (it == nodes.end()) throw std::invalid_argument("unknown node id " + std::to_string(n));
  return it->second;
}

NodeState& Topology::node(NodeId n) {
  auto it = nodes.find(n);
  if (it == nodes.end()) throw std::invalid_argument("unknown node id " + std::to_string(n));
  return it->second;
}

bool Topology::connected(NodeId a, NodeId b) const {
  if (a == b) return false;
  const LinkKey key = make_link_key(a, b);
  if (forced_down.count(key)) return false;
  if (mode == AdjacencyMode::Explicit) {
    auto it = links.find(key);
    return it != links.end() && it->second.up;
  }
  auto it = links.find(key);
  if (it != links.end() && !it->second.up) return false;
  return dist(node(a).pos, node(b).pos) <= radio_range;
}

std::vector<LinkSpec> Topology::effective_links(double default_capacity) const {
  std::vector<LinkSpec> out;
  if (mode == AdjacencyMode::Explicit) {
    for (const auto& [key, link] : links)
      if (link.up && !forced_down.count(key)) out.push_back(link);
    return out;
  }
  for (auto a = nodes.begin(); a != nodes.end(); ++a) {
    auto b = a;
    for (++b; b != nodes.end(); ++b) {
      if (connected(a->first, b->first))
        out.push_back(LinkSpec{make_link_key(a->first, b->first), default_capacity, true});
    }
  }
  return out;
}

std::set<NodeId> neighbors(const Topology& topo, NodeId n) {
  if (!topo.has_node(n)) throw std::invalid_argument("unknown node id " + std::to_string(n));
  std::set<NodeId> out;
  for (const auto& [id, st] : topo.nodes)
    if (id != n && topo.connected(n, id)) out.insert(id);
  return out;
}

void step_mobility(Topology& topo, Rng& rng) {
  for (auto& [id, st] : topo.nodes) {
    if (st.speed <= 0.0) continue;
    const double d = dist(st.pos, st.waypoint);
    if (d <= st.speed) {
      st.pos = st.waypoint;
      st.waypoint.x = rng.uniform_real(0.0, topo.width);
      st.waypoint.y = rng.uniform_real(0.0, topo.height);
    } else {
      st.pos.x += (st.waypoint.x - st.pos.x) / d * st.speed;
      st.pos.y += (st.waypoint.y - st.pos.y) / d * st.speed;
    }
  }
}

ClusterAssignment elect_clusterheads(Topology& topo, const ElectionWeights& w) {
  ClusterAssignment out;
  std::map<NodeId, double> score;
  for (const auto& [id, st] : topo.nodes)
    score[id] = w.c1 * static_cast<double>(neighbors(topo, id).size()) - w.c2 * st.speed;

  std::set<NodeId> unassigned;
  for (const auto& [id, st] : topo.nodes) unassigned.insert(id);

  int next_cluster = 1;
  while (!unassigned.empty()) {
    // highest score wins, ties to the lowest id
    NodeId head = *unassigned.begin();
    for (NodeId cand : unassigned)
      if (score[cand] > score[head]) head = cand;

    const int cid = next_cluster++;
    out.cluster_of[head] = cid;
    out.head_of[cid] = head;
    unassigned.erase(head);
    for (NodeId m : neighbors(topo, head)) {
      if (unassigned.count(m)) {
        out.cluster_of[m] = cid;
        unassigned.erase(m);
      }
    }
  }

  for (auto& [id, st] : topo.nodes) {
    st.cluster_id = out.cluster_of.at(id);
    st.is_clusterhead = out.head_of.count(*st.cluster_id) && out.head_of.at(*st.cluster_id) == id;
  }
  return out;
}

std::set<NodeId> one_hop_neighbors(const std::set<LinkKey>& claims, NodeId n) {
  std::set<NodeId> out;
  for (const auto& [a, b] : claims) {
    if (a == n) out.insert(b);
    if (b == n) out.insert(a);
  }
  return out;
}

std::set<NodeId> two_hop_neighbors(const std::set<LinkKey>& claims, NodeId n) {
  const std::set<NodeId> one = one_hop_neighbors(claims, n);
  std::set<NodeId> out;
  for (NodeId m : one)
    for (NodeId t : one_hop_neighbors(claims, m))
      if (t != n && !one.count(t)) out.insert(t);
  return out;
}

}  // namespace manet
