#ifndef MANET_NETMODEL_HPP
#define MANET_NETMODEL_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "manet/rng.hpp"

namespace manet {

using NodeId = int;

// Unordered node pair, stored normalized (min, max).
using LinkKey = std::pair<NodeId, NodeId>;

inline LinkKey make_link_key(NodeId a, NodeId b) {
  return a < b ? LinkKey{a, b} : LinkKey{b, a};
}

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Vec2&) const = default;
};

double dist(const Vec2& a, const Vec2& b);

struct NodeState {
  NodeId id = 0;
  Vec2 pos;
  Vec2 waypoint;
  double speed = 0.0;  // meters per step
  std::optional<int> cluster_id;
  bool is_clusterhead = false;
  bool operator==(const NodeState&) const = default;
};

struct LinkSpec {
  LinkKey endpoints;
  double capacity = 0.0;  // bandwidth units
  bool up = true;
  bool operator==(const LinkSpec&) const = default;
};

enum class AdjacencyMode { UnitDisk, Explicit };

// Node set plus either explicit capacitated links or unit-disk adjacency
// over node positions. Scenarios with declared links use Explicit mode,
// which makes attack topologies bit-reproducible.
struct Topology {
  AdjacencyMode mode = AdjacencyMode::UnitDisk;
  std::map<NodeId, NodeState> nodes;
  std::map<LinkKey, LinkSpec> links;
  double radio_range = 250.0;
  double width = 1000.0;   // mobility bounding box
  double height = 1000.0;
  std::set<LinkKey> forced_down;  // failed pairs in unit-disk mode

  bool operator==(const Topology&) const = default;

  bool has_node(NodeId n) const { return nodes.count(n) != 0; }
  const NodeState& node(NodeId n) const;
  NodeState& node(NodeId n);

  // True when a and b are currently adjacent.
  bool connected(NodeId a, NodeId b) const;

  // Effective link set: declared links in Explicit mode, derived
  // neighbor pairs (with default_capacity) in UnitDisk mode.
  std::vector<LinkSpec> effective_links(double default_capacity) const;
};

struct Commodity {
  int cluster_id = 0;  // g, unique per commodity
  NodeId src = 0;
  NodeId dst = 0;
  double demand = 0.0;
  int start_step = 0;  // first step this commodity emits data
  bool operator==(const Commodity&) const = default;
};

struct ClusterAssignment {
  std::map<NodeId, int> cluster_of;
  std::map<int, NodeId> head_of;
};

struct ElectionWeights {
  double c1 = 1.0;  // degree coefficient
  double c2 = 1.0;  // speed coefficient
};

// All nodes within radio range of n (unit-disk), or linked by an up link
// (explicit mode). Failed pairs never count. Throws on unknown id.
std::set<NodeId> neighbors(const Topology& topo, NodeId n);

// Random-waypoint step: every node with speed > 0 advances at most `speed`
// toward its waypoint and draws a fresh waypoint in the bounding box when
// it arrives.
void step_mobility(Topology& topo, Rng& rng);

// Deterministic clusterhead election. Score = c1*degree - c2*speed; the
// highest-score unassigned node (ties to lowest id) becomes head of a new
// cluster and absorbs its unassigned neighbors, until the node set is
// partitioned.
ClusterAssignment elect_clusterheads(Topology& topo, const ElectionWeights& w);

// Nodes reachable in exactly two hops of `claims` from n, excluding n and
// its one-hop neighbors. Works on advertised links, so spoofed claims count.
std::set<NodeId> two_hop_neighbors(const std::set<LinkKey>& claims, NodeId n);

// One-hop neighbor set over an advertised link set.
std::set<NodeId> one_hop_neighbors(const std::set<LinkKey>& claims, NodeId n);

}  // namespace manet

#endif
