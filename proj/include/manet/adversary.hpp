#ifndef MANET_ADVERSARY_HPP
#define MANET_ADVERSARY_HPP

#include <optional>
#include <set>
#include <vector>

#include "manet/routing.hpp"

namespace manet {

enum class AttackKind { Flooding, Blackhole, Misrelay, LinkSpoof };

const char* to_string(AttackKind k);

struct AttackProfile {
  NodeId node = 0;
  AttackKind kind = AttackKind::Flooding;

  // Flooding
  double rate = 0.0;               // RREQs per step
  NodeId fake_dst = 0;             // nonexistent destination
  std::optional<NodeId> spoof_id;  // impersonated origin

  // Blackhole
  int delta = 1;  // sequence inflation over the request's dst_seq

  // Misrelay
  NodeId partner = 0;
  bool modify = false;  // false: drop, true: zero dst_seq and forward

  // LinkSpoof
  NodeId spoof_target = 0;    // node whose relay selection is attacked
  NodeId fake_neighbor = 0;   // two-hop node claimed as direct

  bool operator==(const AttackProfile&) const = default;
};

// Per-attacker mutable state, engine-owned.
struct FloodingState {
  double accumulator = 0.0;
  int next_broadcast_id = 1;
};

enum class MisrelayAction { ForwardUnmodified, Drop, Modify };

// Emits floor(accumulated rate) RREQs for the nonexistent destination this
// step, carrying the spoofed origin when configured.
std::vector<ControlMessage> act_flooding(const AttackProfile& p, FloodingState& st);

// Immediate fake RREP claiming direct adjacency to the requested target,
// with the request's sequence number inflated by delta.
ControlMessage act_blackhole(const AttackProfile& p, const ControlMessage& rreq);

// Innocent unless the message came from the collusion partner.
MisrelayAction act_misrelay(const AttackProfile& p, const ControlMessage& m);

// Apply the Modify corruption in place.
void misrelay_corrupt(ControlMessage& m);

// True link set plus the fabricated link, advertised with the attacker's
// real position (position fields are trusted in this model).
ControlMessage act_linkspoof(const AttackProfile& p, const std::set<LinkKey>& true_links,
                             const Vec2& true_pos, int step, int broadcast_id);

}  // namespace manet

#endif
