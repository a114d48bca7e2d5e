#include "manet/adversary.hpp"

#include <cmath>

namespace manet {

const char* to_string(AttackKind k) {
  switch (k) {
    case AttackKind::Flooding: return "flooding";
    case AttackKind::Blackhole: return "blackhole";
    case AttackKind::Misrelay: return "misrelay";
    case AttackKind::LinkSpoof: return "linkspoof";
  }
  return "?";
}

std::vector<ControlMessage> act_flooding(const AttackProfile& p, FloodingState& st) {
  st.accumulator += p.rate;
  int count = static_cast<int>(std::floor(st.accumulator));
  st.accumulator -= count;

  std::vector<ControlMessage> out;
  out.reserve(count);
  const NodeId origin = p.spoof_id.value_or(p.node);
  for (int i = 0; i < count; ++i) {
    ControlMessage m;
    m.kind = MsgKind::RREQ;
    m.origin = origin;
    m.target = p.fake_dst;
    m.broadcast_id = st.next_broadcast_id++;
    m.dst_seq = 0;
    m.path = {origin};
    m.hop_count = 0;
    out.push_back(m);
  }
  return out;
}

ControlMessage act_blackhole(const AttackProfile& p, const ControlMessage& rreq) {
  ControlMessage rep;
  rep.kind = MsgKind::RREP;
  rep.origin = rreq.target;
  rep.target = rreq.origin;
  rep.broadcast_id = rreq.broadcast_id;
  rep.dst_seq = rreq.dst_seq + p.delta;
  rep.replier = p.node;
  rep.path = {rreq.target, p.node};  // claims attacker sits next to the target
  rep.hop_count = 1;
  rep.route.assign(rreq.path.rbegin(), rreq.path.rend());
  return rep;
}

MisrelayAction act_misrelay(const AttackProfile& p, const ControlMessage& m) {
  if (prev_hop(m) != p.partner) return MisrelayAction::ForwardUnmodified;
  return p.modify ? MisrelayAction::Modify : MisrelayAction::Drop;
}

void misrelay_corrupt(ControlMessage& m) { m.dst_seq = 0; }

ControlMessage act_linkspoof(const AttackProfile& p, const std::set<LinkKey>& true_links,
                             const Vec2& true_pos, int step, int broadcast_id) {
  ControlMessage m;
  m.kind = MsgKind::LINKADV;
  m.origin = p.node;
  m.target = 0;
  m.broadcast_id = broadcast_id;
  m.path = {p.node};
  m.claimed_links = true_links;
  m.claimed_links.insert(make_link_key(p.node, p.fake_neighbor));
  m.pos = true_pos;
  m.pos_time = step;
  return m;
}

}  // namespace manet
