#include "manet/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "manet/sentinel.hpp"

namespace manet {

const char* to_string(Detector d) {
  switch (d) {
    case Detector::Flood: return "flood";
    case Detector::Quorum: return "quorum";
    case Detector::Confirm: return "confirm";
    case Detector::Ack: return "ack";
    case Detector::LinkSpoof: return "linkspoof";
  }
  return "?";
}

namespace {

const char* kind_name(EventKind k) {
  switch (k) {
    case EventKind::DetectorOn: return "detector_on";
    case EventKind::LinkFail: return "link_fail";
    case EventKind::DataSent: return "data_sent";
    case EventKind::DataDelivered: return "data_delivered";
    case EventKind::DataDropped: return "data_dropped";
    case EventKind::ControlDelivered: return "control_delivered";
    case EventKind::RouteDiscovery: return "route_discovery";
    case EventKind::RouteInstall: return "route_install";
    case EventKind::RouteSwitch: return "route_switch";
    case EventKind::BlacklistInsert: return "blacklist_insert";
    case EventKind::Accuse: return "accuse";
    case EventKind::QuorumUnsafe: return "quorum_unsafe";
    case EventKind::QuorumSafe: return "quorum_safe";
    case EventKind::ConfirmOk: return "confirm_ok";
    case EventKind::ConfirmMismatch: return "confirm_mismatch";
    case EventKind::ConfirmTimeout: return "confirm_timeout";
    case EventKind::FloodEmit: return "flood_emit";
    case EventKind::FakeRrep: return "fake_rrep";
    case EventKind::FakeClaim: return "fake_claim";
    case EventKind::AttackerDrop: return "attacker_drop";
    case EventKind::AttackerModify: return "attacker_modify";
    case EventKind::MprChange: return "mpr_change";
    case EventKind::UtilSample: return "util_sample";
  }
  return "?";
}

std::string join_path(const std::vector<NodeId>& p) {
  std::string s;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) s += '-';
    s += std::to_string(p[i]);
  }
  return s;
}

struct PacketMeta {
  int g = 0;
  NodeId src = 0;
  NodeId dst = 0;
  double carried = 0.0;  // bandwidth units this packet stands for
};

struct Envelope {
  NodeId from = 0;
  NodeId to = 0;
  long long seq = 0;  // global emission order, the delivery tie-break
  ControlMessage msg;
};

struct DiscoveryState {
  int bid = 0;
  int last_step = 0;
  bool active = false;
};

struct NodeCtx {
  RoutingTable table;
  const AttackProfile* attack = nullptr;
  FloodingState flood;
  BlacklistState blacklist;
  RrepQuorumState quorum;
  std::map<DiscoveryKey, std::map<std::vector<NodeId>, int>> quorum_seq;
  ConfirmationState confirms;
  // full claim and its sequence number per pending confirmation
  std::map<DiscoveryKey, std::pair<std::vector<NodeId>, int>> confirm_claim;
  std::map<NodeId, DiscoveryState> discovery;  // by destination
  AckWatch watch;
  std::set<std::pair<int, NodeId>> observed_forwards;
  std::set<int> received_acks;
  std::set<NodeId> accused_by_ack;
  std::map<NodeId, std::set<LinkKey>> claims_by;  // advertiser -> claims
  PositionTable positions;
  std::set<NodeId> mprs;
  std::set<std::pair<NodeId, LinkKey>> flagged_claims;
  int next_adv_bid = 1;
};

struct SourceState {
  Commodity c;
  double acc = 0.0;
  std::vector<int> buffered;  // payload ids waiting for a route
  std::vector<NodeId> primary, backup;  // static mode
  bool on_backup = false;
};

class Sim {
 public:
  Sim(const Scenario& sc, const SimConfig& cfg) : cfg_(cfg), topo_(sc.topology), rng_(static_cast<std::uint64_t>(cfg.seed)) {
    topo_.radio_range = cfg.range;
    for (const auto& [id, n] : topo_.nodes) {
      NodeCtx& ctx = nodes_[id];
      ctx.table.owner = id;
      ctx.blacklist.window_len = cfg.flood_window;
      ctx.blacklist.threshold = cfg.flood_threshold;
      ctx.quorum.min_count = cfg.quorum_min_count;
      ctx.confirms.timeout = cfg.confirm_timeout;
      ctx.watch.auditor = id;
      ctx.watch.overhear_k = cfg.ack_k;
      ctx.positions.max_range = cfg.range;
      ctx.positions.slack = cfg.gps_slack;
    }
    NodeId max_id = topo_.nodes.rbegin()->first;
    for (const auto& p : sc.attackers) {
      profiles_.push_back(p);
    }
    for (auto& p : profiles_) {
      if (p.kind == AttackKind::Flooding && p.fake_dst == 0) p.fake_dst = max_id + 1;
      nodes_.at(p.node).attack = &p;
      // keep spoofed discovery ids clear of genuine per-node counters
      nodes_.at(p.node).flood.next_broadcast_id = 1000000 + p.node * 1000;
    }
    for (const auto& c : sc.commodities) {
      SourceState st;
      st.c = c;
      sources_.push_back(st);
    }
    failures_ = sc.failures;

    if (cfg_.flood_on) detector_on(Detector::Flood);
    if (cfg_.ack_on) detector_on(Detector::Ack);
    if (cfg_.gps_on) detector_on(Detector::LinkSpoof);
    bool any_quorum = cfg_.blackhole == BlackholeDefense::Quorum;
    bool any_confirm = cfg_.blackhole == BlackholeDefense::Confirm;
    for (const auto& [id, mode] : cfg_.blackhole_node) {
      any_quorum = any_quorum || mode == BlackholeDefense::Quorum;
      any_confirm = any_confirm || mode == BlackholeDefense::Confirm;
    }
    if (any_quorum) detector_on(Detector::Quorum);
    if (any_confirm) detector_on(Detector::Confirm);

    if (cfg_.route_mode == RouteMode::Static) compute_static_routes();
  }

  RunResult finish(const std::vector<AttackProfile>& ground_truth) {
    const int horizon = cfg_.steps + cfg_.drain_cap;
    for (step_ = 0; step_ < horizon; ++step_) {
      if (step_ >= cfg_.steps && wire_.empty() && in_flight() == 0) break;
      apply_failures();
      if (mobile_) step_mobility(topo_, rng_);
      deliver();
      process();
      emit_data();
      end_of_step();
    }
    RunResult out;
    out.metrics = compute_metrics(events_, ground_truth);
    out.metrics.control_msgs = control_msgs_;
    out.events = std::move(events_);
    out.steps = std::move(step_rows_);
    for (const auto& s : sources_) {
      CommodityStats cs;
      cs.g = s.c.cluster_id;
      cs.src = s.c.src;
      cs.dst = s.c.dst;
      cs.sent = sent_by_g_[s.c.cluster_id];
      cs.delivered = delivered_by_g_[s.c.cluster_id];
      cs.dropped = dropped_by_g_[s.c.cluster_id];
      out.commodities.push_back(cs);
    }
    return out;
  }

  void set_mobile() {
    for (const auto& [id, n] : topo_.nodes)
      if (n.speed > 0) mobile_ = true;
  }

 private:
  // ---- bookkeeping ----------------------------------------------------------

  Event& log(EventKind k) {
    Event e;
    e.step = step_;
    e.kind = k;
    events_.push_back(std::move(e));
    return events_.back();
  }

  void detector_on(Detector d) {
    Event& e = log(EventKind::DetectorOn);
    e.detector = d;
  }

  void accuse(Detector d, NodeId accuser, NodeId accused) {
    if (!accusations_.insert({d, accuser, accused}).second) return;
    Event& e = log(EventKind::Accuse);
    e.detector = d;
    e.a = accuser;
    e.b = accused;
  }

  long long in_flight() const { return sent_ - delivered_ - dropped_; }

  BlackholeDefense mode_of(NodeId n) const {
    auto it = cfg_.blackhole_node.find(n);
    return it == cfg_.blackhole_node.end() ? cfg_.blackhole : it->second;
  }

  double capacity_of(const LinkKey& key) const {
    if (topo_.mode == AdjacencyMode::Explicit) {
      auto it = topo_.links.find(key);
      if (it != topo_.links.end()) return it->second.capacity;
    }
    return cfg_.capacity_default;
  }

  // ---- phase 1+2: failures, mobility ---------------------------------------

  void apply_failures() {
    for (const auto& f : failures_) {
      if (f.step != step_) continue;
      if (topo_.mode == AdjacencyMode::Explicit) {
        auto it = topo_.links.find(f.link);
        if (it != topo_.links.end()) it->second.up = false;
      }
      topo_.forced_down.insert(f.link);
      Event& e = log(EventKind::LinkFail);
      e.a = f.link.first;
      e.b = f.link.second;
    }
  }

  // ---- phase 3: delivery ----------------------------------------------------

  void deliver() {
    std::vector<Envelope> wire = std::move(wire_);
    wire_.clear();
    std::stable_sort(wire.begin(), wire.end(), [](const Envelope& x, const Envelope& y) {
      return std::tie(x.to, x.from, x.seq) < std::tie(y.to, y.from, y.seq);
    });
    link_load_.clear();
    for (auto& env : wire) {
      if (!topo_.connected(env.from, env.to)) {
        if (env.msg.kind == MsgKind::DATA) drop_data(env.msg.payload_id, env.from, "link_down");
        continue;
      }
      if (env.msg.kind == MsgKind::DATA) {
        const PacketMeta& meta = meta_.at(env.msg.payload_id);
        link_load_[make_link_key(env.from, env.to)] += meta.carried;
        overhear(env.msg.payload_id, env.from);
      } else {
        ++control_msgs_;
      }
      inboxes_[env.to].push_back(std::move(env));
    }
  }

  void overhear(int payload, NodeId forwarder) {
    if (!cfg_.ack_on) return;
    for (auto& [id, ctx] : nodes_) {
      if (!ctx.watch.pending.count(payload)) continue;
      const int d = hop_distance(topo_, id, forwarder);
      if (d >= 0 && d <= ctx.watch.overhear_k)
        ctx.observed_forwards.insert({payload, forwarder});
    }
  }

  // ---- phase 4: processing --------------------------------------------------

  void process() {
    std::map<NodeId, std::vector<Envelope>> inboxes = std::move(inboxes_);
    inboxes_.clear();
    for (auto& [id, box] : inboxes)
      for (auto& env : box) handle(nodes_.at(id), env);

    // autonomous attacker and advertisement traffic
    for (auto& [id, ctx] : nodes_) {
      if (ctx.attack && ctx.attack->kind == AttackKind::Flooding) {
        auto msgs = act_flooding(*ctx.attack, ctx.flood);
        if (!msgs.empty()) {
          Event& e = log(EventKind::FloodEmit);
          e.a = id;
          e.value = static_cast<double>(msgs.size());
        }
        for (auto& m : msgs) broadcast(id, m, 0);
      }
      if (cfg_.linkadv_period > 0 && step_ % cfg_.linkadv_period == 0) emit_linkadv(id, ctx);
    }

    for (auto& [id, ctx] : nodes_) {
      sweep_confirm_timeouts(ctx);
      if (cfg_.ack_on) sweep_ack_audit(ctx);
      if (cfg_.gps_on && !ctx.attack) verify_claims(ctx);
    }
    if (cfg_.linkadv_period > 0) recompute_mprs();
  }

  void emit_linkadv(NodeId id, NodeCtx& ctx) {
    std::set<LinkKey> true_links;
    for (NodeId nb : neighbors(topo_, id)) true_links.insert(make_link_key(id, nb));
    ControlMessage m;
    if (ctx.attack && ctx.attack->kind == AttackKind::LinkSpoof) {
      m = act_linkspoof(*ctx.attack, true_links, topo_.node(id).pos, step_, ctx.next_adv_bid++);
      Event& e = log(EventKind::FakeClaim);
      e.a = id;
      e.path = {id, ctx.attack->fake_neighbor};
    } else {
      m.kind = MsgKind::LINKADV;
      m.origin = id;
      m.broadcast_id = ctx.next_adv_bid++;
      m.path = {id};
      m.claimed_links = true_links;
      m.pos = topo_.node(id).pos;
      m.pos_time = step_;
    }
    ctx.table.seen_advs.insert({m.origin, m.broadcast_id});
    broadcast(id, m, 0);
  }

  void handle(NodeCtx& ctx, Envelope& env) {
    switch (env.msg.kind) {
      case MsgKind::RREQ: handle_rreq_msg(ctx, env); break;
      case MsgKind::RREP: handle_unicast(ctx, env); break;
      case MsgKind::CREQ: handle_unicast(ctx, env); break;
      case MsgKind::CREP: handle_unicast(ctx, env); break;
      case MsgKind::ACK: handle_unicast(ctx, env); break;
      case MsgKind::DATA: handle_unicast(ctx, env); break;
      case MsgKind::LINKADV: handle_linkadv(ctx, env); break;
    }
  }

  void handle_rreq_msg(NodeCtx& ctx, Envelope& env) {
    ControlMessage& m = env.msg;
    const NodeId self = ctx.table.owner;
    if (ctx.attack && ctx.attack->kind == AttackKind::Blackhole) {
      ControlMessage rep = act_blackhole(*ctx.attack, m);
      Event& e = log(EventKind::FakeRrep);
      e.a = self;
      e.b = m.origin;
      unicast(self, rep);
      return;
    }
    if (cfg_.flood_on && ctx.blacklist.blacklist.count(m.origin)) return;
    RreqActions actions = handle_rreq(ctx.table, m);
    if (!actions.duplicate && !actions.loop_suppressed && cfg_.flood_on) {
      const MonitorVerdict v = monitor_rreq_rate(ctx.blacklist, m.origin, step_);
      if (v.newly_listed) {
        ++blacklist_count_;
        Event& e = log(EventKind::BlacklistInsert);
        e.a = self;
        e.b = m.origin;
        accuse(Detector::Flood, self, m.origin);
      }
      if (v.blacklisted) return;  // the crossing packet is discarded too
    }
    if (actions.reply) unicast(self, *actions.reply);
    if (actions.forward) broadcast(self, *actions.forward, env.from);
  }

  void handle_linkadv(NodeCtx& ctx, Envelope& env) {
    ControlMessage& m = env.msg;
    const NodeId self = ctx.table.owner;
    if (m.origin == self) return;
    if (!ctx.table.seen_advs.insert({m.origin, m.broadcast_id}).second) return;
    update_position(ctx.positions, m.origin, m.pos, m.pos_time);
    ctx.claims_by[m.origin] = m.claimed_links;
    ControlMessage fwd = m;
    fwd.path.push_back(self);
    broadcast(self, fwd, env.from);
  }

  // Unicast walk: route excludes the emitter; route[route_pos] is the node
  // processing the message, route.back() its final recipient.
  void handle_unicast(NodeCtx& ctx, Envelope& env) {
    ControlMessage& m = env.msg;
    const NodeId self = ctx.table.owner;
    if (m.route.empty() || m.route_pos >= static_cast<int>(m.route.size()) ||
        m.route[m.route_pos] != self) {
      if (m.kind == MsgKind::DATA) drop_data(m.payload_id, self, "misrouted");
      return;
    }
    const bool final_hop = m.route_pos + 1 == static_cast<int>(m.route.size());
    if (final_hop) {
      consume(ctx, env);
      return;
    }
    // transit duties
    if (ctx.attack && ctx.attack->kind == AttackKind::Blackhole) {
      if (m.kind == MsgKind::DATA) {
        Event& e = log(EventKind::AttackerDrop);
        e.a = self;
        e.payload = m.payload_id;
        drop_data(m.payload_id, self, "blackhole");
      }
      return;  // swallows every unicast routed through it
    }
    if (ctx.attack && ctx.attack->kind == AttackKind::Misrelay && m.kind == MsgKind::DATA) {
      switch (act_misrelay(*ctx.attack, m)) {
        case MisrelayAction::Drop: {
          Event& e = log(EventKind::AttackerDrop);
          e.a = self;
          e.payload = m.payload_id;
          drop_data(m.payload_id, self, "misrelay");
          return;
        }
        case MisrelayAction::Modify: {
          Event& e = log(EventKind::AttackerModify);
          e.a = self;
          e.payload = m.payload_id;
          misrelay_corrupt(m);
          break;
        }
        case MisrelayAction::ForwardUnmodified: break;
      }
    }
    if (m.kind == MsgKind::RREP) {
      // forward-route setup; nodes that vet routes install only vetted ones
      if (mode_of(self) == BlackholeDefense::Off) {
        if (handle_rrep(ctx.table, m) == RrepResult::Accepted) {
          Event& e = log(EventKind::RouteInstall);
          e.a = self;
          e.b = m.origin;
          e.path = ctx.table.routes.at(m.origin).full_path;
        }
      }
      m.path.push_back(self);
    }
    if (m.kind == MsgKind::RREQ || m.kind == MsgKind::DATA) m.path.push_back(self);
    m.route_pos += 1;
    enqueue(self, m.route[m.route_pos], m);
  }

  void consume(NodeCtx& ctx, Envelope& env) {
    switch (env.msg.kind) {
      case MsgKind::RREP: consume_rrep(ctx, env.msg); break;
      case MsgKind::CREQ: consume_creq(ctx, env.msg); break;
      case MsgKind::CREP: consume_crep(ctx, env.msg); break;
      case MsgKind::ACK: ctx.received_acks.insert(env.msg.payload_id); break;
      case MsgKind::DATA: consume_data(ctx, env.msg); break;
      default: break;
    }
  }

  void install_route(NodeCtx& ctx, NodeId dst, const std::vector<NodeId>& full, int seq) {
    const int hops = static_cast<int>(full.size()) - 1;
    auto it = ctx.table.routes.find(dst);
    if (it != ctx.table.routes.end()) {
      const RouteEntry& cur = it->second;
      if (!(seq > cur.dst_seq || (seq == cur.dst_seq && hops < cur.hop_count))) return;
    }
    ctx.table.routes[dst] = RouteEntry{dst, full[1], hops, seq, full};
    ctx.discovery[dst].active = false;
    Event& e = log(EventKind::RouteInstall);
    e.a = ctx.table.owner;
    e.b = dst;
    e.path = full;
  }

  void consume_rrep(NodeCtx& ctx, const ControlMessage& m) {
    const NodeId self = ctx.table.owner;
    const NodeId dst = m.origin;
    const std::vector<NodeId> full = rrep_full_path(ctx.table, m);
    if (full.size() < 2) return;
    std::set<NodeId> uniq(full.begin(), full.end());
    if (uniq.size() != full.size()) return;

    const BlackholeDefense mode = mode_of(self);
    const bool direct_dest_reply = m.replier == dst && full.size() == 2;
    if (mode == BlackholeDefense::Off || direct_dest_reply ||
        (mode == BlackholeDefense::Confirm && m.replier == dst)) {
      if (handle_rrep(ctx.table, m) == RrepResult::Accepted) {
        ctx.discovery[dst].active = false;
        Event& e = log(EventKind::RouteInstall);
        e.a = self;
        e.b = dst;
        e.path = ctx.table.routes.at(dst).full_path;
      }
      return;
    }

    const DiscoveryKey key{dst, m.broadcast_id};
    if (mode == BlackholeDefense::Quorum) {
      auto& seq_of = ctx.quorum_seq[key];
      auto it = seq_of.find(full);
      if (it != seq_of.end()) {
        it->second = std::max(it->second, m.dst_seq);
      } else {
        seq_of[full] = m.dst_seq;
        quorum_add(ctx.quorum, key, full);
      }
      switch (quorum_check(ctx.quorum, key)) {
        case QuorumVerdict::Waiting: return;
        case QuorumVerdict::Unsafe: {
          Event& e = log(EventKind::QuorumUnsafe);
          e.a = self;
          e.b = dst;
          return;
        }
        case QuorumVerdict::Safe: break;
      }
      resolve_quorum(ctx, key);
      return;
    }

    // Confirm mode, intermediate replier: hold the claim and ask the
    // replier's next hop for its own route to the destination.
    auto rit = std::find(full.begin(), full.end(), m.replier);
    if (rit == full.end() || rit + 1 == full.end()) return;
    if (ctx.confirms.pending.count(key)) return;  // one candidate at a time
    const std::size_t ri = static_cast<std::size_t>(rit - full.begin());
    const NodeId confirmer = full[ri + 1];
    std::vector<NodeId> suffix(full.begin() + ri + 1, full.end());
    ctx.confirms.pending[key] = PendingConfirmation{suffix, m.replier, step_ + cfg_.confirm_timeout};
    ctx.confirm_claim[key] = {full, m.dst_seq};

    ControlMessage creq;
    creq.kind = MsgKind::CREQ;
    creq.origin = self;
    creq.target = confirmer;
    creq.broadcast_id = m.broadcast_id;
    creq.replier = m.replier;
    creq.path = full;  // claim under test
    creq.route.assign(full.begin() + 1, full.begin() + ri + 2);
    unicast(self, creq);
  }

  void resolve_quorum(NodeCtx& ctx, const DiscoveryKey& key) {
    const NodeId self = ctx.table.owner;
    const auto& paths = ctx.quorum.collected.at(key);
    auto interior_shared = [](const std::vector<NodeId>& a, const std::vector<NodeId>& b) {
      std::set<NodeId> ia(a.begin() + 1, a.end() - 1);
      for (std::size_t i = 1; i + 1 < b.size(); ++i)
        if (ia.count(b[i])) return true;
      return false;
    };
    for (NodeId suspect : quorum_uncorroborated(ctx.quorum, key))
      accuse(Detector::Quorum, self, suspect);

    const std::vector<NodeId>* best = nullptr;
    int best_seq = 0;
    for (const auto& p : paths) {
      bool corroborated = false;
      for (const auto& q : paths)
        if (&p != &q && interior_shared(p, q)) corroborated = true;
      if (!corroborated) continue;
      const int seq = ctx.quorum_seq.at(key).at(p);
      if (!best || seq > best_seq ||
          (seq == best_seq && (p.size() < best->size() || (p.size() == best->size() && p < *best)))) {
        best = &p;
        best_seq = seq;
      }
    }
    if (!best) return;
    Event& e = log(EventKind::QuorumSafe);
    e.a = self;
    e.b = key.first;
    e.path = *best;
    install_route(ctx, key.first, *best, best_seq);
    ctx.quorum.collected.erase(key);
    ctx.quorum_seq.erase(key);
  }

  void consume_creq(NodeCtx& ctx, const ControlMessage& m) {
    const NodeId self = ctx.table.owner;
    const NodeId dst = m.path.empty() ? 0 : m.path.back();
    ControlMessage crep;
    crep.kind = MsgKind::CREP;
    crep.origin = self;
    crep.target = m.origin;
    crep.broadcast_id = m.broadcast_id;
    crep.replier = m.replier;
    if (ctx.attack) {
      // colluders vouch for whatever they are asked about
      auto sit = std::find(m.path.begin(), m.path.end(), self);
      if (sit != m.path.end()) crep.path.assign(sit, m.path.end());
    } else if (dst == self) {
      crep.path = {self};
    } else if (ctx.table.has_route(dst)) {
      crep.path = ctx.table.routes.at(dst).full_path;
    }
    // answer travels back along the hops the question just took
    auto self_it = std::find(m.route.begin(), m.route.end(), self);
    crep.route.assign(m.route.begin(), self_it);
    std::reverse(crep.route.begin(), crep.route.end());
    crep.route.push_back(m.origin);
    unicast(self, crep);
  }

  void consume_crep(NodeCtx& ctx, const ControlMessage& m) {
    const NodeId self = ctx.table.owner;
    // pending confirmations are unique per broadcast id at this node
    for (auto it = ctx.confirms.pending.begin(); it != ctx.confirms.pending.end(); ++it) {
      if (it->first.second != m.broadcast_id || it->second.replier != m.replier) continue;
      const DiscoveryKey key = it->first;
      const auto claim = ctx.confirm_claim.at(key);
      const ConfirmResult r = confirm_route(ctx.confirms, key, m);
      ctx.confirm_claim.erase(key);
      if (r == ConfirmResult::Confirmed) {
        Event& e = log(EventKind::ConfirmOk);
        e.a = self;
        e.b = m.replier;
        install_route(ctx, key.first, claim.first, claim.second);
      } else {
        Event& e = log(EventKind::ConfirmMismatch);
        e.a = self;
        e.b = m.replier;
        accuse(Detector::Confirm, self, m.replier);
      }
      return;
    }
  }

  void consume_data(NodeCtx& ctx, ControlMessage& m) {
    const NodeId self = ctx.table.owner;
    const PacketMeta& meta = meta_.at(m.payload_id);
    if (m.dst_seq == 0) {
      drop_data(m.payload_id, self, "corrupt");
      return;
    }
    ++delivered_;
    ++delivered_by_g_[meta.g];
    Event& e = log(EventKind::DataDelivered);
    e.a = self;
    e.g = meta.g;
    e.payload = m.payload_id;
    if (cfg_.ack_on) {
      ControlMessage ack;
      ack.kind = MsgKind::ACK;
      ack.origin = self;
      ack.target = meta.src;
      ack.payload_id = m.payload_id;
      ack.route.assign(m.path.rbegin(), m.path.rend());
      unicast(self, ack);
    }
  }

  void sweep_confirm_timeouts(NodeCtx& ctx) {
    std::vector<DiscoveryKey> expired;
    for (const auto& [key, pending] : ctx.confirms.pending)
      if (pending.deadline <= step_) expired.push_back(key);
    for (const DiscoveryKey& key : expired) {
      const NodeId replier = ctx.confirms.pending.at(key).replier;
      confirm_route(ctx.confirms, key, std::nullopt);
      ctx.confirm_claim.erase(key);
      Event& e = log(EventKind::ConfirmTimeout);
      e.a = ctx.table.owner;
      e.b = replier;
      accuse(Detector::Confirm, ctx.table.owner, replier);
    }
  }

  void sweep_ack_audit(NodeCtx& ctx) {
    if (ctx.watch.pending.empty()) return;
    for (NodeId s : ack_audit(ctx.watch, ctx.observed_forwards, ctx.received_acks, topo_, step_)) {
      if (ctx.accused_by_ack.insert(s).second) accuse(Detector::Ack, ctx.table.owner, s);
    }
    for (auto it = ctx.watch.pending.begin(); it != ctx.watch.pending.end();) {
      if (it->second.deadline <= step_ || ctx.received_acks.count(it->first))
        it = ctx.watch.pending.erase(it);
      else
        ++it;
    }
  }

  void verify_claims(NodeCtx& ctx) {
    update_position(ctx.positions, ctx.table.owner, topo_.node(ctx.table.owner).pos, step_);
    for (const auto& [advertiser, links] : ctx.claims_by) {
      for (const LinkKey& link : links) {
        if (ctx.flagged_claims.count({advertiser, link})) continue;
        if (verify_link_claim(ctx.positions, link) == LinkVerdict::Flagged) {
          ctx.flagged_claims.insert({advertiser, link});
          accuse(Detector::LinkSpoof, ctx.table.owner, advertiser);
        }
      }
    }
  }

  void recompute_mprs() {
    for (auto& [id, ctx] : nodes_) {
      std::set<NodeId> one_hop = neighbors(topo_, id);
      std::set<LinkKey> claims;
      for (NodeId nb : one_hop) claims.insert(make_link_key(id, nb));
      for (const auto& [adv, links] : ctx.claims_by) claims.insert(links.begin(), links.end());
      const MprSelection sel = select_mprs(one_hop, claims, id);
      if (sel.mprs != ctx.mprs) {
        ctx.mprs = sel.mprs;
        Event& e = log(EventKind::MprChange);
        e.a = id;
        e.path.assign(sel.mprs.begin(), sel.mprs.end());
      }
    }
  }

  // ---- phase 5: data emission ------------------------------------------------

  void compute_static_routes() {
    const LinkTable table = canonical_links(topo_, cfg_.capacity_default);
    const std::vector<int> unit(table.size(), 1);
    for (auto& s : sources_) {
      auto p = weighted_shortest_path(table, unit, s.c.src, s.c.dst);
      if (!p) continue;
      s.primary = *p;
      std::set<LinkKey> used;
      for (std::size_t i = 0; i + 1 < p->size(); ++i)
        used.insert(make_link_key((*p)[i], (*p)[i + 1]));
      auto b = weighted_shortest_path(table, unit, s.c.src, s.c.dst, used);
      if (b) s.backup = *b;
    }
  }

  bool path_alive(const std::vector<NodeId>& p) const {
    if (p.size() < 2) return false;
    for (std::size_t i = 0; i + 1 < p.size(); ++i)
      if (!topo_.connected(p[i], p[i + 1])) return false;
    return true;
  }

  void emit_data() {
    for (auto& s : sources_) {
      if (step_ < cfg_.steps && step_ >= s.c.start_step) {
        s.acc += cfg_.data_rate;
        int n = static_cast<int>(std::floor(s.acc));
        s.acc -= n;
        for (int i = 0; i < n; ++i) {
          const int payload = ++payload_counter_;
          meta_[payload] = PacketMeta{s.c.cluster_id, s.c.src, s.c.dst,
                                      cfg_.data_rate > 0 ? s.c.demand / cfg_.data_rate : s.c.demand};
          ++sent_;
          ++sent_by_g_[s.c.cluster_id];
          Event& e = log(EventKind::DataSent);
          e.a = s.c.src;
          e.g = s.c.cluster_id;
          e.payload = payload;
          s.buffered.push_back(payload);
        }
      }
      if (s.buffered.empty()) continue;

      std::vector<NodeId> route = resolve_route(s);
      if (route.empty()) continue;
      NodeCtx& src = nodes_.at(s.c.src);
      for (int payload : s.buffered) {
        ControlMessage m;
        m.kind = MsgKind::DATA;
        m.origin = s.c.src;
        m.target = s.c.dst;
        m.dst_seq = 1;  // zeroed by in-path corruption
        m.payload_id = payload;
        m.path = {s.c.src};
        m.route.assign(route.begin() + 1, route.end());
        unicast(s.c.src, m);
        if (cfg_.ack_on) {
          WatchedPacket w;
          w.expected_forwarders.assign(route.begin() + 1, route.end() - 1);
          w.deadline = step_ + 2 * static_cast<int>(route.size()) + 2;
          src.watch.pending[payload] = w;
        }
      }
      s.buffered.clear();
    }
  }

  std::vector<NodeId> resolve_route(SourceState& s) {
    if (cfg_.route_mode == RouteMode::Static) {
      if (path_alive(s.primary)) return s.primary;
      if (path_alive(s.backup)) {
        if (!s.on_backup) {
          s.on_backup = true;
          Event& e = log(EventKind::RouteSwitch);
          e.a = s.c.src;
          e.b = s.c.dst;
          e.path = s.backup;
        }
        return s.backup;
      }
      return {};
    }
    NodeCtx& src = nodes_.at(s.c.src);
    auto it = src.table.routes.find(s.c.dst);
    if (it != src.table.routes.end()) {
      if (topo_.connected(s.c.src, it->second.next_hop)) return it->second.full_path;
      src.table.routes.erase(it);  // first hop gone; local knowledge only
    }
    DiscoveryState& d = src.discovery[s.c.dst];
    if (!d.active || step_ - d.last_step >= cfg_.rreq_retry) {
      ControlMessage m = originate_rreq(src.table, s.c.dst);
      d.bid = m.broadcast_id;
      d.last_step = step_;
      d.active = true;
      ++route_discoveries_;
      Event& e = log(EventKind::RouteDiscovery);
      e.a = s.c.src;
      e.b = s.c.dst;
      broadcast(s.c.src, m, 0);
    }
    return {};
  }

  // ---- transport --------------------------------------------------------------

  void enqueue(NodeId from, NodeId to, const ControlMessage& m) {
    wire_.push_back(Envelope{from, to, next_seq_++, m});
  }

  void unicast(NodeId from, ControlMessage m) {
    m.route_pos = 0;
    if (m.route.empty()) return;
    enqueue(from, m.route[0], m);
  }

  void broadcast(NodeId from, const ControlMessage& m, NodeId except) {
    for (NodeId nb : neighbors(topo_, from))
      if (nb != except) enqueue(from, nb, m);
  }

  void drop_data(int payload, NodeId where, const char* reason) {
    const PacketMeta& meta = meta_.at(payload);
    ++dropped_;
    ++dropped_by_g_[meta.g];
    Event& e = log(EventKind::DataDropped);
    e.a = where;
    e.g = meta.g;
    e.payload = payload;
    e.note = reason;
  }

  // ---- phase 6 ---------------------------------------------------------------

  void end_of_step() {
    double util = 0.0;
    for (const auto& [key, load] : link_load_) util = std::max(util, load / capacity_of(key));
    if (util > 0) {
      Event& e = log(EventKind::UtilSample);
      e.value = util;
    }

    long long buffered = 0;
    for (const auto& s : sources_) buffered += static_cast<long long>(s.buffered.size());
    long long traveling = 0;
    for (const auto& env : wire_)
      if (env.msg.kind == MsgKind::DATA) ++traveling;
    if (buffered + traveling != in_flight())
      throw std::logic_error("conservation violated at step " + std::to_string(step_));

    StepRow row;
    row.step = step_;
    row.data_sent = sent_;
    row.data_delivered = delivered_;
    row.data_dropped = dropped_;
    row.in_flight = in_flight();
    row.control_msgs = control_msgs_;
    row.blacklist_events = blacklist_count_;
    row.route_discoveries = route_discoveries_;
    step_rows_.push_back(row);
  }

  SimConfig cfg_;
  Topology topo_;
  Rng rng_;
  bool mobile_ = false;
  int step_ = 0;
  std::map<NodeId, NodeCtx> nodes_;
  std::vector<AttackProfile> profiles_;
  std::vector<SourceState> sources_;
  std::vector<LinkFailure> failures_;
  std::vector<Envelope> wire_;
  std::map<NodeId, std::vector<Envelope>> inboxes_;
  std::map<LinkKey, double> link_load_;
  std::map<int, PacketMeta> meta_;
  std::set<std::tuple<Detector, NodeId, NodeId>> accusations_;
  std::vector<Event> events_;
  std::vector<StepRow> step_rows_;
  std::map<int, long long> sent_by_g_, delivered_by_g_, dropped_by_g_;
  long long sent_ = 0, delivered_ = 0, dropped_ = 0, control_msgs_ = 0;
  int blacklist_count_ = 0;
  int route_discoveries_ = 0;
  int payload_counter_ = 0;
  long long next_seq_ = 0;
};

}  // namespace

std::string event_line(const Event& e) {
  std::ostringstream out;
  out << "step=" << e.step << " event=" << kind_name(e.kind);
  switch (e.kind) {
    case EventKind::DetectorOn: out << " detector=" << to_string(e.detector); break;
    case EventKind::Accuse:
      out << " detector=" << to_string(e.detector) << " accuser=" << e.a << " accused=" << e.b;
      break;
    case EventKind::DataSent:
    case EventKind::DataDelivered:
      out << " g=" << e.g << " payload=" << e.payload << " node=" << e.a;
      break;
    case EventKind::DataDropped:
      out << " g=" << e.g << " payload=" << e.payload << " node=" << e.a << " reason=" << e.note;
      break;
    case EventKind::LinkFail: out << " link=" << e.a << '-' << e.b; break;
    case EventKind::RouteDiscovery: out << " src=" << e.a << " dst=" << e.b; break;
    case EventKind::RouteInstall:
    case EventKind::RouteSwitch:
    case EventKind::QuorumSafe:
      out << " node=" << e.a << " dst=" << e.b << " path=" << join_path(e.path);
      break;
    case EventKind::QuorumUnsafe: out << " node=" << e.a << " dst=" << e.b; break;
    case EventKind::BlacklistInsert: out << " monitor=" << e.a << " origin=" << e.b; break;
    case EventKind::ConfirmOk:
    case EventKind::ConfirmMismatch:
    case EventKind::ConfirmTimeout:
      out << " node=" << e.a << " replier=" << e.b;
      break;
    case EventKind::FloodEmit: out << " node=" << e.a << " count=" << static_cast<int>(e.value); break;
    case EventKind::FakeRrep: out << " node=" << e.a << " requester=" << e.b; break;
    case EventKind::FakeClaim: out << " node=" << e.a << " link=" << join_path(e.path); break;
    case EventKind::AttackerDrop:
    case EventKind::AttackerModify:
      out << " node=" << e.a << " payload=" << e.payload;
      break;
    case EventKind::MprChange: out << " node=" << e.a << " mprs=" << join_path(e.path); break;
    case EventKind::UtilSample: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.6g", e.value);
      out << " max_util=" << buf;
      break;
    }
    case EventKind::ControlDelivered: out << " from=" << e.a << " to=" << e.b; break;
  }
  return out.str();
}

MetricsReport compute_metrics(const std::vector<Event>& events,
                              const std::vector<AttackProfile>& attackers) {
  MetricsReport r;
  std::set<NodeId> attacker_ids;
  for (const auto& p : attackers) attacker_ids.insert(p.node);

  std::map<Detector, std::set<NodeId>> accused;
  std::map<Detector, std::set<NodeId>> offenders;
  std::set<Detector> enabled;

  for (const auto& e : events) {
    switch (e.kind) {
      case EventKind::DetectorOn: enabled.insert(e.detector); break;
      case EventKind::DataSent: ++r.data_sent; break;
      case EventKind::DataDelivered: ++r.data_delivered; break;
      case EventKind::DataDropped: ++r.data_dropped; break;
      case EventKind::BlacklistInsert: ++r.blacklist_events; break;
      case EventKind::RouteDiscovery: ++r.route_discoveries; break;
      case EventKind::Accuse: accused[e.detector].insert(e.b); break;
      case EventKind::FloodEmit: offenders[Detector::Flood].insert(e.a); break;
      case EventKind::FakeRrep:
        offenders[Detector::Quorum].insert(e.a);
        offenders[Detector::Confirm].insert(e.a);
        break;
      case EventKind::AttackerDrop:
      case EventKind::AttackerModify:
        offenders[Detector::Ack].insert(e.a);
        break;
      case EventKind::FakeClaim: offenders[Detector::LinkSpoof].insert(e.a); break;
      case EventKind::UtilSample: r.max_link_utilization = std::max(r.max_link_utilization, e.value); break;
      default: break;
    }
  }

  auto stats = [&](Detector d) {
    DetectorStats s;
    for (NodeId n : accused[d]) (attacker_ids.count(n) ? s.tp : s.fp) += 1;
    if (enabled.count(d))
      for (NodeId n : offenders[d])
        if (!accused[d].count(n)) s.fn += 1;
    return s;
  };
  r.flood = stats(Detector::Flood);
  r.quorum = stats(Detector::Quorum);
  r.confirm = stats(Detector::Confirm);
  r.ack = stats(Detector::Ack);
  r.linkspoof = stats(Detector::LinkSpoof);

  r.in_flight = r.data_sent - r.data_delivered - r.data_dropped;
  r.delivery_ratio = r.data_sent == 0 ? 1.0 : static_cast<double>(r.data_delivered) / r.data_sent;
  return r;
}

RunResult run(const Scenario& scenario, const SimConfig& config) {
  Sim sim(scenario, config);
  sim.set_mobile();
  return sim.finish(scenario.attackers);
}

RunResult run(const Scenario& scenario) { return run(scenario, scenario_config(scenario)); }

}  // namespace manet
