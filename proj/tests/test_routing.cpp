#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "manet/routing.hpp"

using namespace manet;

namespace {

RoutingTable table_for(NodeId owner) {
  RoutingTable t;
  t.owner = owner;
  return t;
}

void install(RoutingTable& t, std::vector<NodeId> full, int seq) {
  RouteEntry e;
  e.dest = full.back();
  e.next_hop = full[1];
  e.hop_count = static_cast<int>(full.size()) - 1;
  e.dst_seq = seq;
  e.full_path = std::move(full);
  t.routes[e.dest] = e;
}

}  // namespace

TEST_CASE("originate_rreq") {
  RoutingTable t = table_for(1);
  ControlMessage a = originate_rreq(t, 9);
  CHECK(a.kind == MsgKind::RREQ);
  CHECK(a.origin == 1);
  CHECK(a.target == 9);
  CHECK(a.broadcast_id == 1);
  CHECK(a.path == std::vector<NodeId>{1});
  CHECK(a.hop_count == 0);
  CHECK(a.dst_seq == 0);  // nothing cached yet
  CHECK(t.own_seq == 1);

  ControlMessage b = originate_rreq(t, 9);
  CHECK(b.broadcast_id == 2);
  ControlMessage c = originate_rreq(t, 5);
  CHECK(c.broadcast_id == 3);

  install(t, {1, 2, 9}, 4);
  CHECK(originate_rreq(t, 9).dst_seq == 4);
}

TEST_CASE("handle_rreq") {
  SUBCASE("duplicate (origin, broadcast_id) yields no actions") {
    RoutingTable t = table_for(2);
    ControlMessage m;
    m.origin = 1;
    m.target = 9;
    m.broadcast_id = 7;
    m.path = {1};
    RreqActions first = handle_rreq(t, m);
    CHECK(first.forward.has_value());
    RreqActions again = handle_rreq(t, m);
    CHECK(again.duplicate);
    CHECK_FALSE(again.forward.has_value());
    CHECK_FALSE(again.reply.has_value());
  }

  SUBCASE("own node already in path is loop-suppressed") {
    RoutingTable t = table_for(2);
    ControlMessage m;
    m.origin = 1;
    m.broadcast_id = 1;
    m.path = {1, 2, 3};
    RreqActions act = handle_rreq(t, m);
    CHECK(act.loop_suppressed);
    CHECK_FALSE(act.forward.has_value());
  }

  SUBCASE("target replies with its own sequence number") {
    RoutingTable t = table_for(9);
    t.own_seq = 3;
    ControlMessage m;
    m.origin = 1;
    m.target = 9;
    m.broadcast_id = 2;
    m.dst_seq = 5;
    m.path = {1, 4};
    RreqActions act = handle_rreq(t, m);
    REQUIRE(act.reply.has_value());
    const ControlMessage& rep = *act.reply;
    CHECK(rep.kind == MsgKind::RREP);
    CHECK(rep.origin == 9);
    CHECK(rep.target == 1);
    CHECK(rep.broadcast_id == 2);
    CHECK(rep.dst_seq == 5);  // own_seq raised to the request's view
    CHECK(rep.replier == 9);
    CHECK(rep.path == std::vector<NodeId>{9});
    CHECK(rep.route == std::vector<NodeId>{4, 1});
    CHECK_FALSE(act.forward.has_value());
    CHECK(t.own_seq == 5);
  }

  SUBCASE("intermediate without route forwards with itself appended") {
    RoutingTable t = table_for(4);
    ControlMessage m;
    m.origin = 1;
    m.target = 9;
    m.broadcast_id = 1;
    m.path = {1};
    m.hop_count = 0;
    RreqActions act = handle_rreq(t, m);
    REQUIRE(act.forward.has_value());
    CHECK(act.forward->path == std::vector<NodeId>{1, 4});
    CHECK(act.forward->hop_count == 1);
    CHECK_FALSE(act.reply.has_value());
  }

  SUBCASE("fresh cached route answers without bumping the cached seq") {
    RoutingTable t = table_for(4);
    install(t, {4, 6, 9}, 8);
    ControlMessage m;
    m.origin = 1;
    m.target = 9;
    m.broadcast_id = 1;
    m.dst_seq = 8;
    m.path = {1};
    RreqActions act = handle_rreq(t, m);
    REQUIRE(act.reply.has_value());
    CHECK(act.reply->dst_seq == 8);
    CHECK(act.reply->replier == 4);
    CHECK(act.reply->origin == 9);
    CHECK(act.reply->path == std::vector<NodeId>{9, 6, 4});
    CHECK(act.reply->route == std::vector<NodeId>{1});
    CHECK(t.routes.at(9).dst_seq == 8);
  }

  SUBCASE("stale cache forwards instead of replying") {
    RoutingTable t = table_for(4);
    install(t, {4, 6, 9}, 2);
    ControlMessage m;
    m.origin = 1;
    m.target = 9;
    m.broadcast_id = 1;
    m.dst_seq = 5;
    m.path = {1};
    RreqActions act = handle_rreq(t, m);
    CHECK_FALSE(act.reply.has_value());
    CHECK(act.forward.has_value());
  }

  SUBCASE("cached reply is suppressed when combined path would loop") {
    RoutingTable t = table_for(4);
    install(t, {4, 6, 9}, 8);
    ControlMessage m;
    m.origin = 6;  // requester sits on the cached path
    m.target = 9;
    m.broadcast_id = 1;
    m.dst_seq = 0;
    m.path = {6, 2};
    RreqActions act = handle_rreq(t, m);
    CHECK_FALSE(act.reply.has_value());
    CHECK(act.forward.has_value());
  }

  SUBCASE("a node forwards a given discovery at most once") {
    RoutingTable t = table_for(3);
    int forwards = 0;
    for (int i = 0; i < 5; ++i) {
      ControlMessage m;
      m.origin = 1;
      m.target = 9;
      m.broadcast_id = 11;
      m.path = {1, (i % 2) ? 2 : 4};  // copies via different relays
      if (handle_rreq(t, m).forward) ++forwards;
    }
    CHECK(forwards == 1);
  }
}

TEST_CASE("handle_rrep freshness") {
  RoutingTable t = table_for(1);

  SUBCASE("no incumbent accepts") {
    ControlMessage m;
    m.kind = MsgKind::RREP;
    m.origin = 9;
    m.dst_seq = 1;
    m.path = {9, 4};  // reverse order: dest first
    CHECK(handle_rrep(t, m) == RrepResult::Accepted);
    const RouteEntry& e = t.routes.at(9);
    CHECK(e.full_path == std::vector<NodeId>{1, 4, 9});
    CHECK(e.next_hop == 4);
    CHECK(e.hop_count == 2);
    CHECK(e.dst_seq == 1);
  }

  SUBCASE("higher sequence number overwrites") {
    install(t, {1, 4, 9}, 5);
    ControlMessage m;
    m.kind = MsgKind::RREP;
    m.origin = 9;
    m.dst_seq = 7;
    m.path = {9, 6, 5};
    CHECK(handle_rrep(t, m) == RrepResult::Accepted);
    CHECK(t.routes.at(9).dst_seq == 7);
    CHECK(t.routes.at(9).hop_count == 3);
  }

  SUBCASE("equal sequence needs strictly fewer hops") {
    install(t, {1, 4, 6, 9}, 5);
    ControlMessage shorter;
    shorter.kind = MsgKind::RREP;
    shorter.origin = 9;
    shorter.dst_seq = 5;
    shorter.path = {9, 4};
    CHECK(handle_rrep(t, shorter) == RrepResult::Accepted);

    ControlMessage longer;
    longer.kind = MsgKind::RREP;
    longer.origin = 9;
    longer.dst_seq = 5;
    longer.path = {9, 7, 6, 5};
    CHECK(handle_rrep(t, longer) == RrepResult::Rejected);
  }

  SUBCASE("replaying an accepted RREP is rejected") {
    ControlMessage m;
    m.kind = MsgKind::RREP;
    m.origin = 9;
    m.dst_seq = 3;
    m.path = {9, 4};
    CHECK(handle_rrep(t, m) == RrepResult::Accepted);
    CHECK(handle_rrep(t, m) == RrepResult::Rejected);
  }

  SUBCASE("looping full path is rejected") {
    ControlMessage m;
    m.kind = MsgKind::RREP;
    m.origin = 9;
    m.dst_seq = 3;
    m.path = {9, 4, 1};  // full path would be [1, 1, 4, 9]... owner repeated
    CHECK(handle_rrep(t, m) == RrepResult::Rejected);
    CHECK(t.routes.count(9) == 0);
  }

  SUBCASE("installed full paths never contain repeats") {
    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
      ControlMessage m;
      m.kind = MsgKind::RREP;
      m.origin = 9;
      m.dst_seq = rng.uniform_int(0, 5);
      m.path = {9};
      for (int k = rng.uniform_int(0, 3); k > 0; --k)
        m.path.push_back(rng.uniform_int(2, 8));
      handle_rrep(t, m);
    }
    for (const auto& [dst, e] : t.routes) {
      std::set<NodeId> seen(e.full_path.begin(), e.full_path.end());
      CHECK(seen.size() == e.full_path.size());
      CHECK(e.next_hop == e.full_path[1]);
      CHECK(e.hop_count == static_cast<int>(e.full_path.size()) - 1);
    }
  }
}

TEST_CASE("rrep_full_path reconstruction") {
  RoutingTable t = table_for(1);
  ControlMessage m;
  m.path = {9, 6, 4};  // dest .. replier plus accumulated relays
  CHECK(rrep_full_path(t, m) == std::vector<NodeId>{1, 4, 6, 9});
}

TEST_CASE("select_mprs greedy cover") {
  SUBCASE("no two-hop nodes, no MPRs") {
    std::set<LinkKey> claims = {make_link_key(1, 2)};
    MprSelection sel = select_mprs({2}, claims, 1);
    CHECK(sel.mprs.empty());
    CHECK(sel.uncovered.empty());
  }

  SUBCASE("two-branch shape needs both branches") {
    std::set<LinkKey> claims = {make_link_key(1, 2), make_link_key(1, 5),
                                make_link_key(2, 3), make_link_key(5, 6)};
    MprSelection sel = select_mprs({2, 5}, claims, 1);
    CHECK(sel.mprs == std::set<NodeId>{2, 5});
  }

  SUBCASE("fake claim collapses the cover to one relay") {
    std::set<LinkKey> claims = {make_link_key(1, 2), make_link_key(1, 5),
                                make_link_key(2, 3), make_link_key(5, 6),
                                make_link_key(2, 6)};  // fabricated
    MprSelection sel = select_mprs({2, 5}, claims, 1);
    CHECK(sel.mprs == std::set<NodeId>{2});
  }

  SUBCASE("claimed two-hop node nobody reaches is reported uncovered") {
    // 4 is only a claimed neighbor, not a usable relay, so 8 stays uncovered
    std::set<LinkKey> claims = {make_link_key(1, 2), make_link_key(2, 3),
                                make_link_key(1, 4), make_link_key(4, 8)};
    MprSelection sel = select_mprs({2}, claims, 1);
    CHECK(sel.mprs == std::set<NodeId>{2});
    CHECK(sel.uncovered == std::set<NodeId>{8});
  }

  SUBCASE("cover is complete and irredundant") {
    Rng rng(13);
    for (int trial = 0; trial < 50; ++trial) {
      std::set<LinkKey> claims;
      std::set<NodeId> one_hop;
      for (int i = 0; i < 4 + rng.uniform_int(0, 3); ++i) {
        NodeId nb = rng.uniform_int(2, 6);
        one_hop.insert(nb);
        claims.insert(make_link_key(1, nb));
      }
      for (int i = 0; i < 8; ++i) {
        NodeId a = rng.uniform_int(2, 6), b = rng.uniform_int(7, 11);
        claims.insert(make_link_key(a, b));
      }
      MprSelection sel = select_mprs(one_hop, claims, 1);
      std::set<NodeId> two = two_hop_neighbors(claims, 1);

      auto covered_by = [&](const std::set<NodeId>& relays) {
        std::set<NodeId> cov;
        for (NodeId r : relays)
          for (NodeId m : one_hop_neighbors(claims, r))
            if (two.count(m)) cov.insert(m);
        return cov;
      };
      std::set<NodeId> reachable = covered_by(one_hop);
      CHECK(covered_by(sel.mprs) == reachable);
      for (NodeId drop : sel.mprs) {
        std::set<NodeId> reduced = sel.mprs;
        reduced.erase(drop);
        CHECK(covered_by(reduced) != reachable);
      }
    }
  }
}

TEST_CASE("forward_data") {
  RoutingTable t = table_for(4);
  ControlMessage m;
  m.kind = MsgKind::DATA;
  m.target = 9;

  SUBCASE("no route drops") {
    CHECK(forward_data(t, m).kind == ForwardKind::DropNoRoute);
  }
  SUBCASE("route forwards to the next hop") {
    install(t, {4, 6, 9}, 1);
    ForwardAction a = forward_data(t, m);
    CHECK(a.kind == ForwardKind::Forward);
    CHECK(a.next_hop == 6);
  }
  SUBCASE("at the target it delivers") {
    m.target = 4;
    CHECK(forward_data(t, m).kind == ForwardKind::Deliver);
  }
}
