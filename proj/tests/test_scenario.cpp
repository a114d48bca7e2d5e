#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "manet/scenario.hpp"

using namespace manet;

namespace {

int error_line(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const ScenarioError& e) {
    return e.line;
  }
  return -1;
}

}  // namespace

TEST_CASE("minimal scenario") {
  Scenario s = parse_scenario("node 1 0 0\nnode 2 100 0\n");
  CHECK(s.topology.mode == AdjacencyMode::UnitDisk);
  CHECK(s.topology.nodes.size() == 2);
  CHECK(s.topology.node(2).pos == Vec2{100, 0});
  CHECK(s.topology.radio_range == 250.0);
  CHECK(s.commodities.empty());
  CHECK(s.attackers.empty());
  CHECK(s.params.empty());
}

TEST_CASE("full grammar") {
  const std::string text =
      "# demo\n"
      "param sim.steps 30\n"
      "param defense.flood on\n"
      "param defense.blackhole quorum\n"
      "node 1 0 0\n"
      "node 2 100 0 3.5\n"
      "node 3 200 0\n"
      "node 4 300 0\n"
      "link 1 2 10\n"
      "link 3 2 8  # reversed endpoints normalize\n"
      "link 3 4 10\n"
      "demand 1 1 4 5\n"
      "demand 2 4 1 2 7\n"
      "attacker 2 flooding 1.5 spoof 3\n"
      "attacker 3 blackhole 2\n"
      "failure 1 2 12\n"
      "failure 3 4 3\n";
  Scenario s = parse_scenario(text);

  CHECK(s.topology.mode == AdjacencyMode::Explicit);
  CHECK(s.topology.node(2).speed == 3.5);
  REQUIRE(s.topology.links.count(LinkKey{2, 3}) == 1);
  CHECK(s.topology.links.at(LinkKey{2, 3}).capacity == 8.0);

  REQUIRE(s.commodities.size() == 2);
  CHECK(s.commodities[0].cluster_id == 1);
  CHECK(s.commodities[0].start_step == 0);
  CHECK(s.commodities[1].start_step == 7);

  REQUIRE(s.attackers.size() == 2);
  CHECK(s.attackers[0].kind == AttackKind::Flooding);
  CHECK(s.attackers[0].rate == 1.5);
  CHECK(s.attackers[0].spoof_id == 3);
  CHECK(s.attackers[1].kind == AttackKind::Blackhole);
  CHECK(s.attackers[1].delta == 2);

  // failures come back sorted by step
  REQUIRE(s.failures.size() == 2);
  CHECK(s.failures[0] == LinkFailure{{3, 4}, 3});
  CHECK(s.failures[1] == LinkFailure{{1, 2}, 12});

  SimConfig cfg = scenario_config(s);
  CHECK(cfg.steps == 30);
  CHECK(cfg.flood_on);
  CHECK(cfg.blackhole == BlackholeDefense::Quorum);
}

TEST_CASE("records may reference nodes declared later") {
  Scenario s = parse_scenario(
      "attacker 2 misrelay 1 modify\n"
      "link 1 2 5\n"
      "node 2 10 0\n"
      "node 1 0 0\n");
  REQUIRE(s.attackers.size() == 1);
  CHECK(s.attackers[0].partner == 1);
  CHECK(s.attackers[0].modify);
}

TEST_CASE("attacker forms") {
  Scenario s = parse_scenario(
      "node 1 0 0\nnode 2 100 0\nnode 3 200 0\n"
      "attacker 1 misrelay 2\n"
      "attacker 2 linkspoof 3\n"
      "attacker 3 flooding 0.5\n");
  REQUIRE(s.attackers.size() == 3);
  CHECK(s.attackers[0].kind == AttackKind::Misrelay);
  CHECK_FALSE(s.attackers[0].modify);
  CHECK(s.attackers[1].kind == AttackKind::LinkSpoof);
  CHECK(s.attackers[1].fake_neighbor == 3);
  CHECK(s.attackers[2].kind == AttackKind::Flooding);
  CHECK_FALSE(s.attackers[2].spoof_id.has_value());
}

TEST_CASE("parse errors carry 1-based line numbers") {
  CHECK(error_line("node 1 0 0\nbogus 1 2\n") == 2);
  CHECK(error_line("node 1 0 0\n\n# c\nnode 1 5 5\n") == 4);
  CHECK(error_line("node 1 0 0\nnode 2 1 1\nattacker 9 blackhole 2\n") == 3);
  CHECK(error_line("node 1 0 0\nparam sim.bogus 3\n") == 2);
  CHECK(error_line("node 1 0 0\nparam sim.steps x\n") == 2);
  CHECK(error_line("node 1 0 0\nparam defense.flood maybe\n") == 2);
  CHECK(error_line("node 1 0 0\nparam defense.blackhole loud\n") == 2);
  CHECK(error_line("node 1 0 0\nparam route.mode hybrid\n") == 2);
  CHECK(error_line("node 1 0 0\nnode 2 1 1\nlink 1 2 5\nlink 2 1 9\n") == 4);
  CHECK(error_line("node 1 0 0\nlink 1 1 5\n") == 2);
  CHECK(error_line("node 1 0 0\nnode 2 1 1\nlink 1 2 0\n") == 3);
  CHECK(error_line("node 1 0 0\nnode 2 1 1\ndemand 1 1 1 5\n") == 3);
  CHECK(error_line("node 1 0 0\nnode 2 1 1\ndemand 1 1 2 5\ndemand 1 2 1 5\n") == 4);
  CHECK(error_line("node 1 0 0\nnode 2 1 1\ndemand 1 1 2 5 -1\n") == 3);
  CHECK(error_line("node 1 0 0\nattacker 1 flooding 0\n") == 2);
  CHECK(error_line("node 1 0 0\nattacker 1 blackhole 0\n") == 2);
  CHECK(error_line("node 1 0 0\nattacker 1 linkspoof 1\n") == 2);
  CHECK(error_line("node 1 0 0\nattacker 1 teleport 3\n") == 2);
  CHECK(error_line("node 1 0 0\nnode 2 1 1\nattacker 1 blackhole 2\nattacker 1 flooding 1\n") == 4);
  CHECK(error_line("node 1 0 0\nnode 2 1 1\nlink 1 2 5\nnode 3 2 2\nfailure 1 3 4\n") == 5);
  CHECK(error_line("node 1 0 0\nnode 2 1 1\nfailure 1 2 -3\n") == 3);
  CHECK(error_line("node 1 0 0\nparam sim.steps\n") == 2);
  CHECK(error_line("node 1 0 0 -2\n") == 1);
  CHECK(error_line("") == 1);
  CHECK(error_line("# only a comment\nparam sim.steps 5\n") == 2);
  CHECK(error_line("node 1 0 0\nparam sim.steps 5\nparam sim.steps 6\n") == 3);
  CHECK(error_line("node 1 0 0\nparam defense.blackhole.node.2 quorum\n") == 2);
}

TEST_CASE("unit-disk failures need no declared link") {
  Scenario s = parse_scenario("node 1 0 0\nnode 2 100 0\nfailure 1 2 4\n");
  REQUIRE(s.failures.size() == 1);
  CHECK(s.failures[0].link == LinkKey{1, 2});
}

TEST_CASE("config defaults") {
  SimConfig cfg = scenario_config(parse_scenario("node 1 0 0\n"));
  CHECK(cfg.steps == 50);
  CHECK(cfg.seed == 1);
  CHECK(cfg.range == 250.0);
  CHECK(cfg.data_rate == 1.0);
  CHECK(cfg.drain_cap == 50);
  CHECK(cfg.rreq_retry == 10);
  CHECK(cfg.ga.pop_size == 100);
  CHECK(cfg.ga.max_weight == 64);
  CHECK(cfg.ga.k_c == 0.05);
  CHECK(cfg.ga.k_m == 0.05);
  CHECK(cfg.ga.generations == 200);
  CHECK(cfg.ga.elite == 1);
  CHECK(cfg.ga.stagnation == 50);
  CHECK_FALSE(cfg.flood_on);
  CHECK(cfg.flood_window == 10);
  CHECK(cfg.flood_threshold == 10);
  CHECK(cfg.blackhole == BlackholeDefense::Off);
  CHECK(cfg.blackhole_node.empty());
  CHECK(cfg.quorum_min_count == 2);
  CHECK(cfg.confirm_timeout == 6);
  CHECK_FALSE(cfg.ack_on);
  CHECK(cfg.ack_k == 1);
  CHECK_FALSE(cfg.gps_on);
  CHECK(cfg.gps_slack == 0.0);
  CHECK(cfg.linkadv_period == 0);
  CHECK(cfg.route_mode == RouteMode::Reactive);
}

TEST_CASE("per-node blackhole override and static mode") {
  Scenario s = parse_scenario(
      "param defense.blackhole confirm\n"
      "param defense.blackhole.node.2 off\n"
      "param route.mode static\n"
      "node 1 0 0\nnode 2 100 0\n");
  SimConfig cfg = scenario_config(s);
  CHECK(cfg.blackhole == BlackholeDefense::Confirm);
  REQUIRE(cfg.blackhole_node.count(2) == 1);
  CHECK(cfg.blackhole_node.at(2) == BlackholeDefense::Off);
  CHECK(cfg.blackhole_node.count(1) == 0);
  CHECK(cfg.route_mode == RouteMode::Static);
}

TEST_CASE("ga params flow through") {
  Scenario s = parse_scenario(
      "param ga.pop 40\nparam ga.generations 60\nparam ga.km 0.1\n"
      "param sim.seed 9\nnode 1 0 0\n");
  SimConfig cfg = scenario_config(s);
  CHECK(cfg.ga.pop_size == 40);
  CHECK(cfg.ga.generations == 60);
  CHECK(cfg.ga.k_m == 0.1);
  CHECK(cfg.ga.seed == 9);
}

TEST_CASE("config validation rejects out-of-range values") {
  CHECK_THROWS_AS(parse_scenario("node 1 0 0\nparam sim.steps 0\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_scenario("node 1 0 0\nparam sim.range -5\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_scenario("node 1 0 0\nparam defense.quorum.min_count 1\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_scenario("node 1 0 0\nparam defense.confirm.timeout 0\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_scenario("node 1 0 0\nparam defense.flood.window 0\n"),
                  std::invalid_argument);
}

TEST_CASE("render round-trips") {
  const std::string text =
      "param sim.steps 25\n"
      "param sim.seed 7\n"
      "param defense.blackhole confirm\n"
      "param defense.blackhole.node.4 off\n"
      "param defense.gps on\n"
      "param defense.gps.slack 12.5\n"
      "param route.mode static\n"
      "node 4 300 120 2.25\n"
      "node 1 0 0\n"
      "node 2 100 0\n"
      "node 3 200 50\n"
      "link 1 2 10\n"
      "link 2 3 7.5\n"
      "link 3 4 10\n"
      "demand 2 3 1 1.5 4\n"
      "demand 1 1 4 5\n"
      "attacker 3 misrelay 2 modify\n"
      "attacker 2 flooding 2.5 spoof 1\n"
      "failure 2 3 12\n"
      "failure 1 2 3\n";
  Scenario s = parse_scenario(text);
  const std::string canon = render(s);
  Scenario again = parse_scenario(canon);
  CHECK(again == s);
  CHECK(render(again) == canon);
}

TEST_CASE("mobility params reach the topology") {
  Scenario s = parse_scenario(
      "param mobility.width 400\nparam mobility.height 300\nparam sim.range 120\n"
      "node 1 0 0\n");
  CHECK(s.topology.width == 400.0);
  CHECK(s.topology.height == 300.0);
  CHECK(s.topology.radio_range == 120.0);
}
