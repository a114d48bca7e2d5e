#include "manet/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace manet {

namespace {

enum class ParamType { Int, Double, OnOff, BlackholeMode, RouteMode };

struct ParamSpec {
  const char* key;
  ParamType type;
};

// Every accepted param key. defense.blackhole.node.<id> is matched by
// prefix below.
constexpr ParamSpec kParams[] = {
    {"sim.steps", ParamType::Int},
    {"sim.seed", ParamType::Int},
    {"sim.range", ParamType::Double},
    {"sim.data_rate", ParamType::Double},
    {"sim.capacity_default", ParamType::Double},
    {"sim.drain_cap", ParamType::Int},
    {"sim.rreq_retry", ParamType::Int},
    {"mobility.width", ParamType::Double},
    {"mobility.height", ParamType::Double},
    {"cluster.c1", ParamType::Double},
    {"cluster.c2", ParamType::Double},
    {"ga.pop", ParamType::Int},
    {"ga.max_weight", ParamType::Int},
    {"ga.a", ParamType::Double},
    {"ga.b", ParamType::Double},
    {"ga.c", ParamType::Double},
    {"ga.kc", ParamType::Double},
    {"ga.km", ParamType::Double},
    {"ga.generations", ParamType::Int},
    {"ga.elite", ParamType::Int},
    {"ga.stagnation", ParamType::Int},
    {"defense.flood", ParamType::OnOff},
    {"defense.flood.window", ParamType::Int},
    {"defense.flood.threshold", ParamType::Int},
    {"defense.blackhole", ParamType::BlackholeMode},
    {"defense.quorum.min_count", ParamType::Int},
    {"defense.confirm.timeout", ParamType::Int},
    {"defense.ack", ParamType::OnOff},
    {"defense.ack.k", ParamType::Int},
    {"defense.gps", ParamType::OnOff},
    {"defense.gps.slack", ParamType::Double},
    {"linkadv.period", ParamType::Int},
    {"route.mode", ParamType::RouteMode},
};

constexpr const char* kBlackholeNodePrefix = "defense.blackhole.node.";

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> toks;
  std::string cur;
  for (char ch : line) {
    if (ch == '#') break;
    if (ch == ' ' || ch == '\t' || ch == '\r') {
      if (!cur.empty()) toks.push_back(std::move(cur)), cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) toks.push_back(std::move(cur));
  return toks;
}

long long parse_int(const std::string& tok, int line, const char* what) {
  long long v = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || p != tok.data() + tok.size())
    throw ScenarioError(line, std::string(what) + ": expected integer, got '" + tok + "'");
  return v;
}

double parse_double(const std::string& tok, int line, const char* what) {
  const char* begin = tok.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end != begin + tok.size() || tok.empty())
    throw ScenarioError(line, std::string(what) + ": expected number, got '" + tok + "'");
  return v;
}

bool parse_onoff(const std::string& tok, int line, const std::string& key) {
  if (tok == "on") return true;
  if (tok == "off") return false;
  throw ScenarioError(line, key + ": expected on|off, got '" + tok + "'");
}

BlackholeDefense parse_blackhole_mode(const std::string& tok, int line, const std::string& key) {
  if (tok == "off") return BlackholeDefense::Off;
  if (tok == "quorum") return BlackholeDefense::Quorum;
  if (tok == "confirm") return BlackholeDefense::Confirm;
  throw ScenarioError(line, key + ": expected off|quorum|confirm, got '" + tok + "'");
}

void check_param(const std::string& key, const std::string& value, int line) {
  if (key.rfind(kBlackholeNodePrefix, 0) == 0) {
    parse_int(key.substr(std::string(kBlackholeNodePrefix).size()), line, key.c_str());
    parse_blackhole_mode(value, line, key);
    return;
  }
  for (const auto& spec : kParams) {
    if (key != spec.key) continue;
    switch (spec.type) {
      case ParamType::Int: parse_int(value, line, key.c_str()); return;
      case ParamType::Double: parse_double(value, line, key.c_str()); return;
      case ParamType::OnOff: parse_onoff(value, line, key); return;
      case ParamType::BlackholeMode: parse_blackhole_mode(value, line, key); return;
      case ParamType::RouteMode:
        if (value != "reactive" && value != "static")
          throw ScenarioError(line, key + ": expected reactive|static, got '" + value + "'");
        return;
    }
  }
  throw ScenarioError(line, "unknown param key '" + key + "'");
}

std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

NodeId node_ref(const Scenario& s, const std::string& tok, int line, const char* what) {
  const NodeId id = static_cast<NodeId>(parse_int(tok, line, what));
  if (!s.topology.has_node(id))
    throw ScenarioError(line, std::string(what) + ": unknown node " + std::to_string(id));
  return id;
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  Scenario s;
  struct Pending {
    std::vector<std::string> toks;
    int line;
  };
  // Node records are hoisted so later lines may reference nodes declared
  // further down; everything else keeps file order.
  std::vector<Pending> deferred;

  std::istringstream in(text);
  std::string raw;
  int line = 0;
  bool saw_link = false;
  while (std::getline(in, raw)) {
    ++line;
    auto toks = tokenize(raw);
    if (toks.empty()) continue;
    const std::string& kind = toks[0];
    if (kind == "node") {
      if (toks.size() != 4 && toks.size() != 5)
        throw ScenarioError(line, "node: expected <id> <x> <y> [speed]");
      NodeState n;
      n.id = static_cast<NodeId>(parse_int(toks[1], line, "node id"));
      n.pos.x = parse_double(toks[2], line, "node x");
      n.pos.y = parse_double(toks[3], line, "node y");
      if (toks.size() == 5) n.speed = parse_double(toks[4], line, "node speed");
      if (n.speed < 0) throw ScenarioError(line, "node: speed must be >= 0");
      n.waypoint = n.pos;
      if (!s.topology.nodes.emplace(n.id, n).second)
        throw ScenarioError(line, "node: duplicate id " + std::to_string(n.id));
    } else if (kind == "param" || kind == "link" || kind == "demand" ||
               kind == "attacker" || kind == "failure") {
      if (kind == "link") saw_link = true;
      deferred.push_back({std::move(toks), line});
    } else {
      throw ScenarioError(line, "unknown record '" + kind + "'");
    }
  }

  if (s.topology.nodes.empty()) throw ScenarioError(line == 0 ? 1 : line, "scenario declares no nodes");
  s.topology.mode = saw_link ? AdjacencyMode::Explicit : AdjacencyMode::UnitDisk;

  std::set<int> demand_groups;
  for (auto& [toks, ln] : deferred) {
    const std::string& kind = toks[0];
    if (kind == "param") {
      if (toks.size() != 3) throw ScenarioError(ln, "param: expected <key> <value>");
      check_param(toks[1], toks[2], ln);
      if (toks[1].rfind(kBlackholeNodePrefix, 0) == 0)
        node_ref(s, toks[1].substr(std::string(kBlackholeNodePrefix).size()), ln, toks[1].c_str());
      if (!s.params.emplace(toks[1], toks[2]).second)
        throw ScenarioError(ln, "param: duplicate key '" + toks[1] + "'");
    } else if (kind == "link") {
      if (toks.size() != 4) throw ScenarioError(ln, "link: expected <id1> <id2> <capacity>");
      const NodeId a = node_ref(s, toks[1], ln, "link endpoint");
      const NodeId b = node_ref(s, toks[2], ln, "link endpoint");
      if (a == b) throw ScenarioError(ln, "link: endpoints must differ");
      LinkSpec l;
      l.endpoints = make_link_key(a, b);
      l.capacity = parse_double(toks[3], ln, "link capacity");
      if (l.capacity <= 0) throw ScenarioError(ln, "link: capacity must be > 0");
      if (!s.topology.links.emplace(l.endpoints, l).second)
        throw ScenarioError(ln, "link: duplicate pair");
    } else if (kind == "demand") {
      if (toks.size() != 5 && toks.size() != 6)
        throw ScenarioError(ln, "demand: expected <g> <src> <dst> <bandwidth> [start]");
      Commodity c;
      c.cluster_id = static_cast<int>(parse_int(toks[1], ln, "demand g"));
      c.src = node_ref(s, toks[2], ln, "demand src");
      c.dst = node_ref(s, toks[3], ln, "demand dst");
      c.demand = parse_double(toks[4], ln, "demand bandwidth");
      if (toks.size() == 6) c.start_step = static_cast<int>(parse_int(toks[5], ln, "demand start"));
      if (c.src == c.dst) throw ScenarioError(ln, "demand: src and dst must differ");
      if (c.demand <= 0) throw ScenarioError(ln, "demand: bandwidth must be > 0");
      if (c.start_step < 0) throw ScenarioError(ln, "demand: start must be >= 0");
      if (!demand_groups.insert(c.cluster_id).second)
        throw ScenarioError(ln, "demand: duplicate group " + std::to_string(c.cluster_id));
      s.commodities.push_back(c);
    } else if (kind == "attacker") {
      if (toks.size() < 3) throw ScenarioError(ln, "attacker: expected <id> <kind> <args...>");
      AttackProfile p;
      p.node = node_ref(s, toks[1], ln, "attacker id");
      for (const auto& existing : s.attackers)
        if (existing.node == p.node)
          throw ScenarioError(ln, "attacker: duplicate node " + std::to_string(p.node));
      const std::string& akind = toks[2];
      if (akind == "flooding") {
        p.kind = AttackKind::Flooding;
        if (toks.size() != 4 && toks.size() != 6)
          throw ScenarioError(ln, "flooding: expected <rate> [spoof <victim>]");
        p.rate = parse_double(toks[3], ln, "flooding rate");
        if (p.rate <= 0) throw ScenarioError(ln, "flooding: rate must be > 0");
        if (toks.size() == 6) {
          if (toks[4] != "spoof") throw ScenarioError(ln, "flooding: expected 'spoof', got '" + toks[4] + "'");
          p.spoof_id = node_ref(s, toks[5], ln, "flooding spoof victim");
        }
      } else if (akind == "blackhole") {
        p.kind = AttackKind::Blackhole;
        if (toks.size() != 4) throw ScenarioError(ln, "blackhole: expected <delta>");
        p.delta = static_cast<int>(parse_int(toks[3], ln, "blackhole delta"));
        if (p.delta < 1) throw ScenarioError(ln, "blackhole: delta must be >= 1");
      } else if (akind == "misrelay") {
        p.kind = AttackKind::Misrelay;
        if (toks.size() != 4 && toks.size() != 5)
          throw ScenarioError(ln, "misrelay: expected <partner> [modify]");
        p.partner = node_ref(s, toks[3], ln, "misrelay partner");
        if (toks.size() == 5) {
          if (toks[4] != "modify") throw ScenarioError(ln, "misrelay: expected 'modify', got '" + toks[4] + "'");
          p.modify = true;
        }
      } else if (akind == "linkspoof") {
        p.kind = AttackKind::LinkSpoof;
        if (toks.size() != 4) throw ScenarioError(ln, "linkspoof: expected <fake-neighbor>");
        p.fake_neighbor = node_ref(s, toks[3], ln, "linkspoof fake neighbor");
        if (p.fake_neighbor == p.node)
          throw ScenarioError(ln, "linkspoof: fake neighbor must differ from attacker");
      } else {
        throw ScenarioError(ln, "attacker: unknown kind '" + akind + "'");
      }
      s.attackers.push_back(p);
    } else {  // failure
      if (toks.size() != 4) throw ScenarioError(ln, "failure: expected <id1> <id2> <step>");
      LinkFailure f;
      const NodeId a = node_ref(s, toks[1], ln, "failure endpoint");
      const NodeId b = node_ref(s, toks[2], ln, "failure endpoint");
      if (a == b) throw ScenarioError(ln, "failure: endpoints must differ");
      f.link = make_link_key(a, b);
      f.step = static_cast<int>(parse_int(toks[3], ln, "failure step"));
      if (f.step < 0) throw ScenarioError(ln, "failure: step must be >= 0");
      if (s.topology.mode == AdjacencyMode::Explicit && !s.topology.links.count(f.link))
        throw ScenarioError(ln, "failure: no such link");
      s.failures.push_back(f);
    }
  }

  std::sort(s.commodities.begin(), s.commodities.end(),
            [](const Commodity& a, const Commodity& b) { return a.cluster_id < b.cluster_id; });
  std::sort(s.attackers.begin(), s.attackers.end(),
            [](const AttackProfile& a, const AttackProfile& b) { return a.node < b.node; });
  std::sort(s.failures.begin(), s.failures.end(), [](const LinkFailure& a, const LinkFailure& b) {
    return std::tie(a.step, a.link) < std::tie(b.step, b.link);
  });

  // Mirror geometry params onto the topology so it is self-contained.
  const SimConfig cfg = scenario_config(s);
  s.topology.radio_range = cfg.range;
  if (auto it = s.params.find("mobility.width"); it != s.params.end())
    s.topology.width = parse_double(it->second, 0, "mobility.width");
  if (auto it = s.params.find("mobility.height"); it != s.params.end())
    s.topology.height = parse_double(it->second, 0, "mobility.height");
  return s;
}

Scenario parse_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string render(const Scenario& s) {
  std::ostringstream out;
  for (const auto& [key, value] : s.params) out << "param " << key << ' ' << value << '\n';
  for (const auto& [id, n] : s.topology.nodes) {
    out << "node " << id << ' ' << format_double(n.pos.x) << ' ' << format_double(n.pos.y);
    if (n.speed != 0) out << ' ' << format_double(n.speed);
    out << '\n';
  }
  for (const auto& [key, l] : s.topology.links)
    out << "link " << key.first << ' ' << key.second << ' ' << format_double(l.capacity) << '\n';
  for (const auto& c : s.commodities) {
    out << "demand " << c.cluster_id << ' ' << c.src << ' ' << c.dst << ' '
        << format_double(c.demand);
    if (c.start_step != 0) out << ' ' << c.start_step;
    out << '\n';
  }
  for (const auto& p : s.attackers) {
    out << "attacker " << p.node << ' ' << to_string(p.kind);
    switch (p.kind) {
      case AttackKind::Flooding:
        out << ' ' << format_double(p.rate);
        if (p.spoof_id) out << " spoof " << *p.spoof_id;
        break;
      case AttackKind::Blackhole:
        out << ' ' << p.delta;
        break;
      case AttackKind::Misrelay:
        out << ' ' << p.partner;
        if (p.modify) out << " modify";
        break;
      case AttackKind::LinkSpoof:
        out << ' ' << p.fake_neighbor;
        break;
    }
    out << '\n';
  }
  for (const auto& f : s.failures)
    out << "failure " << f.link.first << ' ' << f.link.second << ' ' << f.step << '\n';
  return out.str();
}

SimConfig scenario_config(const Scenario& s) {
  SimConfig c;
  auto geti = [&](const char* key, int dflt) {
    auto it = s.params.find(key);
    return it == s.params.end() ? dflt : static_cast<int>(parse_int(it->second, 0, key));
  };
  auto getd = [&](const char* key, double dflt) {
    auto it = s.params.find(key);
    return it == s.params.end() ? dflt : parse_double(it->second, 0, key);
  };
  auto getb = [&](const char* key, bool dflt) {
    auto it = s.params.find(key);
    return it == s.params.end() ? dflt : parse_onoff(it->second, 0, key);
  };

  c.steps = geti("sim.steps", 50);
  c.seed = parse_int(s.params.count("sim.seed") ? s.params.at("sim.seed") : "1", 0, "sim.seed");
  c.range = getd("sim.range", 250.0);
  c.data_rate = getd("sim.data_rate", 1.0);
  c.capacity_default = getd("sim.capacity_default", 1e9);
  c.drain_cap = geti("sim.drain_cap", 50);
  c.rreq_retry = geti("sim.rreq_retry", 10);
  c.cluster.c1 = getd("cluster.c1", 1.0);
  c.cluster.c2 = getd("cluster.c2", 1.0);

  c.ga.pop_size = geti("ga.pop", 100);
  c.ga.max_weight = geti("ga.max_weight", 64);
  c.ga.a = getd("ga.a", 1.0);
  c.ga.b = getd("ga.b", 1.0);
  c.ga.c = getd("ga.c", 1.0);
  c.ga.k_c = getd("ga.kc", 0.05);
  c.ga.k_m = getd("ga.km", 0.05);
  c.ga.generations = geti("ga.generations", 200);
  c.ga.elite = geti("ga.elite", 1);
  c.ga.stagnation = geti("ga.stagnation", 50);
  c.ga.seed = static_cast<std::uint64_t>(c.seed);

  c.flood_on = getb("defense.flood", false);
  c.flood_window = geti("defense.flood.window", 10);
  c.flood_threshold = geti("defense.flood.threshold", 10);
  if (auto it = s.params.find("defense.blackhole"); it != s.params.end())
    c.blackhole = parse_blackhole_mode(it->second, 0, "defense.blackhole");
  for (const auto& [key, value] : s.params) {
    if (key.rfind(kBlackholeNodePrefix, 0) != 0) continue;
    const NodeId id = static_cast<NodeId>(
        parse_int(key.substr(std::string(kBlackholeNodePrefix).size()), 0, key.c_str()));
    c.blackhole_node[id] = parse_blackhole_mode(value, 0, key);
  }
  c.quorum_min_count = geti("defense.quorum.min_count", 2);
  c.confirm_timeout = geti("defense.confirm.timeout", 6);
  c.ack_on = getb("defense.ack", false);
  c.ack_k = geti("defense.ack.k", 1);
  c.gps_on = getb("defense.gps", false);
  c.gps_slack = getd("defense.gps.slack", 0.0);
  c.linkadv_period = geti("linkadv.period", 0);
  if (auto it = s.params.find("route.mode"); it != s.params.end())
    c.route_mode = it->second == "static" ? RouteMode::Static : RouteMode::Reactive;

  if (c.steps < 1) throw std::invalid_argument("sim.steps must be >= 1");
  if (c.seed < 0) throw std::invalid_argument("sim.seed must be >= 0");
  if (c.range <= 0) throw std::invalid_argument("sim.range must be > 0");
  if (c.data_rate < 0) throw std::invalid_argument("sim.data_rate must be >= 0");
  if (c.capacity_default <= 0) throw std::invalid_argument("sim.capacity_default must be > 0");
  if (c.drain_cap < 0) throw std::invalid_argument("sim.drain_cap must be >= 0");
  if (c.rreq_retry < 1) throw std::invalid_argument("sim.rreq_retry must be >= 1");
  if (c.flood_window < 1) throw std::invalid_argument("defense.flood.window must be >= 1");
  if (c.flood_threshold < 1) throw std::invalid_argument("defense.flood.threshold must be >= 1");
  if (c.quorum_min_count < 2) throw std::invalid_argument("defense.quorum.min_count must be >= 2");
  if (c.confirm_timeout < 1) throw std::invalid_argument("defense.confirm.timeout must be >= 1");
  if (c.ack_k < 0) throw std::invalid_argument("defense.ack.k must be >= 0");
  if (c.gps_slack < 0) throw std::invalid_argument("defense.gps.slack must be >= 0");
  if (c.linkadv_period < 0) throw std::invalid_argument("linkadv.period must be >= 0");
  return c;
}

}  // namespace manet
