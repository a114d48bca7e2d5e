#include "manet/cli.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include "CLI11.hpp"
#include "manet/scenario.hpp"

namespace manet {

namespace fs = std::filesystem;

std::string format_number(double v) {
  char buf[40];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, end);
}

namespace {

std::string join_path(const std::vector<NodeId>& p) {
  std::string s;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) s += '-';
    s += std::to_string(p[i]);
  }
  return s;
}

bool write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  return out.good();
}

// Loads and parses the scenario; on failure prints a diagnostic and stores
// the exit code.
bool load_scenario(const std::string& path, Scenario& sc, int& rc) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "cannot read " << path << "\n";
    rc = kExitIo;
    return false;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    sc = parse_scenario(buf.str());
  } catch (const ScenarioError& e) {
    std::cerr << path << ": " << e.what() << "\n";
    rc = kExitInvalid;
    return false;
  }
  return true;
}

bool ensure_out_dir(const std::string& dir, int& rc) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    std::cerr << "cannot create " << dir << ": " << ec.message() << "\n";
    rc = kExitIo;
    return false;
  }
  return true;
}

const char* kDetectorCols =
    "flood_tp,flood_fp,flood_fn,quorum_tp,quorum_fp,quorum_fn,"
    "confirm_tp,confirm_fp,confirm_fn,ack_tp,ack_fp,ack_fn,"
    "linkspoof_tp,linkspoof_fp,linkspoof_fn";

void append_detector_cells(std::string& row, const MetricsReport& m) {
  for (const DetectorStats* s : {&m.flood, &m.quorum, &m.confirm, &m.ack, &m.linkspoof}) {
    row += ',' + std::to_string(s->tp);
    row += ',' + std::to_string(s->fp);
    row += ',' + std::to_string(s->fn);
  }
}

std::string summary_csv(const MetricsReport& m) {
  std::string out = "delivery_ratio,data_sent,data_delivered,data_dropped,in_flight,"
                    "control_msgs,blacklist_events,";
  out += kDetectorCols;
  out += ",max_link_utilization,route_discoveries\n";
  std::string row = format_number(m.delivery_ratio);
  row += ',' + std::to_string(m.data_sent);
  row += ',' + std::to_string(m.data_delivered);
  row += ',' + std::to_string(m.data_dropped);
  row += ',' + std::to_string(m.in_flight);
  row += ',' + std::to_string(m.control_msgs);
  row += ',' + std::to_string(m.blacklist_events);
  append_detector_cells(row, m);
  row += ',' + format_number(m.max_link_utilization);
  row += ',' + std::to_string(m.route_discoveries);
  out += row + "\n";
  return out;
}

std::string steps_csv(const std::vector<StepRow>& rows) {
  std::string out = "step,data_sent,data_delivered,data_dropped,in_flight,"
                    "control_msgs,blacklist_events,route_discoveries\n";
  for (const StepRow& r : rows) {
    out += std::to_string(r.step);
    out += ',' + std::to_string(r.data_sent);
    out += ',' + std::to_string(r.data_delivered);
    out += ',' + std::to_string(r.data_dropped);
    out += ',' + std::to_string(r.in_flight);
    out += ',' + std::to_string(r.control_msgs);
    out += ',' + std::to_string(r.blacklist_events);
    out += ',' + std::to_string(r.route_discoveries);
    out += '\n';
  }
  return out;
}

std::string commodities_csv(const std::vector<CommodityStats>& rows) {
  std::string out = "g,src,dst,sent,delivered,dropped,delivery_ratio\n";
  for (const CommodityStats& r : rows) {
    out += std::to_string(r.g);
    out += ',' + std::to_string(r.src);
    out += ',' + std::to_string(r.dst);
    out += ',' + std::to_string(r.sent);
    out += ',' + std::to_string(r.delivered);
    out += ',' + std::to_string(r.dropped);
    out += ',' + format_number(r.ratio());
    out += '\n';
  }
  return out;
}

std::string events_log(const std::vector<Event>& events) {
  std::string out;
  for (const Event& e : events) {
    out += event_line(e);
    out += '\n';
  }
  return out;
}

SimConfig effective_config(const Scenario& sc, const CliOptions& opts) {
  SimConfig cfg = scenario_config(sc);
  if (opts.seed) {
    cfg.seed = *opts.seed;
    cfg.ga.seed = *opts.seed;
  }
  if (opts.defense && *opts.defense == "off") force_defenses_off(cfg);
  return cfg;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

bool read_csv(const fs::path& path, CsvTable& t) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (first) {
      t.header = std::move(cells);
      first = false;
    } else {
      t.rows.push_back(std::move(cells));
    }
  }
  return !t.header.empty();
}

void print_keyed_rows(const CsvTable& t) {
  std::size_t width = 0;
  for (const auto& h : t.header) width = std::max(width, h.size());
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < t.header.size() && i < row.size(); ++i)
      std::cout << "  " << t.header[i] << std::string(width - t.header[i].size(), ' ')
                << "  " << row[i] << "\n";
  }
}

void print_grid(const CsvTable& t) {
  std::vector<std::size_t> w(t.header.size());
  for (std::size_t i = 0; i < t.header.size(); ++i) w[i] = t.header[i].size();
  for (const auto& row : t.rows)
    for (std::size_t i = 0; i < row.size() && i < w.size(); ++i)
      w[i] = std::max(w[i], row[i].size());
  auto line = [&](const std::vector<std::string>& cells) {
    std::cout << " ";
    for (std::size_t i = 0; i < cells.size() && i < w.size(); ++i)
      std::cout << " " << cells[i] << std::string(w[i] - cells[i].size(), ' ');
    std::cout << "\n";
  };
  line(t.header);
  for (const auto& row : t.rows) line(row);
}

}  // namespace

void force_defenses_off(SimConfig& cfg) {
  cfg.flood_on = false;
  cfg.blackhole = BlackholeDefense::Off;
  cfg.blackhole_node.clear();
  cfg.ack_on = false;
  cfg.gps_on = false;
}

int cmd_simulate(const CliOptions& opts) {
  Scenario sc;
  int rc = kExitOk;
  if (!load_scenario(opts.scenario_path, sc, rc)) return rc;
  RunResult result;
  try {
    result = run(sc, effective_config(sc, opts));
  } catch (const std::invalid_argument& e) {
    std::cerr << opts.scenario_path << ": " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "simulation failed: " << e.what() << "\n";
    return kExitIo;
  }
  if (!ensure_out_dir(opts.out_dir, rc)) return rc;
  const fs::path dir(opts.out_dir);
  if (!write_file(dir / "summary.csv", summary_csv(result.metrics)) ||
      !write_file(dir / "steps.csv", steps_csv(result.steps)) ||
      !write_file(dir / "commodities.csv", commodities_csv(result.commodities)) ||
      !write_file(dir / "events.log", events_log(result.events))) {
    std::cerr << "cannot write results under " << opts.out_dir << "\n";
    return kExitIo;
  }
  return kExitOk;
}

int cmd_optimize(const CliOptions& opts) {
  Scenario sc;
  int rc = kExitOk;
  if (!load_scenario(opts.scenario_path, sc, rc)) return rc;
  if (sc.commodities.empty()) {
    std::cerr << opts.scenario_path << ": optimize needs at least one demand record\n";
    return kExitInvalid;
  }
  EvolveResult best;
  RoutingOutcome outcome;
  LinkTable table;
  try {
    const SimConfig cfg = effective_config(sc, opts);
    table = canonical_links(sc.topology, cfg.capacity_default);
    best = evolve(table, sc.commodities, cfg.ga);
    outcome = route_demands(table, best.best, sc.commodities);
    outcome = backup_paths(table, best.best, sc.commodities, outcome);
  } catch (const std::invalid_argument& e) {
    std::cerr << opts.scenario_path << ": " << e.what() << "\n";
    return kExitInvalid;
  }

  std::string weights = "link_a,link_b,weight\n";
  for (std::size_t i = 0; i < table.size(); ++i) {
    weights += std::to_string(table.links[i].endpoints.first);
    weights += ',' + std::to_string(table.links[i].endpoints.second);
    weights += ',' + std::to_string(best.best.weights[i]);
    weights += '\n';
  }
  std::string history = "generation,best_fitness,mean_fitness,l1_best,l2_best\n";
  for (const GaHistoryRow& r : best.history) {
    history += std::to_string(r.generation);
    history += ',' + format_number(r.best_fitness);
    history += ',' + format_number(r.mean_fitness);
    history += ',' + format_number(r.l1_best);
    history += ',' + format_number(r.l2_best);
    history += '\n';
  }
  std::string paths = "g,src,dst,primary,backup\n";
  for (std::size_t i = 0; i < sc.commodities.size(); ++i) {
    const Commodity& c = sc.commodities[i];
    paths += std::to_string(c.cluster_id);
    paths += ',' + std::to_string(c.src);
    paths += ',' + std::to_string(c.dst);
    paths += ',';
    if (i < outcome.primary.size()) paths += join_path(outcome.primary[i]);
    paths += ',';
    if (i < outcome.backup.size() && outcome.backup[i]) paths += join_path(*outcome.backup[i]);
    paths += '\n';
  }

  if (!ensure_out_dir(opts.out_dir, rc)) return rc;
  const fs::path dir(opts.out_dir);
  if (!write_file(dir / "weights.csv", weights) ||
      !write_file(dir / "ga_history.csv", history) ||
      !write_file(dir / "paths.csv", paths)) {
    std::cerr << "cannot write results under " << opts.out_dir << "\n";
    return kExitIo;
  }
  return kExitOk;
}

int cmd_attack_eval(const CliOptions& opts) {
  Scenario sc;
  int rc = kExitOk;
  if (!load_scenario(opts.scenario_path, sc, rc)) return rc;
  if (sc.attackers.empty()) {
    std::cerr << opts.scenario_path << ": attack-eval needs at least one attacker record\n";
    return kExitInvalid;
  }
  std::vector<std::string> arms;
  if (!opts.defense) {
    arms = {"off", "on"};
  } else {
    arms = {*opts.defense};
  }

  std::string comparison = "arm,delivery_ratio,data_sent,data_delivered,data_dropped,"
                           "control_msgs,blacklist_events,";
  comparison += kDetectorCols;
  comparison += ",max_link_utilization,route_discoveries\n";
  std::vector<std::pair<std::string, std::string>> logs;
  for (const std::string& arm : arms) {
    SimConfig cfg;
    try {
      cfg = scenario_config(sc);
    } catch (const std::invalid_argument& e) {
      std::cerr << opts.scenario_path << ": " << e.what() << "\n";
      return kExitInvalid;
    }
    if (opts.seed) cfg.seed = *opts.seed;
    if (arm == "off") force_defenses_off(cfg);
    RunResult result;
    try {
      result = run(sc, cfg);
    } catch (const std::exception& e) {
      std::cerr << "simulation failed (" << arm << " arm): " << e.what() << "\n";
      return kExitIo;
    }
    const MetricsReport& m = result.metrics;
    std::string row = arm;
    row += ',' + format_number(m.delivery_ratio);
    row += ',' + std::to_string(m.data_sent);
    row += ',' + std::to_string(m.data_delivered);
    row += ',' + std::to_string(m.data_dropped);
    row += ',' + std::to_string(m.control_msgs);
    row += ',' + std::to_string(m.blacklist_events);
    append_detector_cells(row, m);
    row += ',' + format_number(m.max_link_utilization);
    row += ',' + std::to_string(m.route_discoveries);
    comparison += row + "\n";
    logs.emplace_back("events_" + arm + ".log", events_log(result.events));
  }

  if (!ensure_out_dir(opts.out_dir, rc)) return rc;
  const fs::path dir(opts.out_dir);
  bool ok = write_file(dir / "comparison.csv", comparison);
  for (const auto& [name, content] : logs) ok = ok && write_file(dir / name, content);
  if (!ok) {
    std::cerr << "cannot write results under " << opts.out_dir << "\n";
    return kExitIo;
  }
  return kExitOk;
}

int cmd_report(const std::string& dir) {
  const fs::path base(dir);
  bool any = false;
  CsvTable t;
  if (read_csv(base / "summary.csv", t)) {
    std::cout << "summary\n";
    print_keyed_rows(t);
    any = true;
  }
  t = {};
  if (read_csv(base / "comparison.csv", t)) {
    std::cout << "comparison\n";
    print_grid(t);
    any = true;
  }
  t = {};
  if (read_csv(base / "commodities.csv", t)) {
    std::cout << "commodities\n";
    print_grid(t);
    any = true;
  }
  t = {};
  if (read_csv(base / "paths.csv", t)) {
    std::cout << "paths\n";
    print_grid(t);
    any = true;
  }
  if (!any) {
    std::cerr << "no result tables under " << dir << "\n";
    return kExitIo;
  }
  return kExitOk;
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"MANET attack and defense simulator with GA link-weight optimization"};
  app.require_subcommand(1);

  CliOptions opts;
  long long seed = 0;
  std::string defense;
  std::string report_dir;
  int rc = kExitOk;

  auto wire = [&](CLI::App* sub, bool with_defense) {
    sub->add_option("scenario", opts.scenario_path, "scenario file")->required();
    sub->add_option("--out", opts.out_dir, "output directory (default .)");
    auto* seed_opt = sub->add_option("--seed", seed, "override param sim.seed");
    CLI::Option* defense_opt = nullptr;
    if (with_defense)
      defense_opt = sub->add_option("--defense", defense, "on|off")
                        ->check(CLI::IsMember({"on", "off"}));
    return std::make_pair(seed_opt, defense_opt);
  };

  auto* sim = app.add_subcommand("simulate", "run one scenario and write metrics");
  auto [sim_seed, sim_def] = wire(sim, true);
  sim->callback([&, sim_seed, sim_def] {
    if (sim_seed->count()) opts.seed = seed;
    if (sim_def->count()) opts.defense = defense;
    rc = cmd_simulate(opts);
  });

  auto* opt = app.add_subcommand("optimize", "evolve link weights for the scenario demands");
  auto [opt_seed, opt_def] = wire(opt, false);
  (void)opt_def;
  opt->callback([&, opt_seed] {
    if (opt_seed->count()) opts.seed = seed;
    rc = cmd_optimize(opts);
  });

  auto* att = app.add_subcommand("attack-eval", "compare defenses off vs on");
  auto [att_seed, att_def] = wire(att, true);
  att->callback([&, att_seed, att_def] {
    if (att_seed->count()) opts.seed = seed;
    if (att_def->count()) opts.defense = defense;
    rc = cmd_attack_eval(opts);
  });

  auto* rep = app.add_subcommand("report", "print the tables in a result directory");
  rep->add_option("dir", report_dir, "result directory")->required();
  rep->callback([&] { rc = cmd_report(report_dir); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitInvalid;
  }
  return rc;
}

}  // namespace manet
