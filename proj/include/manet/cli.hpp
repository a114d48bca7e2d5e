#ifndef MANET_CLI_HPP
#define MANET_CLI_HPP

#include <optional>
#include <string>

#include "manet/engine.hpp"

namespace manet {

// Exit codes shared by every command: 0 success, 1 I/O failure,
// 2 scenario or option validation error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitInvalid = 2;

struct CliOptions {
  std::string scenario_path;
  std::string out_dir = ".";
  std::optional<long long> seed;           // overrides param sim.seed
  std::optional<std::string> defense;      // "on" | "off"; absent = scenario as written
};

// Scenario defenses forced off: the baseline arm of attack evaluation.
void force_defenses_off(SimConfig& cfg);

// Writes summary.csv, steps.csv, commodities.csv, events.log.
int cmd_simulate(const CliOptions& opts);

// Writes weights.csv, ga_history.csv, paths.csv. Requires >= 1 demand.
int cmd_optimize(const CliOptions& opts);

// Runs the defenses-off and defenses-on arms (or just the one selected by
// --defense) and writes comparison.csv plus per-arm event logs. Requires
// >= 1 attacker.
int cmd_attack_eval(const CliOptions& opts);

// Prints the tables found in a result directory.
int cmd_report(const std::string& dir);

// Argument parsing and dispatch for the manetsim binary.
int run_cli(int argc, const char* const* argv);

// Shortest decimal text that round-trips the value; "." decimal point.
std::string format_number(double v);

}  // namespace manet

#endif
