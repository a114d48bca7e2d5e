#ifndef MANET_GAOPT_HPP
#define MANET_GAOPT_HPP

#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "manet/netmodel.hpp"
#include "manet/rng.hpp"

namespace manet {

// Link weight vector, one gene per link in canonical order, genes in
// [1, max_weight].
struct Chromosome {
  std::vector<int> weights;
  bool operator==(const Chromosome&) const = default;
};

struct GaParams {
  int pop_size = 100;
  int max_weight = 64;
  double a = 1.0;  // overall-load coefficient
  double b = 1.0;  // overload-penalty coefficient
  double c = 1.0;  // fitness numerator
  double k_c = 0.05;  // per-gene probability of inheriting the LC parent's gene
  double k_m = 0.05;  // per-gene mutation probability
  int generations = 200;
  int elite = 1;
  int stagnation = 50;  // stop after this many unimproved generations; 0 disables
  std::uint64_t seed = 1;
  bool parallel_eval = true;

  void validate() const;  // throws std::invalid_argument
};

struct FitnessBreakdown {
  double l1 = 0.0;  // total routed load over all links
  double l2 = 0.0;  // total excess on overloaded links
  std::set<LinkKey> overloaded_links;
  double fitness = 0.0;
  bool operator==(const FitnessBreakdown&) const = default;
};

struct RoutingOutcome {
  std::vector<std::vector<NodeId>> primary;  // per commodity; empty = unroutable
  std::vector<std::optional<std::vector<NodeId>>> backup;
  std::vector<double> link_load;  // by canonical link index
  bool all_routable = true;
};

// Canonical link ordering shared by chromosomes, loads and CSV output:
// sorted by (min endpoint, max endpoint). Unit-disk topologies contribute
// derived neighbor pairs at default_capacity.
struct LinkTable {
  std::vector<LinkSpec> links;

  std::size_t size() const { return links.size(); }
  int index_of(const LinkKey& key) const;  // -1 when absent
};

LinkTable canonical_links(const Topology& topo, double default_capacity);

struct GaHistoryRow {
  int generation = 0;
  double best_fitness = 0.0;
  double mean_fitness = 0.0;
  double l1_best = 0.0;
  double l2_best = 0.0;
};

struct EvolveResult {
  Chromosome best;
  FitnessBreakdown best_fitness;
  std::vector<GaHistoryRow> history;
};

std::vector<Chromosome> init_population(const GaParams& params, std::size_t n, Rng& rng);

// Minimum-total-weight path per commodity under the chromosome's weights,
// ties broken by fewer hops then lexicographically smallest node sequence.
// Loads accumulate each commodity's demand on every primary-path link.
RoutingOutcome route_demands(const LinkTable& table, const Chromosome& chrom,
                             const std::vector<Commodity>& commodities);

FitnessBreakdown evaluate(const LinkTable& table, const Chromosome& chrom,
                          const std::vector<Commodity>& commodities,
                          const GaParams& params);

// Population-wide evaluation. The parallel path distributes chromosomes over
// OpenMP threads; results are written into per-chromosome slots, so it is
// bit-identical to the serial reference.
std::vector<FitnessBreakdown> evaluate_population_serial(
    const LinkTable& table, const std::vector<Chromosome>& pop,
    const std::vector<Commodity>& commodities, const GaParams& params);
std::vector<FitnessBreakdown> evaluate_population_parallel(
    const LinkTable& table, const std::vector<Chromosome>& pop,
    const std::vector<Commodity>& commodities, const GaParams& params);

struct RankResult {
  std::vector<std::size_t> uc;  // upper-class indices, best first
  std::vector<std::size_t> lc;  // lower-class indices
};

// Descending fitness, stable in original index on ties; first half UC,
// second half LC.
RankResult rank_and_partition(const std::vector<FitnessBreakdown>& fitness);

Chromosome crossover(const Chromosome& parent_uc, const Chromosome& parent_lc,
                     double k_c, Rng& rng);

Chromosome mutate(const Chromosome& chrom, double k_m, int max_weight, Rng& rng);

EvolveResult evolve(const LinkTable& table, const std::vector<Commodity>& commodities,
                    const GaParams& params);

// Edge-disjoint backups: recompute each commodity's path with its primary
// links removed, same weights and tie-breaks. Absent when no disjoint path
// exists.
RoutingOutcome backup_paths(const LinkTable& table, const Chromosome& chrom,
                            const std::vector<Commodity>& commodities,
                            RoutingOutcome outcome);

// Shortest path under explicit integer link weights; nullopt when
// disconnected. Exposed for the engine's static routing mode.
std::optional<std::vector<NodeId>> weighted_shortest_path(
    const LinkTable& table, const std::vector<int>& weights, NodeId src, NodeId dst,
    const std::set<LinkKey>& excluded = {});

}  // namespace manet

#endif
