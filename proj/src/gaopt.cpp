#include "manet/gaopt.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <stdexcept>
#include <tuple>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace manet {

namespace {
constexpr double kFitnessEpsilon = 1e-9;
}

void GaParams::validate() const {
  if (pop_size <= 0 || pop_size % 2 != 0)
    throw std::invalid_argument("ga: pop_size must be positive and even");
  if (max_weight < 1) throw std::invalid_argument("ga: max_weight must be >= 1");
  if (a <= 0 || b <= 0 || c <= 0)
    throw std::invalid_argument("ga: fitness coefficients must be > 0");
  if (k_c < 0 || k_c > 1 || k_m < 0 || k_m > 1)
    throw std::invalid_argument("ga: k_c and k_m must lie in [0,1]");
  if (elite < 1 || elite >= pop_size)
    throw std::invalid_argument("ga: elite must satisfy 1 <= elite < pop_size");
  if (generations < 0) throw std::invalid_argument("ga: generations must be >= 0");
}

int LinkTable::index_of(const LinkKey& key) const {
  for (std::size_t i = 0; i < links.size(); ++i)
    if (links[i].endpoints == key) return static_cast<int>(i);
  return -1;
}

LinkTable canonical_links(const Topology& topo, double default_capacity) {
  LinkTable t;
  t.links = topo.effective_links(default_capacity);
  std::sort(t.links.begin(), t.links.end(),
            [](const LinkSpec& x, const LinkSpec& y) { return x.endpoints < y.endpoints; });
  return t;
}

std::vector<Chromosome> init_population(const GaParams& params, std::size_t n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("ga: need at least one link");
  std::vector<Chromosome> pop(params.pop_size);
  for (auto& c : pop) {
    c.weights.resize(n);
    for (auto& w : c.weights) w = rng.uniform_int(1, params.max_weight);
  }
  return pop;
}

std::optional<std::vector<NodeId>> weighted_shortest_path(
    const LinkTable& table, const std::vector<int>& weights, NodeId src, NodeId dst,
    const std::set<LinkKey>& excluded) {
  if (weights.size() != table.links.size())
    throw std::invalid_argument("weight vector length does not match link table");

  std::map<NodeId, std::vector<std::pair<NodeId, long long>>> adj;
  for (std::size_t i = 0; i < table.links.size(); ++i) {
    const auto& l = table.links[i];
    if (excluded.count(l.endpoints)) continue;
    adj[l.endpoints.first].emplace_back(l.endpoints.second, weights[i]);
    adj[l.endpoints.second].emplace_back(l.endpoints.first, weights[i]);
  }
  for (auto& [n, edges] : adj) std::sort(edges.begin(), edges.end());

  if (src == dst) return std::vector<NodeId>{src};

  // label = (cost, hops, path); the path component resolves remaining ties
  // lexicographically and is prefix-monotone, so plain settling is exact
  using Label = std::tuple<long long, int, std::vector<NodeId>>;
  std::priority_queue<Label, std::vector<Label>, std::greater<Label>> pq;
  std::set<NodeId> settled;
  pq.push({0, 0, {src}});
  while (!pq.empty()) {
    auto [cost, hops, path] = pq.top();
    pq.pop();
    const NodeId u = path.back();
    if (settled.count(u)) continue;
    settled.insert(u);
    if (u == dst) return path;
    auto it = adj.find(u);
    if (it == adj.end()) continue;
    for (const auto& [v, w] : it->second) {
      if (settled.count(v)) continue;
      std::vector<NodeId> next = path;
      next.push_back(v);
      pq.push({cost + w, hops + 1, std::move(next)});
    }
  }
  return std::nullopt;
}

RoutingOutcome route_demands(const LinkTable& table, const Chromosome& chrom,
                             const std::vector<Commodity>& commodities) {
  RoutingOutcome out;
  out.primary.resize(commodities.size());
  out.backup.resize(commodities.size());
  out.link_load.assign(table.size(), 0.0);

  std::map<LinkKey, std::size_t> index;
  for (std::size_t i = 0; i < table.links.size(); ++i) index[table.links[i].endpoints] = i;

  for (std::size_t g = 0; g < commodities.size(); ++g) {
    const auto& com = commodities[g];
    auto path = weighted_shortest_path(table, chrom.weights, com.src, com.dst);
    if (!path) {
      out.all_routable = false;
      continue;
    }
    out.primary[g] = *path;
    for (std::size_t i = 0; i + 1 < path->size(); ++i)
      out.link_load[index.at(make_link_key((*path)[i], (*path)[i + 1]))] += com.demand;
  }
  return out;
}

FitnessBreakdown evaluate(const LinkTable& table, const Chromosome& chrom,
                          const std::vector<Commodity>& commodities,
                          const GaParams& params) {
  const RoutingOutcome outcome = route_demands(table, chrom, commodities);
  FitnessBreakdown fb;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const double load = outcome.link_load[i];
    fb.l1 += load;
    const double cap = table.links[i].capacity;
    if (load > cap) {
      fb.l2 += load - cap;
      fb.overloaded_links.insert(table.links[i].endpoints);
    }
  }
  if (!outcome.all_routable) {
    fb.fitness = 0.0;
    return fb;
  }
  fb.fitness = params.c / std::max(params.a * fb.l1 + params.b * fb.l2, kFitnessEpsilon);
  return fb;
}

std::vector<FitnessBreakdown> evaluate_population_serial(
    const LinkTable& table, const std::vector<Chromosome>& pop,
    const std::vector<Commodity>& commodities, const GaParams& params) {
  std::vector<FitnessBreakdown> out(pop.size());
  for (std::size_t i = 0; i < pop.size(); ++i)
    out[i] = evaluate(table, pop[i], commodities, params);
  return out;
}

std::vector<FitnessBreakdown> evaluate_population_parallel(
    const LinkTable& table, const std::vector<Chromosome>& pop,
    const std::vector<Commodity>& commodities, const GaParams& params) {
  std::vector<FitnessBreakdown> out(pop.size());
#if defined(_OPENMP)
#pragma omp parallel for schedule(static)
#endif
  for (long long i = 0; i < static_cast<long long>(pop.size()); ++i)
    out[i] = evaluate(table, pop[i], commodities, params);
  return out;
}

RankResult rank_and_partition(const std::vector<FitnessBreakdown>& fitness) {
  std::vector<std::size_t> order(fitness.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return fitness[x].fitness > fitness[y].fitness;
  });
  RankResult r;
  const std::size_t half = order.size() / 2;
  r.uc.assign(order.begin(), order.begin() + half);
  r.lc.assign(order.begin() + half, order.end());
  return r;
}

Chromosome crossover(const Chromosome& parent_uc, const Chromosome& parent_lc,
                     double k_c, Rng& rng) {
  if (parent_uc.weights.size() != parent_lc.weights.size())
    throw std::invalid_argument("crossover: parent length mismatch");
  Chromosome child;
  child.weights.resize(parent_uc.weights.size());
  for (std::size_t i = 0; i < child.weights.size(); ++i)
    child.weights[i] = rng.chance(k_c) ? parent_lc.weights[i] : parent_uc.weights[i];
  return child;
}

Chromosome mutate(const Chromosome& chrom, double k_m, int max_weight, Rng& rng) {
  Chromosome out = chrom;
  for (auto& w : out.weights)
    if (rng.chance(k_m)) w = rng.uniform_int(1, max_weight);
  return out;
}

EvolveResult evolve(const LinkTable& table, const std::vector<Commodity>& commodities,
                    const GaParams& params) {
  params.validate();
  Rng rng(params.seed);

  std::vector<Chromosome> pop = init_population(params, table.size(), rng);
  auto eval = [&](const std::vector<Chromosome>& p) {
    return params.parallel_eval
               ? evaluate_population_parallel(table, p, commodities, params)
               : evaluate_population_serial(table, p, commodities, params);
  };

  EvolveResult result;
  int unimproved = 0;
  bool have_best = false;

  std::vector<FitnessBreakdown> fitness = eval(pop);
  for (int gen = 0; gen <= params.generations; ++gen) {
    std::size_t gen_best = 0;
    double mean = 0.0;
    for (std::size_t i = 0; i < fitness.size(); ++i) {
      mean += fitness[i].fitness;
      if (fitness[i].fitness > fitness[gen_best].fitness) gen_best = i;
    }
    mean /= static_cast<double>(fitness.size());
    result.history.push_back(GaHistoryRow{gen, fitness[gen_best].fitness, mean,
                                          fitness[gen_best].l1, fitness[gen_best].l2});

    if (!have_best || fitness[gen_best].fitness > result.best_fitness.fitness) {
      result.best = pop[gen_best];
      result.best_fitness = fitness[gen_best];
      have_best = true;
      unimproved = 0;
    } else {
      ++unimproved;
    }
    if (gen == params.generations) break;
    if (params.stagnation > 0 && unimproved >= params.stagnation) break;

    const RankResult rank = rank_and_partition(fitness);
    std::vector<Chromosome> next;
    next.reserve(pop.size());
    for (int e = 0; e < params.elite; ++e) next.push_back(pop[rank.uc[e]]);
    while (next.size() < pop.size()) {
      const auto& uc = pop[rank.uc[rng.uniform_int(0, static_cast<int>(rank.uc.size()) - 1)]];
      const auto& lc = pop[rank.lc[rng.uniform_int(0, static_cast<int>(rank.lc.size()) - 1)]];
      next.push_back(mutate(crossover(uc, lc, params.k_c, rng), params.k_m, params.max_weight, rng));
    }
    pop = std::move(next);
    fitness = eval(pop);
  }
  return result;
}

RoutingOutcome backup_paths(const LinkTable& table, const Chromosome& chrom,
                            const std::vector<Commodity>& commodities,
                            RoutingOutcome outcome) {
  for (std::size_t g = 0; g < commodities.size(); ++g) {
    if (outcome.primary[g].empty()) continue;
    std::set<LinkKey> primary_links;
    const auto& p = outcome.primary[g];
    for (std::size_t i = 0; i + 1 < p.size(); ++i)
      primary_links.insert(make_link_key(p[i], p[i + 1]));
    outcome.backup[g] = weighted_shortest_path(table, chrom.weights,
                                               commodities[g].src, commodities[g].dst,
                                               primary_links);
  }
  return outcome;
}

}  // namespace manet
