// Times the serial reference population evaluation against the OpenMP one
// on a synthetic grid workload and checks that both produce identical
// fitness vectors.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "manet/gaopt.hpp"

using namespace manet;

namespace {

Topology grid_topology(int side) {
  Topology topo;
  topo.mode = AdjacencyMode::Explicit;
  auto id = [side](int r, int c) { return r * side + c + 1; };
  for (int r = 0; r < side; ++r)
    for (int c = 0; c < side; ++c) {
      NodeState n;
      n.id = id(r, c);
      n.pos = {c * 100.0, r * 100.0};
      topo.nodes[n.id] = n;
    }
  for (int r = 0; r < side; ++r)
    for (int c = 0; c < side; ++c) {
      if (c + 1 < side) {
        LinkKey k = make_link_key(id(r, c), id(r, c + 1));
        topo.links[k] = LinkSpec{k, 50.0, true};
      }
      if (r + 1 < side) {
        LinkKey k = make_link_key(id(r, c), id(r + 1, c));
        topo.links[k] = LinkSpec{k, 50.0, true};
      }
    }
  return topo;
}

std::vector<Commodity> grid_commodities(int side, int count, Rng& rng) {
  std::vector<Commodity> out;
  const int n = side * side;
  for (int g = 1; g <= count; ++g) {
    Commodity c;
    c.cluster_id = g;
    c.src = 1 + rng.uniform_int(0, n - 1);
    do {
      c.dst = 1 + rng.uniform_int(0, n - 1);
    } while (c.dst == c.src);
    c.demand = 1.0 + rng.uniform_int(0, 9);
    out.push_back(c);
  }
  return out;
}

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

int main(int argc, char** argv) {
  int reps = argc > 1 ? std::atoi(argv[1]) : 20;
  if (reps < 1) reps = 1;

  const int side = 8;
  Topology topo = grid_topology(side);
  GaParams params;
  params.pop_size = 256;
  Rng rng(42);
  const std::vector<Commodity> commodities = grid_commodities(side, 16, rng);
  const LinkTable table = canonical_links(topo, 50.0);
  const std::vector<Chromosome> pop = init_population(params, table.size(), rng);

  std::printf("population %d, %zu links, %zu commodities, %d sweeps\n", params.pop_size,
              table.size(), commodities.size(), reps);

  std::vector<FitnessBreakdown> serial, parallel;
  auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i)
    serial = evaluate_population_serial(table, pop, commodities, params);
  const double serial_ms = ms_since(t0);

  t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i)
    parallel = evaluate_population_parallel(table, pop, commodities, params);
  const double parallel_ms = ms_since(t0);

  bool identical = serial.size() == parallel.size();
  for (std::size_t i = 0; identical && i < serial.size(); ++i)
    identical = serial[i].fitness == parallel[i].fitness && serial[i].l1 == parallel[i].l1 &&
                serial[i].l2 == parallel[i].l2;

  std::printf("serial    %9.2f ms total  %8.3f ms/sweep\n", serial_ms, serial_ms / reps);
  std::printf("parallel  %9.2f ms total  %8.3f ms/sweep\n", parallel_ms, parallel_ms / reps);
  std::printf("speedup   %.2fx\n", serial_ms / parallel_ms);
  std::printf("results identical: %s\n", identical ? "yes" : "NO");
  return identical ? 0 : 1;
}
