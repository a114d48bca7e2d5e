#ifndef MANET_RNG_HPP
#define MANET_RNG_HPP

#include <cstdint>
#include <random>

namespace manet {

// Seeded RNG with portable derivations. std::mt19937_64 output is fixed by
// the standard, but std::uniform_*_distribution is not, so bounded draws are
// derived here to keep runs reproducible across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Inclusive range. Modulo reduction; bias is negligible for the
  // simulation-scale ranges used here and keeps the stream portable.
  int uniform_int(int lo, int hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(engine_() % span);
  }

  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform_real(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
  }

  bool chance(double p) { return uniform01() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace manet

#endif
