#pragma once

#include <cstdint>
#include <random>

namespace mpc {

// mt19937_64 with hand-rolled scalar draws.  The std <random> distributions
// are implementation-defined, so going through them would make seeded runs
// differ across standard libraries.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  uint64_t bits() { return eng_(); }

  // [0, 1)
  double uniform() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // [0, n)
  int64_t below(int64_t n) {
    return static_cast<int64_t>(bits() % static_cast<uint64_t>(n));
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace mpc
