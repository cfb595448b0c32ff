#pragma once

#include <cstdint>
#include <string>

#include "mpc/errors.hpp"

namespace mpc {

// Closed integer symbol range [y_min, y_max].  Zero is always inside so that
// an all-zero latent is representable, and the range has at least two symbols
// so every CDF row has an interior point.
struct SymbolAlphabet {
  int32_t y_min = 0;
  int32_t y_max = 1;

  SymbolAlphabet() = default;
  SymbolAlphabet(int32_t lo, int32_t hi) : y_min(lo), y_max(hi) {
    if (lo > 0 || hi < 0) {
      throw UsageError("alphabet must contain zero, got [" +
                       std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    if (size() < 2) {
      throw UsageError("alphabet needs at least two symbols");
    }
  }

  int32_t size() const { return y_max - y_min + 1; }
  bool contains(int32_t s) const { return s >= y_min && s <= y_max; }
  int32_t offset(int32_t s) const { return s - y_min; }
};

inline bool operator==(const SymbolAlphabet& a, const SymbolAlphabet& b) {
  return a.y_min == b.y_min && a.y_max == b.y_max;
}

}  // namespace mpc
