#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mpc/errors.hpp"

namespace mpc {

// Location-major storage: symbol (c, k, l) lives at ((k * w_l + l) * c_l + c).
// Both the coder (channel-innermost scan) and prior selection (per-location
// channel vectors) then walk contiguous memory.
struct QuantizedLatent {
  int c_l = 0;
  int h_l = 0;
  int w_l = 0;
  std::vector<int32_t> sym;

  QuantizedLatent() = default;
  QuantizedLatent(int c, int h, int w)
      : c_l(c), h_l(h), w_l(w),
        sym(static_cast<size_t>(c) * h * w, 0) {
    if (c < 0 || h < 0 || w < 0) {
      throw UsageError("latent dimensions must be non-negative");
    }
  }

  size_t locations() const { return static_cast<size_t>(h_l) * w_l; }
  size_t symbol_count() const { return sym.size(); }

  int32_t& at(int c, int k, int l) {
    return sym[(static_cast<size_t>(k) * w_l + l) * c_l + c];
  }
  int32_t at(int c, int k, int l) const {
    return sym[(static_cast<size_t>(k) * w_l + l) * c_l + c];
  }

  std::span<int32_t> loc(int k, int l) {
    return {sym.data() + (static_cast<size_t>(k) * w_l + l) * c_l,
            static_cast<size_t>(c_l)};
  }
  std::span<const int32_t> loc(int k, int l) const {
    return {sym.data() + (static_cast<size_t>(k) * w_l + l) * c_l,
            static_cast<size_t>(c_l)};
  }
};

// Real-valued analysis coefficients with the same layout.
struct LatentF {
  int c_l = 0;
  int h_l = 0;
  int w_l = 0;
  std::vector<double> coef;

  LatentF() = default;
  LatentF(int c, int h, int w)
      : c_l(c), h_l(h), w_l(w),
        coef(static_cast<size_t>(c) * h * w, 0.0) {}

  double& at(int c, int k, int l) {
    return coef[(static_cast<size_t>(k) * w_l + l) * c_l + c];
  }
  double at(int c, int k, int l) const {
    return coef[(static_cast<size_t>(k) * w_l + l) * c_l + c];
  }
};

// One prior index per latent spatial location, row-major.
struct PriorIndexMap {
  int h_l = 0;
  int w_l = 0;
  std::vector<uint16_t> idx;

  PriorIndexMap() = default;
  PriorIndexMap(int h, int w)
      : h_l(h), w_l(w), idx(static_cast<size_t>(h) * w, 0) {}

  uint16_t& at(int k, int l) { return idx[static_cast<size_t>(k) * w_l + l]; }
  uint16_t at(int k, int l) const {
    return idx[static_cast<size_t>(k) * w_l + l];
  }

  void validate(int n_cdf) const {
    if (idx.size() != static_cast<size_t>(h_l) * w_l) {
      throw FormatError("prior index map size mismatch");
    }
    for (uint16_t v : idx) {
      if (v >= n_cdf) {
        throw FormatError("prior index " + std::to_string(v) +
                          " out of range for n_cdf=" + std::to_string(n_cdf));
      }
    }
  }
};

}  // namespace mpc
