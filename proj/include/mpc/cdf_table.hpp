#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mpc/alphabet.hpp"
#include "mpc/cpm.hpp"
#include "mpc/errors.hpp"

namespace mpc {

// Frozen fixed-point CDF tables: one row of L+1 cumulative values per
// (prior, channel), anchored at 0 and 2^16 and strictly increasing so every
// symbol keeps a nonzero coding interval.
class CdfTableSet {
 public:
  static constexpr uint32_t kDenomBits = 16;
  static constexpr uint32_t kDenom = 1u << kDenomBits;
  // Strict monotonicity over L+1 entries needs headroom inside 2^16 quanta.
  static constexpr int32_t kMaxAlphabet = 1 << 15;

  CdfTableSet() = default;
  CdfTableSet(int n_cdf, int c_l, SymbolAlphabet alphabet)
      : n_cdf_(n_cdf), c_l_(c_l), alphabet_(alphabet) {
    if (n_cdf < 1 || c_l < 1) {
      throw UsageError("table set needs n_cdf >= 1 and c_l >= 1");
    }
    if (alphabet.size() > kMaxAlphabet) {
      throw UsageError("alphabet size " + std::to_string(alphabet.size()) +
                       " exceeds 16-bit table capacity");
    }
    t_.assign(static_cast<size_t>(n_cdf) * c_l * (alphabet.size() + 1), 0);
  }

  int n_cdf() const { return n_cdf_; }
  int c_l() const { return c_l_; }
  const SymbolAlphabet& alphabet() const { return alphabet_; }
  int row_len() const { return alphabet_.size() + 1; }

  std::span<uint32_t> row(int prior, int channel) {
    return {t_.data() +
                (static_cast<size_t>(prior) * c_l_ + channel) * row_len(),
            static_cast<size_t>(row_len())};
  }
  std::span<const uint32_t> row(int prior, int channel) const {
    return {t_.data() +
                (static_cast<size_t>(prior) * c_l_ + channel) * row_len(),
            static_cast<size_t>(row_len())};
  }

  const std::vector<uint32_t>& raw() const { return t_; }
  std::vector<uint32_t>& raw() { return t_; }

  void validate() const {
    for (int i = 0; i < n_cdf_; ++i) {
      for (int c = 0; c < c_l_; ++c) {
        auto r = row(i, c);
        if (r.front() != 0 || r.back() != kDenom) {
          throw FormatError("CDF row endpoints must be 0 and 2^16");
        }
        for (size_t s = 1; s < r.size(); ++s) {
          if (r[s] <= r[s - 1]) {
            throw FormatError("CDF row not strictly increasing");
          }
        }
      }
    }
  }

 private:
  int n_cdf_ = 0;
  int c_l_ = 0;
  SymbolAlphabet alphabet_;
  std::vector<uint32_t> t_;
};

// Rounds a trained stack into fixed-point tables.  Ties and collapsed steps
// are repaired by bumping later entries upward, then clamping back from the
// top anchor, which keeps rows strictly increasing for any alphabet up to
// kMaxAlphabet.
template <typename Scalar>
CdfTableSet freeze(const MonotoneCdfStack<Scalar>& stack,
                   const SymbolAlphabet& alphabet) {
  CdfTableSet out(stack.n_cdf(), stack.c_l(), alphabet);
  const int L = alphabet.size();
  for (int i = 0; i < stack.n_cdf(); ++i) {
    for (int c = 0; c < stack.c_l(); ++c) {
      auto r = out.row(i, c);
      for (int s = 0; s <= L; ++s) {
        double v = static_cast<double>(stack.eval_cdf(
            i, c, Scalar(alphabet.y_min + s) - Scalar(0.5)));
        int64_t q = std::llround(65536.0 * v);
        r[s] = static_cast<uint32_t>(std::clamp<int64_t>(q, 0, 65536));
      }
      r[0] = 0;
      r[L] = CdfTableSet::kDenom;
      for (int s = 1; s <= L; ++s) {
        r[s] = std::max(r[s], r[s - 1] + 1);
      }
      r[L] = CdfTableSet::kDenom;
      for (int s = L - 1; s >= 1; --s) {
        r[s] = std::min(r[s], r[s + 1] - 1);
      }
    }
  }
  out.validate();
  return out;
}

inline double table_bitcost(const CdfTableSet& t, int prior, int channel,
                            int32_t s) {
  auto r = t.row(prior, channel);
  int32_t off = t.alphabet().offset(s);
  double mass = static_cast<double>(r[off + 1] - r[off]) / CdfTableSet::kDenom;
  return -std::log2(mass);
}

// Per-symbol bitcosts of every row, precomputed for prior selection.
struct BitcostLut {
  int n_cdf = 0;
  int c_l = 0;
  int len = 0;       // alphabet size
  int32_t y_min = 0; // symbol s lives at index s - y_min
  std::vector<float> bits;

  const float* row(int prior, int channel) const {
    return bits.data() + (static_cast<size_t>(prior) * c_l + channel) * len;
  }
};

inline BitcostLut make_bitcost_lut(const CdfTableSet& t) {
  BitcostLut lut;
  lut.n_cdf = t.n_cdf();
  lut.c_l = t.c_l();
  lut.len = t.alphabet().size();
  lut.y_min = t.alphabet().y_min;
  lut.bits.resize(static_cast<size_t>(lut.n_cdf) * lut.c_l * lut.len);
  size_t pos = 0;
  for (int i = 0; i < lut.n_cdf; ++i) {
    for (int c = 0; c < lut.c_l; ++c) {
      auto r = t.row(i, c);
      for (int s = 0; s < lut.len; ++s) {
        double mass =
            static_cast<double>(r[s + 1] - r[s]) / CdfTableSet::kDenom;
        lut.bits[pos++] = static_cast<float>(-std::log2(mass));
      }
    }
  }
  return lut;
}

}  // namespace mpc
