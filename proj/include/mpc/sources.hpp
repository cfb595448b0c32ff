#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "mpc/alphabet.hpp"
#include "mpc/competition.hpp"
#include "mpc/latent.hpp"
#include "mpc/rng.hpp"

namespace mpc {

// Discrete pmf over [support_min, support_min + p.size() - 1].
struct ChannelPmf {
  int32_t support_min = 0;
  Eigen::ArrayXd p;

  void validate() const;
  double entropy_bits() const;
  int32_t support_max() const {
    return support_min + static_cast<int32_t>(p.size()) - 1;
  }
};

ChannelPmf uniform_pmf(int32_t lo, int32_t hi);
// Two-sided geometric decay exp(-|s| / scale) on [-span, span].
ChannelPmf laplace_pmf(double scale, int32_t span);
ChannelPmf point_pmf(int32_t value);

struct RegimeSpec {
  std::vector<ChannelPmf> channels;
};

// Latents whose per-location statistics follow a fixed regime layout, with
// exact per-location entropy available as an oracle.
struct SyntheticSourceSpec {
  int c_l = 0;
  int h_l = 0;
  int w_l = 0;
  std::vector<RegimeSpec> regimes;
  std::vector<uint8_t> layout;  // h_l * w_l regime ids

  void validate() const;
  SymbolAlphabet support_alphabet(int32_t margin = 0) const;
  double location_entropy_bits(int regime) const;
  double mean_entropy_bits_per_symbol() const;
};

// Layout helpers.
std::vector<uint8_t> layout_bands(int h_l, int w_l, int n_regimes);
std::vector<uint8_t> layout_quadrants(int h_l, int w_l);
std::vector<uint8_t> layout_random(int h_l, int w_l, int n_regimes,
                                   uint64_t seed);

struct SyntheticDraw {
  QuantizedLatent latent;
  std::vector<uint8_t> labels;  // regime id per location
};

SyntheticDraw sample_synthetic(const SyntheticSourceSpec& spec, Rng& rng);

class SyntheticLatentSource : public LatentSource {
 public:
  explicit SyntheticLatentSource(SyntheticSourceSpec spec);
  QuantizedLatent next(Rng& rng) override;
  const SyntheticSourceSpec& spec() const { return spec_; }

 private:
  SyntheticSourceSpec spec_;
};

// Cycles through a fixed set of latents.
class FixedLatentSource : public LatentSource {
 public:
  explicit FixedLatentSource(std::vector<QuantizedLatent> latents);
  QuantizedLatent next(Rng& rng) override;

 private:
  std::vector<QuantizedLatent> latents_;
  size_t pos_ = 0;
};

// Uniform random crops from one big latent.
class CropLatentSource : public LatentSource {
 public:
  CropLatentSource(QuantizedLatent full, int crop_h, int crop_w);
  QuantizedLatent next(Rng& rng) override;

 private:
  QuantizedLatent full_;
  int crop_h_;
  int crop_w_;
};

// Observed symbol bounds widened by a margin; the codec's trained alphabet.
SymbolAlphabet observed_alphabet(const std::vector<QuantizedLatent>& latents,
                                 int32_t margin = 2);
SymbolAlphabet observed_alphabet(const QuantizedLatent& latent,
                                 int32_t margin = 2);

// JSON description of a synthetic source:
// {"c_l":4, "h_l":24, "w_l":24, "layout":"bands",
//  "regimes":[{"channels":[{"kind":"uniform","lo":-1,"hi":1}, ...]}, ...]}
// Channel kinds: uniform {lo,hi}, laplace {scale,span}, point {value}.
// Layouts: "bands", "quadrants", "random". A regime whose "channels" list is
// shorter than c_l repeats its last entry.
SyntheticSourceSpec parse_source_spec(const std::string& json_text);
SyntheticSourceSpec load_source_spec(const std::string& path);

}  // namespace mpc
