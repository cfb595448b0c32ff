#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mpc/bench.hpp"
#include "mpc/cdf_table.hpp"
#include "mpc/coder.hpp"
#include "mpc/container.hpp"
#include "mpc/image.hpp"
#include "mpc/latent.hpp"
#include "mpc/transform.hpp"

namespace mpc {

// Frozen tables plus the derived selection LUT and the identity hash that
// ties bitstreams to the exact tables that produced them.
struct CodecModel {
  CdfTableSet tables;
  BitcostLut lut;
  std::array<uint8_t, 32> hash{};
};

CodecModel make_codec_model(CdfTableSet tables);
CodecModel load_codec_model(const std::string& path);

// Per-location winner over the frozen bitcost LUT (smallest index on ties).
// Adds c_l lookups per (location, prior) to the counters and, when asked,
// accumulates the winners' total table bits.
PriorIndexMap select_priors(const QuantizedLatent& latent,
                            const BitcostLut& lut,
                            CodecCounters* counters = nullptr,
                            double* total_bits = nullptr);

struct EncodeConfig {
  double delta = 0.1;
  PlanePolicy planes = PlanePolicy::kLuma;
};

struct EncodeOutcome {
  std::vector<uint8_t> stream;
  ImageF recon;           // encoder-side reconstruction (decode must match)
  QuantizedLatent latent; // coded symbols, planes stacked along k
  PriorIndexMap map;
  double psnr_db = 0.0;
  double bpp = 0.0;
  double side_bpp = 0.0;
  double table_bits = 0.0;  // sum of frozen-table bitcosts of coded symbols
  size_t clamped = 0;       // symbols clipped into the alphabet before coding
  StageBreakdown timings;
  CodecCounters counters;
};

EncodeOutcome encode_image(const ImageF& img, const CodecModel& model,
                           const EncodeConfig& cfg);

struct DecodeOutcome {
  ImageF image;
  QuantizedLatent latent;
  PriorIndexMap map;
  StreamHeader header;
  StageBreakdown timings;
  CodecCounters counters;
};

DecodeOutcome decode_image(std::span<const uint8_t> stream,
                           const CodecModel& model);

}  // namespace mpc
