#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "mpc/cdf_table.hpp"
#include "mpc/coder.hpp"
#include "mpc/image.hpp"
#include "mpc/latent.hpp"

namespace mpc {

// Memory-traffic accounting for one encode/decode of an h_l x w_l latent grid.
// Selection reads one bitcost entry per (location, prior, channel); coding
// fetches one table row-block per location. The per-variable baseline
// (hp_equivalent_cdf_evals) models a scheme that derives a fresh CDF for every
// latent variable.
struct LookupReport {
  uint64_t encode_index_lookups = 0;
  uint64_t encode_cdf_gathers = 0;
  uint64_t decode_cdf_gathers = 0;
  uint64_t hp_equivalent_cdf_evals = 0;

  double decode_gather_ratio() const {
    return static_cast<double>(decode_cdf_gathers) /
           static_cast<double>(hp_equivalent_cdf_evals);
  }
};

LookupReport count_lookups(int h_l, int w_l, int c_l, int n_cdf);

// Fills the analytic fields for counters recorded during a real run.
LookupReport report_from_counters(const CodecCounters& counters, int c_l);

// Peak-1 PSNR in dB between equally shaped images, capped at 99.
double psnr(const ImageF& a, const ImageF& b);
double bits_per_pixel(size_t total_bytes, int image_h, int image_w);

// Wall-clock accumulator for the pipeline stages.
struct StageBreakdown {
  double transform_ms = 0.0;
  double prior_select_ms = 0.0;
  double cdf_gather_ms = 0.0;
  double entropy_code_ms = 0.0;
  double total_ms = 0.0;

  double stage_sum_ms() const {
    return transform_ms + prior_select_ms + cdf_gather_ms + entropy_code_ms;
  }
  StageBreakdown& operator+=(const StageBreakdown& o);
  void scale(double f);
};

class ScopedTimer {
 public:
  explicit ScopedTimer(double& acc_ms) : acc_ms_(acc_ms), start_(clock::now()) {}
  ~ScopedTimer() {
    acc_ms_ += std::chrono::duration<double, std::milli>(clock::now() - start_)
                   .count();
  }
  ScopedTimer(const ScopedTimer&) = delete;
  ScopedTimer& operator=(const ScopedTimer&) = delete;

 private:
  using clock = std::chrono::steady_clock;
  double& acc_ms_;
  clock::time_point start_;
};

// One line of benchmark output.
struct BenchRow {
  std::string name;
  int image_h = 0;
  int image_w = 0;
  int n_cdf = 0;
  double bpp = 0.0;
  double side_bpp = 0.0;
  double psnr_db = 0.0;
  StageBreakdown encode;
  StageBreakdown decode;
  LookupReport lookups;
};

std::string bench_csv_header();
std::string bench_csv_row(const BenchRow& row);
std::string format_bench_csv(const std::vector<BenchRow>& rows);

// Distinct RGB color per prior id: golden-ratio hue walk, then linear probing
// in RGB space on the rare quantization collision.
std::vector<std::array<uint8_t, 3>> prior_palette(int n_cdf);

// Renders each latent location as a block_size x block_size tile colored by
// its prior id.
ImageF segmentation_image(const PriorIndexMap& map, int n_cdf,
                          int block_size = 16);
void write_segmentation_ppm(const std::string& path, const PriorIndexMap& map,
                            int n_cdf, int block_size = 16);

// CSV of one prior's cumulative tables: channel, edge, cum (in [0,1]).
std::string cdf_csv(const CdfTableSet& tables, int prior);
void dump_cdf_csvs(const CdfTableSet& tables, const std::string& prefix);

}  // namespace mpc
