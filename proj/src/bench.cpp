#include "mpc/bench.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "mpc/container.hpp"
#include "mpc/errors.hpp"

namespace mpc {

LookupReport count_lookups(int h_l, int w_l, int c_l, int n_cdf) {
  if (h_l <= 0 || w_l <= 0 || c_l <= 0 || n_cdf <= 0)
    throw UsageError("count_lookups needs positive dimensions");
  const uint64_t locations = static_cast<uint64_t>(h_l) * w_l;
  LookupReport r;
  r.encode_index_lookups = locations * c_l * n_cdf;
  r.encode_cdf_gathers = locations;
  r.decode_cdf_gathers = locations;
  r.hp_equivalent_cdf_evals = locations * c_l;
  return r;
}

LookupReport report_from_counters(const CodecCounters& counters, int c_l) {
  LookupReport r;
  r.encode_index_lookups = counters.encode_index_lookups;
  r.encode_cdf_gathers = counters.encode_cdf_gathers;
  r.decode_cdf_gathers = counters.decode_cdf_gathers;
  r.hp_equivalent_cdf_evals = counters.encode_cdf_gathers * c_l;
  return r;
}

double psnr(const ImageF& a, const ImageF& b) {
  if (a.planes != b.planes || a.h != b.h || a.w != b.w)
    throw UsageError("psnr needs equally shaped images");
  if (a.v.empty()) throw UsageError("psnr of empty images");
  double se = 0.0;
  for (size_t i = 0; i < a.v.size(); ++i) {
    const double d = static_cast<double>(a.v[i]) - b.v[i];
    se += d * d;
  }
  const double mse = se / static_cast<double>(a.v.size());
  if (mse <= 0.0) return 99.0;
  return std::min(99.0, 10.0 * std::log10(1.0 / mse));
}

double bits_per_pixel(size_t total_bytes, int image_h, int image_w) {
  if (image_h <= 0 || image_w <= 0)
    throw UsageError("bits_per_pixel needs positive image dimensions");
  return 8.0 * static_cast<double>(total_bytes) /
         (static_cast<double>(image_h) * image_w);
}

StageBreakdown& StageBreakdown::operator+=(const StageBreakdown& o) {
  transform_ms += o.transform_ms;
  prior_select_ms += o.prior_select_ms;
  cdf_gather_ms += o.cdf_gather_ms;
  entropy_code_ms += o.entropy_code_ms;
  total_ms += o.total_ms;
  return *this;
}

void StageBreakdown::scale(double f) {
  transform_ms *= f;
  prior_select_ms *= f;
  cdf_gather_ms *= f;
  entropy_code_ms *= f;
  total_ms *= f;
}

std::string bench_csv_header() {
  return "name,image_h,image_w,n_cdf,bpp,side_bpp,psnr_db,"
         "enc_transform_ms,enc_prior_select_ms,enc_cdf_gather_ms,"
         "enc_entropy_code_ms,enc_total_ms,"
         "dec_transform_ms,dec_cdf_gather_ms,dec_entropy_code_ms,dec_total_ms,"
         "encode_index_lookups,encode_cdf_gathers,decode_cdf_gathers,"
         "hp_equivalent_cdf_evals";
}

std::string bench_csv_row(const BenchRow& row) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(4);
  os << row.name << ',' << row.image_h << ',' << row.image_w << ','
     << row.n_cdf << ',' << row.bpp << ',' << row.side_bpp << ','
     << row.psnr_db << ',' << row.encode.transform_ms << ','
     << row.encode.prior_select_ms << ',' << row.encode.cdf_gather_ms << ','
     << row.encode.entropy_code_ms << ',' << row.encode.total_ms << ','
     << row.decode.transform_ms << ',' << row.decode.cdf_gather_ms << ','
     << row.decode.entropy_code_ms << ',' << row.decode.total_ms << ','
     << row.lookups.encode_index_lookups << ','
     << row.lookups.encode_cdf_gathers << ','
     << row.lookups.decode_cdf_gathers << ','
     << row.lookups.hp_equivalent_cdf_evals;
  return os.str();
}

std::string format_bench_csv(const std::vector<BenchRow>& rows) {
  std::string out = bench_csv_header() + "\n";
  for (const BenchRow& row : rows) out += bench_csv_row(row) + "\n";
  return out;
}

namespace {

std::array<uint8_t, 3> hsv_to_rgb(double h, double s, double v) {
  h = h - std::floor(h);
  const double r = std::abs(h * 6.0 - 3.0) - 1.0;
  const double g = 2.0 - std::abs(h * 6.0 - 2.0);
  const double b = 2.0 - std::abs(h * 6.0 - 4.0);
  auto channel = [&](double x) {
    x = std::clamp(x, 0.0, 1.0);
    const double c = ((x - 1.0) * s + 1.0) * v;
    return static_cast<uint8_t>(std::lround(c * 255.0));
  };
  return {channel(r), channel(g), channel(b)};
}

}  // namespace

std::vector<std::array<uint8_t, 3>> prior_palette(int n_cdf) {
  if (n_cdf <= 0) throw UsageError("palette needs n_cdf > 0");
  constexpr double kGolden = 0.618033988749895;
  std::vector<std::array<uint8_t, 3>> palette;
  palette.reserve(n_cdf);
  std::set<uint32_t> taken;
  for (int i = 0; i < n_cdf; ++i) {
    const double hue = std::fmod(0.12 + i * kGolden, 1.0);
    const double sat = (i % 2 == 0) ? 0.68 : 0.45;
    const double val = 0.95 - 0.25 * ((i / 2) % 3) / 2.0;
    std::array<uint8_t, 3> c = hsv_to_rgb(hue, sat, val);
    uint32_t packed = (static_cast<uint32_t>(c[0]) << 16) |
                      (static_cast<uint32_t>(c[1]) << 8) | c[2];
    while (taken.count(packed)) packed = (packed + 1) & 0xFFFFFFu;
    taken.insert(packed);
    palette.push_back({static_cast<uint8_t>(packed >> 16),
                       static_cast<uint8_t>((packed >> 8) & 0xFF),
                       static_cast<uint8_t>(packed & 0xFF)});
  }
  return palette;
}

ImageF segmentation_image(const PriorIndexMap& map, int n_cdf,
                          int block_size) {
  if (map.h_l <= 0 || map.w_l <= 0)
    throw UsageError("segmentation map needs a non-empty index map");
  if (block_size <= 0) throw UsageError("block size must be positive");
  map.validate(n_cdf);
  const auto palette = prior_palette(n_cdf);
  ImageF img(map.h_l * block_size, map.w_l * block_size, 3);
  for (int k = 0; k < map.h_l; ++k)
    for (int l = 0; l < map.w_l; ++l) {
      const auto& color = palette[map.at(k, l)];
      for (int p = 0; p < 3; ++p) {
        const float value = static_cast<float>(color[p]) / 255.0f;
        for (int y = 0; y < block_size; ++y)
          for (int x = 0; x < block_size; ++x)
            img.at(p, k * block_size + y, l * block_size + x) = value;
      }
    }
  return img;
}

void write_segmentation_ppm(const std::string& path, const PriorIndexMap& map,
                            int n_cdf, int block_size) {
  write_pnm(path, segmentation_image(map, n_cdf, block_size));
}

std::string cdf_csv(const CdfTableSet& tables, int prior) {
  if (prior < 0 || prior >= tables.n_cdf())
    throw UsageError("prior id out of range");
  std::ostringstream os;
  os << "channel,edge,cum\n";
  os.precision(10);
  for (int c = 0; c < tables.c_l(); ++c) {
    auto row = tables.row(prior, c);
    for (int e = 0; e < static_cast<int>(row.size()); ++e)
      os << c << ',' << e << ','
         << static_cast<double>(row[e]) / CdfTableSet::kDenom << "\n";
  }
  return os.str();
}

void dump_cdf_csvs(const CdfTableSet& tables, const std::string& prefix) {
  for (int p = 0; p < tables.n_cdf(); ++p) {
    const std::string csv = cdf_csv(tables, p);
    write_file(prefix + "_prior" + std::to_string(p) + ".csv",
               std::span(reinterpret_cast<const uint8_t*>(csv.data()),
                         csv.size()));
  }
}

}  // namespace mpc
