#include "mpc/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "mpc/errors.hpp"
#include "mpc/model_io.hpp"
#include "mpc/sha256.hpp"

namespace mpc {

CodecModel make_codec_model(CdfTableSet tables) {
  CodecModel model;
  model.hash = sha256(serialize_tables(tables));
  model.lut = make_bitcost_lut(tables);
  model.tables = std::move(tables);
  return model;
}

CodecModel load_codec_model(const std::string& path) {
  const std::vector<uint8_t> bytes = read_file(path);
  CodecModel model;
  model.tables = parse_tables(bytes, path);
  model.hash = sha256(bytes);
  model.lut = make_bitcost_lut(model.tables);
  return model;
}

PriorIndexMap select_priors(const QuantizedLatent& latent,
                            const BitcostLut& lut, CodecCounters* counters,
                            double* total_bits) {
  if (latent.c_l != lut.c_l)
    throw UsageError("latent channel count does not match the model");
  PriorIndexMap map(latent.h_l, latent.w_l);
  if (total_bits) *total_bits = 0.0;
  const int n = lut.n_cdf;
  const int c_l = lut.c_l;
  for (int k = 0; k < latent.h_l; ++k) {
    for (int l = 0; l < latent.w_l; ++l) {
      auto symbols = latent.loc(k, l);
      for (int c = 0; c < c_l; ++c) {
        const int32_t s = symbols[c];
        if (s < lut.y_min || s - lut.y_min >= lut.len)
          throw UsageError("symbol outside the model alphabet at location (" +
                           std::to_string(k) + ", " + std::to_string(l) + ")");
      }
      double best = std::numeric_limits<double>::infinity();
      int best_prior = 0;
      for (int p = 0; p < n; ++p) {
        const float* base = lut.row(p, 0);
        double cost = 0.0;
        for (int c = 0; c < c_l; ++c) {
          const size_t off = static_cast<size_t>(symbols[c] - lut.y_min);
          cost += base[static_cast<size_t>(c) * lut.len + off];
        }
        if (cost < best) {
          best = cost;
          best_prior = p;
        }
      }
      if (counters) {
        counters->encode_index_lookups +=
            static_cast<uint64_t>(n) * static_cast<uint64_t>(c_l);
      }
      map.at(k, l) = static_cast<uint16_t>(best_prior);
      if (total_bits) *total_bits += best;
    }
  }
  return map;
}

namespace {

// Clips every symbol into the alphabet so the coder cannot be handed an
// unrepresentable value; returns how many were moved.
size_t clamp_to_alphabet(QuantizedLatent& latent, const SymbolAlphabet& a) {
  size_t moved = 0;
  for (int32_t& s : latent.sym) {
    const int32_t c = std::clamp(s, a.y_min, a.y_max);
    if (c != s) {
      s = c;
      ++moved;
    }
  }
  return moved;
}

int coded_planes(PlanePolicy policy) {
  return policy == PlanePolicy::kPlanes ? 3 : 1;
}

}  // namespace

EncodeOutcome encode_image(const ImageF& img, const CodecModel& model,
                           const EncodeConfig& cfg) {
  if (img.h <= 0 || img.w <= 0) throw UsageError("cannot encode empty image");
  if (cfg.planes == PlanePolicy::kPlanes && img.planes != 3)
    throw UsageError("plane-wise coding needs a 3-plane image");
  if (model.tables.c_l() != kBlock * kBlock)
    throw UsageError("model channel count does not match the transform");

  ImageF source = img;
  if (cfg.planes == PlanePolicy::kLuma && img.planes != 1)
    source = to_luma(img);

  // The stream header carries delta as f32.  Quantize and reconstruct with
  // that exact value so the decoder's arithmetic matches bit for bit.
  const double delta = static_cast<double>(static_cast<float>(cfg.delta));
  if (!(delta > 0.0)) throw UsageError("delta must be positive");

  const int n_planes = coded_planes(cfg.planes);
  const int h_l = latent_extent(img.h);
  const int w_l = latent_extent(img.w);

  EncodeOutcome out;
  std::vector<uint8_t> index_section;
  std::vector<uint8_t> payload;
  {
    ScopedTimer total(out.timings.total_ms);

    {
      ScopedTimer t(out.timings.transform_ms);
      out.latent = QuantizedLatent(model.tables.c_l(), n_planes * h_l, w_l);
      for (int p = 0; p < n_planes; ++p) {
        const QuantizedLatent plane =
            quantize(analyze(source, p), delta);
        std::copy(plane.sym.begin(), plane.sym.end(),
                  out.latent.sym.begin() +
                      static_cast<size_t>(p) * plane.sym.size());
      }
      out.clamped = clamp_to_alphabet(out.latent, model.tables.alphabet());
    }

    {
      ScopedTimer t(out.timings.prior_select_ms);
      out.map = select_priors(out.latent, model.lut, &out.counters, nullptr);
    }

    {
      // Fetch each location's winning row block once and price the symbols.
      ScopedTimer t(out.timings.cdf_gather_ms);
      out.table_bits = table_bits_sum(out.latent, out.map, model.tables);
    }

    {
      ScopedTimer t(out.timings.entropy_code_ms);
      index_section = encode_indices(out.map, model.tables.n_cdf());
      payload = encode_latent(out.latent, out.map, model.tables, &out.counters);
    }
  }

  StreamHeader header;
  header.image_h = static_cast<uint32_t>(img.h);
  header.image_w = static_cast<uint32_t>(img.w);
  header.planes = cfg.planes;
  header.delta = static_cast<float>(delta);
  header.c_l = static_cast<uint16_t>(model.tables.c_l());
  header.n_cdf = static_cast<uint16_t>(model.tables.n_cdf());
  header.y_min = model.tables.alphabet().y_min;
  header.y_max = model.tables.alphabet().y_max;
  header.model_hash = model.hash;
  out.stream = write_stream(header, index_section, payload);

  out.recon = ImageF(img.h, img.w, n_planes);
  for (int p = 0; p < n_planes; ++p) {
    QuantizedLatent plane(model.tables.c_l(), h_l, w_l);
    std::copy(out.latent.sym.begin() +
                  static_cast<size_t>(p) * plane.sym.size(),
              out.latent.sym.begin() +
                  static_cast<size_t>(p + 1) * plane.sym.size(),
              plane.sym.begin());
    synthesize_into(plane, delta, img.h, img.w, out.recon, p);
  }
  out.psnr_db = psnr(source, out.recon);
  out.bpp = bits_per_pixel(out.stream.size(), img.h, img.w);
  out.side_bpp = bits_per_pixel(index_section.size(), img.h, img.w);
  return out;
}

DecodeOutcome decode_image(std::span<const uint8_t> stream,
                           const CodecModel& model) {
  ParsedStream parsed = read_stream(stream);
  const StreamHeader& h = parsed.header;
  if (h.model_hash != model.hash)
    throw FormatError(
        "model hash mismatch: stream was coded with different tables");
  if (h.c_l != model.tables.c_l() || h.n_cdf != model.tables.n_cdf() ||
      h.y_min != model.tables.alphabet().y_min ||
      h.y_max != model.tables.alphabet().y_max)
    throw FormatError("stream header disagrees with the model dimensions");
  if (h.image_h == 0 || h.image_w == 0)
    throw FormatError("stream declares an empty image");

  const int n_planes = coded_planes(h.planes);
  const int h_l = latent_extent(static_cast<int>(h.image_h));
  const int w_l = latent_extent(static_cast<int>(h.image_w));

  DecodeOutcome out;
  out.header = h;
  {
    ScopedTimer total(out.timings.total_ms);
    {
      ScopedTimer t(out.timings.entropy_code_ms);
      out.map = decode_indices(parsed.index_section, n_planes * h_l, w_l,
                               model.tables.n_cdf());
      out.latent = decode_latent(parsed.payload, out.map, model.tables,
                                 model.tables.c_l(), n_planes * h_l, w_l,
                                 &out.counters);
    }
    {
      ScopedTimer t(out.timings.transform_ms);
      out.image = ImageF(static_cast<int>(h.image_h),
                         static_cast<int>(h.image_w), n_planes);
      for (int p = 0; p < n_planes; ++p) {
        QuantizedLatent plane(model.tables.c_l(), h_l, w_l);
        std::copy(out.latent.sym.begin() +
                      static_cast<size_t>(p) * plane.sym.size(),
                  out.latent.sym.begin() +
                      static_cast<size_t>(p + 1) * plane.sym.size(),
                  plane.sym.begin());
        synthesize_into(plane, h.delta, static_cast<int>(h.image_h),
                        static_cast<int>(h.image_w), out.image, p);
      }
    }
  }
  return out;
}

}  // namespace mpc
