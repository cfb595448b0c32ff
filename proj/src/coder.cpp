#include "mpc/coder.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "mpc/range_coder.hpp"

namespace mpc {
namespace {

void check_shapes(const QuantizedLatent& latent, const PriorIndexMap& idx,
                  const CdfTableSet& tables) {
  if (idx.h_l != latent.h_l || idx.w_l != latent.w_l) {
    throw UsageError("prior index map shape does not match latent");
  }
  if (latent.c_l != tables.c_l()) {
    throw UsageError("latent channel count does not match tables");
  }
  idx.validate(tables.n_cdf());
}

// Order-0 adaptive frequencies with additive increments, rescaled to keep the
// total under the coder's 2^16 denominator cap.
class AdaptiveModel {
 public:
  explicit AdaptiveModel(int n) : freq_(n, 1), tot_(static_cast<uint32_t>(n)) {
    if (n < 1 || n > 32768) throw UsageError("adaptive model arity out of range");
  }

  uint32_t total() const { return tot_; }
  uint32_t freq(int s) const { return freq_[s]; }

  uint32_t cum(int s) const {
    uint32_t c = 0;
    for (int i = 0; i < s; ++i) c += freq_[i];
    return c;
  }

  int find(uint32_t target, uint32_t* cum_out) const {
    uint32_t c = 0;
    int s = 0;
    while (c + freq_[s] <= target) {
      c += freq_[s];
      ++s;
    }
    *cum_out = c;
    return s;
  }

  void update(int s) {
    freq_[s] += kIncrement;
    tot_ += kIncrement;
    if (tot_ >= kLimit) {
      tot_ = 0;
      for (uint32_t& f : freq_) {
        f = (f + 1) >> 1;
        tot_ += f;
      }
    }
  }

 private:
  static constexpr uint32_t kIncrement = 32;
  static constexpr uint32_t kLimit = 1u << 16;

  std::vector<uint32_t> freq_;
  uint32_t tot_;
};

int index_bit_width(int n_cdf) {
  return n_cdf <= 1 ? 0 : std::bit_width(static_cast<unsigned>(n_cdf - 1));
}

std::vector<uint8_t> pack_indices_raw(const PriorIndexMap& idx, int width) {
  std::vector<uint8_t> out;
  if (width == 0) return out;
  out.reserve((idx.idx.size() * width + 7) / 8);
  uint32_t acc = 0;
  int fill = 0;
  for (uint16_t v : idx.idx) {
    acc = (acc << width) | v;
    fill += width;
    while (fill >= 8) {
      fill -= 8;
      out.push_back(static_cast<uint8_t>(acc >> fill));
    }
  }
  if (fill > 0) {
    out.push_back(static_cast<uint8_t>(acc << (8 - fill)));
  }
  return out;
}

}  // namespace

std::vector<uint8_t> encode_latent(const QuantizedLatent& latent,
                                   const PriorIndexMap& idx,
                                   const CdfTableSet& tables,
                                   CodecCounters* counters) {
  check_shapes(latent, idx, tables);
  std::vector<uint8_t> out;
  if (latent.sym.empty()) return out;

  const SymbolAlphabet& alphabet = tables.alphabet();
  const int c_l = latent.c_l;
  RangeEncoder enc(out);
  for (int k = 0; k < latent.h_l; ++k) {
    for (int l = 0; l < latent.w_l; ++l) {
      const int prior = idx.at(k, l);
      auto base = tables.row(prior, 0);
      if (counters) counters->encode_cdf_gathers++;
      auto symbols = latent.loc(k, l);
      for (int c = 0; c < c_l; ++c) {
        const int32_t s = symbols[c];
        if (!alphabet.contains(s)) {
          throw FormatError("symbol " + std::to_string(s) +
                            " outside alphabet at channel " +
                            std::to_string(c) + " location (" +
                            std::to_string(k) + ", " + std::to_string(l) + ")");
        }
        const uint32_t* row = base.data() +
                              static_cast<size_t>(c) * tables.row_len();
        const int32_t off = alphabet.offset(s);
        enc.encode(row[off], row[off + 1] - row[off], CdfTableSet::kDenom);
      }
    }
  }
  enc.finish();
  return out;
}

QuantizedLatent decode_latent(std::span<const uint8_t> payload,
                              const PriorIndexMap& idx,
                              const CdfTableSet& tables, int c_l, int h_l,
                              int w_l, CodecCounters* counters) {
  QuantizedLatent latent(c_l, h_l, w_l);
  check_shapes(latent, idx, tables);
  if (latent.sym.empty()) return latent;

  const SymbolAlphabet& alphabet = tables.alphabet();
  const int row_len = tables.row_len();
  RangeDecoder dec(payload);
  for (int k = 0; k < h_l; ++k) {
    for (int l = 0; l < w_l; ++l) {
      const int prior = idx.at(k, l);
      auto base = tables.row(prior, 0);
      if (counters) counters->decode_cdf_gathers++;
      auto symbols = latent.loc(k, l);
      for (int c = 0; c < c_l; ++c) {
        const uint32_t* row = base.data() + static_cast<size_t>(c) * row_len;
        const uint32_t target = dec.decode_target(CdfTableSet::kDenom);
        // row is strictly increasing; find s with row[s] <= target < row[s+1].
        const uint32_t* hit = std::upper_bound(row, row + row_len, target);
        const int32_t off = static_cast<int32_t>(hit - row) - 1;
        dec.decode_update(row[off], row[off + 1] - row[off]);
        symbols[c] = alphabet.y_min + off;
      }
    }
  }
  return latent;
}

std::vector<uint8_t> encode_indices(const PriorIndexMap& idx, int n_cdf) {
  if (n_cdf < 1 || n_cdf > 32768) throw UsageError("n_cdf out of range");
  idx.validate(n_cdf);

  std::vector<uint8_t> coded;
  if (!idx.idx.empty() && n_cdf > 1) {
    RangeEncoder enc(coded);
    AdaptiveModel model(n_cdf);
    for (uint16_t v : idx.idx) {
      enc.encode(model.cum(v), model.freq(v), model.total());
      model.update(v);
    }
    enc.finish();
  }
  std::vector<uint8_t> raw = pack_indices_raw(idx, index_bit_width(n_cdf));

  const bool use_raw = n_cdf <= 1 || raw.size() < coded.size();
  const std::vector<uint8_t>& body = use_raw ? raw : coded;
  std::vector<uint8_t> out;
  out.reserve(3 + body.size());
  out.push_back(static_cast<uint8_t>(n_cdf & 0xFF));
  out.push_back(static_cast<uint8_t>(n_cdf >> 8));
  out.push_back(use_raw ? 1 : 0);
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

PriorIndexMap decode_indices(std::span<const uint8_t> bytes, int h_l, int w_l,
                             int n_cdf) {
  if (bytes.size() < 3) throw FormatError("index section truncated");
  const int stored = bytes[0] | (bytes[1] << 8);
  if (stored != n_cdf) {
    throw FormatError("index section n_cdf " + std::to_string(stored) +
                      " does not match header " + std::to_string(n_cdf));
  }
  const uint8_t mode = bytes[2];
  std::span<const uint8_t> body = bytes.subspan(3);

  PriorIndexMap idx(h_l, w_l);
  if (idx.idx.empty()) return idx;

  if (mode == 0) {
    RangeDecoder dec(body);
    AdaptiveModel model(n_cdf);
    for (uint16_t& v : idx.idx) {
      uint32_t cum = 0;
      const uint32_t target = dec.decode_target(model.total());
      const int s = model.find(target, &cum);
      dec.decode_update(cum, model.freq(s));
      model.update(s);
      v = static_cast<uint16_t>(s);
    }
  } else if (mode == 1) {
    const int width = index_bit_width(n_cdf);
    if (width == 0) {
      // n_cdf == 1: every location uses prior 0.
      return idx;
    }
    const size_t need = (idx.idx.size() * width + 7) / 8;
    if (body.size() < need) throw FormatError("index section truncated");
    uint32_t acc = 0;
    int fill = 0;
    size_t pos = 0;
    for (uint16_t& v : idx.idx) {
      while (fill < width) {
        acc = (acc << 8) | body[pos++];
        fill += 8;
      }
      fill -= width;
      v = static_cast<uint16_t>((acc >> fill) & ((1u << width) - 1));
    }
  } else {
    throw FormatError("unknown index section mode");
  }
  idx.validate(n_cdf);
  return idx;
}

double table_bits_sum(const QuantizedLatent& latent, const PriorIndexMap& idx,
                      const CdfTableSet& tables) {
  check_shapes(latent, idx, tables);
  double bits = 0.0;
  for (int k = 0; k < latent.h_l; ++k) {
    for (int l = 0; l < latent.w_l; ++l) {
      const int prior = idx.at(k, l);
      auto symbols = latent.loc(k, l);
      for (int c = 0; c < latent.c_l; ++c) {
        bits += table_bitcost(tables, prior, c, symbols[c]);
      }
    }
  }
  return bits;
}

}  // namespace mpc
