#include "mpc/model_io.hpp"

#include <cmath>
#include <cstring>

#include "mpc/container.hpp"

namespace mpc {
namespace {

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

struct Header {
  uint32_t n_cdf, c_l, depth;
  int32_t y_min, y_max;
};

constexpr size_t kMagicLen = 6;
constexpr size_t kHeaderLen = kMagicLen + 20;

std::vector<uint8_t> blob_head(const char* magic, const Header& h) {
  std::vector<uint8_t> head;
  head.insert(head.end(), magic, magic + kMagicLen);
  put_u32(head, h.n_cdf);
  put_u32(head, h.c_l);
  put_u32(head, h.depth);
  put_u32(head, static_cast<uint32_t>(h.y_min));
  put_u32(head, static_cast<uint32_t>(h.y_max));
  return head;
}

Header parse_header(std::span<const uint8_t> bytes, const std::string& what,
                    const char* magic) {
  if (bytes.size() < kHeaderLen) throw FormatError(what + ": truncated header");
  if (std::memcmp(bytes.data(), magic, kMagicLen) != 0) {
    throw FormatError(what + ": bad magic");
  }
  auto u32 = [&](int i) {
    const uint8_t* p = bytes.data() + kMagicLen + 4 * i;
    return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
           (static_cast<uint32_t>(p[2]) << 16) |
           (static_cast<uint32_t>(p[3]) << 24);
  };
  Header h;
  h.n_cdf = u32(0);
  h.c_l = u32(1);
  h.depth = u32(2);
  h.y_min = static_cast<int32_t>(u32(3));
  h.y_max = static_cast<int32_t>(u32(4));
  if (h.n_cdf < 1 || h.n_cdf > 32768 || h.c_l < 1 || h.c_l > 65535 ||
      h.depth < 2 || h.depth > 64) {
    throw FormatError(what + ": implausible header");
  }
  return h;
}

}  // namespace

std::vector<uint8_t> serialize_cpm(const MonotoneCdfStackd& stack,
                                   const SymbolAlphabet& alphabet) {
  Header h{static_cast<uint32_t>(stack.n_cdf()),
           static_cast<uint32_t>(stack.c_l()),
           static_cast<uint32_t>(stack.depth()), alphabet.y_min,
           alphabet.y_max};
  std::vector<uint8_t> out = blob_head("MPCPM1", h);
  out.reserve(out.size() + static_cast<size_t>(stack.pair_count()) *
                               stack.params_per_pair() * 4);
  for (int p = 0; p < stack.pair_count(); ++p) {
    for (int j = 0; j < stack.params_per_pair(); ++j) {
      float f = static_cast<float>(stack.params()(j, p));
      uint32_t bits;
      std::memcpy(&bits, &f, 4);
      put_u32(out, bits);
    }
  }
  return out;
}

std::pair<MonotoneCdfStackd, SymbolAlphabet> parse_cpm(
    std::span<const uint8_t> bytes, const std::string& what) {
  Header h = parse_header(bytes, what, "MPCPM1");
  SymbolAlphabet alphabet(h.y_min, h.y_max);
  MonotoneCdfStackd stack(static_cast<int>(h.n_cdf), static_cast<int>(h.c_l),
                          static_cast<int>(h.depth));
  const size_t count = static_cast<size_t>(stack.pair_count()) *
                       stack.params_per_pair();
  if (bytes.size() != kHeaderLen + count * 4) {
    throw FormatError(what + ": parameter block size mismatch");
  }
  const uint8_t* pos = bytes.data() + kHeaderLen;
  for (int p = 0; p < stack.pair_count(); ++p) {
    for (int j = 0; j < stack.params_per_pair(); ++j) {
      uint32_t bits = static_cast<uint32_t>(pos[0]) |
                      (static_cast<uint32_t>(pos[1]) << 8) |
                      (static_cast<uint32_t>(pos[2]) << 16) |
                      (static_cast<uint32_t>(pos[3]) << 24);
      pos += 4;
      float f;
      std::memcpy(&f, &bits, 4);
      if (!std::isfinite(f)) throw FormatError(what + ": non-finite parameter");
      stack.params()(j, p) = f;
    }
  }
  return {std::move(stack), alphabet};
}

void save_cpm(const std::string& path, const MonotoneCdfStackd& stack,
              const SymbolAlphabet& alphabet) {
  write_file(path, serialize_cpm(stack, alphabet));
}

std::pair<MonotoneCdfStackd, SymbolAlphabet> load_cpm(const std::string& path) {
  return parse_cpm(read_file(path), path);
}

std::vector<uint8_t> serialize_tables(const CdfTableSet& tables, int depth) {
  tables.validate();
  Header h{static_cast<uint32_t>(tables.n_cdf()),
           static_cast<uint32_t>(tables.c_l()), static_cast<uint32_t>(depth),
           tables.alphabet().y_min, tables.alphabet().y_max};
  std::vector<uint8_t> out = blob_head("MPCDF1", h);
  out.reserve(out.size() + tables.raw().size() * 2);
  for (uint32_t v : tables.raw()) {
    out.push_back(static_cast<uint8_t>(v & 0xFF));
    out.push_back(static_cast<uint8_t>((v >> 8) & 0xFF));
  }
  return out;
}

CdfTableSet parse_tables(std::span<const uint8_t> bytes,
                         const std::string& what) {
  Header h = parse_header(bytes, what, "MPCDF1");
  SymbolAlphabet alphabet(h.y_min, h.y_max);
  CdfTableSet tables(static_cast<int>(h.n_cdf), static_cast<int>(h.c_l),
                     alphabet);
  if (bytes.size() != kHeaderLen + tables.raw().size() * 2) {
    throw FormatError(what + ": table block size mismatch");
  }
  const int row_len = tables.row_len();
  const uint8_t* pos = bytes.data() + kHeaderLen;
  size_t flat = 0;
  for (uint32_t& v : tables.raw()) {
    uint32_t stored = static_cast<uint32_t>(pos[0]) |
                      (static_cast<uint32_t>(pos[1]) << 8);
    pos += 2;
    // The top anchor wraps to 0 in 16 bits.
    const bool is_top = (flat % row_len) == static_cast<size_t>(row_len - 1);
    v = (is_top && stored == 0) ? CdfTableSet::kDenom : stored;
    ++flat;
  }
  tables.validate();
  return tables;
}

void save_tables(const std::string& path, const CdfTableSet& tables,
                 int depth) {
  write_file(path, serialize_tables(tables, depth));
}

CdfTableSet load_tables(const std::string& path) {
  return parse_tables(read_file(path), path);
}

}  // namespace mpc
