#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mpc/cdf_table.hpp"
#include "mpc/cpm.hpp"

namespace mpc {

// Continuous model blob, magic "MPCPM1": header (n_cdf, c_l, depth, y_min,
// y_max as little-endian u32/i32) followed by float32 parameters in
// (prior, channel, layer) order.
std::vector<uint8_t> serialize_cpm(const MonotoneCdfStackd& stack,
                                   const SymbolAlphabet& alphabet);
std::pair<MonotoneCdfStackd, SymbolAlphabet> parse_cpm(
    std::span<const uint8_t> bytes, const std::string& what = "model blob");
void save_cpm(const std::string& path, const MonotoneCdfStackd& stack,
              const SymbolAlphabet& alphabet);
std::pair<MonotoneCdfStackd, SymbolAlphabet> load_cpm(const std::string& path);

// Frozen table blob, magic "MPCDF1": same header, then u16 little-endian
// cumulative values in (prior, channel, symbol) order.  The top anchor 2^16
// is stored modulo 2^16; interior entries are never 0 or 2^16, so the row is
// reconstructed unambiguously.  The bitstream's model hash is the SHA-256 of
// this serialization.
std::vector<uint8_t> serialize_tables(const CdfTableSet& tables,
                                      int depth = 4);
CdfTableSet parse_tables(std::span<const uint8_t> bytes,
                         const std::string& what = "table blob");
void save_tables(const std::string& path, const CdfTableSet& tables,
                 int depth = 4);
CdfTableSet load_tables(const std::string& path);

}  // namespace mpc
