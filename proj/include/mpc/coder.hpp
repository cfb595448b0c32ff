#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mpc/cdf_table.hpp"
#include "mpc/latent.hpp"

namespace mpc {

// Memory-access counters filled by the instrumented encode/decode paths.
struct CodecCounters {
  uint64_t encode_index_lookups = 0;  // per-(location, prior, channel) bitcost reads
  uint64_t encode_cdf_gathers = 0;    // per-location winning row fetches
  uint64_t decode_index_lookups = 0;  // stays zero: indices arrive as side info
  uint64_t decode_cdf_gathers = 0;
};

// Scan order (k, l, c), channel innermost; each symbol is coded with the CDF
// row of its location's prior.  All symbols must lie inside tables.alphabet.
std::vector<uint8_t> encode_latent(const QuantizedLatent& latent,
                                   const PriorIndexMap& idx,
                                   const CdfTableSet& tables,
                                   CodecCounters* counters = nullptr);

QuantizedLatent decode_latent(std::span<const uint8_t> payload,
                              const PriorIndexMap& idx,
                              const CdfTableSet& tables, int c_l, int h_l,
                              int w_l, CodecCounters* counters = nullptr);

// Prior index side info: a 3-byte header (n_cdf, mode) followed by either an
// adaptively modeled range-coded body or raw bit-packed indices, whichever is
// smaller.  The raw fallback caps the size at the packed bound plus header.
std::vector<uint8_t> encode_indices(const PriorIndexMap& idx, int n_cdf);

PriorIndexMap decode_indices(std::span<const uint8_t> bytes, int h_l, int w_l,
                             int n_cdf);

// Sum of frozen-table bitcosts of every symbol, in bits.
double table_bits_sum(const QuantizedLatent& latent, const PriorIndexMap& idx,
                      const CdfTableSet& tables);

}  // namespace mpc
