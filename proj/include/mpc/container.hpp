#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mpc/alphabet.hpp"
#include "mpc/errors.hpp"
#include "mpc/transform.hpp"

namespace mpc {

// 64-byte little-endian stream header:
//   magic "MPRS1" | version u16 | image_h u32 | image_w u32 | planes u8 |
//   delta f32 | c_l u16 | n_cdf u16 | y_min i32 | y_max i32 | model hash 32B
struct StreamHeader {
  static constexpr size_t kSize = 64;
  static constexpr uint16_t kVersion = 1;

  uint16_t version = kVersion;
  uint32_t image_h = 0;
  uint32_t image_w = 0;
  PlanePolicy planes = PlanePolicy::kLuma;
  float delta = 0.1f;
  uint16_t c_l = 0;
  uint16_t n_cdf = 0;
  int32_t y_min = 0;
  int32_t y_max = 0;
  std::array<uint8_t, 32> model_hash{};
};

struct ParsedStream {
  StreamHeader header;
  std::vector<uint8_t> index_section;
  std::vector<uint8_t> payload;
};

std::vector<uint8_t> write_stream(const StreamHeader& header,
                                  std::span<const uint8_t> index_section,
                                  std::span<const uint8_t> payload);

ParsedStream read_stream(std::span<const uint8_t> bytes);

std::vector<uint8_t> read_file(const std::string& path);
void write_file(const std::string& path, std::span<const uint8_t> bytes);

}  // namespace mpc
