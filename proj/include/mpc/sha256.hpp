#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>

namespace mpc {

using Sha256Digest = std::array<uint8_t, 32>;

Sha256Digest sha256(std::span<const uint8_t> data);
Sha256Digest sha256_file(const std::string& path);
std::string hex_digest(const Sha256Digest& d);

}  // namespace mpc
