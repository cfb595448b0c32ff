#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mpc/errors.hpp"

namespace mpc {

// Byte-wise range coder, 32-bit range register with delayed-carry output
// (cache byte plus a run of pending 0xFF bytes).  Integer arithmetic only, so
// identical inputs produce identical bytes on any platform.
//
// Frequencies use denominators up to 2^16.  Renormalization keeps
// range >= 2^24, so an interval never collapses: range / tot >= 2^8.
class RangeEncoder {
 public:
  explicit RangeEncoder(std::vector<uint8_t>& out) : out_(out) {}

  void encode(uint32_t cum, uint32_t freq, uint32_t tot) {
    uint32_t r = range_ / tot;
    low_ += static_cast<uint64_t>(r) * cum;
    range_ = r * freq;
    while (range_ < kTop) {
      shift_low();
      range_ <<= 8;
    }
  }

  // Flushes the 33-bit low register; call exactly once.
  void finish() {
    for (int i = 0; i < 5; ++i) shift_low();
  }

 private:
  static constexpr uint32_t kTop = 1u << 24;

  void shift_low() {
    if (static_cast<uint32_t>(low_ >> 32) != 0 ||
        static_cast<uint32_t>(low_) < 0xFF000000u) {
      uint8_t carry = static_cast<uint8_t>(low_ >> 32);
      uint8_t b = static_cast<uint8_t>(cache_ + carry);
      do {
        out_.push_back(b);
        b = static_cast<uint8_t>(0xFF + carry);
      } while (--cache_count_ != 0);
      cache_ = static_cast<uint8_t>(low_ >> 24);
    }
    ++cache_count_;
    // The byte just emitted (or added to the pending-0xFF run) leaves low;
    // the wrap of the 32-bit shift drops it.
    low_ = static_cast<uint32_t>(static_cast<uint32_t>(low_) << 8);
  }

  std::vector<uint8_t>& out_;
  uint64_t low_ = 0;
  uint32_t range_ = 0xFFFFFFFFu;
  uint8_t cache_ = 0;
  uint64_t cache_count_ = 1;
};

class RangeDecoder {
 public:
  // Reads five bytes up front (head byte plus 32 code bits).
  explicit RangeDecoder(std::span<const uint8_t> in) : in_(in) {
    next_byte();
    for (int i = 0; i < 4; ++i) code_ = (code_ << 8) | next_byte();
  }

  // Returns a value in [0, tot) locating the coded symbol in cumulative
  // frequency space; follow with decode_update for that symbol's interval.
  uint32_t decode_target(uint32_t tot) {
    r_ = range_ / tot;
    uint32_t t = code_ / r_;
    return t < tot ? t : tot - 1;
  }

  void decode_update(uint32_t cum, uint32_t freq) {
    code_ -= r_ * cum;
    range_ = r_ * freq;
    while (range_ < kTop) {
      code_ = (code_ << 8) | next_byte();
      range_ <<= 8;
    }
  }

  size_t consumed() const { return pos_; }

 private:
  static constexpr uint32_t kTop = 1u << 24;

  uint8_t next_byte() {
    if (pos_ >= in_.size()) {
      throw FormatError("range-coded stream truncated");
    }
    return in_[pos_++];
  }

  std::span<const uint8_t> in_;
  size_t pos_ = 0;
  uint32_t range_ = 0xFFFFFFFFu;
  uint32_t code_ = 0;
  uint32_t r_ = 0;
};

}  // namespace mpc
