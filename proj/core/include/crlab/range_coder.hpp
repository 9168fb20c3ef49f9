#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace crlab::codec {

/// 32-bit range coder with byte-wise renormalisation. Carries are resolved
/// by holding back one "cache" byte plus a count of pending 0xFF bytes, so
/// the output is a plain byte string with no escape codes. Frequencies are
/// given against a total of 2^total_bits (total_bits <= 16).
///
/// Stream layout: the first byte is always 0x00; the encoder flushes five
/// bytes of low state, and a decoder consumes exactly the bytes written.
class RangeEncoder {
 public:
  void encode(std::uint32_t cum_freq, std::uint32_t freq, unsigned total_bits);
  /// Flushes and returns the payload. The encoder is spent afterwards.
  [[nodiscard]] std::vector<std::uint8_t> finish();

 private:
  void shift_low();

  std::uint64_t low_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
  std::uint8_t cache_ = 0;
  std::uint64_t cache_size_ = 1;
  std::vector<std::uint8_t> out_;
};

class RangeDecoder {
 public:
  /// Throws IntegrityError when the payload is shorter than the 5-byte
  /// preamble or does not start with 0x00.
  explicit RangeDecoder(std::span<const std::uint8_t> payload);

  /// Scaled target in [0, 2^total_bits); IntegrityError if out of range.
  [[nodiscard]] std::uint32_t target(unsigned total_bits);
  /// Consume the symbol whose interval contains the last target.
  void consume(std::uint32_t cum_freq, std::uint32_t freq);
  /// True when every payload byte has been read.
  [[nodiscard]] bool at_end() const { return pos_ == payload_.size(); }

 private:
  std::uint8_t next_byte();

  std::span<const std::uint8_t> payload_;
  std::size_t pos_ = 0;
  std::uint32_t code_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
  std::uint32_t step_ = 0;
};

}  // namespace crlab::codec
