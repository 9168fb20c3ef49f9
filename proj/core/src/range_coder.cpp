#include "crlab/range_coder.hpp"

#include "crlab/errors.hpp"

namespace crlab::codec {
namespace {

constexpr std::uint32_t kTop = 1u << 24;

}  // namespace

void RangeEncoder::encode(std::uint32_t cum_freq, std::uint32_t freq, unsigned total_bits) {
  const std::uint32_t r = range_ >> total_bits;
  low_ += static_cast<std::uint64_t>(r) * cum_freq;
  range_ = r * freq;
  while (range_ < kTop) {
    range_ <<= 8;
    shift_low();
  }
}

void RangeEncoder::shift_low() {
  if (static_cast<std::uint32_t>(low_) < 0xFF000000u || (low_ >> 32) != 0) {
    const auto carry = static_cast<std::uint8_t>(low_ >> 32);
    std::uint8_t temp = cache_;
    do {
      out_.push_back(static_cast<std::uint8_t>(temp + carry));
      temp = 0xFF;
    } while (--cache_size_ != 0);
    cache_ = static_cast<std::uint8_t>(static_cast<std::uint32_t>(low_) >> 24);
  }
  ++cache_size_;
  low_ = (low_ & 0x00FFFFFFu) << 8;
}

std::vector<std::uint8_t> RangeEncoder::finish() {
  for (int i = 0; i < 5; ++i) shift_low();
  return std::move(out_);
}

RangeDecoder::RangeDecoder(std::span<const std::uint8_t> payload) : payload_(payload) {
  if (payload_.size() < 5) throw IntegrityError("range decoder: payload shorter than preamble");
  if (payload_[0] != 0) throw IntegrityError("range decoder: bad preamble byte");
  for (int i = 0; i < 5; ++i) code_ = (code_ << 8) | next_byte();
}

std::uint8_t RangeDecoder::next_byte() {
  if (pos_ >= payload_.size()) throw IntegrityError("range decoder: payload truncated");
  return payload_[pos_++];
}

std::uint32_t RangeDecoder::target(unsigned total_bits) {
  step_ = range_ >> total_bits;
  const std::uint32_t value = code_ / step_;
  if (value >= (1u << total_bits)) throw IntegrityError("range decoder: lost synchronisation");
  return value;
}

void RangeDecoder::consume(std::uint32_t cum_freq, std::uint32_t freq) {
  code_ -= step_ * cum_freq;
  range_ = step_ * freq;
  while (range_ < kTop) {
    code_ = (code_ << 8) | next_byte();
    range_ <<= 8;
  }
}

}  // namespace crlab::codec
