#include <gtest/gtest.h>

#include <cstdint>
#include <random>
#include <vector>

#include "crlab/errors.hpp"
#include "crlab/range_coder.hpp"

using crlab::codec::RangeDecoder;
using crlab::codec::RangeEncoder;

namespace {

struct Table {
  std::vector<std::uint32_t> cum;  // size n + 1, cum.back() == 2^bits
  unsigned bits;
  std::uint32_t freq(std::size_t s) const { return cum[s + 1] - cum[s]; }
  std::size_t find(std::uint32_t t) const {
    std::size_t s = 0;
    while (cum[s + 1] <= t) ++s;
    return s;
  }
};

Table make_table(const std::vector<std::uint32_t>& freqs, unsigned bits) {
  Table t{{0}, bits};
  for (auto f : freqs) t.cum.push_back(t.cum.back() + f);
  return t;
}

std::vector<std::uint8_t> encode_all(const Table& t, const std::vector<std::size_t>& syms) {
  RangeEncoder enc;
  for (auto s : syms) enc.encode(t.cum[s], t.freq(s), t.bits);
  return enc.finish();
}

std::vector<std::size_t> decode_all(const Table& t, const std::vector<std::uint8_t>& bytes, std::size_t n) {
  RangeDecoder dec(bytes);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto s = t.find(dec.target(t.bits));
    dec.consume(t.cum[s], t.freq(s));
    out.push_back(s);
  }
  EXPECT_TRUE(dec.at_end());
  return out;
}

}  // namespace

TEST(RangeCoder, RoundTripSkewedAlphabet) {
  const auto t = make_table({60000, 4000, 1000, 500, 35, 1}, 16);
  std::mt19937 gen(1);
  std::discrete_distribution<std::size_t> d({60000, 4000, 1000, 500, 35, 1});
  std::vector<std::size_t> syms(20000);
  for (auto& s : syms) s = d(gen);
  syms.push_back(5);  // the rarest symbol at least once
  const auto bytes = encode_all(t, syms);
  EXPECT_EQ(bytes.front(), 0x00);
  EXPECT_EQ(decode_all(t, bytes, syms.size()), syms);
}

TEST(RangeCoder, LengthTracksInformationContent) {
  // Uniform over 16 symbols: exactly 4 bits each, plus the flush.
  const auto t = make_table(std::vector<std::uint32_t>(16, 4096), 16);
  std::vector<std::size_t> syms(8000);
  for (std::size_t i = 0; i < syms.size(); ++i) syms[i] = (i * 7) % 16;
  const auto bytes = encode_all(t, syms);
  EXPECT_NEAR(static_cast<double>(bytes.size()), 4000.0, 6.0);
  EXPECT_EQ(decode_all(t, bytes, syms.size()), syms);
}

TEST(RangeCoder, CarryPropagation) {
  // Long runs of the top symbol push low toward the carry boundary.
  const auto t = make_table({1, 65535}, 16);
  std::vector<std::size_t> syms(50000, 1);
  for (std::size_t i = 0; i < syms.size(); i += 997) syms[i] = 0;
  EXPECT_EQ(decode_all(t, encode_all(t, syms), syms.size()), syms);
}

TEST(RangeCoder, SmallerTotals) {
  const auto t = make_table({3, 1, 4}, 3);
  const std::vector<std::size_t> syms{0, 1, 2, 2, 1, 0, 2, 2, 2, 1};
  EXPECT_EQ(decode_all(t, encode_all(t, syms), syms.size()), syms);
}

TEST(RangeCoder, EmptyMessageFlushesPreamble) {
  RangeEncoder enc;
  const auto bytes = enc.finish();
  EXPECT_EQ(bytes.size(), 5u);
  RangeDecoder dec(bytes);
  EXPECT_TRUE(dec.at_end());
}

TEST(RangeCoder, TruncatedOrForeignPayloadIsRejected) {
  const std::vector<std::uint8_t> short_payload{0, 1, 2};
  EXPECT_THROW(RangeDecoder{short_payload}, crlab::IntegrityError);
  const std::vector<std::uint8_t> bad_lead{1, 0, 0, 0, 0};
  EXPECT_THROW(RangeDecoder{bad_lead}, crlab::IntegrityError);
}
