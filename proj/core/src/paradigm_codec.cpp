#include <algorithm>
#include <cstring>

#include "crlab/codec.hpp"
#include "crlab/errors.hpp"
#include "crlab/range_coder.hpp"

namespace crlab::codec {
namespace {

constexpr char kMagic[4] = {'C', 'R', 'L', 'B'};

std::int64_t coded_value(Paradigm paradigm, int x, int x_p) {
  return paradigm == Paradigm::kConditional ? x : static_cast<std::int64_t>(x) - x_p;
}

}  // namespace

std::vector<std::uint8_t> Bitstream::serialize() const {
  std::vector<std::uint8_t> out(kHeaderSize);
  std::memcpy(out.data(), kMagic, 4);
  out[4] = kVersion;
  out[5] = static_cast<std::uint8_t>(paradigm);
  out[6] = static_cast<std::uint8_t>(alphabet_size & 0xFF);
  out[7] = static_cast<std::uint8_t>(alphabet_size >> 8);
  for (int i = 0; i < 8; ++i) out[8 + i] = static_cast<std::uint8_t>(symbol_count >> (8 * i));
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

Bitstream Bitstream::parse(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderSize) throw FormatError("bitstream shorter than header");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError("bad bitstream magic");
  if (bytes[4] != kVersion) throw FormatError("unsupported bitstream version " + std::to_string(bytes[4]));
  if (bytes[5] > static_cast<std::uint8_t>(Paradigm::kConditionalResidual)) {
    throw FormatError("unknown paradigm byte " + std::to_string(bytes[5]));
  }
  Bitstream bs;
  bs.paradigm = static_cast<Paradigm>(bytes[5]);
  bs.alphabet_size = static_cast<std::uint16_t>(bytes[6] | (bytes[7] << 8));
  for (int i = 0; i < 8; ++i) bs.symbol_count |= static_cast<std::uint64_t>(bytes[8 + i]) << (8 * i);
  bs.payload.assign(bytes.begin() + kHeaderSize, bytes.end());
  return bs;
}

Bitstream encode(std::span<const PixelPair> seq, Paradigm paradigm, const ProbabilityModel& model) {
  if (model.paradigm() != paradigm) throw InputError("encode: model was built for a different paradigm");
  const int m = model.alphabet_size();
  RangeEncoder enc;
  for (const auto& [x, x_p] : seq) {
    if (x < 0 || x >= m || x_p < 0 || x_p >= m) throw InputError("encode: symbol outside 0..M-1");
    const std::size_t ctx = model.context_of(x_p);
    const auto sym = static_cast<std::size_t>(coded_value(paradigm, x, x_p) - model.symbol_offset());
    const std::uint32_t f = model.freq(ctx, sym);
    if (f == 0) throw ModelCoverageError("encode: symbol has zero count in its context");
    enc.encode(model.cum(ctx, sym), f, ProbabilityModel::kTotalBits);
  }
  Bitstream bs;
  bs.paradigm = paradigm;
  bs.alphabet_size = static_cast<std::uint16_t>(m);
  bs.symbol_count = seq.size();
  if (!seq.empty()) bs.payload = enc.finish();
  return bs;
}

std::vector<int> decode(const Bitstream& bs, std::span<const int> x_p_seq, const ProbabilityModel& model) {
  if (bs.paradigm != model.paradigm()) throw FormatError("decode: paradigm byte does not match the model");
  if (bs.alphabet_size != model.alphabet_size()) throw FormatError("decode: alphabet size does not match the model");
  if (x_p_seq.size() != bs.symbol_count) throw InputError("decode: prediction count differs from symbol count");
  std::vector<int> out;
  if (bs.symbol_count == 0) {
    if (!bs.payload.empty()) throw IntegrityError("decode: payload present for an empty stream");
    return out;
  }
  out.reserve(x_p_seq.size());
  RangeDecoder dec(bs.payload);
  const int m = model.alphabet_size();
  for (const int x_p : x_p_seq) {
    const std::size_t ctx = model.context_of(x_p);
    const std::uint32_t t = dec.target(ProbabilityModel::kTotalBits);
    const std::size_t sym = model.find(ctx, t);
    dec.consume(model.cum(ctx, sym), model.freq(ctx, sym));
    const std::int64_t value = static_cast<std::int64_t>(sym) + model.symbol_offset();
    const std::int64_t x = bs.paradigm == Paradigm::kConditional ? value : x_p + value;
    if (x < 0 || x >= m) throw IntegrityError("decode: reconstructed value out of range");
    out.push_back(static_cast<int>(x));
  }
  if (!dec.at_end()) throw IntegrityError("decode: trailing payload bytes");
  return out;
}

std::vector<int> decode(std::span<const std::uint8_t> bytes, std::span<const int> x_p_seq,
                        const ProbabilityModel& model) {
  return decode(Bitstream::parse(bytes), x_p_seq, model);
}

double measure_rate(const Bitstream& bs, std::uint64_t n) {
  if (n == 0) throw InputError("measure_rate: n must be >= 1");
  return 8.0 * static_cast<double>(bs.payload.size()) / static_cast<double>(n);
}

std::vector<PixelPair> sample_pixels(const PixelModelParams& params, std::size_t n, std::uint64_t seed) {
  const JointPMF joint = build_joint(params);
  const SampleSet s = sample(joint, n, seed);
  const std::size_t cx = s.column(kVarX);
  const std::size_t cp = s.column(kVarXp);
  std::vector<PixelPair> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = PixelPair{static_cast<int>(s.index(i, cx)), static_cast<int>(s.index(i, cp))};
  }
  return out;
}

}  // namespace crlab::codec
