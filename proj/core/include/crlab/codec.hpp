#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "crlab/joint_pmf.hpp"
#include "crlab/pixel_model.hpp"

namespace crlab::codec {

/// Inter coding paradigm. The numeric values are the bitstream paradigm byte.
enum class Paradigm : std::uint8_t {
  kResidual = 0,             // code r = x - x_p, no context
  kConditional = 1,          // code x in context x_hat_p
  kConditionalResidual = 2,  // code r in context x_hat_p
};

[[nodiscard]] std::string_view to_string(Paradigm p);
/// Accepts "residual", "conditional", "condres" / "conditional-residual".
[[nodiscard]] Paradigm parse_paradigm(std::string_view text);

/// Static frequency tables quantised to a total of 2^16 per context.
///
/// Counts come from the exact model distribution: floor(p * T), raised to 1
/// for every in-support symbol, then repaired to sum exactly to T by largest
/// remainder (or by trimming the largest counts when the floor raised the
/// sum above T). Out-of-support symbols get count 0 and cannot be coded.
class ProbabilityModel {
 public:
  static constexpr unsigned kTotalBits = 16;
  static constexpr std::uint32_t kTotal = 1u << kTotalBits;

  /// Quantise one distribution. Throws InputError if the support is larger
  /// than kTotal or the input is not a distribution.
  [[nodiscard]] static std::vector<std::uint32_t> quantize_counts(std::span<const double> probs);

  /// Model for `paradigm` on the pixel model with `params`.
  [[nodiscard]] static ProbabilityModel for_paradigm(const PixelModelParams& params, Paradigm paradigm);

  [[nodiscard]] Paradigm paradigm() const { return paradigm_; }
  [[nodiscard]] int alphabet_size() const { return alphabet_size_; }
  [[nodiscard]] const Rational& quant_step() const { return quant_step_; }
  [[nodiscard]] std::size_t context_count() const { return contexts_; }
  [[nodiscard]] std::size_t symbol_count() const { return symbols_; }
  /// Value of symbol index 0 (symbols are consecutive integers).
  [[nodiscard]] std::int64_t symbol_offset() const { return symbol_offset_; }

  [[nodiscard]] std::uint32_t freq(std::size_t ctx, std::size_t sym) const {
    return cum_[ctx * (symbols_ + 1) + sym + 1] - cum_[ctx * (symbols_ + 1) + sym];
  }
  [[nodiscard]] std::uint32_t cum(std::size_t ctx, std::size_t sym) const { return cum_[ctx * (symbols_ + 1) + sym]; }
  /// Symbol whose cumulative interval contains `target`.
  [[nodiscard]] std::size_t find(std::size_t ctx, std::uint32_t target) const;
  /// Context index for a prediction value x_p.
  [[nodiscard]] std::size_t context_of(int x_p) const;

  /// Expected code length in bits/symbol under the exact model
  /// distribution: sum p(ctx, sym) * -log2(freq / T).
  [[nodiscard]] double cross_entropy(const PixelModelParams& params) const;

 private:
  ProbabilityModel() = default;

  Paradigm paradigm_ = Paradigm::kResidual;
  int alphabet_size_ = 0;
  Rational quant_step_;
  std::size_t contexts_ = 0;
  std::size_t symbols_ = 0;
  std::int64_t symbol_offset_ = 0;
  std::vector<std::uint32_t> cum_;         // contexts x (symbols + 1)
  std::vector<std::uint32_t> xp_context_;  // per x_p value
};

struct PixelPair {
  int x = 0;
  int x_p = 0;
};

/// Encoded stream. Serialised layout (little-endian):
///   bytes 0-3   magic "CRLB"
///   byte  4     version (1)
///   byte  5     paradigm (0 residual, 1 conditional, 2 conditional-residual)
///   bytes 6-7   M, uint16
///   bytes 8-15  n, uint64 symbol count
///   bytes 16-   range-coder payload (empty when n == 0)
struct Bitstream {
  static constexpr std::uint8_t kVersion = 1;
  static constexpr std::size_t kHeaderSize = 16;

  Paradigm paradigm = Paradigm::kResidual;
  std::uint16_t alphabet_size = 0;
  std::uint64_t symbol_count = 0;
  std::vector<std::uint8_t> payload;

  [[nodiscard]] std::vector<std::uint8_t> serialize() const;
  /// Throws FormatError on a short buffer, wrong magic or unknown version
  /// or paradigm.
  [[nodiscard]] static Bitstream parse(std::span<const std::uint8_t> bytes);
};

[[nodiscard]] Bitstream encode(std::span<const PixelPair> seq, Paradigm paradigm, const ProbabilityModel& model);

/// Reconstructs x from the stream and the decoder-side predictions.
[[nodiscard]] std::vector<int> decode(const Bitstream& bs, std::span<const int> x_p_seq,
                                      const ProbabilityModel& model);
[[nodiscard]] std::vector<int> decode(std::span<const std::uint8_t> bytes, std::span<const int> x_p_seq,
                                      const ProbabilityModel& model);

/// 8 * payload bytes / n.
[[nodiscard]] double measure_rate(const Bitstream& bs, std::uint64_t n);

/// n draws of (x, x_p) from the pixel model.
[[nodiscard]] std::vector<PixelPair> sample_pixels(const PixelModelParams& params, std::size_t n,
                                                   std::uint64_t seed);

}  // namespace crlab::codec
