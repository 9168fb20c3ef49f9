#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace crlab {

/// Exact rational number with 64-bit numerator and positive denominator,
/// always stored in lowest terms. Used for alphabet symbols so that
/// quantized values such as k * 7/5 compare exactly.
class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t value) : num_(value) {}  // NOLINT(implicit)
  Rational(std::int64_t num, std::int64_t den);

  /// Parses "3", "-2", "1.4", "7/5". Throws InputError otherwise.
  static Rational parse(std::string_view text);
  /// Closest rational with denominator <= max_den (continued fractions).
  static Rational approximate(double value, std::int64_t max_den = 1000000);

  [[nodiscard]] std::int64_t num() const { return num_; }
  [[nodiscard]] std::int64_t den() const { return den_; }
  [[nodiscard]] bool is_integer() const { return den_ == 1; }
  [[nodiscard]] double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }
  /// Largest integer not greater than this value.
  [[nodiscard]] std::int64_t floor() const;
  [[nodiscard]] std::string to_string() const;

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  Rational operator-() const { return Rational(-num_, den_); }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace crlab
