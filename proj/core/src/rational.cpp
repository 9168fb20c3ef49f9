#include "crlab/rational.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>

#include "crlab/errors.hpp"

namespace crlab {
namespace {

using i128 = __int128;

Rational from_wide(i128 num, i128 den) {
  if (den == 0) throw DomainError("rational: division by zero");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  i128 a = num < 0 ? -num : num;
  i128 b = den;
  while (b != 0) {
    const i128 t = a % b;
    a = b;
    b = t;
  }
  if (a > 1) {
    num /= a;
    den /= a;
  }
  constexpr i128 kMax = std::numeric_limits<std::int64_t>::max();
  if (num > kMax || -num > kMax || den > kMax) {
    throw DomainError("rational: 64-bit overflow");
  }
  return Rational(static_cast<std::int64_t>(num), static_cast<std::int64_t>(den));
}

std::int64_t parse_int(std::string_view s, std::string_view whole) {
  std::int64_t v = 0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  if (!s.empty() && s.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || first == last) {
    throw InputError("not a rational number: '" + std::string(whole) + "'");
  }
  return v;
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw DomainError("rational: zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num, den);
  num_ = num / g;
  den_ = den / g;
}

Rational Rational::parse(std::string_view text) {
  if (text.empty()) throw InputError("empty rational literal");
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    return Rational(parse_int(text.substr(0, slash), text),
                    parse_int(text.substr(slash + 1), text));
  }
  const auto dot = text.find('.');
  if (dot == std::string_view::npos) return Rational(parse_int(text, text));

  const std::string_view int_part = text.substr(0, dot);
  const std::string_view frac_part = text.substr(dot + 1);
  if (frac_part.size() > 15) throw InputError("too many decimals: '" + std::string(text) + "'");
  const bool negative = !int_part.empty() && int_part.front() == '-';
  std::int64_t scale = 1;
  for (std::size_t i = 0; i < frac_part.size(); ++i) scale *= 10;
  std::int64_t whole = 0;
  if (!int_part.empty() && int_part != "-" && int_part != "+") whole = parse_int(int_part, text);
  std::int64_t frac = 0;
  if (!frac_part.empty()) {
    if (frac_part.front() == '-' || frac_part.front() == '+') {
      throw InputError("not a rational number: '" + std::string(text) + "'");
    }
    frac = parse_int(frac_part, text);
  }
  if (int_part.empty() && frac_part.empty()) throw InputError("not a rational number: '.'");
  const i128 num = static_cast<i128>(whole < 0 ? -whole : whole) * scale + frac;
  return from_wide(negative ? -num : num, scale);
}

Rational Rational::approximate(double value, std::int64_t max_den) {
  if (!std::isfinite(value)) throw InputError("cannot approximate non-finite value");
  if (max_den < 1) throw InputError("max_den must be >= 1");
  // Continued-fraction convergents.
  std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double x = value;
  for (int iter = 0; iter < 64; ++iter) {
    const double a_d = std::floor(x);
    if (std::abs(a_d) > 9.0e15) break;
    const auto a = static_cast<std::int64_t>(a_d);
    const i128 q2 = static_cast<i128>(a) * q1 + q0;
    if (q2 > max_den) break;
    const i128 p2 = static_cast<i128>(a) * p1 + p0;
    p0 = p1;
    q0 = q1;
    p1 = static_cast<std::int64_t>(p2);
    q1 = static_cast<std::int64_t>(q2);
    const double frac = x - a_d;
    if (frac < 1e-15 || std::abs(static_cast<double>(p1) / static_cast<double>(q1) - value) < 1e-15) break;
    x = 1.0 / frac;
  }
  return Rational(p1, q1);
}

std::int64_t Rational::floor() const {
  std::int64_t q = num_ / den_;
  if (num_ % den_ != 0 && num_ < 0) --q;
  return q;
}

std::string Rational::to_string() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational operator+(const Rational& a, const Rational& b) {
  return from_wide(static_cast<i128>(a.num_) * b.den_ + static_cast<i128>(b.num_) * a.den_,
                   static_cast<i128>(a.den_) * b.den_);
}

Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

Rational operator*(const Rational& a, const Rational& b) {
  return from_wide(static_cast<i128>(a.num_) * b.num_, static_cast<i128>(a.den_) * b.den_);
}

Rational operator/(const Rational& a, const Rational& b) {
  return from_wide(static_cast<i128>(a.num_) * b.den_, static_cast<i128>(a.den_) * b.num_);
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  const i128 lhs = static_cast<i128>(a.num_) * b.den_;
  const i128 rhs = static_cast<i128>(b.num_) * a.den_;
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

}  // namespace crlab
