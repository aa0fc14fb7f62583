#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace choreo {

/// Exact fraction num/den, always reduced with den > 0. Phases and time
/// offsets are stored as fractions of the period T.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1);

  std::int64_t num() const noexcept { return num_; }
  std::int64_t den() const noexcept { return den_; }
  double value() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }

  /// Representative in [0, 1).
  Rational wrapped() const;

  /// Accepts "p/q", "p" and surrounding whitespace; throws ParseError.
  static Rational parse(std::string_view text);

  /// "p/q", or "p" when den == 1.
  std::string str() const;
  /// Multiple of the period, e.g. "T/4", "3T/8", "0", "T".
  std::string as_period_fraction() const;

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a) { return Rational(-a.num_, a.den_); }
  friend bool operator==(const Rational&, const Rational&) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

std::int64_t lcm_positive(std::int64_t a, std::int64_t b);

}  // namespace choreo
