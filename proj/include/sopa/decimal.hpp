#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>

namespace sopa {

// Non-negative exact rational used for every environmental cost value.
// Constructed from decimal text ("0.0000391", "3.91e-5") or a fraction
// ("1/3"); arithmetic never rounds.
class ExactDecimal {
 public:
  ExactDecimal() = default;
  explicit ExactDecimal(std::uint64_t integer);
  static ExactDecimal from_rational(const mpq_class& value);
  static ExactDecimal ratio(std::uint64_t numerator, std::uint64_t denominator);

  // Throws ParseError on malformed text or a negative value.
  static ExactDecimal parse(std::string_view text);

  const mpq_class& rational() const { return value_; }
  bool is_zero() const { return sgn(value_) == 0; }
  // True when the value has a finite decimal expansion (denominator 2^a 5^b).
  bool is_terminating() const;

  // Canonical text: plain decimal when terminating, "num/den" otherwise.
  // parse(to_string()) reproduces the value exactly.
  std::string to_string() const;

  // Scientific rendering with `significant` digits, ties rounded away from
  // zero: 0.0000719 -> "7.19e-5", 0.0007 -> "7.00e-4", 0 -> "0".
  std::string to_scientific(int significant = 3) const;

  double to_double() const { return value_.get_d(); }

  ExactDecimal& operator+=(const ExactDecimal& other);
  friend ExactDecimal operator+(ExactDecimal lhs, const ExactDecimal& rhs) { return lhs += rhs; }
  friend ExactDecimal operator*(const ExactDecimal& lhs, const ExactDecimal& rhs);
  ExactDecimal operator*(std::uint64_t factor) const;
  // Exact division by a positive count.
  ExactDecimal operator/(std::uint64_t divisor) const;
  // Exact division by a positive value.
  ExactDecimal operator/(const ExactDecimal& divisor) const;

  friend bool operator==(const ExactDecimal& a, const ExactDecimal& b) { return a.value_ == b.value_; }
  friend std::strong_ordering operator<=>(const ExactDecimal& a, const ExactDecimal& b) {
    const int c = cmp(a.value_, b.value_);
    return c < 0 ? std::strong_ordering::less : c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
  }

 private:
  mpq_class value_{0};
};

inline std::ostream& operator<<(std::ostream& os, const ExactDecimal& d) { return os << d.to_string(); }

ExactDecimal parse_exact_decimal(std::string_view text);

// Renders an arbitrary-sign rational with a fixed number of fractional
// digits, truncated toward zero ("-89.20"). Used for signed percentages.
std::string format_fixed_truncated(const mpq_class& value, int decimals);

// Scientific rendering for any-sign rational (shared by ExactDecimal).
std::string format_scientific(const mpq_class& value, int significant);

}  // namespace sopa
