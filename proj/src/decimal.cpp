#include "sopa/decimal.hpp"

#include <cctype>
#include <string>

#include "sopa/error.hpp"

namespace sopa {
namespace {

constexpr long kMaxExponent = 4096;

mpz_class pow10(unsigned long exponent) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), 10, exponent);
  return r;
}

mpq_class pow10q(long exponent) {
  if (exponent >= 0) return mpq_class(pow10(static_cast<unsigned long>(exponent)));
  mpq_class r(mpz_class(1), pow10(static_cast<unsigned long>(-exponent)));
  return r;
}

[[noreturn]] void fail(std::string_view text, const std::string& why) {
  throw ParseError("invalid decimal '" + std::string(text) + "': " + why);
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

// floor(log10(v)) for v > 0.
long decimal_exponent(const mpq_class& v) {
  long e = static_cast<long>(mpz_sizeinbase(v.get_num_mpz_t(), 10)) -
           static_cast<long>(mpz_sizeinbase(v.get_den_mpz_t(), 10));
  while (pow10q(e) > v) --e;
  while (pow10q(e + 1) <= v) ++e;
  return e;
}

// Round a positive rational to the nearest integer, ties away from zero.
mpz_class round_half_up(const mpq_class& v) {
  mpq_class twice = v * 2 + 1;
  mpz_class r;
  mpz_fdiv_q(r.get_mpz_t(), twice.get_num_mpz_t(), twice.get_den_mpz_t());
  mpz_fdiv_q_ui(r.get_mpz_t(), r.get_mpz_t(), 2);
  return r;
}

}  // namespace

ExactDecimal::ExactDecimal(std::uint64_t integer) : value_(mpz_class(std::to_string(integer), 10)) {}

ExactDecimal ExactDecimal::from_rational(const mpq_class& value) {
  if (sgn(value) < 0) throw ValidationError("negative cost value " + value.get_str());
  ExactDecimal d;
  d.value_ = value;
  d.value_.canonicalize();
  return d;
}

ExactDecimal ExactDecimal::ratio(std::uint64_t numerator, std::uint64_t denominator) {
  if (denominator == 0) throw ValidationError("zero denominator");
  mpq_class q(mpz_class(std::to_string(numerator), 10), mpz_class(std::to_string(denominator), 10));
  q.canonicalize();
  return from_rational(q);
}

ExactDecimal ExactDecimal::parse(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.empty()) fail(text, "empty");

  bool negative = false;
  if (s.front() == '+' || s.front() == '-') {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }

  mpq_class value;
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    auto num = s.substr(0, slash);
    auto den = s.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) fail(text, "fraction must be digits/digits");
    mpz_class d(std::string(den), 10);
    if (d == 0) fail(text, "zero denominator");
    value = mpq_class(mpz_class(std::string(num), 10), d);
    value.canonicalize();
  } else {
    std::string_view mantissa = s;
    long exponent = 0;
    if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
      mantissa = s.substr(0, e);
      std::string_view exp = s.substr(e + 1);
      bool exp_negative = false;
      if (!exp.empty() && (exp.front() == '+' || exp.front() == '-')) {
        exp_negative = exp.front() == '-';
        exp.remove_prefix(1);
      }
      if (!all_digits(exp)) fail(text, "malformed exponent");
      if (exp.size() > 6) fail(text, "exponent out of range");
      exponent = std::stol(std::string(exp));
      if (exponent > kMaxExponent) fail(text, "exponent out of range");
      if (exp_negative) exponent = -exponent;
    }
    std::string_view int_part = mantissa;
    std::string_view frac_part;
    if (auto dot = mantissa.find('.'); dot != std::string_view::npos) {
      int_part = mantissa.substr(0, dot);
      frac_part = mantissa.substr(dot + 1);
    }
    if (int_part.empty() && frac_part.empty()) fail(text, "no digits");
    if (!int_part.empty() && !all_digits(int_part)) fail(text, "unexpected character");
    if (!frac_part.empty() && !all_digits(frac_part)) fail(text, "unexpected character");
    std::string digits = std::string(int_part) + std::string(frac_part);
    mpz_class n(digits.empty() ? std::string("0") : digits, 10);
    value = mpq_class(n) * pow10q(exponent - static_cast<long>(frac_part.size()));
    value.canonicalize();
  }
  if (negative && sgn(value) != 0) throw ParseError("negative value '" + std::string(text) + "' not allowed");
  ExactDecimal d;
  d.value_ = value;
  return d;
}

bool ExactDecimal::is_terminating() const {
  mpz_class den = value_.get_den();
  while (mpz_divisible_ui_p(den.get_mpz_t(), 2)) den /= 2;
  while (mpz_divisible_ui_p(den.get_mpz_t(), 5)) den /= 5;
  return den == 1;
}

std::string ExactDecimal::to_string() const {
  if (!is_terminating()) return value_.get_num().get_str() + "/" + value_.get_den().get_str();
  // Smallest k with value * 10^k integral.
  unsigned long k = 0;
  mpz_class den = value_.get_den();
  while (den != 1) {
    mpz_class g = gcd(den, mpz_class(10));
    den /= g;
    ++k;
  }
  mpq_class scaled = value_ * mpq_class(pow10(k));
  std::string digits = scaled.get_num().get_str();
  if (k == 0) return digits;
  if (digits.size() <= k) digits.insert(0, k - digits.size() + 1, '0');
  digits.insert(digits.size() - k, ".");
  return digits;
}

std::string format_scientific(const mpq_class& value, int significant) {
  if (significant < 1) significant = 1;
  if (sgn(value) == 0) return "0";
  mpq_class v = abs(value);
  long e = decimal_exponent(v);
  mpz_class m = round_half_up(v / pow10q(e - significant + 1));
  if (m == pow10(static_cast<unsigned long>(significant))) {
    m /= 10;
    ++e;
  }
  std::string digits = m.get_str();
  std::string out = sgn(value) < 0 ? "-" : "";
  out += digits.substr(0, 1);
  if (digits.size() > 1) out += "." + digits.substr(1);
  out += "e" + std::to_string(e);
  return out;
}

std::string ExactDecimal::to_scientific(int significant) const { return format_scientific(value_, significant); }

std::string format_fixed_truncated(const mpq_class& value, int decimals) {
  if (decimals < 0) decimals = 0;
  mpq_class v = abs(value) * mpq_class(pow10(static_cast<unsigned long>(decimals)));
  mpz_class n;
  mpz_tdiv_q(n.get_mpz_t(), v.get_num_mpz_t(), v.get_den_mpz_t());
  std::string digits = n.get_str();
  if (decimals > 0) {
    const auto d = static_cast<std::size_t>(decimals);
    if (digits.size() <= d) digits.insert(0, d - digits.size() + 1, '0');
    digits.insert(digits.size() - d, ".");
  }
  return (sgn(value) < 0 && n != 0 ? "-" : "") + digits;
}

ExactDecimal& ExactDecimal::operator+=(const ExactDecimal& other) {
  value_ += other.value_;
  return *this;
}

ExactDecimal operator*(const ExactDecimal& lhs, const ExactDecimal& rhs) {
  ExactDecimal d;
  d.value_ = lhs.value_ * rhs.value_;
  return d;
}

ExactDecimal ExactDecimal::operator*(std::uint64_t factor) const { return *this * ExactDecimal(factor); }

ExactDecimal ExactDecimal::operator/(std::uint64_t divisor) const { return *this / ExactDecimal(divisor); }

ExactDecimal ExactDecimal::operator/(const ExactDecimal& divisor) const {
  if (divisor.is_zero()) throw ValidationError("division by zero");
  ExactDecimal d;
  d.value_ = value_ / divisor.value_;
  return d;
}

ExactDecimal parse_exact_decimal(std::string_view text) { return ExactDecimal::parse(text); }

}  // namespace sopa
