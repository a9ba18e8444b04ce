#pragma once

#include <gmpxx.h>

#include <compare>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fjcert {

/// Arbitrary-precision exact rational, always in lowest terms with a positive
/// denominator.
class Rational {
 public:
  Rational() = default;
  Rational(long value) : value_(value) {}  // NOLINT(google-explicit-constructor)
  Rational(long num, long den);

  /// Exact conversion; every finite binary double is a dyadic rational.
  /// Throws InputError on NaN or infinity.
  static Rational from_double(double value);

  /// Accepts "p", "p/q", and decimal literals with optional exponent
  /// ("-1.25", "3e-4"). Decimals convert exactly.
  static Rational parse(std::string_view text);

  int sign() const { return sgn(value_); }
  bool is_zero() const { return sign() == 0; }
  double to_double() const { return value_.get_d(); }

  /// "p" when the denominator is one, otherwise "p/q".
  std::string to_string() const;

  std::string numerator() const { return value_.get_num().get_str(); }
  std::string denominator() const { return value_.get_den().get_str(); }

  Rational abs() const;

  Rational operator-() const;
  Rational& operator+=(const Rational& rhs);
  Rational& operator-=(const Rational& rhs);
  Rational& operator*=(const Rational& rhs);
  Rational& operator/=(const Rational& rhs);

  friend Rational operator+(Rational lhs, const Rational& rhs) { return lhs += rhs; }
  friend Rational operator-(Rational lhs, const Rational& rhs) { return lhs -= rhs; }
  friend Rational operator*(Rational lhs, const Rational& rhs) { return lhs *= rhs; }
  friend Rational operator/(Rational lhs, const Rational& rhs) { return lhs /= rhs; }

  friend bool operator==(const Rational& a, const Rational& b) { return cmp(a.value_, b.value_) == 0; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    const int c = cmp(a.value_, b.value_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

 private:
  explicit Rational(mpq_class value);
  mpq_class value_;
};

std::ostream& operator<<(std::ostream& os, const Rational& r);

using RVec = std::vector<Rational>;

Rational dot(std::span<const Rational> a, std::span<const Rational> b);
RVec rationalize(std::span<const double> values);
std::vector<double> to_doubles(std::span<const Rational> values);
bool all_zero(std::span<const Rational> values);
Rational max_abs(std::span<const Rational> values);
std::string join(std::span<const Rational> values, std::string_view sep = ", ");

}  // namespace fjcert
