#pragma once

#include <cmath>
#include <string>

namespace gembed {

/// Real number stored as sign and natural log of magnitude. Covers values
/// such as cosh^2(40) products or 1e72 sample sizes without overflow, at
/// ~15 significant digits. Zero has sign 0.
class ExtReal {
 public:
  constexpr ExtReal() = default;
  ExtReal(double value);  // NOLINT: implicit on purpose, mixes with doubles

  static ExtReal from_log(double log_abs, int sign = 1);
  static ExtReal infinity();
  static ExtReal zero() { return {}; }

  int sign() const { return sign_; }
  double log_abs() const { return log_abs_; }
  double log10_abs() const;
  bool is_zero() const { return sign_ == 0; }
  bool is_infinite() const { return sign_ != 0 && std::isinf(log_abs_); }

  /// Plain double; returns +-inf when the magnitude exceeds the double range.
  double to_double() const;
  /// True when to_double() would overflow.
  bool overflows_double() const;

  ExtReal operator-() const;
  friend ExtReal operator*(const ExtReal& a, const ExtReal& b);
  friend ExtReal operator/(const ExtReal& a, const ExtReal& b);
  friend ExtReal operator+(const ExtReal& a, const ExtReal& b);
  friend ExtReal operator-(const ExtReal& a, const ExtReal& b) { return a + (-b); }

  friend bool operator<(const ExtReal& a, const ExtReal& b);
  friend bool operator>(const ExtReal& a, const ExtReal& b) { return b < a; }
  friend bool operator<=(const ExtReal& a, const ExtReal& b) { return !(b < a); }
  friend bool operator>=(const ExtReal& a, const ExtReal& b) { return !(a < b); }

  /// Scientific notation with `digits` significant digits, e.g. "1.19e+09".
  std::string to_string(int digits = 6) const;

 private:
  int sign_ = 0;
  double log_abs_ = 0.0;
};

ExtReal pow(const ExtReal& base, double exponent);
ExtReal sqrt(const ExtReal& x);
ExtReal min(const ExtReal& a, const ExtReal& b);
ExtReal max(const ExtReal& a, const ExtReal& b);

/// cosh(x) and sinh(x) for x >= 0 without overflow.
ExtReal ext_cosh(double x);
ExtReal ext_sinh(double x);

}  // namespace gembed
