#include "gembed/ext_real.hpp"

#include <cstdio>
#include <limits>

namespace gembed {

namespace {
constexpr double kLn10 = 2.302585092994045684;
// log(DBL_MAX)
constexpr double kMaxLog = 709.782712893384;

double log1pexp(double x) {
  // log(1 + e^x)
  if (x > 35.0) return x;
  if (x < -35.0) return std::exp(x);
  return std::log1p(std::exp(x));
}
}  // namespace

ExtReal::ExtReal(double value) {
  if (value == 0.0) return;
  sign_ = value > 0 ? 1 : -1;
  log_abs_ = std::log(std::fabs(value));
}

ExtReal ExtReal::from_log(double log_abs, int sign) {
  ExtReal r;
  if (sign == 0 || log_abs == -std::numeric_limits<double>::infinity()) return r;
  r.sign_ = sign > 0 ? 1 : -1;
  r.log_abs_ = log_abs;
  return r;
}

ExtReal ExtReal::infinity() { return from_log(std::numeric_limits<double>::infinity()); }

double ExtReal::log10_abs() const {
  if (sign_ == 0) return -std::numeric_limits<double>::infinity();
  return log_abs_ / kLn10;
}

double ExtReal::to_double() const {
  if (sign_ == 0) return 0.0;
  if (log_abs_ > kMaxLog) return sign_ * std::numeric_limits<double>::infinity();
  return sign_ * std::exp(log_abs_);
}

bool ExtReal::overflows_double() const { return sign_ != 0 && log_abs_ > kMaxLog; }

ExtReal ExtReal::operator-() const {
  ExtReal r = *this;
  r.sign_ = -r.sign_;
  return r;
}

ExtReal operator*(const ExtReal& a, const ExtReal& b) {
  if (a.sign_ == 0 || b.sign_ == 0) return {};
  return ExtReal::from_log(a.log_abs_ + b.log_abs_, a.sign_ * b.sign_);
}

ExtReal operator/(const ExtReal& a, const ExtReal& b) {
  if (b.sign_ == 0) return ExtReal::from_log(std::numeric_limits<double>::infinity(), a.sign_ ? a.sign_ : 1);
  if (a.sign_ == 0) return {};
  return ExtReal::from_log(a.log_abs_ - b.log_abs_, a.sign_ * b.sign_);
}

ExtReal operator+(const ExtReal& a, const ExtReal& b) {
  if (a.sign_ == 0) return b;
  if (b.sign_ == 0) return a;
  const ExtReal& big = a.log_abs_ >= b.log_abs_ ? a : b;
  const ExtReal& small = a.log_abs_ >= b.log_abs_ ? b : a;
  if (std::isinf(big.log_abs_)) return big;
  const double diff = small.log_abs_ - big.log_abs_;  // <= 0
  if (big.sign_ == small.sign_) {
    return ExtReal::from_log(big.log_abs_ + log1pexp(diff), big.sign_);
  }
  if (diff == 0.0) return {};
  // log(1 - e^diff), diff < 0
  const double t = diff > -0.693 ? std::log(-std::expm1(diff)) : std::log1p(-std::exp(diff));
  return ExtReal::from_log(big.log_abs_ + t, big.sign_);
}

bool operator<(const ExtReal& a, const ExtReal& b) {
  if (a.sign_ != b.sign_) return a.sign_ < b.sign_;
  if (a.sign_ == 0) return false;
  return a.sign_ > 0 ? a.log_abs_ < b.log_abs_ : a.log_abs_ > b.log_abs_;
}

std::string ExtReal::to_string(int digits) const {
  if (sign_ == 0) return "0";
  if (is_infinite()) return sign_ > 0 ? "inf" : "-inf";
  const double l10 = log10_abs();
  double exponent = std::floor(l10);
  double mantissa = std::pow(10.0, l10 - exponent);
  if (mantissa >= 9.999999999999) {
    mantissa /= 10.0;
    exponent += 1.0;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s%.*fe%+03.0f", sign_ < 0 ? "-" : "", digits - 1, mantissa, exponent);
  return buf;
}

ExtReal pow(const ExtReal& base, double exponent) {
  if (base.sign() < 0) return ExtReal(std::numeric_limits<double>::quiet_NaN());
  if (exponent == 0.0) return ExtReal(1.0);
  if (base.sign() == 0) return exponent > 0 ? ExtReal::zero() : ExtReal::infinity();
  return ExtReal::from_log(base.log_abs() * exponent);
}

ExtReal sqrt(const ExtReal& x) { return pow(x, 0.5); }

ExtReal min(const ExtReal& a, const ExtReal& b) { return b < a ? b : a; }
ExtReal max(const ExtReal& a, const ExtReal& b) { return a < b ? b : a; }

ExtReal ext_cosh(double x) {
  x = std::fabs(x);
  if (x < 20.0) return ExtReal(std::cosh(x));
  // cosh x = e^x (1 + e^{-2x}) / 2
  return ExtReal::from_log(x + std::log1p(std::exp(-2.0 * x)) - std::log(2.0));
}

ExtReal ext_sinh(double x) {
  if (x < 0) return -ext_sinh(-x);
  if (x < 20.0) return ExtReal(std::sinh(x));
  return ExtReal::from_log(x + std::log1p(-std::exp(-2.0 * x)) - std::log(2.0));
}

}  // namespace gembed
