#pragma once

#include "carnot/common.hpp"

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>

namespace carnot
{

// Exact exponent bookkeeping (1/kappa = 1/q - 1/p and friends).
class Rational
{
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1) : num_(num), den_(den)
  {
    require(den != 0, ErrorCode::invalid_argument, "zero denominator");
    normalize();
  }

  // Best rational approximation with denominator <= max_den; fails unless it
  // reproduces x to within 1e-12 relative.
  static Rational from_double(double x, std::int64_t max_den = 1000000)
  {
    require(std::isfinite(x), ErrorCode::invalid_argument, "cannot convert non-finite value to rational");
    const double target = x;
    std::int64_t h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    double r = std::abs(x);
    for (int it = 0; it < 64; ++it) {
      const double a_d = std::floor(r);
      if (a_d > 1e15) break;
      const auto a = static_cast<std::int64_t>(a_d);
      const std::int64_t h2 = a * h1 + h0, k2 = a * k1 + k0;
      if (k2 > max_den) break;
      h0 = h1;
      h1 = h2;
      k0 = k1;
      k1 = k2;
      const double frac = r - a_d;
      if (std::abs(static_cast<double>(h1) / static_cast<double>(k1) - std::abs(target)) <=
          1e-15 * std::max(1.0, std::abs(target)))
        break;
      if (frac < 1e-300) break;
      r = 1.0 / frac;
    }
    Rational out(target < 0 ? -h1 : h1, k1);
    require(std::abs(out.value() - target) <= 1e-12 * std::max(1.0, std::abs(target)), ErrorCode::invalid_argument,
            "exponent is not a rational with small denominator");
    return out;
  }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  bool is_zero() const { return num_ == 0; }

  Rational reciprocal() const
  {
    require(num_ != 0, ErrorCode::invalid_argument, "reciprocal of zero");
    return Rational(den_, num_);
  }

  friend Rational operator+(Rational a, Rational b) { return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_); }
  friend Rational operator-(Rational a, Rational b) { return Rational(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_); }
  friend Rational operator*(Rational a, Rational b) { return Rational(a.num_ * b.num_, a.den_ * b.den_); }
  friend Rational operator/(Rational a, Rational b) { return a * b.reciprocal(); }
  friend bool operator==(Rational a, Rational b) { return a.num_ == b.num_ && a.den_ == b.den_; }
  friend bool operator<(Rational a, Rational b) { return a.num_ * b.den_ < b.num_ * a.den_; }
  friend bool operator<=(Rational a, Rational b) { return !(b < a); }

  std::string str() const { return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_); }

 private:
  void normalize()
  {
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    const std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace carnot
