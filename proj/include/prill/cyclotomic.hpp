#pragma once

// Exact arithmetic in Q(zeta_3), elements x + y*zeta with zeta^2 + zeta + 1 = 0.

#include <complex>
#include <ostream>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace prill {

class CyclotomicNumber {
 public:
  using Rational = boost::multiprecision::cpp_rational;

  CyclotomicNumber() = default;
  CyclotomicNumber(int x) : x_(x) {}  // NOLINT: integers embed implicitly, like any scalar
  CyclotomicNumber(Rational x, Rational y) : x_(std::move(x)), y_(std::move(y)) {}

  static CyclotomicNumber zeta() { return {Rational(0), Rational(1)}; }

  const Rational& rational_part() const { return x_; }
  const Rational& zeta_part() const { return y_; }

  bool is_zero() const { return x_ == 0 && y_ == 0; }

  /// Galois conjugate, zeta -> zeta^2 = -1 - zeta.
  CyclotomicNumber conj() const { return {x_ - y_, -y_}; }

  /// Field norm x^2 - x y + y^2, always a non-negative rational.
  Rational norm() const { return x_ * x_ - x_ * y_ + y_ * y_; }

  CyclotomicNumber operator-() const { return {-x_, -y_}; }

  CyclotomicNumber& operator+=(const CyclotomicNumber& o) {
    x_ += o.x_;
    y_ += o.y_;
    return *this;
  }
  CyclotomicNumber& operator-=(const CyclotomicNumber& o) {
    x_ -= o.x_;
    y_ -= o.y_;
    return *this;
  }
  CyclotomicNumber& operator*=(const CyclotomicNumber& o) {
    // (a + b z)(c + d z) = ac - bd + (ad + bc - bd) z
    Rational bd = y_ * o.y_;
    Rational re = x_ * o.x_ - bd;
    Rational ze = x_ * o.y_ + y_ * o.x_ - bd;
    x_ = std::move(re);
    y_ = std::move(ze);
    return *this;
  }
  CyclotomicNumber& operator/=(const CyclotomicNumber& o) {
    if (o.is_zero()) throw std::domain_error("CyclotomicNumber: division by zero");
    Rational n = o.norm();
    *this *= o.conj();
    x_ /= n;
    y_ /= n;
    return *this;
  }

  friend CyclotomicNumber operator+(CyclotomicNumber a, const CyclotomicNumber& b) { return a += b; }
  friend CyclotomicNumber operator-(CyclotomicNumber a, const CyclotomicNumber& b) { return a -= b; }
  friend CyclotomicNumber operator*(CyclotomicNumber a, const CyclotomicNumber& b) { return a *= b; }
  friend CyclotomicNumber operator/(CyclotomicNumber a, const CyclotomicNumber& b) { return a /= b; }
  friend bool operator==(const CyclotomicNumber& a, const CyclotomicNumber& b) { return a.x_ == b.x_ && a.y_ == b.y_; }

  std::complex<double> to_complex() const {
    const double re = static_cast<double>(x_), ze = static_cast<double>(y_);
    // zeta = -1/2 + i sqrt(3)/2
    return {re - 0.5 * ze, ze * 0.86602540378443864676};
  }

  std::string to_string() const {
    if (y_ == 0) return x_.str();
    std::string zs = (y_ == 1) ? "zeta3" : (y_ == -1 ? "-zeta3" : y_.str() + "*zeta3");
    if (x_ == 0) return zs;
    if (zs.front() == '-') return x_.str() + " - " + zs.substr(1);
    return x_.str() + " + " + zs;
  }

  friend std::ostream& operator<<(std::ostream& os, const CyclotomicNumber& c) { return os << c.to_string(); }

 private:
  Rational x_ = 0;
  Rational y_ = 0;
};

}  // namespace prill
