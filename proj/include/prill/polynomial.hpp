#pragma once

// Dense univariate polynomials over any field-like scalar.

#include <algorithm>
#include <initializer_list>
#include <vector>

namespace prill {

template <class Scalar>
class Polynomial {
 public:
  Polynomial() = default;
  /// Coefficients in ascending order: c[0] + c[1] x + ...
  explicit Polynomial(std::vector<Scalar> coeffs) : c_(std::move(coeffs)) { trim(); }
  Polynomial(std::initializer_list<Scalar> coeffs) : c_(coeffs) { trim(); }

  static Polynomial monomial(const Scalar& coeff, std::size_t degree) {
    std::vector<Scalar> c(degree + 1, Scalar(0));
    c[degree] = coeff;
    return Polynomial(std::move(c));
  }

  /// -1 for the zero polynomial.
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const std::vector<Scalar>& coeffs() const { return c_; }
  Scalar coeff(std::size_t i) const { return i < c_.size() ? c_[i] : Scalar(0); }
  Scalar leading() const { return c_.empty() ? Scalar(0) : c_.back(); }

  friend bool operator==(const Polynomial& p, const Polynomial& q) { return p.c_ == q.c_; }

  template <class T>
  T operator()(const T& x) const {
    T acc(0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + T(*it);
    return acc;
  }

  Polynomial derivative() const {
    if (c_.size() <= 1) return {};
    std::vector<Scalar> d(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * Scalar(static_cast<int>(i));
    return Polynomial(std::move(d));
  }

  /// Coefficients of p(x + shift), i.e. the Taylor coefficients at `shift`.
  Polynomial taylor_shift(const Scalar& shift) const {
    std::vector<Scalar> a = c_;
    const std::size_t n = a.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      for (std::size_t j = n - 1; j > i; --j) a[j - 1] = a[j - 1] + shift * a[j];
    }
    return Polynomial(std::move(a));
  }

  Polynomial& operator+=(const Polynomial& o) {
    c_.resize(std::max(c_.size(), o.c_.size()), Scalar(0));
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] = c_[i] + o.c_[i];
    trim();
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    c_.resize(std::max(c_.size(), o.c_.size()), Scalar(0));
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] = c_[i] - o.c_[i];
    trim();
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.c_.empty() || b.c_.empty()) return {};
    std::vector<Scalar> r(a.c_.size() + b.c_.size() - 1, Scalar(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
      for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] = r[i + j] + a.c_[i] * b.c_[j];
    }
    return Polynomial(std::move(r));
  }
  friend Polynomial operator*(const Scalar& s, const Polynomial& p) {
    std::vector<Scalar> r(p.c_);
    for (auto& x : r) x = s * x;
    return Polynomial(std::move(r));
  }

  /// Coefficient-wise conversion by `convert`.
  template <class T, class F>
  Polynomial<T> map(F convert) const {
    std::vector<T> r;
    r.reserve(c_.size());
    for (const auto& x : c_) r.push_back(convert(x));
    return Polynomial<T>(std::move(r));
  }

  template <class T>
  Polynomial<T> cast() const {
    std::vector<T> r;
    r.reserve(c_.size());
    for (const auto& x : c_) r.push_back(T(x));
    return Polynomial<T>(std::move(r));
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == Scalar(0)) c_.pop_back();
  }

  std::vector<Scalar> c_;
};

}  // namespace prill
