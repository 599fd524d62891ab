#pragma once

// Multiprecision scalars and polynomial root finding.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/mpfr.hpp>
#include <Eigen/Eigenvalues>

#include "prill/polynomial.hpp"

namespace prill {

using Real = boost::multiprecision::mpfr_float;
using Complex = std::complex<Real>;
using Rational = boost::multiprecision::cpp_rational;

/// Sets the working precision (in bits) of newly created Real values for the
/// lifetime of the scope. Precision is process-global, so scopes must not be
/// opened concurrently with different values.
class PrecisionScope {
 public:
  explicit PrecisionScope(unsigned bits);
  ~PrecisionScope();
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  unsigned saved_digits10_;
};

/// Current working precision in bits.
unsigned working_bits();

inline double to_double(const Real& x) { return x.convert_to<double>(); }
inline double to_double(double x) { return x; }
inline std::complex<double> to_cd(const Complex& z) { return {to_double(z.real()), to_double(z.imag())}; }
inline std::complex<double> to_cd(const std::complex<double>& z) { return z; }

/// Shortest decimal string that reads back to the same value at the current precision.
std::string to_decimal(const Real& x);

/// An exact complex rational re + im*i, as parsed from user input.
struct ExactComplex {
  Rational re{0};
  Rational im{0};

  friend bool operator==(const ExactComplex&, const ExactComplex&) = default;
  std::string to_string() const;
  Complex to_complex() const;  // at the current precision
};

/// Parses "3", "-7/2", "0.125", "1e-3", "1/2+3/4i", "2i", "0.5-1.5i".
/// Throws std::invalid_argument on malformed text.
ExactComplex parse_exact_complex(const std::string& text);

/// |z| in double precision (z itself is exact; only its size is rounded).
inline double abs_d(const Complex& z) { return std::abs(to_cd(z)); }
inline double abs_d(const std::complex<double>& z) { return std::abs(z); }

/// Horner evaluation on raw MPFR limbs, avoiding temporaries.
Complex horner(const std::vector<Complex>& coeffs, const Complex& x);

template <>
template <>
inline Complex Polynomial<Complex>::operator()<Complex>(const Complex& x) const {
  return horner(c_, x);
}

template <class C>
struct ScalarTraits;

template <>
struct ScalarTraits<std::complex<double>> {
  using real_type = double;
  static double epsilon() { return std::numeric_limits<double>::epsilon(); }
};

template <>
struct ScalarTraits<Complex> {
  using real_type = Real;
  static Real epsilon() { return std::numeric_limits<Real>::epsilon(); }
};

class RootFindingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

template <class C>
bool newton_polish(const Polynomial<C>& p, const Polynomial<C>& dp, C& x) {
  using R = typename ScalarTraits<C>::real_type;
  const R tol = ScalarTraits<C>::epsilon() * R(64);
  for (int it = 0; it < 200; ++it) {
    C d = dp(x);
    if (d == C(0)) return false;
    C dx = p(x) / d;
    x -= dx;
    R scale = std::max(R(abs(x)), R(1));
    if (R(abs(dx)) <= tol * scale) return true;
  }
  return false;
}

template <class C>
double min_pairwise_gap(const std::vector<C>& roots) {
  double g = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < roots.size(); ++i) {
    for (std::size_t j = i + 1; j < roots.size(); ++j) g = std::min(g, std::abs(to_cd(roots[i]) - to_cd(roots[j])));
  }
  return g;
}

}  // namespace detail

/// Companion-matrix eigenvalues in double precision.
std::vector<std::complex<double>> companion_roots(const std::vector<std::complex<double>>& coeffs);

/// All complex roots of a squarefree polynomial, polished to working
/// precision. Seeds come from double-precision companion eigenvalues; if
/// Newton polishing fails or collapses two seeds, Aberth iteration is run.
/// Throws RootFindingError when neither converges to distinct roots.
template <class C>
std::vector<C> polynomial_roots(const Polynomial<C>& p) {
  using R = typename ScalarTraits<C>::real_type;
  const int n = p.degree();
  if (n < 1) return {};
  std::vector<std::complex<double>> cd;
  for (const auto& c : p.coeffs()) cd.push_back(to_cd(c));
  const auto seeds = companion_roots(cd);
  const auto dp = p.derivative();

  double scale = 0.0;
  for (const auto& s : seeds) scale = std::max(scale, std::abs(s));
  // A double root splits into a cluster of width about sqrt(epsilon).
  const double eps = to_double(ScalarTraits<C>::epsilon());
  const double gap_floor = std::max(1e-12, 64.0 * std::sqrt(eps)) * std::max(scale, 1.0);

  std::vector<C> roots;
  bool ok = true;
  for (const auto& s : seeds) {
    C x{R(s.real()), R(s.imag())};
    ok = detail::newton_polish(p, dp, x) && ok;
    roots.push_back(x);
  }
  if (ok && detail::min_pairwise_gap(roots) > gap_floor) return roots;

  // Aberth iteration from the perturbed seeds.
  for (std::size_t i = 0; i < roots.size(); ++i) {
    const double a = 0.4 + 2.0 * M_PI * static_cast<double>(i) / static_cast<double>(n);
    roots[i] = C{R(seeds[i].real() + 1e-3 * std::cos(a)), R(seeds[i].imag() + 1e-3 * std::sin(a))};
  }
  const R tol = ScalarTraits<C>::epsilon() * R(64);
  bool converged = false;
  for (int it = 0; it < 1000 && !converged; ++it) {
    converged = true;
    for (int i = 0; i < n; ++i) {
      C ratio = p(roots[i]) / dp(roots[i]);
      C sum(0);
      for (int j = 0; j < n; ++j) {
        if (j != i) sum += C(1) / (roots[i] - roots[j]);
      }
      C w = ratio / (C(1) - ratio * sum);
      roots[i] -= w;
      if (R(abs(w)) > tol * std::max(R(abs(roots[i])), R(1))) converged = false;
    }
  }
  if (!converged || detail::min_pairwise_gap(roots) <= gap_floor) {
    throw RootFindingError("polynomial_roots: no convergence to " + std::to_string(n) + " distinct roots");
  }
  return roots;
}

}  // namespace prill
