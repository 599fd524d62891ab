#include "doctest.h"
#include "prill/numeric.hpp"

using namespace prill;

TEST_CASE("exact complex parsing") {
  CHECK(parse_exact_complex("3") == ExactComplex{3, 0});
  CHECK(parse_exact_complex("-7/2") == ExactComplex{Rational(-7, 2), 0});
  CHECK(parse_exact_complex("0.125") == ExactComplex{Rational(1, 8), 0});
  CHECK(parse_exact_complex("1e-3") == ExactComplex{Rational(1, 1000), 0});
  CHECK(parse_exact_complex("1/2+3/4i") == ExactComplex{Rational(1, 2), Rational(3, 4)});
  CHECK(parse_exact_complex("2i") == ExactComplex{0, 2});
  CHECK(parse_exact_complex("-i") == ExactComplex{0, -1});
  CHECK(parse_exact_complex(" 0.5 - 1.5i ") == ExactComplex{Rational(1, 2), Rational(-3, 2)});
  CHECK(parse_exact_complex("1e2-2e-1i") == ExactComplex{100, Rational(-1, 5)});
  CHECK(parse_exact_complex("1/2+3/4i").to_string() == "1/2+3/4i");
  for (const char* bad : {"", "abc", "1/0", "1..2", "3x", "1e"}) CHECK_THROWS_AS(parse_exact_complex(bad), std::invalid_argument);
}

TEST_CASE("precision scope") {
  const unsigned before = working_bits();
  {
    PrecisionScope s(400);
    CHECK(working_bits() >= 400);
    CHECK(working_bits() < 410);
  }
  CHECK(working_bits() == before);
}

TEST_CASE("multiprecision Horner evaluation") {
  PrecisionScope s(256);
  Polynomial<Complex> p{Complex(1, 2), Complex(-3), Complex(0, 5), Complex(Real(1) / 3, Real(2))};
  const Complex x(Real("0.7"), Real("-1.3"));
  Complex naive(0);
  for (int k = p.degree(); k >= 0; --k) naive = naive * x + p.coeff(k);
  CHECK(abs_d(p(x) - naive) < 1e-70);
}

TEST_CASE("polynomial roots at working precision") {
  PrecisionScope s(212);
  // (u - 1)(u + 2)(u - i)(u - 1/3)
  Polynomial<Complex> p{Complex(1)};
  const std::vector<Complex> r{Complex(1), Complex(-2), Complex(0, 1), Complex(Real(1) / 3)};
  for (const auto& c : r) p = p * Polynomial<Complex>{-c, Complex(1)};
  const auto roots = polynomial_roots(p);
  REQUIRE(roots.size() == 4);
  for (const auto& c : r) {
    double best = 1;
    for (const auto& x : roots) best = std::min(best, abs_d(x - c));
    CHECK(best < 1e-60);
  }
  const auto dr = polynomial_roots(Polynomial<std::complex<double>>{{-2.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}});
  REQUIRE(dr.size() == 2);
  CHECK(std::abs(std::abs(dr[0]) - std::sqrt(2.0)) < 1e-14);
}

TEST_CASE("repeated roots are refused") {
  Polynomial<std::complex<double>> p{{1.0, 0.0}, {-2.0, 0.0}, {1.0, 0.0}};
  CHECK_THROWS_AS(polynomial_roots(p), RootFindingError);
}
