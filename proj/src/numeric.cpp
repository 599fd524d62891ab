#include "prill/numeric.hpp"

#include <cctype>
#include <cmath>

namespace prill {

namespace {

unsigned bits_to_digits10(unsigned bits) { return static_cast<unsigned>(std::ceil(bits * 0.30102999566398119521)) + 1; }

Rational pow10(int e) {
  Rational r(1);
  for (int i = 0; i < std::abs(e); ++i) r *= 10;
  return e < 0 ? Rational(1) / r : r;
}

// Parses an unsigned real literal: integer, p/q, or decimal with exponent.
Rational parse_real(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty number");
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    auto num = parse_real(s.substr(0, slash));
    auto den = parse_real(s.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator in '" + s + "'");
    return num / den;
  }
  std::size_t i = 0;
  boost::multiprecision::cpp_int mant = 0;
  int frac_digits = 0;
  bool seen_digit = false, seen_dot = false;
  for (; i < s.size(); ++i) {
    char ch = s[i];
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      mant = mant * 10 + (ch - '0');
      if (seen_dot) ++frac_digits;
      seen_digit = true;
    } else if (ch == '.' && !seen_dot) {
      seen_dot = true;
    } else {
      break;
    }
  }
  if (!seen_digit) throw std::invalid_argument("malformed number '" + s + "'");
  int exponent = 0;
  if (i < s.size()) {
    if (s[i] != 'e' && s[i] != 'E') throw std::invalid_argument("malformed number '" + s + "'");
    std::size_t used = 0;
    try {
      exponent = std::stoi(s.substr(i + 1), &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("malformed exponent in '" + s + "'");
    }
    if (used != s.size() - i - 1 || std::abs(exponent) > 4000) {
      throw std::invalid_argument("malformed exponent in '" + s + "'");
    }
  }
  return Rational(mant) * pow10(exponent - frac_digits);
}

Rational parse_signed(std::string s) {
  bool neg = false;
  while (!s.empty() && (s.front() == '+' || s.front() == '-')) {
    neg ^= s.front() == '-';
    s.erase(s.begin());
  }
  auto r = parse_real(s);
  return neg ? Rational(-r) : r;
}

Real to_real(const Rational& q) {
  return Real(boost::multiprecision::numerator(q).str()) / Real(boost::multiprecision::denominator(q).str());
}

}  // namespace

PrecisionScope::PrecisionScope(unsigned bits) : saved_digits10_(Real::default_precision()) {
  Real::default_precision(bits_to_digits10(bits));
}

PrecisionScope::~PrecisionScope() { Real::default_precision(saved_digits10_); }

unsigned working_bits() {
  return static_cast<unsigned>(std::floor(Real::default_precision() / 0.30102999566398119521));
}

std::string to_decimal(const Real& x) { return x.str(0, std::ios_base::scientific); }

std::string ExactComplex::to_string() const {
  if (im == 0) return re.str();
  std::string ims = (im == 1) ? "i" : (im == -1 ? "-i" : im.str() + "i");
  if (re == 0) return ims;
  return re.str() + (ims.front() == '-' ? "" : "+") + ims;
}

Complex ExactComplex::to_complex() const { return Complex(to_real(re), to_real(im)); }

ExactComplex parse_exact_complex(const std::string& raw) {
  std::string s;
  for (char ch : raw) {
    if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
  }
  if (s.empty()) throw std::invalid_argument("empty branch point");
  try {
    if (s.back() != 'i') return {parse_signed(s), 0};
    s.pop_back();
    // Split at the last sign that is not the leading sign or part of an exponent.
    std::size_t split = std::string::npos;
    for (std::size_t k = s.size(); k-- > 1;) {
      if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
        split = k;
        break;
      }
    }
    std::string re_part = split == std::string::npos ? "" : s.substr(0, split);
    std::string im_part = split == std::string::npos ? s : s.substr(split);
    if (im_part.empty() || im_part == "+") im_part += "1";
    if (im_part == "-") im_part = "-1";
    return {re_part.empty() ? Rational(0) : parse_signed(re_part), parse_signed(im_part)};
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument("cannot parse '" + raw + "': " + e.what());
  }
}

namespace {

// Scratch registers for horner(), one set per thread, resized to the
// precision of the argument.
struct HornerScratch {
  mpfr_t re, im, t1, t2;
  HornerScratch() {
    for (auto* r : {&re, &im, &t1, &t2}) mpfr_init2(*r, 64);
  }
  ~HornerScratch() {
    for (auto* r : {&re, &im, &t1, &t2}) mpfr_clear(*r);
  }
  void fit(mpfr_prec_t prec) {
    if (mpfr_get_prec(re) == prec) return;
    for (auto* r : {&re, &im, &t1, &t2}) mpfr_set_prec(*r, prec);
  }
};

// std::complex<T>::real() returns a copy for non-builtin T; these reach the
// stored parts directly (libstdc++ lays them out as two consecutive members).
static_assert(sizeof(Complex) == 2 * sizeof(Real));
mpfr_srcptr part(const Complex& z, int k) { return reinterpret_cast<const Real*>(&z)[k].backend().data(); }
mpfr_ptr part(Complex& z, int k) { return reinterpret_cast<Real*>(&z)[k].backend().data(); }

}  // namespace

Complex horner(const std::vector<Complex>& coeffs, const Complex& x) {
  Complex out;
  if (coeffs.empty()) return out;
  thread_local HornerScratch s;
  s.fit(mpfr_get_prec(part(out, 0)));
  const mpfr_srcptr xr = part(x, 0), xi = part(x, 1);
  mpfr_set(s.re, part(coeffs.back(), 0), MPFR_RNDN);
  mpfr_set(s.im, part(coeffs.back(), 1), MPFR_RNDN);
  for (std::size_t k = coeffs.size() - 1; k-- > 0;) {
    mpfr_fmms(s.t1, s.re, xr, s.im, xi, MPFR_RNDN);
    mpfr_fmma(s.t2, s.re, xi, s.im, xr, MPFR_RNDN);
    mpfr_add(s.re, s.t1, part(coeffs[k], 0), MPFR_RNDN);
    mpfr_add(s.im, s.t2, part(coeffs[k], 1), MPFR_RNDN);
  }
  mpfr_set(part(out, 0), s.re, MPFR_RNDN);
  mpfr_set(part(out, 1), s.im, MPFR_RNDN);
  return out;
}

std::vector<std::complex<double>> companion_roots(const std::vector<std::complex<double>>& coeffs) {
  const int n = static_cast<int>(coeffs.size()) - 1;
  if (n < 1) return {};
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 1; i < n; ++i) m(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) m(i, n - 1) = -coeffs[i] / coeffs[n];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m, false);
  std::vector<std::complex<double>> out(es.eigenvalues().data(), es.eigenvalues().data() + n);
  std::sort(out.begin(), out.end(), [](auto a, auto b) { return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag(); });
  return out;
}

}  // namespace prill
