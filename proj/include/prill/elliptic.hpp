#pragma once

// Elliptic curves in short Weierstrass form v^2 = u^3 + a u + b, templated on
// the field scalar so the same code runs on exact Q(zeta_3) values, on
// std::complex<double> and on multiprecision complex numbers.

#include <array>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "prill/cyclotomic.hpp"
#include "prill/numeric.hpp"
#include "prill/polynomial.hpp"

namespace prill {

template <class S>
struct WeierstrassCurve {
  S a{0};
  S b{0};

  S discriminant() const { return S(-16) * (S(4) * a * a * a + S(27) * b * b); }
  /// u^3 + a u + b
  Polynomial<S> cubic() const { return Polynomial<S>{b, a, S(0), S(1)}; }
  template <class T>
  T rhs(const T& u) const {
    return (u * u + T(a)) * u + T(b);
  }
};

template <class S>
struct CurvePoint {
  S x{0};
  S y{0};
  bool infinity = true;

  static CurvePoint zero() { return {}; }
  static CurvePoint affine(S x, S y) { return {std::move(x), std::move(y), false}; }

  friend bool operator==(const CurvePoint& p, const CurvePoint& q) {
    if (p.infinity || q.infinity) return p.infinity == q.infinity;
    return p.x == q.x && p.y == q.y;
  }
};

template <class S>
CurvePoint<S> negate(const CurvePoint<S>& p) {
  if (p.infinity) return p;
  return CurvePoint<S>::affine(p.x, -p.y);
}

/// Chord-tangent addition.
template <class S>
CurvePoint<S> add(const CurvePoint<S>& p, const CurvePoint<S>& q, const WeierstrassCurve<S>& c) {
  if (p.infinity) return q;
  if (q.infinity) return p;
  S slope;
  if (p.x == q.x) {
    if (p.y + q.y == S(0)) return CurvePoint<S>::zero();
    slope = (S(3) * p.x * p.x + c.a) / (S(2) * p.y);
  } else {
    slope = (q.y - p.y) / (q.x - p.x);
  }
  S x3 = slope * slope - p.x - q.x;
  S y3 = slope * (p.x - x3) - p.y;
  return CurvePoint<S>::affine(std::move(x3), std::move(y3));
}

template <class S>
CurvePoint<S> subtract(const CurvePoint<S>& p, const CurvePoint<S>& q, const WeierstrassCurve<S>& c) {
  return add(p, negate(q), c);
}

/// The sextic Q with psi_4 = 4 v Q(u).
template <class S>
Polynomial<S> psi4_factor(const WeierstrassCurve<S>& c) {
  const S& a = c.a;
  const S& b = c.b;
  return Polynomial<S>{S(-8) * b * b - a * a * a, S(-4) * a * b, S(-5) * a * a, S(20) * b, S(5) * a, S(0), S(1)};
}

/// n = 2: the 2-torsion cubic u^3 + a u + b (psi_2 = 2v, so its u-roots are
/// the affine 2-torsion). n = 3: psi_3 = 3u^4 + 6au^2 + 12bu - a^2.
template <class S>
Polynomial<S> division_polynomial(int n, const WeierstrassCurve<S>& c) {
  switch (n) {
    case 2:
      return c.cubic();
    case 3:
      return Polynomial<S>{-(c.a * c.a), S(12) * c.b, S(6) * c.a, S(0), S(3)};
    default:
      throw std::invalid_argument("division_polynomial: only n = 2 and n = 3 are supported");
  }
}

/// phi_3 = u psi_3^2 - 8 f Q with f the 2-torsion cubic; u([3]P) = phi_3 / psi_3^2.
template <class S>
Polynomial<S> phi3(const WeierstrassCurve<S>& c) {
  auto psi3 = division_polynomial(3, c);
  return Polynomial<S>{S(0), S(1)} * psi3 * psi3 - S(8) * (c.cubic() * psi4_factor(c));
}

/// W with omega_3 = v W(u); v([3]P) = v W(u) / psi_3(u)^3.
template <class S>
Polynomial<S> omega3_factor(const WeierstrassCurve<S>& c) {
  auto f = c.cubic();
  auto q = psi4_factor(c);
  auto psi3 = division_polynomial(3, c);
  return S(32) * (f * f * q) - psi3 * psi3 * psi3 - S(4) * (q * q);
}

/// Precomputed multiplication-by-3 data for one curve.
template <class S>
struct TripleMap {
  WeierstrassCurve<S> curve;
  Polynomial<S> psi3, psi3_sq, phi3, omega3;

  explicit TripleMap(const WeierstrassCurve<S>& c)
      : curve(c),
        psi3(division_polynomial(3, c)),
        psi3_sq(psi3 * psi3),
        phi3(prill::phi3(c)),
        omega3(omega3_factor(c)) {}

  CurvePoint<S> operator()(const CurvePoint<S>& p) const {
    if (p.infinity) return p;
    S d = psi3(p.x);
    if (d == S(0)) return CurvePoint<S>::zero();
    return CurvePoint<S>::affine(phi3(p.x) / (d * d), p.y * omega3(p.x) / (d * d * d));
  }

  /// Degree-9 polynomial whose roots are the u-coordinates of [3]^-1({P, -P}).
  Polynomial<S> preimage_polynomial(const S& u_target) const { return phi3 - u_target * psi3_sq; }
};

/// [3]P from the division-polynomial formulas.
template <class S>
CurvePoint<S> multiply_by_3(const CurvePoint<S>& p, const WeierstrassCurve<S>& c) {
  return TripleMap<S>(c)(p);
}

/// w^2 = q(t) with q of degree 4, together with a marked point (t0, w0).
template <class S>
struct QuarticModel {
  std::array<S, 5> coeffs{};  // ascending
  S t0{0};
  S w0{0};

  Polynomial<S> quartic() const { return Polynomial<S>(std::vector<S>(coeffs.begin(), coeffs.end())); }

  static QuarticModel from_roots(const std::array<S, 4>& roots, S t0, S w0) {
    Polynomial<S> q{S(1)};
    for (const auto& r : roots) q = q * Polynomial<S>{-r, S(1)};
    QuarticModel m;
    for (std::size_t i = 0; i < 5; ++i) m.coeffs[i] = q.coeff(i);
    m.t0 = std::move(t0);
    m.w0 = std::move(w0);
    return m;
  }
};

/// Birational identification of (E, marked point) with a Weierstrass curve
/// sending the marked point to O. Built in two steps: the substitution
/// t = r + 1/X at a root r of q gives a cubic model with identity over r, and
/// translation by the image T of the marked point moves the identity there.
template <class S>
struct WeierstrassTransform {
  WeierstrassCurve<S> curve;
  S root{0};
  S d1{0}, d2{0};
  S lead{0};
  CurvePoint<S> shift;  // T

  /// Cubic-model image of an affine quartic point (identity over the root).
  CurvePoint<S> to_cubic_model(const S& t, const S& w) const {
    if (t == root) return CurvePoint<S>::zero();
    S X = S(1) / (t - root);
    return CurvePoint<S>::affine(d1 * X + d2 / S(3), d1 * w * X * X);
  }

  CurvePoint<S> forward(const S& t, const S& w) const { return subtract(to_cubic_model(t, w), shift, curve); }

  /// Image of a point at t = infinity, where w / t^2 -> w_over_t2 (a square root of lead).
  CurvePoint<S> at_infinity(const S& w_over_t2) const {
    return subtract(CurvePoint<S>::affine(d2 / S(3), d1 * w_over_t2), shift, curve);
  }

  /// Quartic coordinates (t, w), or nullopt for the two points at t = infinity.
  std::optional<std::pair<S, S>> inverse(const CurvePoint<S>& p) const {
    CurvePoint<S> r = add(p, shift, curve);
    if (r.infinity) return std::pair<S, S>{root, S(0)};
    S X = (r.x - d2 / S(3)) / d1;
    if (X == S(0)) return std::nullopt;
    return std::pair<S, S>{root + S(1) / X, r.y / (d1 * X * X)};
  }
};

/// Requires w0 != 0 and `root` a simple root of q; throws std::invalid_argument
/// otherwise (exact test, so callers pass a polished numeric root).
template <class S>
WeierstrassTransform<S> quartic_to_weierstrass(const QuarticModel<S>& m, const S& root) {
  if (m.w0 == S(0)) throw std::invalid_argument("quartic_to_weierstrass: marked point is a branch point (w0 = 0)");
  if (m.coeffs[4] == S(0)) throw std::invalid_argument("quartic_to_weierstrass: q must have degree 4");
  auto taylor = m.quartic().taylor_shift(root);
  WeierstrassTransform<S> wt;
  wt.root = root;
  wt.d1 = taylor.coeff(1);
  wt.d2 = taylor.coeff(2);
  const S d3 = taylor.coeff(3);
  const S d4 = taylor.coeff(4);
  if (wt.d1 == S(0)) throw std::invalid_argument("quartic_to_weierstrass: root is not simple");
  wt.lead = d4;
  wt.curve.a = wt.d1 * d3 - wt.d2 * wt.d2 / S(3);
  wt.curve.b = wt.d1 * wt.d1 * d4 - wt.d1 * wt.d2 * d3 / S(3) + S(2) * wt.d2 * wt.d2 * wt.d2 / S(27);
  wt.shift = CurvePoint<S>::zero();
  wt.shift = wt.to_cubic_model(m.t0, m.w0);
  return wt;
}

/// A point [x : z] of the projective line.
template <class S>
struct ProjectivePoint {
  S x{0};
  S z{1};

  static ProjectivePoint finite(S v) { return {std::move(v), S(1)}; }
  static ProjectivePoint infinity() { return {S(1), S(0)}; }
  bool is_infinity() const { return z == S(0); }

  /// Same point as o (exact test of x z' = x' z).
  bool same_as(const ProjectivePoint& o) const { return x * o.z == o.x * z; }
};

/// Image of p3 under the Moebius map sending p1 -> 0, p2 -> 1, p4 -> infinity,
/// so cross_ratio(0, 1, l, inf) == l. Throws std::domain_error on coincident points.
template <class S>
S cross_ratio(const ProjectivePoint<S>& p1, const ProjectivePoint<S>& p2, const ProjectivePoint<S>& p3,
              const ProjectivePoint<S>& p4) {
  auto det = [](const ProjectivePoint<S>& p, const ProjectivePoint<S>& q) { return p.x * q.z - q.x * p.z; };
  const std::array<const ProjectivePoint<S>*, 4> pts{&p1, &p2, &p3, &p4};
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = i + 1; j < 4; ++j) {
      if (det(*pts[i], *pts[j]) == S(0)) throw std::domain_error("cross_ratio: coincident points");
    }
  }
  return (det(p3, p1) * det(p2, p4)) / (det(p2, p1) * det(p3, p4));
}

template <class S>
S cross_ratio(const S& p1, const S& p2, const S& p3, const S& p4) {
  using P = ProjectivePoint<S>;
  return cross_ratio(P::finite(p1), P::finite(p2), P::finite(p3), P::finite(p4));
}

/// j = 256 (l^2 - l + 1)^3 / (l^2 (l - 1)^2). Throws std::domain_error for l in {0, 1}.
template <class S>
S j_from_lambda(const S& l) {
  if (l == S(0) || l == S(1)) throw std::domain_error("j_from_lambda: degenerate cross-ratio");
  S n = l * l - l + S(1);
  S lm1 = l - S(1);
  return S(256) * n * n * n / (l * l * lm1 * lm1);
}

/// j-invariant of the double cover of P^1 branched at four distinct points.
template <class S>
S j_from_four_points(const std::array<ProjectivePoint<S>, 4>& p) {
  return j_from_lambda(cross_ratio(p[0], p[1], p[2], p[3]));
}

template <class S>
S j_from_four_points(const std::array<S, 4>& p) {
  using P = ProjectivePoint<S>;
  return j_from_four_points(std::array<P, 4>{P::finite(p[0]), P::finite(p[1]), P::finite(p[2]), P::finite(p[3])});
}

/// The four u-coordinates of E[3] \ O (roots of psi_3), polished to working
/// precision. Throws std::domain_error if two of them, or one of them and a
/// 2-torsion u-coordinate, are closer than 1e-10 relative to their size.
template <class C>
std::array<C, 4> three_torsion_branch_points(const WeierstrassCurve<C>& c) {
  using R = typename ScalarTraits<C>::real_type;
  auto roots = polynomial_roots(division_polynomial(3, c));
  auto two = polynomial_roots(division_polynomial(2, c));
  if (roots.size() != 4 || two.size() != 3) throw std::domain_error("three_torsion_branch_points: singular curve");
  double scale = 1.0;
  for (const auto& r : roots) scale = std::max(scale, std::abs(to_cd(r)));
  for (const auto& r : two) scale = std::max(scale, std::abs(to_cd(r)));
  const double gap = 1e-10 * scale;
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = i + 1; j < 4; ++j) {
      if (to_double(R(abs(roots[i] - roots[j]))) < gap) {
        throw std::domain_error("three_torsion_branch_points: 3-torsion u-values not separated");
      }
    }
    for (const auto& t : two) {
      if (to_double(R(abs(roots[i] - t))) < gap) {
        throw std::domain_error("three_torsion_branch_points: 3-torsion meets 2-torsion");
      }
    }
  }
  return {roots[0], roots[1], roots[2], roots[3]};
}

/// Exact isotriviality computation on the Hesse pencil x^3 + y^3 + z^3 + l xyz = 0.
struct HesseResult {
  using Point3 = std::array<CyclotomicNumber, 3>;
  std::vector<Point3> base_points;  // the 9 points of the base locus, normalized
  Point3 identity;                  // [1 : -1 : 0]
  std::vector<ProjectivePoint<CyclotomicNumber>> images;  // distinct images of the 8 others
  std::vector<std::size_t> image_multiplicity;            // preimage count per image
  CyclotomicNumber lambda;                                // cross-ratio of the images
  CyclotomicNumber j;
};

/// Solves xyz = 0, x^3 + y^3 + z^3 = 0 over Q(zeta_3), projects from [1:-1:0]
/// by [x : y : z] -> [x + y : z] and returns the j-invariant of the double
/// cover branched at the images. Throws std::logic_error on any internal
/// inconsistency (wrong point count, images not 2-to-1).
HesseResult hesse_isotriviality_check();

}  // namespace prill
