#include "prill/elliptic.hpp"

#include <string>

namespace prill {

namespace {

using Z = CyclotomicNumber;
using Point3 = HesseResult::Point3;

// Scale so the first nonzero coordinate is 1.
Point3 normalize(Point3 p) {
  for (const auto& c : p) {
    if (!c.is_zero()) {
      const Z inv = Z(1) / c;
      for (auto& x : p) x = x * inv;
      return p;
    }
  }
  throw std::logic_error("hesse: zero vector");
}

bool on_base_locus(const Point3& p) {
  const Z prod = p[0] * p[1] * p[2];
  const Z cubes = p[0] * p[0] * p[0] + p[1] * p[1] * p[1] + p[2] * p[2] * p[2];
  return prod.is_zero() && cubes.is_zero();
}

}  // namespace

HesseResult hesse_isotriviality_check() {
  HesseResult res;
  const Z zeta = Z::zeta();
  const Z zeta2 = zeta * zeta;
  if (!(zeta * zeta2 == Z(1)) || !(Z(1) + zeta + zeta2).is_zero()) {
    throw std::logic_error("hesse: cyclotomic arithmetic is inconsistent");
  }

  // Units of Z[zeta] whose cube is -1: the roots of a^3 + b^3 = 0 with a = 1.
  std::vector<Z> cube_roots_of_minus_one;
  for (const Z& u : {Z(1), Z(-1), zeta, -zeta, zeta2, -zeta2}) {
    if (u * u * u == Z(-1)) cube_roots_of_minus_one.push_back(u);
  }
  if (cube_roots_of_minus_one.size() != 3) throw std::logic_error("hesse: expected three cube roots of -1");

  // xyz = 0 forces one coordinate to vanish; the other two satisfy a^3 + b^3 = 0.
  for (int zero_slot = 2; zero_slot >= 0; --zero_slot) {
    for (const Z& r : cube_roots_of_minus_one) {
      Point3 p;
      const int a = zero_slot == 0 ? 1 : 0;
      const int b = zero_slot == 2 ? 1 : 2;
      p[zero_slot] = Z(0);
      p[a] = Z(1);
      p[b] = r;
      p = normalize(p);
      if (!on_base_locus(p)) throw std::logic_error("hesse: candidate off the base locus");
      bool dup = false;
      for (const auto& q : res.base_points) dup = dup || q == p;
      if (!dup) res.base_points.push_back(p);
    }
  }
  if (res.base_points.size() != 9) {
    throw std::logic_error("hesse: base locus has " + std::to_string(res.base_points.size()) + " points");
  }

  res.identity = {Z(1), Z(-1), Z(0)};
  std::size_t identity_hits = 0;
  for (const auto& p : res.base_points) {
    if (p == res.identity) {
      ++identity_hits;
      continue;
    }
    // Projection from the identity: [x : y : z] -> [x + y : z].
    ProjectivePoint<Z> img{p[0] + p[1], p[2]};
    if (img.x.is_zero() && img.z.is_zero()) throw std::logic_error("hesse: projection undefined");
    img = img.is_infinity() ? ProjectivePoint<Z>::infinity() : ProjectivePoint<Z>::finite(img.x / img.z);
    bool found = false;
    for (std::size_t i = 0; i < res.images.size(); ++i) {
      if (res.images[i].same_as(img)) {
        ++res.image_multiplicity[i];
        found = true;
      }
    }
    if (!found) {
      res.images.push_back(img);
      res.image_multiplicity.push_back(1);
    }
  }
  if (identity_hits != 1) throw std::logic_error("hesse: identity not in the base locus");
  if (res.images.size() != 4) throw std::logic_error("hesse: expected 4 images, got " + std::to_string(res.images.size()));
  for (auto m : res.image_multiplicity) {
    if (m != 2) throw std::logic_error("hesse: projection is not 2-to-1 on the base locus");
  }

  // Order the images as (-1, -zeta, inf, -zeta^2).
  const std::array<ProjectivePoint<Z>, 4> order{ProjectivePoint<Z>::finite(Z(-1)), ProjectivePoint<Z>::finite(-zeta),
                                                ProjectivePoint<Z>::infinity(), ProjectivePoint<Z>::finite(-zeta2)};
  std::vector<ProjectivePoint<Z>> ordered;
  std::vector<std::size_t> mult;
  for (const auto& o : order) {
    for (std::size_t i = 0; i < res.images.size(); ++i) {
      if (res.images[i].same_as(o)) {
        ordered.push_back(res.images[i]);
        mult.push_back(res.image_multiplicity[i]);
      }
    }
  }
  if (ordered.size() != 4) throw std::logic_error("hesse: image set differs from {-1, -zeta, -zeta^2, inf}");
  res.images = std::move(ordered);
  res.image_multiplicity = std::move(mult);

  res.lambda = cross_ratio(res.images[0], res.images[1], res.images[2], res.images[3]);
  res.j = j_from_lambda(res.lambda);
  return res;
}

}  // namespace prill
