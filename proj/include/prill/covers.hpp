#pragma once

// Branched covers of marked surfaces as permutation tuples.
//
// A cover of a genus-g base with marked points p_1..p_n is stored as the
// monodromy of the standard generators A_1, B_1, ..., A_g, B_g, C_1, ..., C_n
// of the punctured surface. Words in the generators act on the fiber in path
// order: the first letter is applied first. The surface relation reads
//   A_1 B_1 A_1^-1 B_1^-1 ... A_g B_g A_g^-1 B_g^-1 C_1 ... C_n = 1.

#include <complex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "prill/perm.hpp"

namespace prill {

class CoverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MarkedPoint {
  std::string label;
  std::optional<std::complex<double>> position;

  friend bool operator==(const MarkedPoint& a, const MarkedPoint& b) { return a.label == b.label; }
};

struct MarkedBase {
  Index genus = 0;
  std::vector<MarkedPoint> points;

  Index num_generators() const { return 2 * genus + points.size(); }
  std::optional<Index> find(const std::string& label) const;

  friend bool operator==(const MarkedBase&, const MarkedBase&) = default;
};

/// Throws CoverError when two marked points share a label.
void validate_base(const MarkedBase& base);

struct Letter {
  Index generator = 0;
  bool inverted = false;

  friend bool operator==(const Letter&, const Letter&) = default;
};
using Word = std::vector<Letter>;

Word surface_relation(const MarkedBase& base);

class Cover {
 public:
  Cover() = default;
  /// Checks generator count and degrees; the surface relation is checked by
  /// validate_cover so malformed data can still be reported on.
  Cover(MarkedBase base, Index degree, std::vector<Permutation> monodromy);

  const MarkedBase& base() const { return base_; }
  Index degree() const { return degree_; }
  std::span<const Permutation> monodromy() const { return monodromy_; }
  const Permutation& generator(Index k) const { return monodromy_.at(k); }
  /// Monodromy C_j around marked point j.
  const Permutation& point_monodromy(Index j) const { return monodromy_.at(2 * base_.genus + j); }
  Index point_generator(Index j) const { return 2 * base_.genus + j; }

  /// Endpoint of the lift of `word` starting at fiber point x.
  Index act(Index x, const Word& word) const;

 private:
  MarkedBase base_;
  Index degree_ = 0;
  std::vector<Permutation> monodromy_;
};

/// A cover of degree 1 (the base itself).
Cover trivial_cover(const MarkedBase& base);

struct Violation {
  std::string message;
  std::optional<Index> generator;
};

/// Reports the first failure: base labels, permutation degrees, or the
/// surface relation evaluated at each fiber point.
std::optional<Violation> validate_cover(const Cover& c);

bool is_connected(const Cover& c);

/// Genus from 2 - 2g_C = d (2 - 2g_B) - sum over marked points of (d - #cycles).
/// Throws CoverError for disconnected input or a non-integral/negative result.
Index riemann_hurwitz_genus(const Cover& c);

/// Euler characteristic d (2 - 2g_B) - ramification of the closed cover.
long euler_characteristic(const Cover& c);

/// Cycle types of C_1..C_n (the ramification profile).
std::vector<CycleType> ramification_profile(const Cover& c);

struct CoverMap {
  Cover source;
  Cover target;
  std::vector<Index> fiber_map;
};

/// Checks bases agree, the fiber map is onto with equal fiber sizes, and
/// fiber_map o sigma_source,k == sigma_target,k o fiber_map for every k.
std::optional<Violation> validate_cover_map(const CoverMap& m);

/// deg(source) / deg(target).
Index map_degree(const CoverMap& m);

/// Sizes of the fibers of fiber_map over each target point.
std::vector<Index> fiber_sizes(const CoverMap& m);

/// True iff every source point over marked point k has the same local order
/// (orbit length under C_k) as its image. Throws std::out_of_range.
bool relative_ramification_ok(const CoverMap& m, Index point_index);

/// relative_ramification_ok at every marked point.
bool is_etale(const CoverMap& m);

CoverMap identity_map(const Cover& c);

/// outer o inner, for inner: A -> B and outer: B -> C.
CoverMap compose_maps(const CoverMap& outer, const CoverMap& inner);

struct FiberProductComponent {
  Cover cover;
  CoverMap to_first;
  CoverMap to_second;
  /// Matched pairs (i, j) making up this component, in fiber order.
  std::vector<std::pair<Index, Index>> pairs;
};

/// Normalized fiber product of a: A -> Z and b: B -> Z. Components are the
/// orbits of the product action on matched pairs, sorted by (degree, smallest
/// pair). Throws CoverError when the two maps do not share a target.
std::vector<FiberProductComponent> fiber_product(const CoverMap& a, const CoverMap& b);

/// Appends marked points with identity monodromy. Throws CoverError on a
/// duplicate label.
Cover refine_marked_points(const Cover& c, std::span<const MarkedPoint> extra);

/// Removes marked points whose monodromy is the identity. Throws CoverError if
/// a label is unknown or carries nontrivial monodromy.
Cover forget_marked_points(const Cover& c, std::span<const std::string> labels);

/// Reorders/extends `c` onto `base`, whose marked points must contain all of
/// c's; points not present in c get identity monodromy.
Cover align_to_base(const Cover& c, const MarkedBase& base);

}  // namespace prill
