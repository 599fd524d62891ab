#pragma once

// First homology of the closed cover surface with Z/p coefficients, and the
// multiplication-by-3 torsor cover built from it.
//
// The closed cover is modeled by the lifted cell structure of the base: one
// vertex per fiber point, one edge (x, k) from x to sigma_k(x) per generator,
// and 2-cells given by the lifted surface relation at every vertex together
// with one cap per cycle of each C_j (the lifted loops around marked points).

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "prill/covers.hpp"

namespace prill {

class ClosedSurfaceHomology {
 public:
  using Class = std::vector<std::uint32_t>;

  /// `modulus` must be prime. Throws CoverError for a disconnected cover and
  /// std::logic_error if the computed rank differs from 2 * genus.
  ClosedSurfaceHomology(const Cover& c, std::uint32_t modulus, Index basepoint = 0);

  Index rank() const { return rank_; }
  std::uint32_t modulus() const { return modulus_; }
  Index basepoint() const { return basepoint_; }

  /// Class of a word that returns the basepoint to itself. Throws
  /// std::invalid_argument otherwise.
  Class class_of_word(const Word& w) const;

  /// Cocycle value of edge (x, k): the class of t_x * k * t_{k x}^-1.
  const Class& edge_class(Index x, Index k) const { return edge_class_[x * num_generators_ + k]; }

  /// Schreier transversal word from the basepoint to x (breadth-first).
  const Word& transversal(Index x) const { return transversal_[x]; }

  Class add(const Class& a, const Class& b) const;

 private:
  Class reduce(std::vector<std::int64_t> chain_on_cotree) const;

  std::uint32_t modulus_;
  Index basepoint_;
  Index degree_;
  Index num_generators_;
  Index rank_ = 0;
  std::vector<Permutation> generators_;
  std::vector<Permutation> inverses_;
  std::vector<Word> transversal_;
  std::vector<std::int64_t> cotree_column_;  // edge -> column, or -1 for tree edges
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> boundaries_;  // reduced row echelon form
  std::vector<Index> pivot_columns_;
  std::vector<Index> free_columns_;
  std::vector<Class> edge_class_;
};

inline ClosedSurfaceHomology closed_surface_homology(const Cover& c, std::uint32_t modulus, Index basepoint = 0) {
  return ClosedSurfaceHomology(c, modulus, basepoint);
}

/// Cover with fiber (fiber of e) x (Z/3)^2, acting by
///   k . (x, v) = (sigma_k x, v + h(x, k))
/// with h the mod-3 homology cocycle of e. For a genus-1 e this is the
/// multiplication-by-3 isogeny over e. Fiber label of (x, v) is 9x + 3v_0 + v_1.
/// Throws CoverError unless e is connected of genus 1.
std::pair<Cover, CoverMap> mul3_torsor_cover(const Cover& e, Index basepoint = 0);

}  // namespace prill
