#pragma once

// Permutations on dense fiber indices {0, ..., d-1}.
//
// Conventions: compose(p, q)(i) == p(q(i)). Fiber labels are 0-based and a
// relabeling is always an explicit image array, so every certificate can be
// replayed without re-running a search.

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace prill {

using Index = std::size_t;

class Permutation {
 public:
  Permutation() = default;

  /// Throws std::invalid_argument unless `images` is a bijection on 0..d-1.
  explicit Permutation(std::vector<Index> images);

  static Permutation identity(Index degree);

  /// Builds a permutation from disjoint cycles, e.g. {{0, 1}, {2, 4, 3}}.
  static Permutation from_cycles(Index degree, std::initializer_list<std::vector<Index>> cycles);
  static Permutation from_cycles(Index degree, const std::vector<std::vector<Index>>& cycles);

  Index degree() const { return images_.size(); }
  Index operator()(Index i) const { return images_[i]; }
  std::span<const Index> images() const { return images_; }

  bool is_identity() const;
  Permutation inverse() const;

  std::string to_string() const;

  friend bool operator==(const Permutation&, const Permutation&) = default;
  friend auto operator<=>(const Permutation&, const Permutation&) = default;

 private:
  std::vector<Index> images_;
};

/// (p o q)(i) = p(q(i)). Throws std::invalid_argument on degree mismatch.
Permutation compose(const Permutation& p, const Permutation& q);

/// p^-1 q p, the conjugate of q transported along the relabeling p.
Permutation conjugate(const Permutation& q, const Permutation& p);

/// Multiset of cycle lengths, stored in non-increasing order. Fixed points
/// appear as 1s, so the lengths always sum to the degree.
struct CycleType {
  std::vector<Index> lengths;

  CycleType() = default;
  explicit CycleType(std::vector<Index> lens);

  Index degree() const;
  Index num_cycles() const { return lengths.size(); }
  bool all_even() const;
  std::string to_string() const;

  friend bool operator==(const CycleType&, const CycleType&) = default;
  friend auto operator<=>(const CycleType&, const CycleType&) = default;
};

CycleType cycle_type(const Permutation& p);

/// Cycles of p, each starting at its smallest element, ordered by that element.
std::vector<std::vector<Index>> cycles(const Permutation& p);

using Partition = std::vector<std::vector<Index>>;

/// Finest partition of {0..degree-1} closed under every generator. Blocks are
/// sorted and ordered by their smallest element. An empty generator list
/// yields singletons.
Partition orbits(std::span<const Permutation> generators, Index degree);
Partition orbits(std::span<const Permutation> generators);

class ClosureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Coordinatewise action of (p, q) on a list of index pairs. The result acts
/// on positions in `pairs`. Throws ClosureError when the pair set is not
/// closed under the action.
Permutation product_action(std::span<const std::pair<Index, Index>> pairs, const Permutation& p,
                           const Permutation& q);

class ConjugacySearchTimeout : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Searches for r with r o A_k == B_k o r for every k. Returns the relabeling,
/// or std::nullopt when none exists. Exceeding `node_budget` backtracking
/// nodes throws ConjugacySearchTimeout rather than answering "no".
std::optional<Permutation> are_simultaneously_conjugate(std::span<const Permutation> tuple_a,
                                                        std::span<const Permutation> tuple_b,
                                                        std::size_t node_budget = 10'000'000);

/// True iff r o A_k == B_k o r for all k.
bool verifies_conjugacy(const Permutation& r, std::span<const Permutation> tuple_a,
                        std::span<const Permutation> tuple_b);

}  // namespace prill
