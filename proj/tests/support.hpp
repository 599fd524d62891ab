#pragma once

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "prill/covers.hpp"
#include "prill/perm.hpp"

namespace prill::test {

inline Permutation random_permutation(std::mt19937_64& rng, Index d) {
  std::vector<Index> v(d);
  std::iota(v.begin(), v.end(), Index{0});
  std::shuffle(v.begin(), v.end(), rng);
  return Permutation(std::move(v));
}

inline MarkedBase labeled_base(Index genus, const std::vector<std::string>& labels) {
  MarkedBase b;
  b.genus = genus;
  for (const auto& l : labels) b.points.push_back({l, std::nullopt});
  return b;
}

inline MarkedBase six_points() { return labeled_base(0, {"s1", "s2", "s3", "s4", "s5", "s6"}); }

inline Cover y_cover() {
  return Cover(six_points(), 2, std::vector<Permutation>(6, Permutation::from_cycles(2, {{0, 1}})));
}

inline Cover e_cover() {
  const auto t = Permutation::from_cycles(2, {{0, 1}});
  const auto id = Permutation::identity(2);
  return Cover(six_points(), 2, {t, t, t, t, id, id});
}

/// Random valid cover of a genus-0 base with n marked points: n - 1 random
/// permutations and the inverse of their path product. Not always connected.
inline Cover random_genus0_cover(std::mt19937_64& rng, Index d, Index n) {
  std::vector<std::string> labels;
  for (Index k = 0; k < n; ++k) labels.push_back("p" + std::to_string(k));
  std::vector<Permutation> gens;
  Permutation acc = Permutation::identity(d);
  for (Index k = 0; k + 1 < n; ++k) {
    gens.push_back(random_permutation(rng, d));
    acc = compose(gens.back(), acc);
  }
  gens.push_back(acc.inverse());
  return Cover(labeled_base(0, labels), d, gens);
}

inline Word inverse_word(const Word& w) {
  Word out(w.rbegin(), w.rend());
  for (auto& l : out) l.inverted = !l.inverted;
  return out;
}

}  // namespace prill::test
