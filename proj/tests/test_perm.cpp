#include <numeric>

#include "doctest.h"
#include "prill/perm.hpp"
#include "support.hpp"

using namespace prill;
using prill::test::random_permutation;

TEST_CASE("compose follows p(q(i))") {
  std::mt19937_64 rng(11);
  const auto p = random_permutation(rng, 8), q = random_permutation(rng, 8);
  const auto id = Permutation::identity(8);
  CHECK(compose(id, p) == p);
  CHECK(compose(p, p.inverse()).is_identity());
  CHECK(compose(p.inverse(), p).is_identity());

  const auto pq = compose(p, q);
  std::vector<Index> table_p(p.images().begin(), p.images().end()), table_q(q.images().begin(), q.images().end());
  for (Index i = 0; i < 8; ++i) CHECK(pq(i) == table_p[table_q[i]]);
  CHECK_THROWS_AS(compose(p, Permutation::identity(7)), std::invalid_argument);
}

TEST_CASE("permutation construction rejects non-bijections") {
  CHECK_THROWS_AS(Permutation({0, 0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(Permutation({0, 3}), std::invalid_argument);
}

TEST_CASE("cycle types") {
  CHECK(cycle_type(Permutation::identity(4)).to_string() == "{1,1,1,1}");
  CHECK(cycle_type(Permutation::from_cycles(4, {{0, 1, 2, 3}})) == CycleType({4}));
  CHECK(cycle_type(Permutation::from_cycles(4, {{1, 3}})) == CycleType({2, 1, 1}));
  CHECK(cycle_type(Permutation::from_cycles(4, {{1, 3}})).degree() == 4);
}

TEST_CASE("cycle type is a conjugacy invariant") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = random_permutation(rng, 12), r = random_permutation(rng, 12);
    CHECK(cycle_type(conjugate(p, r)) == cycle_type(p));
  }
}

TEST_CASE("orbits") {
  std::vector<Permutation> gens{Permutation::identity(3)};
  CHECK(orbits(gens) == Partition{{0}, {1}, {2}});
  gens = {Permutation::from_cycles(3, {{0, 1}}), Permutation::from_cycles(3, {{1, 2}})};
  CHECK(orbits(gens) == Partition{{0, 1, 2}});
  CHECK(orbits(std::vector<Permutation>{}, 3) == Partition{{0}, {1}, {2}});

  // The product action defining C1: pairs of a Y-sheet and an E-sheet.
  const auto t = Permutation::from_cycles(2, {{0, 1}}), id = Permutation::identity(2);
  const std::vector<std::pair<Index, Index>> pairs{{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  std::vector<Permutation> c1;
  for (int k = 0; k < 6; ++k) c1.push_back(product_action(pairs, t, k < 4 ? t : id));
  const auto blocks = orbits(c1);
  REQUIRE(blocks.size() == 1);
  CHECK(blocks[0].size() == 4);
}

TEST_CASE("orbit sizes are invariant under simultaneous conjugation") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Permutation> gens, conj;
    const auto r = random_permutation(rng, 10);
    for (int k = 0; k < 2; ++k) {
      std::vector<Index> img(10);
      std::iota(img.begin(), img.end(), Index{0});
      // Sparse generators so that orbits are nontrivial.
      std::swap(img[rng() % 10], img[rng() % 10]);
      gens.emplace_back(img);
      conj.push_back(conjugate(gens.back(), r));
    }
    auto sizes = [](const Partition& p) {
      std::vector<Index> s;
      for (const auto& b : p) s.push_back(b.size());
      std::sort(s.begin(), s.end());
      return s;
    };
    CHECK(sizes(orbits(gens)) == sizes(orbits(conj)));
  }
}

TEST_CASE("product action") {
  const auto id = Permutation::identity(2), t = Permutation::from_cycles(2, {{0, 1}});
  const std::vector<std::pair<Index, Index>> full{{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  CHECK(product_action(full, id, id).is_identity());
  CHECK(cycle_type(product_action(full, t, t)) == CycleType({2, 2}));
  const std::vector<std::pair<Index, Index>> partial{{0, 0}, {0, 1}};
  CHECK_THROWS_AS(product_action(partial, t, id), ClosureError);
}

TEST_CASE("product of an e-cycle and an f-cycle has gcd(e,f) cycles of length lcm(e,f)") {
  for (Index e = 1; e <= 6; ++e) {
    for (Index f = 1; f <= 6; ++f) {
      std::vector<Index> ce(e), cf(f);
      std::iota(ce.begin(), ce.end(), Index{0});
      std::iota(cf.begin(), cf.end(), Index{0});
      const auto p = Permutation::from_cycles(e, {ce}), q = Permutation::from_cycles(f, {cf});
      std::vector<std::pair<Index, Index>> pairs;
      for (Index i = 0; i < e; ++i) {
        for (Index j = 0; j < f; ++j) pairs.emplace_back(i, j);
      }
      const auto ct = cycle_type(product_action(pairs, p, q));
      CHECK(ct == CycleType(std::vector<Index>(std::gcd(e, f), std::lcm(e, f))));
    }
  }
}

TEST_CASE("simultaneous conjugacy") {
  std::mt19937_64 rng(14);
  const std::vector<Permutation> a{Permutation::from_cycles(4, {{0, 1}}), Permutation::from_cycles(4, {{1, 2, 3}})};
  const auto self = are_simultaneously_conjugate(a, a);
  REQUIRE(self);
  CHECK(self->is_identity());

  const std::vector<Permutation> b{Permutation::from_cycles(4, {{0, 1, 2}}), Permutation::from_cycles(4, {{1, 2, 3}})};
  CHECK_FALSE(are_simultaneously_conjugate(a, b));

  for (int trial = 0; trial < 100; ++trial) {
    const Index d = 2 + rng() % 35;
    const Index len = 1 + rng() % 4;
    const auto r = random_permutation(rng, d);
    std::vector<Permutation> x, y;
    for (Index k = 0; k < len; ++k) {
      x.push_back(random_permutation(rng, d));
      y.push_back(conjugate(x.back(), r.inverse()));
    }
    const auto w = are_simultaneously_conjugate(x, y);
    REQUIRE(w);
    CHECK(verifies_conjugacy(*w, x, y));
  }
}

TEST_CASE("conjugacy search reports budget exhaustion instead of answering no") {
  // Identity tuples on many points admit a witness immediately; an empty
  // budget must still not produce a silent negative.
  const std::vector<Permutation> a{Permutation::from_cycles(6, {{0, 1}, {2, 3}})};
  const std::vector<Permutation> b{Permutation::from_cycles(6, {{4, 5}, {2, 3}})};
  try {
    auto w = are_simultaneously_conjugate(a, b, 1);
    REQUIRE(w);
    CHECK(verifies_conjugacy(*w, a, b));
  } catch (const ConjugacySearchTimeout&) {
    CHECK(true);
  }
}
