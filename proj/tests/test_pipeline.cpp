#include <random>
#include <sstream>

#include "doctest.h"
#include "prill/pipeline.hpp"
#include "support.hpp"

using namespace prill;

namespace {

MarkedBase line_base() {
  return test::labeled_base(0, {"e2_1", "s1", "s2", "e2_2", "s3", "s4", "s5", "e2_3", "s6"});
}

Cover relabeled(const Cover& c, const Permutation& r) {
  std::vector<Permutation> g;
  for (const auto& p : c.monodromy()) g.push_back(conjugate(p, r.inverse()));
  return Cover(c.base(), c.degree(), g);
}

TowerInput standard_input() {
  TowerInput in;
  const char* pts[6] = {"0", "1", "2", "3", "4", "6"};
  for (int k = 0; k < 6; ++k) in.branch_points[k] = parse_exact_complex(pts[k]);
  return in;
}

}  // namespace

TEST_CASE("symbolic tower") {
  const auto s = symbolic_tower(line_base());
  CHECK(s.Y.degree() == 2);
  CHECK(s.E.degree() == 2);
  CHECK(s.C1.degree() == 4);
  CHECK(s.E3.degree() == 18);
  CHECK(s.C2.degree() == 36);
  CHECK(s.C1_components == 1);
  CHECK(s.C2_components == 1);
  for (const Cover* c : {&s.Y, &s.E, &s.C1, &s.E3, &s.C2}) {
    CHECK_FALSE(validate_cover(*c));
    CHECK(is_connected(*c));
  }
  CHECK(riemann_hurwitz_genus(s.Y) == 2);
  CHECK(riemann_hurwitz_genus(s.E) == 1);
  CHECK(riemann_hurwitz_genus(s.E3) == 1);
  CHECK(riemann_hurwitz_genus(s.C1) == 3);
  CHECK(riemann_hurwitz_genus(s.C2) == 19);
  CHECK(map_degree(s.C2_to_C1) == 9);
  CHECK(map_degree(s.C2_to_E3) == 2);
  CHECK(map_degree(s.E3_to_E) == 9);
  CHECK(is_etale(s.C1_to_Y));
  CHECK(is_etale(s.C2_to_C1));
  CHECK(is_etale(s.E3_to_E));

  const auto s5 = s.C1.base().find("s5");
  REQUIRE(s5);
  CHECK(cycle_type(s.C1.point_monodromy(*s5)) == CycleType({2, 2}));
}

TEST_CASE("symbolic tower does not depend on point order") {
  const auto a = symbolic_tower(line_base());
  const auto b = symbolic_tower(test::labeled_base(0, {"s6", "s5", "e2_3", "s4", "s3", "e2_2", "s2", "s1", "e2_1"}));
  CHECK(riemann_hurwitz_genus(b.C2) == riemann_hurwitz_genus(a.C2));
  CHECK(b.C2_components == 1);
  for (const char* label : {"s1", "s5", "e2_2"}) {
    const auto ia = a.C2.base().find(label), ib = b.C2.base().find(label);
    REQUIRE(ia);
    REQUIRE(ib);
    CHECK(cycle_type(a.C2.point_monodromy(*ia)) == cycle_type(b.C2.point_monodromy(*ib)));
  }
}

TEST_CASE("cross validation detects corrupted tuples") {
  std::mt19937_64 rng(11);
  TowerModel t;
  t.symbolic = symbolic_tower(line_base());
  t.stage(Stage::C1).full = relabeled(t.symbolic.C1, test::random_permutation(rng, 4));
  t.stage(Stage::C2_over_P).full = relabeled(t.symbolic.C2, test::random_permutation(rng, 36));

  auto cv = cross_validate(t);
  REQUIRE(cv.comparisons.size() == 2);
  CHECK(cv.agree());
  for (const auto& c : cv.comparisons) {
    REQUIRE(c.witness);
    CHECK(verifies_conjugacy(*c.witness, c.symbolic, c.numeric));
  }

  SUBCASE("one generator conjugated by a transposition") {
    const Cover& good = t.stage(Stage::C2_over_P).full;
    std::vector<Permutation> g(good.monodromy().begin(), good.monodromy().end());
    const auto s1 = good.base().find("s1");
    REQUIRE(s1);
    g[*s1] = conjugate(g[*s1], Permutation::from_cycles(36, {{0, 1}}));
    t.stage(Stage::C2_over_P).full = Cover(good.base(), 36, g);
    cv = cross_validate(t);
    CHECK_FALSE(cv.agree());
    CHECK_FALSE(cv.comparisons[1].conjugate);
    CHECK_FALSE(cv.comparisons[1].error.empty());
    CHECK(cv.comparisons[0].conjugate);
  }
  SUBCASE("different marked base") {
    auto base = line_base();
    base.points[0].label = "x";
    const Cover& good = t.stage(Stage::C1).full;
    t.stage(Stage::C1).full = Cover(base, 4, {good.monodromy().begin(), good.monodromy().end()});
    cv = cross_validate(t);
    CHECK_FALSE(cv.agree());
    CHECK(cv.comparisons[0].error == "marked bases differ");
  }
  SUBCASE("empty comparison list does not agree") { CHECK_FALSE(CrossValidation{}.agree()); }
}

TEST_CASE("numeric C1 over s5 matches the symbolic engine") {
  PrecisionScope s(212);
  const CurveData d(standard_input());
  const auto car = build_carousel(branch_candidates(Stage::X_over_P, d));
  MonodromyOptions o;
  o.chart_center = to_cd(d.u_center);
  const auto c1 = monodromy(Stage::C1, standard_input(), car, o);
  const auto sym = symbolic_tower(car.marked_base());
  const auto i = c1.full.base().find("s5");
  REQUIRE(i);
  CHECK(cycle_type(c1.full.point_monodromy(*i)) == CycleType({2, 2}));
  CHECK(cycle_type(sym.C1.point_monodromy(*i)) == CycleType({2, 2}));
}

TEST_CASE("random inputs") {
  const auto a = random_input(5), b = random_input(5), c = random_input(6, -1);
  CHECK(a.branch_points == b.branch_points);
  CHECK(a.branch_points != c.branch_points);
  CHECK(c.w5_sign == -1);
  for (int seed = 0; seed < 50; ++seed) {
    const auto in = random_input(seed);
    for (std::size_t i = 0; i < 6; ++i) {
      CHECK(boost::multiprecision::denominator(in.branch_points[i].re) <= 4);
      for (std::size_t j = i + 1; j < 6; ++j) CHECK_FALSE(in.branch_points[i] == in.branch_points[j]);
    }
  }
}

TEST_CASE("certificate of the standard curve") {
  const TowerModel t = build_tower(standard_input());
  const Certificate cert = certify(t);
  for (const auto& v : cert.verdicts) {
    INFO(v.name);
    CHECK(v.passed);
  }
  CHECK(cert.passed);
  REQUIRE(cert.find("genus_X_37"));
  CHECK(cert.find("no_such_verdict") == nullptr);

  const std::string text = certificate_text(t, cert);
  CHECK(text == certificate_text(t, certify(t)));
  const auto j = nlohmann::json::parse(text);
  CHECK(j.dump(2) + "\n" == text);
  CHECK(j["schema"] == 1);
  CHECK(j["status"] == "CERTIFIED");
  CHECK(j["degree"] == 36);
  CHECK(j["genus_X"] == 37);

  const std::string dot = emit_diagram(t);
  std::size_t nodes = 0;
  std::istringstream lines(dot);
  for (std::string line; std::getline(lines, line);) nodes += line.find("[label=") != std::string::npos && line.find("->") == std::string::npos;
  CHECK(nodes == 8);
  CHECK(dot.find("X\\ng=37") != std::string::npos);
  CHECK(dot.find("C2\\ng=19") != std::string::npos);
  CHECK(dot.find("C1\\ng=3") != std::string::npos);
  CHECK(dot.find("E0\\ng=1") != std::string::npos);
  CHECK(dot.find("C2 -> C1 [label=\"9\"]") != std::string::npos);
  CHECK(dot.find("X -> C2 [label=\"2\"]") != std::string::npos);
}
