#include <sstream>

#include "doctest.h"
#include "prill/monodromy.hpp"
#include "prill/pipeline.hpp"

using namespace prill;

namespace {

Complex mp(std::complex<double> z) { return {Real(z.real()), Real(z.imag())}; }

TowerInput standard_input() {
  TowerInput in;
  const char* pts[6] = {"0", "1", "2", "3", "4", "6"};
  for (int k = 0; k < 6; ++k) in.branch_points[k] = parse_exact_complex(pts[k]);
  return in;
}

bool has_token(const std::string& label, const std::string& token) {
  std::istringstream in(label);
  for (std::string part; std::getline(in, part, '=');) {
    if (part == token) return true;
  }
  return false;
}

std::optional<Index> find_tag(const Carousel& car, const std::string& token) {
  for (Index k = 0; k < car.candidates.size(); ++k) {
    if (has_token(car.candidates[k].tag, token)) return k;
  }
  return std::nullopt;
}

struct Fixture {
  TowerInput input = standard_input();
  std::complex<double> center;
  Carousel line, second;
  Fixture() {
    PrecisionScope s(212);
    CurveData d(input);
    center = to_cd(d.u_center);
    line = build_carousel(branch_candidates(Stage::Y, d));
    second = build_carousel(branch_candidates(Stage::C2_over_Pprime, d));
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

}  // namespace

TEST_CASE("stage degrees") {
  const std::array<Index, 6> want{2, 2, 4, 36, 4, 72};
  for (std::size_t k = 0; k < kAllStages.size(); ++k) CHECK(expected_degree(kAllStages[k]) == want[k]);
}

TEST_CASE("branch candidates") {
  PrecisionScope s(212);
  const CurveData d(standard_input());
  const auto y = branch_candidates(Stage::Y, d);
  REQUIRE(y.size() == 6);
  for (int k = 0; k < 6; ++k) {
    CHECK(y[k].tag == "s" + std::to_string(k + 1));
    CHECK(std::abs(y[k].value - to_cd(d.s[k])) == 0.0);
  }
  const auto x = branch_candidates(Stage::X_over_P, d);
  CHECK(x.size() == 9);

  const auto p = branch_candidates(Stage::C2_over_Pprime, d);
  for (const char* tag : {"D1", "D2", "D3", "D4", "E2_1", "E2_2", "E2_3", "inf"}) {
    CHECK(std::any_of(p.begin(), p.end(), [&](const Candidate& c) { return has_token(c.tag, tag); }));
  }
}

TEST_CASE("degenerate inputs are refused") {
  PrecisionScope s(212);
  auto in = standard_input();
  in.branch_points[4] = in.branch_points[0];
  CHECK_THROWS_AS(CurveData{in}, DegenerateInput);

  in = standard_input();
  in.branch_points[5] = ExactComplex{Rational(1, 1000000000000LL), 0};
  CHECK_THROWS_AS(
      {
        CurveData d(in);
        branch_candidates(Stage::Y, d);
      },
      DegenerateInput);
}

TEST_CASE("fibers") {
  PrecisionScope s(212);
  const CurveData d(standard_input(), fixture().center);
  const Complex t(Real(1) / 2, Real(1) / 3);
  const auto y = solve_fiber(Stage::Y, d, t);
  REQUIRE(y.size() == 2);
  CHECK(abs_d(y[0].coords[0] + y[1].coords[0]) < 1e-60);

  for (Stage st : {Stage::E, Stage::C1, Stage::C2_over_P, Stage::X_over_P}) {
    const auto f = solve_fiber(st, d, mp(fixture().line.base));
    CHECK(f.size() == expected_degree(st));
    CHECK(min_separation(f) > 0.0);
    for (const auto& pt : f) CHECK(residual(d, pt, mp(fixture().line.base)) < residual_tolerance(d.bits));
  }
  const Complex r = mp(fixture().second.base);
  const auto f = solve_fiber(Stage::C2_over_Pprime, d, r);
  CHECK(f.size() == 4);
  for (const auto& pt : f) CHECK(residual(d, pt, r) < residual_tolerance(d.bits));
}

TEST_CASE("single loops") {
  PrecisionScope s(212);
  const CurveData d(standard_input(), fixture().center);
  const auto& line = fixture().line;

  const auto fy = solve_fiber(Stage::Y, d, mp(line.base));
  const auto s1 = find_tag(line, "s1");
  REQUIRE(s1);
  CHECK(track_loop(d, line, *s1, fy, {}) == Permutation::from_cycles(2, {{0, 1}}));

  // A loop around a point that is not a candidate is contractible.
  auto cands = line.candidates;
  cands.push_back({{2.5, 4.0}, "fake"});
  const auto with_fake = build_carousel(cands);
  const auto fake = find_tag(with_fake, "fake");
  REQUIRE(fake);
  const auto fc = solve_fiber(Stage::C1, d, mp(with_fake.base));
  CHECK(track_loop(d, with_fake, *fake, fc, {}).is_identity());

  const auto& second = fixture().second;
  const auto fp = solve_fiber(Stage::C2_over_Pprime, d, mp(second.base));
  for (const char* tag : {"D1", "D2", "D3", "D4", "E2_1"}) {
    const auto k = find_tag(second, tag);
    REQUIRE(k);
    LoopDiagnostics diag;
    CHECK(cycle_type(track_loop(d, second, *k, fp, {}, &diag)) == CycleType({2, 2}));
    CHECK(diag.max_residual < residual_tolerance(d.bits));
    CHECK(diag.max_step_ratio < 1.0 / 3.0);
  }
  const auto inf = find_tag(second, "inf");
  REQUIRE(inf);
  CHECK(cycle_type(track_loop(d, second, *inf, fp, {})) == CycleType({4}));
}

TEST_CASE("path product composes in path order") {
  const auto a = Permutation::from_cycles(3, {{0, 1}}), b = Permutation::from_cycles(3, {{1, 2}});
  CHECK(path_product({a, b}) == compose(b, a));
  CHECK(path_product({a, a}).is_identity());
}

TEST_CASE("monodromy of Y and C1") {
  MonodromyOptions o;
  o.chart_center = fixture().center;
  const auto y = monodromy(Stage::Y, fixture().input, fixture().line, o);
  CHECK(y.reduced.monodromy().size() == 6);
  for (const auto& p : y.reduced.monodromy()) CHECK(p == Permutation::from_cycles(2, {{0, 1}}));
  CHECK(riemann_hurwitz_genus(y.reduced) == 2);
  CHECK(path_product(y.loop_permutations).is_identity());

  const auto c1 = monodromy(Stage::C1, fixture().input, fixture().line, o);
  CHECK_FALSE(validate_cover(c1.full));
  CHECK(riemann_hurwitz_genus(c1.reduced) == 3);
  for (const auto& d : c1.diagnostics) {
    CHECK(d.steps > 0);
    CHECK(d.max_residual < residual_tolerance(c1.bits));
  }
  const auto sym = symbolic_tower(fixture().line.marked_base());
  std::vector<Permutation> a(sym.C1.monodromy().begin(), sym.C1.monodromy().end());
  const auto w = are_simultaneously_conjugate(a, c1.loop_permutations);
  REQUIRE(w);
  CHECK(verifies_conjugacy(*w, a, c1.loop_permutations));

  SUBCASE("step halving and higher precision reproduce the permutations") {
    MonodromyOptions fine = o;
    fine.kappa = o.kappa / 2;
    CHECK(monodromy(Stage::C1, fixture().input, fixture().line, fine).loop_permutations == c1.loop_permutations);
    MonodromyOptions precise = o;
    precise.precision_bits = 318;
    precise.max_precision_bits = 636;
    const auto hp = monodromy(Stage::C1, fixture().input, fixture().line, precise);
    CHECK(hp.bits >= 318);
    CHECK(hp.loop_permutations == c1.loop_permutations);
  }
}

TEST_CASE("thread count") {
  CHECK(thread_count(3) == 3);
  CHECK(thread_count(0) >= 1);
}
