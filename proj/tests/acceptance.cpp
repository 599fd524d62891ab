// Acceptance run: builds the tower for the standard curve and six random
// curves, then prints one PASS/FAIL line per acceptance criterion. Genera,
// degrees and ramification are recomputed here from the raw permutations.

#include <chrono>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "prill/cyclotomic.hpp"
#include "prill/homology.hpp"
#include "prill/pipeline.hpp"

using namespace prill;

namespace {

struct Run {
  std::string name;
  TowerInput input;
  double seconds = 0.0;
  std::optional<TowerModel> tower;
  std::optional<Certificate> cert;
  std::string error;
};

struct Criterion {
  std::string name;
  bool passed = true;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      passed = false;
      std::cout << "  [" << name << "] failed: " << what << '\n';
    }
  }
};

bool has_token(const std::string& label, const std::string& token) {
  std::istringstream in(label);
  for (std::string part; std::getline(in, part, '=');) {
    if (part == token) return true;
  }
  return false;
}

// 2 - 2g = d (2 - 2h) - sum over marked points of (d - #cycles).
long genus_by_counting(const Cover& c) {
  long ramification = 0;
  for (Index j = 0; j < c.base().points.size(); ++j) {
    ramification += static_cast<long>(c.degree()) - static_cast<long>(cycles(c.point_monodromy(j)).size());
  }
  const long chi = static_cast<long>(c.degree()) * (2 - 2 * static_cast<long>(c.base().genus)) - ramification;
  return (2 - chi) / 2;
}

bool transitive(const Cover& c) { return orbits(c.monodromy(), c.degree()).size() == 1; }

// Every cycle of the source over a marked point has the length of the target
// cycle under it.
bool etale(const CoverMap& m) {
  for (Index j = 0; j < m.source.base().points.size(); ++j) {
    const auto& target = m.target.point_monodromy(j);
    for (const auto& cyc : cycles(m.source.point_monodromy(j))) {
      Index len = 1;
      for (Index y = target(m.fiber_map[cyc.front()]); y != m.fiber_map[cyc.front()]; y = target(y)) ++len;
      if (len != cyc.size()) return false;
    }
  }
  return true;
}

bool witness_holds(const Permutation& r, const Cover& a, const Cover& b) {
  for (Index k = 0; k < a.monodromy().size(); ++k) {
    for (Index x = 0; x < a.degree(); ++x) {
      if (r(a.generator(k)(x)) != b.generator(k)(r(x))) return false;
    }
  }
  return true;
}

bool product_is_identity(const std::vector<Permutation>& loops) {
  Permutation acc = Permutation::identity(loops.front().degree());
  for (const auto& p : loops) acc = compose(p, acc);
  return acc.is_identity();
}

Run run_config(const std::string& name, const TowerInput& input) {
  Run r;
  r.name = name;
  r.input = input;
  std::cout << name << ":";
  for (const auto& b : input.branch_points) std::cout << ' ' << b.to_string();
  std::cout << (input.w5_sign > 0 ? "  w5 +" : "  w5 -") << std::endl;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    r.tower = build_tower(input);
    r.cert = certify(*r.tower);
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cout << "  " << (r.cert ? (r.cert->passed ? "CERTIFIED" : "FAILED") : "ERROR " + r.error) << " in "
            << r.seconds << " s" << std::endl;
  if (r.cert) {
    for (const auto& v : r.cert->verdicts) {
      if (!v.passed) std::cout << "  verdict " << v.name << " failed" << std::endl;
    }
  }
  return r;
}

Complex random_complex(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  return {Real(u(rng)), Real(u(rng))};
}

WeierstrassCurve<Complex> random_curve(std::mt19937_64& rng) {
  for (;;) {
    WeierstrassCurve<Complex> c{random_complex(rng), random_complex(rng)};
    if (abs_d(c.discriminant()) > 1e-3) return c;
  }
}

double point_gap(const CurvePoint<Complex>& p, const CurvePoint<Complex>& q) {
  if (p.infinity || q.infinity) return p.infinity == q.infinity ? 0.0 : 1e300;
  return std::max(abs_d(p.x - q.x), abs_d(p.y - q.y)) / std::max({abs_d(p.x), abs_d(p.y), 1.0});
}

void check_end_to_end(Criterion& c, const std::vector<Run>& runs) {
  c.require(runs.size() >= 6, "fewer than six configurations");
  for (const auto& r : runs) {
    c.require(r.seconds <= 600.0, r.name + " took longer than 10 minutes");
    if (!r.cert) {
      c.require(false, r.name + ": " + r.error);
      continue;
    }
    const auto& t = *r.tower;
    c.require(r.cert->passed, r.name + " not certified");
    c.require(map_degree(t.maps.X_to_Y) == 36, r.name + " deg(X -> Y) != 36");
    c.require(map_degree(t.maps.X_to_C2) == 2 && map_degree(t.maps.C2_to_C1) == 9 && map_degree(t.maps.C1_to_Y) == 2,
              r.name + " stage degrees != (2, 9, 2)");
    const Cover& x = t.stage(Stage::X_over_P).full;
    c.require(transitive(x), r.name + " X disconnected");
    c.require(etale(t.maps.X_to_Y), r.name + " X -> Y ramified");
    const long gx = genus_by_counting(x);
    const long gy = genus_by_counting(t.stage(Stage::Y).full);
    // An etale degree-36 cover multiplies the Euler characteristic by 36.
    const long gx_chi = (2 - 36 * (2 - 2 * gy)) / 2;
    c.require(gx == 37 && gx_chi == 37, r.name + " g(X) = " + std::to_string(gx) + " / " + std::to_string(gx_chi));
    c.require(36 < gx, r.name + " degree not below genus");
    const auto* v = r.cert->find("genus_X_37");
    c.require(v && v->passed, r.name + " certificate genus routes disagree");
  }
}

void check_isotriviality(Criterion& c, const std::vector<Run>& runs) {
  const HesseResult h = hesse_isotriviality_check();
  c.require(h.j.is_zero(), "Hesse j != 0");
  using PZ = ProjectivePoint<CyclotomicNumber>;
  const auto z = CyclotomicNumber::zeta();
  const std::vector<PZ> want{PZ::finite(CyclotomicNumber(-1)), PZ::finite(-z), PZ::finite(-(z * z)), PZ::infinity()};
  c.require(h.images.size() == 4, "Hesse image set does not have four points");
  for (const auto& w : want) {
    c.require(std::any_of(h.images.begin(), h.images.end(), [&](const PZ& p) { return p.same_as(w); }),
              "Hesse image set misses a point");
  }

  PrecisionScope s(212);
  std::mt19937_64 rng(101);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    worst = std::max(worst, abs_d(j_from_four_points(three_torsion_branch_points(random_curve(rng)))));
  }
  std::cout << "  max |j(E0)| over 100 random curves: " << worst << '\n';
  c.require(worst < 1e-8, "random curve with |j(E0)| >= 1e-8");
  for (const auto& r : runs) {
    if (r.tower) c.require(r.tower->j_E0_abs < 1e-8, r.name + " |j(E0)| >= 1e-8");
  }
}

void check_even_branching(Criterion& c, const std::vector<Run>& runs) {
  for (const auto& r : runs) {
    if (!r.tower) continue;
    const Cover& p = r.tower->stage(Stage::C2_over_Pprime).full;
    for (const char* d : {"D1", "D2", "D3", "D4"}) {
      Index found = 0;
      for (Index j = 0; j < p.base().points.size(); ++j) {
        if (!has_token(p.base().points[j].label, d)) continue;
        ++found;
        const auto ct = cycle_type(p.point_monodromy(j));
        c.require(ct == CycleType({2, 2}), r.name + " cycle type over " + d + " is " + ct.to_string());
      }
      c.require(found == 1, r.name + " marked point " + d + " missing");
    }
  }
}

void check_engines(Criterion& c, const std::vector<Run>& runs) {
  for (const auto& r : runs) {
    if (!r.tower) continue;
    const auto& t = *r.tower;
    const auto cv = cross_validate(t);
    c.require(cv.agree(), r.name + " engines disagree");
    const std::pair<const Cover*, const Cover*> pairs[2] = {{&t.symbolic.C1, &t.stage(Stage::C1).full},
                                                           {&t.symbolic.C2, &t.stage(Stage::C2_over_P).full}};
    for (std::size_t k = 0; k < 2 && k < cv.comparisons.size(); ++k) {
      const auto& w = cv.comparisons[k].witness;
      c.require(w && witness_holds(*w, *pairs[k].first, *pairs[k].second), r.name + " witness fails for " + cv.comparisons[k].stage);
    }
  }
}

void check_genera(Criterion& c, const std::vector<Run>& runs) {
  for (const auto& r : runs) {
    if (!r.tower) continue;
    const auto& t = *r.tower;
    const long gy = genus_by_counting(t.stage(Stage::Y).full);
    const long g1_chi = (2 - 2 * (2 - 2 * gy)) / 2;
    const long g2_chi = (2 - 9 * (2 - 2 * g1_chi)) / 2;
    c.require(g1_chi == 3 && g2_chi == 19, r.name + " Euler characteristic route");
    c.require(genus_by_counting(t.symbolic.C1) == 3, r.name + " symbolic g(C1)");
    c.require(genus_by_counting(t.stage(Stage::C1).full) == 3, r.name + " numeric g(C1)");
    c.require(genus_by_counting(t.symbolic.C2) == 19, r.name + " symbolic g(C2)");
    c.require(genus_by_counting(t.stage(Stage::C2_over_P).full) == 19, r.name + " numeric g(C2) over P");
    c.require(genus_by_counting(t.stage(Stage::C2_over_Pprime).full) == 19, r.name + " numeric g(C2) over P'");
  }
}

void check_soundness(Criterion& c, const std::vector<Run>& runs) {
  for (const auto& r : runs) {
    if (!r.tower) continue;
    for (Stage s : kAllStages) {
      c.require(product_is_identity(r.tower->stage(s).loop_permutations), r.name + " product relation for " + to_string(s));
    }
    const auto& sym = r.tower->symbolic;
    for (const Cover* cov : {&sym.Y, &sym.E, &sym.C1, &sym.E3, &sym.C2}) {
      c.require(!validate_cover(*cov), r.name + " symbolic cover violates the relation");
    }
  }

  if (!runs.empty() && runs.front().tower) {
    const auto& t = *runs.front().tower;
    const auto& ref = t.stage(Stage::C2_over_P);
    MonodromyOptions o;
    o.chart_center = t.chart_center;
    MonodromyOptions half = o;
    half.kappa = o.kappa / 2;
    MonodromyOptions high = o;
    high.precision_bits = 318;
    high.max_precision_bits = 636;
    try {
      c.require(monodromy(Stage::C2_over_P, t.input, ref.carousel, half).loop_permutations == ref.loop_permutations,
                "C2 permutations change under step halving");
      c.require(monodromy(Stage::C2_over_P, t.input, ref.carousel, high).loop_permutations == ref.loop_permutations,
                "C2 permutations change at 318 bits");
    } catch (const std::exception& e) {
      c.require(false, std::string("re-tracking failed: ") + e.what());
    }
  }

  PrecisionScope s(212);
  std::mt19937_64 rng(102);
  double worst3 = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto curve = random_curve(rng);
    const Complex u = random_complex(rng);
    const auto p = CurvePoint<Complex>::affine(u, sqrt(curve.rhs(u)));
    worst3 = std::max(worst3, point_gap(multiply_by_3(p, curve), add(add(p, p, curve), p, curve)));
  }
  std::cout << "  max |[3]p - (p+p+p)|: " << worst3 << '\n';
  c.require(worst3 < 1e-20, "[3]p disagrees with p+p+p");

  double worst_rt = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    std::array<Complex, 4> roots;
    for (auto& x : roots) x = random_complex(rng);
    const Complex t0 = random_complex(rng);
    Complex q0(1);
    for (const auto& x : roots) q0 *= t0 - x;
    const auto model = QuarticModel<Complex>::from_roots(roots, t0, sqrt(q0));
    const auto wt = quartic_to_weierstrass(model, roots[0]);
    for (int k = 0; k < 10; ++k) {
      const Complex t = random_complex(rng);
      const Complex w = sqrt(model.quartic()(t));
      const auto back = wt.inverse(wt.forward(t, w));
      if (!back) {
        worst_rt = 1e300;
        continue;
      }
      worst_rt = std::max({worst_rt, abs_d(back->first - t), abs_d(back->second - w)});
    }
  }
  std::cout << "  max quartic round trip error: " << worst_rt << '\n';
  c.require(worst_rt < 1e-25, "quartic round trip");

  double worst_j = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    std::array<Complex, 4> p;
    for (auto& x : p) x = random_complex(rng);
    std::array<int, 4> idx{0, 1, 2, 3};
    std::vector<Complex> js;
    do {
      const Complex l = cross_ratio(p[idx[0]], p[idx[1]], p[idx[2]], p[idx[3]]);
      const Complex n = l * l - l + Complex(1), m = l * (l - Complex(1));
      js.push_back(Complex(256) * n * n * n / (m * m));
    } while (std::next_permutation(idx.begin(), idx.end()));
    for (const auto& j : js) worst_j = std::max(worst_j, abs_d(j - js.front()) / std::max(1.0, abs_d(js.front())));
  }
  std::cout << "  max j spread over cross-ratio orderings: " << worst_j << '\n';
  c.require(worst_j < 1e-40, "cross-ratio orderings give different j");
}

void check_homology(Criterion& c, const std::vector<Run>& runs) {
  auto check = [&](const std::string& what, const Cover& cov, Index want_genus) {
    const long g = genus_by_counting(cov);
    c.require(g == static_cast<long>(want_genus), what + " genus " + std::to_string(g));
    try {
      const Index rank = closed_surface_homology(cov, 3).rank();
      c.require(static_cast<long>(rank) == 2 * g, what + " rank " + std::to_string(rank));
    } catch (const std::exception& e) {
      c.require(false, what + ": " + e.what());
    }
  };
  for (const auto& r : runs) {
    if (!r.tower) continue;
    const auto& t = *r.tower;
    check(r.name + " E", t.stage(Stage::E).full, 1);
    check(r.name + " Y", t.stage(Stage::Y).full, 2);
    check(r.name + " C1", t.stage(Stage::C1).full, 3);
    check(r.name + " symbolic E", t.symbolic.E, 1);
    check(r.name + " symbolic Y", t.symbolic.Y, 2);
    check(r.name + " symbolic C1", t.symbolic.C1, 3);
    check(r.name + " symbolic C2", t.symbolic.C2, 19);
  }
}

}  // namespace

int main() {
  std::cout.precision(3);
  std::vector<Run> runs;
  TowerInput standard;
  const char* pts[6] = {"0", "1", "2", "3", "4", "6"};
  for (int k = 0; k < 6; ++k) standard.branch_points[k] = parse_exact_complex(pts[k]);
  runs.push_back(run_config("standard", standard));
  for (std::uint64_t seed = 1; seed <= 5; ++seed) runs.push_back(run_config("seed " + std::to_string(seed), random_input(seed)));
  runs.push_back(run_config("seed 6 (w5 -)", random_input(6, -1)));

  std::vector<Criterion> criteria{{"end_to_end_certification"}, {"isotriviality"},      {"even_branching"},
                                  {"two_engine_equivalence"},   {"intermediate_genera"}, {"numeric_soundness"},
                                  {"homology_invariant"}};
  check_end_to_end(criteria[0], runs);
  check_isotriviality(criteria[1], runs);
  check_even_branching(criteria[2], runs);
  check_engines(criteria[3], runs);
  check_genera(criteria[4], runs);
  check_soundness(criteria[5], runs);
  check_homology(criteria[6], runs);

  bool all = true;
  for (const auto& c : criteria) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << '\n';
    all = all && c.passed;
  }
  return all ? 0 : 1;
}
