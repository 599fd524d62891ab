#include "prill/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "prill/homology.hpp"

namespace prill {

namespace {

bool has_token(const std::string& label, const std::string& token) {
  std::istringstream in(label);
  std::string part;
  while (std::getline(in, part, '=')) {
    if (part == token) return true;
  }
  return false;
}

bool has_prefix_token(const std::string& label, const std::string& prefix) {
  std::istringstream in(label);
  std::string part;
  while (std::getline(in, part, '=')) {
    if (part.rfind(prefix, 0) == 0) return true;
  }
  return false;
}

DecimalComplex decimal(const Complex& z) { return {to_decimal(z.real()), to_decimal(z.imag())}; }

// Fiber map from the base fiber of `from` to that of `to`, matching the
// coordinates the two stages share.
CoverMap projection(const StageMonodromy& from, const StageMonodromy& to) {
  const auto fn = coordinate_names(from.stage), tn = coordinate_names(to.stage);
  std::vector<std::size_t> idx;
  for (const auto& name : tn) {
    auto it = std::find(fn.begin(), fn.end(), name);
    if (it == fn.end()) throw std::logic_error("projection: " + to_string(from.stage) + " has no coordinate " + name);
    idx.push_back(static_cast<std::size_t>(it - fn.begin()));
  }
  const auto a = to_double_coords(from.base_fiber), b = to_double_coords(to.base_fiber);
  std::vector<Index> map(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < b.size(); ++j) {
      double d = 0.0;
      for (std::size_t k = 0; k < idx.size(); ++k) d = std::max(d, std::abs(a[i][idx[k]] - b[j][k]));
      if (d < best) {
        best = d;
        map[i] = j;
      }
    }
  }
  return {from.full, to.full, std::move(map)};
}

std::optional<Index> safe_genus(const Cover& c) {
  try {
    return riemann_hurwitz_genus(c);
  } catch (const CoverError&) {
    return std::nullopt;
  }
}

nlohmann::json genus_json(const std::optional<Index>& g) { return g ? nlohmann::json(*g) : nlohmann::json(nullptr); }

nlohmann::json images_json(const Permutation& p) { return nlohmann::json(std::vector<Index>(p.images().begin(), p.images().end())); }

std::string double_text(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

nlohmann::json point_json(std::complex<double> z) { return {double_text(z.real()), double_text(z.imag())}; }

nlohmann::json cover_json(const Cover& c) {
  nlohmann::json pts = nlohmann::json::array();
  for (Index j = 0; j < c.base().points.size(); ++j) {
    const auto& p = c.point_monodromy(j);
    pts.push_back({{"label", c.base().points[j].label},
                   {"monodromy", images_json(p)},
                   {"cycle_type", cycle_type(p).to_string()}});
  }
  return {{"degree", c.degree()},
          {"genus", genus_json(safe_genus(c))},
          {"components", orbits(c.monodromy(), c.degree()).size()},
          {"marked_points", pts}};
}

nlohmann::json stage_json(const StageMonodromy& m) {
  auto j = cover_json(m.reduced);
  j["base_line"] = over_second_line(m.stage) ? "P'" : "P";
  j["bits"] = m.bits;
  j["attempted_bits"] = m.attempted_bits;
  j["base_point"] = point_json(m.carousel.base);
  j["carousel_margin"] = double_text(m.carousel.margin);
  j["spurious"] = m.spurious;
  nlohmann::json loops = nlohmann::json::array();
  for (std::size_t k = 0; k < m.loop_permutations.size(); ++k) {
    const auto& d = m.diagnostics[k];
    loops.push_back({{"label", m.carousel.candidates[k].tag},
                     {"position", point_json(m.carousel.candidates[k].value)},
                     {"radius", double_text(m.carousel.loops[k].radius)},
                     {"monodromy", images_json(m.loop_permutations[k])},
                     {"steps", d.steps},
                     {"rejected_steps", d.rejected_steps},
                     {"min_separation", double_text(d.min_separation)},
                     {"max_residual", double_text(d.max_residual)},
                     {"max_step_ratio", double_text(d.max_step_ratio)}});
  }
  j["loops"] = loops;
  j.erase("marked_points");
  nlohmann::json reduced = nlohmann::json::array();
  for (Index k = 0; k < m.reduced.base().points.size(); ++k) {
    reduced.push_back({{"label", m.reduced.base().points[k].label},
                       {"cycle_type", cycle_type(m.reduced.point_monodromy(k)).to_string()}});
  }
  j["ramification"] = reduced;
  return j;
}

std::string cyclotomic_text(const ProjectivePoint<CyclotomicNumber>& p) {
  if (p.is_infinity()) return "inf";
  return (p.x / p.z).to_string();
}

EngineComparison compare(const std::string& name, const Cover& symbolic, const Cover& numeric) {
  EngineComparison out;
  out.stage = name;
  out.symbolic.assign(symbolic.monodromy().begin(), symbolic.monodromy().end());
  out.numeric.assign(numeric.monodromy().begin(), numeric.monodromy().end());
  if (!(symbolic.base() == numeric.base())) {
    out.error = "marked bases differ";
    return out;
  }
  if (symbolic.degree() != numeric.degree()) {
    out.error = "degrees differ";
    return out;
  }
  try {
    out.witness = are_simultaneously_conjugate(out.symbolic, out.numeric);
  } catch (const ConjugacySearchTimeout& e) {
    out.error = e.what();
    return out;
  }
  out.conjugate = out.witness.has_value();
  out.witness_verified = out.conjugate && verifies_conjugacy(*out.witness, out.symbolic, out.numeric);
  if (!out.conjugate) out.error = "no simultaneous conjugation";
  return out;
}

}  // namespace

SymbolicTower symbolic_tower(const MarkedBase& base) {
  const Index n = base.points.size();
  const auto id = Permutation::identity(2);
  const auto swap = Permutation::from_cycles(2, {{0, 1}});
  std::vector<Permutation> y(n, id), e(n, id);
  for (Index j = 0; j < n; ++j) {
    for (int k = 1; k <= 6; ++k) {
      if (!has_token(base.points[j].label, "s" + std::to_string(k))) continue;
      y[j] = swap;
      if (k <= 4) e[j] = swap;
    }
  }
  SymbolicTower s;
  s.Y = Cover(base, 2, y);
  s.E = Cover(base, 2, e);
  const Cover p = trivial_cover(base);
  auto c1 = fiber_product(CoverMap{s.Y, p, {0, 0}}, CoverMap{s.E, p, {0, 0}});
  s.C1_components = c1.size();
  s.C1 = c1.front().cover;
  s.C1_to_Y = c1.front().to_first;
  s.C1_to_E = c1.front().to_second;
  std::tie(s.E3, s.E3_to_E) = mul3_torsor_cover(s.E);
  auto c2 = fiber_product(s.C1_to_E, s.E3_to_E);
  s.C2_components = c2.size();
  s.C2 = c2.front().cover;
  s.C2_to_C1 = c2.front().to_first;
  s.C2_to_E3 = c2.front().to_second;
  return s;
}

TowerModel build_tower(const TowerInput& input, const BuildOptions& opt) {
  TowerModel t;
  t.input = input;
  t.options = opt;
  std::vector<Candidate> line, second;
  {
    PrecisionScope scope(opt.precision_bits);
    CurveData d(input);
    t.chart_center = to_cd(d.u_center);
    line = branch_candidates(Stage::X_over_P, d);
    second = branch_candidates(Stage::C2_over_Pprime, d);
    t.weierstrass_a = decimal(d.triple.curve.a);
    t.weierstrass_b = decimal(d.triple.curve.b);
    const auto D = three_torsion_branch_points(d.triple.curve);
    for (std::size_t k = 0; k < 4; ++k) t.D[k] = decimal(D[k]);
    const Complex j = j_from_four_points(D);
    t.j_E0 = decimal(j);
    t.j_E0_abs = abs_d(j);
  }
  const Carousel first_car = build_carousel(line), second_car = build_carousel(second);

  MonodromyOptions mo;
  mo.precision_bits = opt.precision_bits;
  mo.max_precision_bits = opt.max_precision_bits;
  mo.kappa = opt.kappa;
  mo.threads = opt.threads;
  mo.chart_center = t.chart_center;
  for (Stage s : kAllStages) t.stage(s) = monodromy(s, input, over_second_line(s) ? second_car : first_car, mo);

  t.symbolic = symbolic_tower(first_car.marked_base());
  auto& m = t.maps;
  m.X_to_C2 = projection(t.stage(Stage::X_over_P), t.stage(Stage::C2_over_P));
  m.C2_to_C1 = projection(t.stage(Stage::C2_over_P), t.stage(Stage::C1));
  m.C1_to_Y = projection(t.stage(Stage::C1), t.stage(Stage::Y));
  m.C1_to_E = projection(t.stage(Stage::C1), t.stage(Stage::E));
  m.X_to_Y = compose_maps(m.C1_to_Y, compose_maps(m.C2_to_C1, m.X_to_C2));
  return t;
}

bool CrossValidation::agree() const {
  if (comparisons.empty()) return false;
  return std::all_of(comparisons.begin(), comparisons.end(),
                     [](const EngineComparison& c) { return c.conjugate && c.witness_verified; });
}

CrossValidation cross_validate(const TowerModel& t) {
  CrossValidation out;
  out.comparisons.push_back(compare("C1", t.symbolic.C1, t.stage(Stage::C1).full));
  out.comparisons.push_back(compare("C2", t.symbolic.C2, t.stage(Stage::C2_over_P).full));
  return out;
}

const Verdict* Certificate::find(const std::string& name) const {
  for (const auto& v : verdicts) {
    if (v.name == name) return &v;
  }
  return nullptr;
}

Certificate certify(const TowerModel& t) {
  using nlohmann::json;
  Certificate c;
  auto add = [&](std::string name, bool ok, json witness) { c.verdicts.push_back({std::move(name), ok, std::move(witness)}); };
  const auto& sym = t.symbolic;
  const auto& Y = t.stage(Stage::Y);
  const auto& C1 = t.stage(Stage::C1);
  const auto& C2 = t.stage(Stage::C2_over_P);
  const auto& C2p = t.stage(Stage::C2_over_Pprime);
  const auto& X = t.stage(Stage::X_over_P);

  {
    json w;
    bool ok = true;
    auto check = [&](const std::string& name, const Cover& cov) {
      auto v = validate_cover(cov);
      w[name] = v ? v->message : "ok";
      ok = ok && !v;
    };
    for (Stage s : kAllStages) check("numeric " + to_string(s), t.stage(s).full);
    check("symbolic Y", sym.Y);
    check("symbolic E", sym.E);
    check("symbolic C1", sym.C1);
    check("symbolic E3", sym.E3);
    check("symbolic C2", sym.C2);
    add("product_relation", ok, w);
  }
  {
    json w;
    bool ok = true;
    auto check = [&](const std::string& name, const CoverMap& m) {
      auto v = validate_cover_map(m);
      w[name] = v ? v->message : "ok";
      ok = ok && !v;
    };
    check("numeric X->C2", t.maps.X_to_C2);
    check("numeric C2->C1", t.maps.C2_to_C1);
    check("numeric C1->Y", t.maps.C1_to_Y);
    check("numeric C1->E", t.maps.C1_to_E);
    check("numeric X->Y", t.maps.X_to_Y);
    check("symbolic C1->Y", sym.C1_to_Y);
    check("symbolic C1->E", sym.C1_to_E);
    check("symbolic E3->E", sym.E3_to_E);
    check("symbolic C2->C1", sym.C2_to_C1);
    check("symbolic C2->E3", sym.C2_to_E3);
    add("maps_equivariant", ok, w);
  }
  const Index deg = map_degree(t.maps.X_to_Y);
  {
    const auto fs = fiber_sizes(t.maps.X_to_Y);
    const bool uniform = std::all_of(fs.begin(), fs.end(), [&](Index k) { return k == 36; });
    add("degree_36", deg == 36 && uniform, {{"degree", deg}, {"fiber_sizes", fs}});
  }
  {
    const std::array<const CoverMap*, 3> maps{&t.maps.X_to_C2, &t.maps.C2_to_C1, &t.maps.C1_to_Y};
    const std::array<Index, 3> want{2, 9, 2};
    json degrees = json::array();
    bool ok = true;
    for (std::size_t k = 0; k < 3; ++k) {
      const Index d = map_degree(*maps[k]);
      const auto fs = fiber_sizes(*maps[k]);
      ok = ok && d == want[k] && std::all_of(fs.begin(), fs.end(), [&](Index s) { return s == d; });
      degrees.push_back(d);
    }
    add("stage_degrees_2_9_2", ok, {{"X->C2, C2->C1, C1->Y", degrees}});
  }
  {
    json w = json::array();
    bool ok = true;
    const auto& base = X.full.base();
    for (Index k = 0; k < base.points.size(); ++k) {
      const bool good = relative_ramification_ok(t.maps.X_to_Y, k);
      ok = ok && good;
      w.push_back({{"label", base.points[k].label},
                   {"X", cycle_type(X.full.point_monodromy(k)).to_string()},
                   {"Y", cycle_type(Y.full.point_monodromy(k)).to_string()},
                   {"orbit_lengths_match", good}});
    }
    add("etale_over_Y", ok, w);
  }
  {
    const auto orb = orbits(X.full.monodromy(), X.full.degree());
    add("connected_X", orb.size() == 1, {{"orbits", orb.size()}, {"orbit_sizes", [&] {
                                           std::vector<Index> s;
                                           for (const auto& o : orb) s.push_back(o.size());
                                           return s;
                                         }()}});
  }
  const auto gX = safe_genus(X.reduced);
  {
    const auto gY = safe_genus(Y.reduced);
    json w{{"riemann_hurwitz", genus_json(gX)}, {"genus_Y", genus_json(gY)}};
    bool ok = gX && gY && *gX == 37;
    if (gY) {
      const long chi = static_cast<long>(deg) * (2 - 2 * static_cast<long>(*gY));
      const long g_chi = 1 - chi / 2;
      w["euler_characteristic"] = chi;
      w["genus_from_euler_characteristic"] = g_chi;
      w["euler_characteristic_over_P"] = euler_characteristic(X.reduced);
      ok = ok && chi % 2 == 0 && g_chi == 37 && euler_characteristic(X.reduced) == chi;
    }
    add("genus_X_37", ok, w);
  }
  add("degree_below_genus", gX && deg < *gX, {{"degree", deg}, {"genus", genus_json(gX)}});
  {
    json w = json::array();
    Index found = 0;
    bool ok = true;
    for (Index k = 0; k < C2p.full.base().points.size(); ++k) {
      const auto& label = C2p.full.base().points[k].label;
      if (!has_prefix_token(label, "D")) continue;
      ++found;
      const auto ct = cycle_type(C2p.full.point_monodromy(k));
      ok = ok && ct == CycleType({2, 2});
      w.push_back({{"label", label}, {"cycle_type", ct.to_string()}, {"monodromy", images_json(C2p.full.point_monodromy(k))}});
    }
    add("even_branching_over_D", ok && found == 4, w);
  }
  {
    json w{{"numeric", {t.j_E0.re, t.j_E0.im}}, {"numeric_abs", double_text(t.j_E0_abs)}};
    bool ok = t.j_E0_abs < 1e-8;
    try {
      c.hesse = hesse_isotriviality_check();
      std::set<std::string> images;
      json mult = json::array();
      for (std::size_t k = 0; k < c.hesse.images.size(); ++k) {
        images.insert(cyclotomic_text(c.hesse.images[k]));
        mult.push_back(c.hesse.image_multiplicity[k]);
      }
      const std::set<std::string> want{"-1", "-zeta3", "1 + zeta3", "inf"};
      w["hesse_j"] = c.hesse.j.to_string();
      w["hesse_lambda"] = c.hesse.lambda.to_string();
      w["hesse_images"] = images;
      w["hesse_image_multiplicity"] = mult;
      ok = ok && c.hesse.j.is_zero() && images == want;
    } catch (const std::exception& e) {
      w["hesse_error"] = e.what();
      ok = false;
    }
    add("j_E0", ok, w);
  }
  {
    const auto s = safe_genus(sym.C1), n = safe_genus(C1.reduced);
    add("genus_C1_3", s == Index{3} && n == Index{3}, {{"symbolic", genus_json(s)}, {"numeric", genus_json(n)}});
  }
  {
    const auto s = safe_genus(sym.C2), n = safe_genus(C2.reduced), np = safe_genus(C2p.reduced);
    add("genus_C2_19", sym.C2_components == 1 && s == Index{19} && n == Index{19} && np == Index{19},
        {{"symbolic", genus_json(s)},
         {"symbolic_components", sym.C2_components},
         {"numeric_over_P", genus_json(n)},
         {"numeric_over_Pprime", genus_json(np)}});
  }
  c.cross_validation = cross_validate(t);
  {
    json w = json::array();
    for (const auto& cmp : c.cross_validation.comparisons) {
      json e{{"stage", cmp.stage}, {"conjugate", cmp.conjugate}, {"witness_verified", cmp.witness_verified}};
      if (cmp.witness) e["witness"] = images_json(*cmp.witness);
      if (!cmp.error.empty()) {
        e["error"] = cmp.error;
        json a = json::array(), b = json::array();
        for (const auto& p : cmp.symbolic) a.push_back(images_json(p));
        for (const auto& p : cmp.numeric) b.push_back(images_json(p));
        e["symbolic"] = a;
        e["numeric"] = b;
      }
      w.push_back(e);
    }
    add("cross_validation", c.cross_validation.agree(), w);
  }
  {
    json w;
    bool ok = true;
    auto check = [&](const std::string& name, const Cover& cov) {
      const auto g = safe_genus(cov);
      try {
        const Index r = ClosedSurfaceHomology(cov, 3).rank();
        w[name] = {{"rank", r}, {"genus", genus_json(g)}};
        ok = ok && g && r == 2 * *g;
      } catch (const std::exception& e) {
        w[name] = {{"error", e.what()}};
        ok = false;
      }
    };
    check("symbolic E", sym.E);
    check("symbolic Y", sym.Y);
    check("symbolic C1", sym.C1);
    check("numeric E", t.stage(Stage::E).reduced);
    check("numeric Y", Y.reduced);
    check("numeric C1", C1.reduced);
    add("homology_rank", ok, w);
  }

  c.passed = std::all_of(c.verdicts.begin(), c.verdicts.end(), [](const Verdict& v) { return v.passed; });
  for (Stage s : kAllStages) c.stages[to_string(s)] = stage_json(t.stage(s));
  c.symbolic = {{"Y", cover_json(sym.Y)}, {"E", cover_json(sym.E)}, {"C1", cover_json(sym.C1)}, {"C2", cover_json(sym.C2)}};
  return c;
}

nlohmann::json to_json(const TowerModel& t, const Certificate& c) {
  using nlohmann::json;
  json branch = json::array();
  for (const auto& b : t.input.branch_points) branch.push_back(b.to_string());
  json verdicts;
  for (const auto& v : c.verdicts) {
    verdicts[v.name] = {{"passed", v.passed}, {"witness", v.witness}};
  }
  json d = json::array();
  for (const auto& z : t.D) d.push_back({z.re, z.im});
  return {{"schema", 1},
          {"status", c.passed ? "CERTIFIED" : "FAILED"},
          {"input",
           {{"branch_points", branch},
            {"w5_sign", t.input.w5_sign > 0 ? "+" : "-"},
            {"precision_bits", t.options.precision_bits},
            {"max_precision_bits", t.options.max_precision_bits},
            {"kappa", double_text(t.options.kappa)}}},
          {"degree", map_degree(t.maps.X_to_Y)},
          {"genus_X", genus_json(safe_genus(t.stage(Stage::X_over_P).reduced))},
          {"weierstrass", {{"a", {t.weierstrass_a.re, t.weierstrass_a.im}}, {"b", {t.weierstrass_b.re, t.weierstrass_b.im}}}},
          {"D", d},
          {"chart_center", point_json(t.chart_center)},
          {"verdicts", verdicts},
          {"stages", c.stages},
          {"symbolic", c.symbolic},
          {"maps",
           {{"X->C2", t.maps.X_to_C2.fiber_map},
            {"C2->C1", t.maps.C2_to_C1.fiber_map},
            {"C1->Y", t.maps.C1_to_Y.fiber_map},
            {"C1->E", t.maps.C1_to_E.fiber_map}}},
          {"not_machine_checked", "h0(X, O(f^-1(y))) >= 2 for every y; relies on the cited cohomological argument"}};
}

std::string certificate_text(const TowerModel& t, const Certificate& c) { return to_json(t, c).dump(2) + "\n"; }

std::string emit_diagram(const TowerModel& t) {
  const auto& sym = t.symbolic;
  auto g = [](const Cover& c) {
    const auto v = safe_genus(c);
    return v ? std::to_string(*v) : std::string("?");
  };
  Index d_count = 0;
  for (const auto& p : t.stage(Stage::C2_over_Pprime).reduced.base().points) d_count += has_prefix_token(p.label, "D");
  const Index deg_e3_p = t.stage(Stage::C2_over_Pprime).full.degree() / map_degree(sym.C2_to_E3);
  struct Node {
    const char* id;
    const char* name;
    std::string genus;
  };
  const std::vector<Node> nodes{{"Y", "Y", g(t.stage(Stage::Y).reduced)},
                                {"C1", "C1", g(t.stage(Stage::C1).reduced)},
                                {"C2", "C2", g(t.stage(Stage::C2_over_P).reduced)},
                                {"X", "X", g(t.stage(Stage::X_over_P).reduced)},
                                {"P", "P", "0"},
                                {"E", "E", g(t.stage(Stage::E).reduced)},
                                {"Pp", "P'", "0"},
                                {"E0", "E0", std::to_string(d_count / 2 - 1)}};
  struct Edge {
    const char* from;
    const char* to;
    std::string label;
  };
  const std::vector<Edge> edges{
      {"X", "C2", std::to_string(map_degree(t.maps.X_to_C2))},
      {"C2", "C1", std::to_string(map_degree(t.maps.C2_to_C1))},
      {"C1", "Y", std::to_string(map_degree(t.maps.C1_to_Y))},
      {"Y", "P", std::to_string(t.stage(Stage::Y).full.degree())},
      {"C1", "E", std::to_string(map_degree(t.maps.C1_to_E))},
      {"E", "P", std::to_string(t.stage(Stage::E).full.degree())},
      {"C2", "E", std::to_string(map_degree(sym.C2_to_E3))},
      {"E", "E", "[3], " + std::to_string(map_degree(sym.E3_to_E))},
      {"E", "Pp", std::to_string(deg_e3_p)},
      {"X", "E0", std::to_string(t.stage(Stage::C2_over_Pprime).full.degree())},
      {"E0", "Pp", "2"},
  };
  std::ostringstream os;
  os << "digraph tower {\n  rankdir=LR;\n";
  for (const auto& n : nodes) os << "  " << n.id << " [label=\"" << n.name << "\\ng=" << n.genus << "\"];\n";
  for (const auto& e : edges) os << "  " << e.from << " -> " << e.to << " [label=\"" << e.label << "\"];\n";
  os << "}\n";
  return os.str();
}

TowerInput random_input(std::uint64_t seed, int w5_sign) {
  std::mt19937_64 rng(seed);
  TowerInput in;
  in.w5_sign = w5_sign;
  auto draw = [&] { return Rational(static_cast<int>(rng() % 25) - 12, 4); };
  for (std::size_t k = 0; k < 6; ++k) {
    ExactComplex z;
    do {
      z = ExactComplex{draw(), draw()};
    } while (std::find(in.branch_points.begin(), in.branch_points.begin() + k, z) != in.branch_points.begin() + k);
    in.branch_points[k] = z;
  }
  return in;
}

}  // namespace prill
