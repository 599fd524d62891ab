#include "prill/tower.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace prill {

namespace {

// Coordinate slots per stage.
struct Layout {
  int w = -1, y = -1, u = -1, v = -1, z = -1, t = -1;
};

Layout layout(Stage s) {
  switch (s) {
    case Stage::Y:
      return {.y = 0};
    case Stage::E:
      return {.w = 0};
    case Stage::C1:
      return {.w = 0, .y = 1};
    case Stage::C2_over_P:
      return {.w = 0, .y = 1, .u = 2, .v = 3};
    case Stage::X_over_P:
      return {.w = 0, .y = 1, .u = 2, .v = 3, .z = 4};
    case Stage::C2_over_Pprime:
      return {.w = 2, .y = 3, .v = 0, .t = 1};
  }
  throw std::logic_error("unknown stage");
}


double rel(const Complex& a, const Complex& b) {
  return abs_d(a - b) / std::max({abs_d(a), abs_d(b), 1.0});
}

// The sign of `root` nearest `prev`; false when the two signs are not clearly separated.
bool pick_sign(const Complex& root, const Complex& prev, Complex& out) {
  const std::complex<double> rd = to_cd(root), pd = to_cd(prev);
  double dp = std::abs(rd - pd), dm = std::abs(rd + pd);
  const bool flip = dm < dp;
  if (flip) std::swap(dp, dm);
  // |r - prev| must be below a third of the gap |2r| between the two signs.
  if (dp * 3 >= std::abs(rd) * 2) return false;
  out = flip ? Complex(-root) : root;
  return true;
}

Complex root_sign(const Complex& value, int sign) {
  Complex r = sqrt(value);
  return sign > 0 ? r : -r;
}

// Newton on phi3(u) - U psi3(u)^2 from u: a double-precision pass first, then
// multiprecision steps until the correction is below the square root of the
// working epsilon (the next error is quadratically smaller).
bool newton_u(const CurveData& d, const Complex& U, Complex& u) {
  const std::complex<double> Ud = to_cd(U);
  std::complex<double> x = to_cd(u);
  bool warm = false;
  for (int it = 0; it < 30; ++it) {
    const std::complex<double> ps = d.psi3_d(x);
    const std::complex<double> der = d.dphi3_d(x) - Ud * 2.0 * ps * d.dpsi3_d(x);
    if (der == 0.0) break;
    const std::complex<double> dx = (d.phi3_d(x) - Ud * ps * ps) / der;
    x -= dx;
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) break;
    if (std::abs(dx) <= 1e-13 * std::max(std::abs(x), 1.0)) {
      warm = true;
      break;
    }
  }
  if (warm) u = Complex(Real(x.real()), Real(x.imag()));
  const double tol = std::ldexp(1.0, -static_cast<int>(d.bits) / 2 + 10);
  for (int it = 0; it < 40; ++it) {
    const Complex ps = d.triple.psi3(u);
    const Complex val = d.triple.phi3(u) - U * ps * ps;
    const Complex der = d.dphi3(u) - U * Complex(2) * ps * d.dpsi3(u);
    if (der == Complex(0)) return false;
    const Complex du = val / der;
    u -= du;
    if (abs_d(du) <= tol * std::max(abs_d(u), 1.0)) return true;
  }
  return false;
}

// v with v^2 = f(u) and [3](u, v) = (U, V).
Complex v_from_image(const CurveData& d, const Complex& u, const CurvePoint<Complex>& image) {
  Complex v = sqrt(d.f(u));
  const Complex ps = d.triple.psi3(u);
  const Complex target = image.y * ps * ps * ps;
  const Complex om = d.triple.omega3(u);
  if (abs(-v * om - target) < abs(v * om - target)) v = -v;
  return v;
}

struct RawCandidate {
  Complex value;  // u-value or t-value
  bool infinite = false;
  std::string tag;
};

void add_preimage_u(const CurveData& d, const CurvePoint<Complex>& q, const std::string& tag,
                    std::vector<RawCandidate>& out) {
  if (q.infinity) return;  // E[3]: covered by D and infinity
  auto roots = polynomial_roots(d.triple.preimage_polynomial(q.x));
  for (std::size_t k = 0; k < roots.size(); ++k) out.push_back({roots[k], false, tag + "_" + std::to_string(k + 1)});
}

std::vector<RawCandidate> second_line_u_candidates(const CurveData& d) {
  std::vector<RawCandidate> out;
  auto psi_roots = polynomial_roots(d.triple.psi3);
  for (std::size_t k = 0; k < psi_roots.size(); ++k) out.push_back({psi_roots[k], false, "D" + std::to_string(k + 1)});
  auto f_roots = polynomial_roots(d.f);
  for (std::size_t k = 0; k < f_roots.size(); ++k) out.push_back({f_roots[k], false, "E2_" + std::to_string(k + 1)});
  out.push_back({Complex(0), true, "inf"});

  const Complex s5 = d.s[4], s6 = d.s[5];
  const Complex w5 = d.model.w0;
  add_preimage_u(d, d.forward(s5, -w5), "t5bar", out);
  const Complex w6 = sqrt(d.q(s6));
  add_preimage_u(d, d.forward(s6, w6), "P6a", out);
  add_preimage_u(d, d.forward(s6, -w6), "P6b", out);
  const Complex lead_root = sqrt(d.wt.lead);
  add_preimage_u(d, d.wt.at_infinity(lead_root), "Pinf_a", out);
  add_preimage_u(d, d.wt.at_infinity(-lead_root), "Pinf_b", out);
  add_preimage_u(d, d.wt.shift, "T", out);
  for (int i = 0; i < 4; ++i) add_preimage_u(d, d.forward(d.s[i], Complex(0)), "W" + std::to_string(i + 1), out);
  return out;
}

std::vector<Candidate> dedupe(std::vector<RawCandidate> raw, const std::vector<Complex>& chart_values, unsigned bits) {
  double scale = 1.0;
  for (const auto& c : chart_values) scale = std::max(scale, std::abs(to_cd(c)));
  const Real same = ldexp(Real(scale), -static_cast<int>(bits) / 2);
  std::vector<Candidate> out;
  std::vector<Complex> kept;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    bool merged = false;
    for (std::size_t j = 0; j < kept.size(); ++j) {
      const Real dist = abs(chart_values[i] - kept[j]);
      if (dist <= same) {
        out[j].tag += "=" + raw[i].tag;
        merged = true;
        break;
      }
      if (to_double(dist) < 1e-8 * scale) {
        throw DegenerateInput("branch candidates " + out[j].tag + " and " + raw[i].tag + " nearly coincide");
      }
    }
    if (!merged) {
      kept.push_back(chart_values[i]);
      out.push_back({to_cd(chart_values[i]), raw[i].tag});
    }
  }
  return out;
}

// Smallest separation of the chart values 1/(u - c) (infinity maps to 0),
// relative to the largest of them.
double chart_quality(const std::vector<std::complex<double>>& pts, std::complex<double> c) {
  std::vector<std::complex<double>> r{0.0};
  double big = 0.0;
  for (const auto& p : pts) {
    if (p == c) return 0.0;
    r.push_back(1.0 / (p - c));
    big = std::max(big, std::abs(r.back()));
  }
  double sep = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < r.size(); ++i) {
    for (std::size_t j = i + 1; j < r.size(); ++j) sep = std::min(sep, std::abs(r[i] - r[j]));
  }
  return sep / big;
}

std::complex<double> choose_chart_center(const std::vector<RawCandidate>& cands) {
  double lo_x = std::numeric_limits<double>::infinity(), hi_x = -lo_x, lo_y = lo_x, hi_y = -lo_x;
  std::vector<std::complex<double>> pts;
  for (const auto& c : cands) {
    if (c.infinite) continue;
    auto z = to_cd(c.value);
    pts.push_back(z);
    lo_x = std::min(lo_x, z.real());
    hi_x = std::max(hi_x, z.real());
    lo_y = std::min(lo_y, z.imag());
    hi_y = std::max(hi_y, z.imag());
  }
  const double span = std::max({hi_x - lo_x, hi_y - lo_y, 1.0});
  // Dyadic grid points, so the center is exact at every precision.
  double step = std::ldexp(1.0, static_cast<int>(std::floor(std::log2(span / 16))));
  std::complex<double> best{0, 0};
  double best_q = -1;
  auto consider = [&](std::complex<double> c) {
    const double q = chart_quality(pts, c);
    if (q > best_q * (1 + 1e-9)) {
      best_q = q;
      best = c;
    }
  };
  for (double x = std::floor(lo_x / step) * step - step; x <= hi_x + step; x += step) {
    for (double y = std::floor(lo_y / step) * step - step; y <= hi_y + step; y += step) consider({x, y});
  }
  for (int level = 0; level < 12; ++level) {
    step *= 0.5;
    const auto c0 = best;
    for (int i = -2; i <= 2; ++i) {
      for (int k = -2; k <= 2; ++k) consider(c0 + std::complex<double>(i * step, k * step));
    }
  }
  return best;
}

}  // namespace

Index expected_degree(Stage s) {
  switch (s) {
    case Stage::Y:
    case Stage::E:
      return 2;
    case Stage::C1:
    case Stage::C2_over_Pprime:
      return 4;
    case Stage::C2_over_P:
      return 36;
    case Stage::X_over_P:
      return 72;
  }
  throw std::logic_error("unknown stage");
}

std::string to_string(Stage s) {
  switch (s) {
    case Stage::Y:
      return "Y";
    case Stage::E:
      return "E";
    case Stage::C1:
      return "C1";
    case Stage::C2_over_P:
      return "C2_over_P";
    case Stage::C2_over_Pprime:
      return "C2_over_Pprime";
    case Stage::X_over_P:
      return "X_over_P";
  }
  throw std::logic_error("unknown stage");
}

bool over_second_line(Stage s) { return s == Stage::C2_over_Pprime; }

std::vector<std::string> coordinate_names(Stage s) {
  switch (s) {
    case Stage::Y:
      return {"y"};
    case Stage::E:
      return {"w"};
    case Stage::C1:
      return {"w", "y"};
    case Stage::C2_over_P:
      return {"w", "y", "u", "v"};
    case Stage::X_over_P:
      return {"w", "y", "u", "v", "z"};
    case Stage::C2_over_Pprime:
      return {"v", "t", "w", "y"};
  }
  throw std::logic_error("unknown stage");
}

CurveData::CurveData(const TowerInput& in, std::optional<std::complex<double>> chart_center)
    : input(in), bits(working_bits()), triple(WeierstrassCurve<Complex>{}) {
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = i + 1; j < 6; ++j) {
      if (in.branch_points[i] == in.branch_points[j]) {
        throw DegenerateInput("branch points s" + std::to_string(i + 1) + " and s" + std::to_string(j + 1) +
                              " coincide");
      }
    }
  }
  if (in.w5_sign != 1 && in.w5_sign != -1) throw std::invalid_argument("w5 sign must be +1 or -1");
  for (std::size_t i = 0; i < 6; ++i) s[i] = in.branch_points[i].to_complex();

  const std::array<Complex, 4> quartic_roots{s[0], s[1], s[2], s[3]};
  model = QuarticModel<Complex>::from_roots(quartic_roots, s[4], Complex(0));
  q = model.quartic();
  model.w0 = root_sign(q(s[4]), in.w5_sign);
  g = q * Polynomial<Complex>{-s[4], Complex(1)} * Polynomial<Complex>{-s[5], Complex(1)};
  try {
    wt = quartic_to_weierstrass(model, s[0]);
  } catch (const std::invalid_argument& e) {
    throw DegenerateInput(e.what());
  }
  triple = TripleMap<Complex>(wt.curve);
  f = wt.curve.cubic();
  dphi3 = triple.phi3.derivative();
  dpsi3 = triple.psi3.derivative();
  auto to_d = [](const Complex& z) { return to_cd(z); };
  phi3_d = triple.phi3.map<std::complex<double>>(to_d);
  psi3_d = triple.psi3.map<std::complex<double>>(to_d);
  dphi3_d = dphi3.map<std::complex<double>>(to_d);
  dpsi3_d = dpsi3.map<std::complex<double>>(to_d);

  if (chart_center) {
    u_center = Complex(Real(chart_center->real()), Real(chart_center->imag()));
  } else {
    u_center = Complex(0);
    auto c = choose_chart_center(second_line_u_candidates(*this));
    u_center = Complex(Real(c.real()), Real(c.imag()));
  }
}

std::vector<Candidate> branch_candidates(Stage stage, const CurveData& d) {
  std::vector<RawCandidate> raw;
  std::vector<Complex> chart;
  if (!over_second_line(stage)) {
    for (std::size_t j = 0; j < 6; ++j) raw.push_back({d.s[j], false, "s" + std::to_string(j + 1)});
    // t-values over the nonzero 2-torsion: v-sheets meet there.
    auto f_roots = stage == Stage::C2_over_P || stage == Stage::X_over_P ? polynomial_roots(d.f) : std::vector<Complex>{};
    for (std::size_t k = 0; k < f_roots.size(); ++k) {
      auto pre = d.wt.inverse(CurvePoint<Complex>::affine(f_roots[k], Complex(0)));
      if (pre) raw.push_back({pre->first, false, "e2_" + std::to_string(k + 1)});
    }
    for (const auto& c : raw) chart.push_back(c.value);
  } else {
    raw = second_line_u_candidates(d);
    for (const auto& c : raw) chart.push_back(c.infinite ? Complex(0) : d.chart_of_u(c.value));
  }
  return dedupe(std::move(raw), chart, d.bits);
}

std::vector<TowerPoint> solve_fiber(Stage stage, const CurveData& d, const Complex& base) {
  std::vector<TowerPoint> out;
  auto emit = [&](std::vector<Complex> coords) { out.push_back({stage, std::move(coords), d.bits}); };
  if (!over_second_line(stage)) {
    const Complex& t = base;
    const Complex w0 = sqrt(d.q(t)), y0 = sqrt(d.g(t));
    switch (stage) {
      case Stage::Y:
        for (int sy : {1, -1}) emit({sy > 0 ? y0 : Complex(-y0)});
        break;
      case Stage::E:
        for (int sw : {1, -1}) emit({sw > 0 ? w0 : Complex(-w0)});
        break;
      case Stage::C1:
        for (int sw : {1, -1}) {
          for (int sy : {1, -1}) emit({sw > 0 ? w0 : Complex(-w0), sy > 0 ? y0 : Complex(-y0)});
        }
        break;
      default:
        for (int sw : {1, -1}) {
          const Complex w = sw > 0 ? w0 : Complex(-w0);
          const auto image = d.forward(t, w);
          if (image.infinity) throw DegenerateInput("solve_fiber: base point over the marked point");
          std::vector<Complex> us;
          try {
            us = polynomial_roots(d.triple.preimage_polynomial(image.x));
          } catch (const RootFindingError& e) {
            throw DegenerateInput(e.what());
          }
          for (const auto& u : us) {
            const Complex v = v_from_image(d, u, image);
            for (int sy : {1, -1}) {
              const Complex y = sy > 0 ? y0 : Complex(-y0);
              if (stage == Stage::C2_over_P) {
                emit({w, y, u, v});
              } else {
                const Complex z0 = sqrt(d.triple.psi3(u));
                for (int sz : {1, -1}) emit({w, y, u, v, sz > 0 ? z0 : Complex(-z0)});
              }
            }
          }
        }
        break;
    }
  } else {
    const Complex u = d.u_of_chart(base);
    const Complex v0 = sqrt(d.f(u));
    for (int sv : {1, -1}) {
      const Complex v = sv > 0 ? v0 : Complex(-v0);
      const auto image = d.triple(CurvePoint<Complex>::affine(u, v));
      auto tw = d.wt.inverse(image);
      if (!tw) throw DegenerateInput("solve_fiber: base point over t = infinity");
      const Complex y0 = sqrt(d.g(tw->first));
      for (int sy : {1, -1}) emit({v, tw->first, tw->second, sy > 0 ? y0 : Complex(-y0)});
    }
  }

  if (out.size() != expected_degree(stage)) {
    throw DegenerateInput("solve_fiber: expected " + std::to_string(expected_degree(stage)) + " points, found " +
                          std::to_string(out.size()));
  }
  const double tol = residual_tolerance(d.bits);
  for (const auto& p : out) {
    if (residual(d, p, base) > tol) throw DegenerateInput("solve_fiber: residual above tolerance at the base point");
  }
  if (!(min_separation(out) > 0.0)) throw DegenerateInput("solve_fiber: fiber points not separated");
  return out;
}

bool continue_point(const CurveData& d, const TowerPoint& prev, const Complex& base, TowerPoint& out,
                    double* residual_out) {
  std::vector<TowerPoint> next;
  if (!continue_fiber(d, {prev}, base, next, residual_out)) return false;
  out = std::move(next.front());
  return true;
}

bool continue_fiber(const CurveData& d, const std::vector<TowerPoint>& prev, const Complex& base,
                    std::vector<TowerPoint>& out, double* max_residual) {
  out.resize(prev.size());
  if (prev.empty()) return true;
  const Stage stage = prev.front().stage;
  const Layout L = layout(stage);
  const double tol = residual_tolerance(d.bits);
  double worst = 0.0;
  auto finish = [&](bool ok) {
    if (max_residual) *max_residual = worst;
    return ok && worst <= tol;
  };

  if (!over_second_line(stage)) {
    const Complex& t = base;
    Complex w_root, y_root;
    if (L.w >= 0) {
      const Complex qt = d.q(t);
      w_root = sqrt(qt);
      worst = std::max(worst, rel(w_root * w_root, qt));
    }
    if (L.y >= 0) {
      const Complex gt = d.g(t);
      y_root = sqrt(gt);
      worst = std::max(worst, rel(y_root * y_root, gt));
    }
    // Sub-solves shared by points with the same new w and previous u.
    struct Lift {
      Complex w, prev_u, u, v_root, v_factor, image_v, z_root;
    };
    std::vector<Lift> lifts;
    for (std::size_t i = 0; i < prev.size(); ++i) {
      const auto& p = prev[i].coords;
      auto& o = out[i];
      o.stage = stage;
      o.bits = d.bits;
      o.coords.resize(p.size());
      auto& c = o.coords;
      if (L.w >= 0 && !pick_sign(w_root, p[L.w], c[L.w])) return finish(false);
      if (L.y >= 0 && !pick_sign(y_root, p[L.y], c[L.y])) return finish(false);
      if (L.u < 0) continue;
      const Lift* lift = nullptr;
      for (const auto& l : lifts) {
        if (l.w == c[L.w] && l.prev_u == p[L.u]) {
          lift = &l;
          break;
        }
      }
      if (!lift) {
        Lift l;
        l.w = c[L.w];
        l.prev_u = p[L.u];
        const auto image = d.forward(t, l.w);
        if (image.infinity) return finish(false);
        l.u = p[L.u];
        if (!newton_u(d, image.x, l.u)) return finish(false);
        const Complex fu = d.f(l.u);
        l.v_root = sqrt(fu);
        const Complex ps = d.triple.psi3(l.u);
        l.v_factor = d.triple.omega3(l.u) / (ps * ps * ps);
        l.image_v = image.y;
        worst = std::max(worst, rel(d.triple.phi3(l.u) / (ps * ps), image.x));
        worst = std::max(worst, rel(l.v_root * l.v_root, fu));
        if (L.z >= 0) {
          l.z_root = sqrt(ps);
          worst = std::max(worst, rel(l.z_root * l.z_root, ps));
        }
        lifts.push_back(std::move(l));
        lift = &lifts.back();
      }
      c[L.u] = lift->u;
      if (!pick_sign(lift->v_root, p[L.v], c[L.v])) return finish(false);
      worst = std::max(worst, rel(c[L.v] * lift->v_factor, lift->image_v));
      if (L.z >= 0 && !pick_sign(lift->z_root, p[L.z], c[L.z])) return finish(false);
    }
    return finish(true);
  }

  const Complex u = d.u_of_chart(base);
  const Complex fu = d.f(u);
  const Complex v_root = sqrt(fu);
  worst = std::max(worst, rel(v_root * v_root, fu));
  struct Lift {
    Complex v, t, w, y_root;
  };
  std::vector<Lift> lifts;
  for (std::size_t i = 0; i < prev.size(); ++i) {
    const auto& p = prev[i].coords;
    auto& o = out[i];
    o.stage = stage;
    o.bits = d.bits;
    o.coords.resize(p.size());
    auto& c = o.coords;
    if (!pick_sign(v_root, p[L.v], c[L.v])) return finish(false);
    const Lift* lift = nullptr;
    for (const auto& l : lifts) {
      if (l.v == c[L.v]) lift = &l;
    }
    if (!lift) {
      Lift l;
      l.v = c[L.v];
      const auto image = d.triple(CurvePoint<Complex>::affine(u, l.v));
      if (image.infinity) return finish(false);
      auto tw = d.wt.inverse(image);
      if (!tw) return finish(false);
      l.t = tw->first;
      l.w = tw->second;
      const Complex gt = d.g(l.t);
      l.y_root = sqrt(gt);
      worst = std::max(worst, rel(l.w * l.w, d.q(l.t)));
      worst = std::max(worst, rel(l.y_root * l.y_root, gt));
      lifts.push_back(std::move(l));
      lift = &lifts.back();
    }
    c[L.t] = lift->t;
    c[L.w] = lift->w;
    if (!pick_sign(lift->y_root, p[L.y], c[L.y])) return finish(false);
  }
  return finish(true);
}

double residual(const CurveData& d, const TowerPoint& pt, const Complex& base) {
  const Layout L = layout(pt.stage);
  const auto& c = pt.coords;
  double r = 0.0;
  if (!over_second_line(pt.stage)) {
    const Complex& t = base;
    if (L.w >= 0) r = std::max(r, rel(c[L.w] * c[L.w], d.q(t)));
    if (L.y >= 0) r = std::max(r, rel(c[L.y] * c[L.y], d.g(t)));
    if (L.u >= 0) {
      const auto image = d.forward(t, c[L.w]);
      const Complex ps = d.triple.psi3(c[L.u]);
      r = std::max(r, rel(d.triple.phi3(c[L.u]) / (ps * ps), image.x));
      r = std::max(r, rel(c[L.v] * d.triple.omega3(c[L.u]) / (ps * ps * ps), image.y));
      r = std::max(r, rel(c[L.v] * c[L.v], d.f(c[L.u])));
    }
    if (L.z >= 0) r = std::max(r, rel(c[L.z] * c[L.z], d.triple.psi3(c[L.u])));
  } else {
    const Complex u = d.u_of_chart(base);
    r = std::max(r, rel(c[L.v] * c[L.v], d.f(u)));
    r = std::max(r, rel(c[L.w] * c[L.w], d.q(c[L.t])));
    r = std::max(r, rel(c[L.y] * c[L.y], d.g(c[L.t])));
    const auto image = d.forward(c[L.t], c[L.w]);
    const auto direct = d.triple(CurvePoint<Complex>::affine(u, c[L.v]));
    if (image.infinity || direct.infinity) return std::numeric_limits<double>::infinity();
    r = std::max(r, rel(image.x, direct.x));
    r = std::max(r, rel(image.y, direct.y));
  }
  return r;
}

double residual_tolerance(unsigned bits) { return std::pow(10.0, -static_cast<double>(bits) / 4.0); }

double point_distance(const TowerPoint& a, const TowerPoint& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.coords.size(); ++k) m = std::max(m, std::abs(to_cd(a.coords[k]) - to_cd(b.coords[k])));
  return m;
}

double min_separation(const std::vector<TowerPoint>& fiber) { return min_separation(to_double_coords(fiber)); }

std::vector<std::vector<std::complex<double>>> to_double_coords(const std::vector<TowerPoint>& fiber) {
  std::vector<std::vector<std::complex<double>>> out(fiber.size());
  for (std::size_t i = 0; i < fiber.size(); ++i) {
    for (const auto& c : fiber[i].coords) out[i].push_back(to_cd(c));
  }
  return out;
}

double min_separation(const std::vector<std::vector<std::complex<double>>>& fiber) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < fiber.size(); ++i) {
    for (std::size_t j = i + 1; j < fiber.size(); ++j) {
      double d = 0.0;
      for (std::size_t k = 0; k < fiber[i].size(); ++k) d = std::max(d, std::abs(fiber[i][k] - fiber[j][k]));
      m = std::min(m, d);
    }
  }
  return m;
}

}  // namespace prill
