#include "prill/monodromy.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <numbers>
#include <thread>

namespace prill {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double segment_distance(std::complex<double> p, std::complex<double> a, std::complex<double> b) {
  const std::complex<double> ab = b - a;
  const double len2 = std::norm(ab);
  if (len2 == 0.0) return std::abs(p - a);
  const double s = std::clamp(((p - a) * std::conj(ab)).real() / len2, 0.0, 1.0);
  return std::abs(p - (a + s * ab));
}

// Smallest distance from a spoke [base, c_j] to the other candidates.
double spoke_clearance(std::complex<double> base, const std::vector<Candidate>& c) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < c.size(); ++j) {
    for (std::size_t k = 0; k < c.size(); ++k) {
      if (k != j) m = std::min(m, segment_distance(c[k].value, base, c[j].value));
    }
  }
  return m;
}

using DoubleFiber = std::vector<std::vector<std::complex<double>>>;

// Smallest gap in coordinate k between points whose k-th values differ.
// Points sharing a value (same sheet of a lower stage) hold it bit-for-bit.
double coordinate_separation(const DoubleFiber& f, std::size_t k) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < f.size(); ++i) {
    for (std::size_t j = i + 1; j < f.size(); ++j) {
      if (f[i][k] != f[j][k]) m = std::min(m, std::abs(f[i][k] - f[j][k]));
    }
  }
  return m;
}

double min_coordinate_separation(const DoubleFiber& f) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; !f.empty() && k < f.front().size(); ++k) m = std::min(m, coordinate_separation(f, k));
  return m;
}

// Gap from point i to the nearest different value of coordinate k.
double local_gap(const DoubleFiber& f, std::size_t i, std::size_t k) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < f.size(); ++j) {
    if (f[j][k] != f[i][k]) m = std::min(m, std::abs(f[j][k] - f[i][k]));
  }
  return m;
}

// Largest displacement of a coordinate relative to that point's gap to the
// nearest other value of the coordinate, before and after the step.
double step_ratio(const DoubleFiber& from, const DoubleFiber& to) {
  double ratio = 0.0;
  for (std::size_t i = 0; i < from.size(); ++i) {
    for (std::size_t k = 0; k < from[i].size(); ++k) {
      const double disp = std::abs(to[i][k] - from[i][k]);
      if (disp == 0.0) continue;
      ratio = std::max(ratio, disp / std::min(local_gap(from, i, k), local_gap(to, i, k)));
    }
  }
  return ratio;
}

Complex to_complex(std::complex<double> z) { return Complex(Real(z.real()), Real(z.imag())); }

}  // namespace

double LoopPath::length() const { return 2.0 * segment_length() + kTwoPi * radius; }

std::complex<double> LoopPath::at(double arc) const {
  const double seg = segment_length();
  const std::complex<double> e = entry();
  if (arc <= 0.0) return base;
  if (arc <= seg) return base + (e - base) * (arc / seg);
  const double circle = kTwoPi * radius;
  if (arc <= seg + circle) {
    const double theta = std::arg(e - center) + (arc - seg) / radius;
    return center + std::polar(radius, theta);
  }
  if (arc >= length()) return base;
  return e + (base - e) * ((arc - seg - circle) / seg);
}

double Carousel::distance_to_candidates(std::complex<double> x) const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& c : candidates) m = std::min(m, std::abs(x - c.value));
  return m;
}

MarkedBase Carousel::marked_base() const {
  MarkedBase b;
  for (const auto& c : candidates) b.points.push_back({c.tag, c.value});
  return b;
}

Carousel build_carousel(std::vector<Candidate> candidates) {
  if (candidates.empty()) throw std::invalid_argument("build_carousel: no candidates");
  double lo_x = std::numeric_limits<double>::infinity(), hi_x = -lo_x, lo_y = lo_x, hi_y = -lo_x;
  for (const auto& c : candidates) {
    lo_x = std::min(lo_x, c.value.real());
    hi_x = std::max(hi_x, c.value.real());
    lo_y = std::min(lo_y, c.value.imag());
    hi_y = std::max(hi_y, c.value.imag());
  }
  const double span = std::max({hi_x - lo_x, hi_y - lo_y, 1e-3});
  const double bx = hi_x + 0.5 * span;

  Carousel car;
  double best = -1.0;
  const int grid = 400;
  for (int i = 0; i <= grid; ++i) {
    const double by = lo_y - 0.5 * span + (hi_y - lo_y + span) * i / grid;
    const double clr = spoke_clearance({bx, by}, candidates);
    if (clr > best * (1 + 1e-12)) {
      best = clr;
      car.base = {bx, by};
    }
  }
  if (!(best > 0.0)) throw DegenerateInput("build_carousel: no base point keeps the spokes clear");

  // Angles lie in (pi/2, 3pi/2] modulo 2pi; atan2 splits that range at pi.
  std::stable_sort(candidates.begin(), candidates.end(), [&](const Candidate& a, const Candidate& b) {
    auto ang = [&](const Candidate& c) {
      double t = std::arg(c.value - car.base);
      return t < 0 ? t + kTwoPi : t;
    };
    return ang(a) < ang(b);
  });
  car.candidates = std::move(candidates);

  const auto& c = car.candidates;
  car.min_candidate_separation = std::numeric_limits<double>::infinity();
  car.margin = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < c.size(); ++j) {
    double sep = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < c.size(); ++k) {
      if (k != j) sep = std::min(sep, std::abs(c[k].value - c[j].value));
    }
    car.min_candidate_separation = std::min(car.min_candidate_separation, sep);
    double own = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < c.size(); ++k) {
      if (k != j) own = std::min(own, segment_distance(c[k].value, car.base, c[j].value));
    }
    LoopPath loop{car.base, c[j].value, std::min(sep / 3.0, own / 2.0), j};
    if (!std::isfinite(loop.radius)) loop.radius = std::max(span, 1.0) / 4.0;
    for (std::size_t k = 0; k < c.size(); ++k) {
      if (k == j) continue;
      car.margin = std::min({car.margin, segment_distance(c[k].value, car.base, loop.entry()),
                             std::abs(c[k].value - c[j].value) - loop.radius});
    }
    car.loops.push_back(loop);
  }
  return car;
}

Permutation track_loop(const CurveData& data, const Carousel& car, Index loop_index,
                       const std::vector<TowerPoint>& fiber, const TrackOptions& opt, LoopDiagnostics* diag) {
  const LoopPath& loop = car.loops.at(loop_index);
  const double total = loop.length();
  const Index n = fiber.size();
  LoopDiagnostics dg;
  dg.min_separation = std::numeric_limits<double>::infinity();

  std::vector<TowerPoint> pts = fiber, next(n);
  auto cur_d = to_double_coords(pts);
  dg.min_separation = min_coordinate_separation(cur_d);
  double arc = 0.0;
  std::complex<double> x = loop.at(0.0);
  double h = opt.kappa * car.distance_to_candidates(x);
  const double h_floor = 1e-14 * std::max(total, 1.0);

  while (arc < total) {
    if (dg.steps + dg.rejected_steps >= opt.max_steps) {
      throw TrackingFailure("track_loop: step budget exhausted around " + car.candidates[loop_index].tag);
    }
    h = std::min(h, total - arc);
    double arc1 = arc + h;
    std::complex<double> x1 = loop.at(arc1);
    const double bound = opt.kappa * std::min(car.distance_to_candidates(x), car.distance_to_candidates(x1));
    if (h > bound && total - arc > bound) {
      h = bound;
      continue;
    }
    if (arc1 >= total) x1 = loop.base;
    const Complex base1 = to_complex(x1);

    double max_res = 0.0;
    bool ok = continue_fiber(data, pts, base1, next, &max_res);
    double ratio = 0.0, new_sep = 0.0;
    std::vector<std::vector<std::complex<double>>> next_d;
    if (ok) {
      next_d = to_double_coords(next);
      new_sep = min_coordinate_separation(next_d);
      ratio = step_ratio(cur_d, next_d);
      ok = ratio < 1.0 / 3.0;
    }
    if (!ok) {
      ++dg.rejected_steps;
      h *= 0.5;
      if (h < h_floor) {
        throw TrackingFailure("track_loop: step size underflow around " + car.candidates[loop_index].tag);
      }
      continue;
    }
    ++dg.steps;
    dg.max_residual = std::max(dg.max_residual, max_res);
    dg.max_step_ratio = std::max(dg.max_step_ratio, ratio);
    dg.min_separation = std::min(dg.min_separation, new_sep);
    pts.swap(next);
    cur_d = std::move(next_d);
    arc = arc1;
    x = x1;
    h *= 1.5;
  }

  // Match end points to start points.
  const auto start_d = to_double_coords(fiber);
  const double tol = min_separation(start_d) / 3.0;
  std::vector<Index> images(n);
  std::vector<bool> used(n, false);
  for (Index i = 0; i < n; ++i) {
    Index best = n;
    double best_d = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < n; ++j) {
      double d = 0.0;
      for (std::size_t k = 0; k < cur_d[i].size(); ++k) d = std::max(d, std::abs(cur_d[i][k] - start_d[j][k]));
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    if (!(best_d < tol) || used[best]) {
      throw TrackingFailure("track_loop: end fiber does not match start fiber around " + car.candidates[loop_index].tag);
    }
    used[best] = true;
    images[i] = best;
  }
  if (diag) *diag = dg;
  return Permutation(std::move(images));
}

Permutation path_product(const std::vector<Permutation>& loops) {
  if (loops.empty()) throw std::invalid_argument("path_product: no loops");
  Permutation acc = Permutation::identity(loops.front().degree());
  for (const auto& p : loops) acc = compose(p, acc);
  return acc;
}

unsigned thread_count(unsigned requested) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (requested > 0) return requested;
  if (const char* env = std::getenv("PRILL_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(std::min<long>(v, hw));
  }
  return hw;
}

StageMonodromy monodromy(Stage stage, const TowerInput& input, const Carousel& car, const MonodromyOptions& opt) {
  std::string last_error = "no precision attempted";
  for (unsigned bits = opt.precision_bits; bits <= opt.max_precision_bits; bits *= 2) {
    StageMonodromy out;
    out.stage = stage;
    out.carousel = car;
    for (unsigned b = opt.precision_bits; b <= bits; b *= 2) out.attempted_bits.push_back(b);
    PrecisionScope scope(bits);
    CurveData data(input, opt.chart_center);
    out.bits = data.bits;
    out.base_fiber = solve_fiber(stage, data, to_complex(car.base));

    const Index loops = car.loops.size();
    out.loop_permutations.assign(loops, Permutation::identity(out.base_fiber.size()));
    out.diagnostics.assign(loops, {});
    std::vector<std::exception_ptr> errors(loops);
    std::atomic<Index> next{0};
    TrackOptions topt;
    topt.kappa = opt.kappa;
    auto worker = [&] {
      for (Index j = next++; j < loops; j = next++) {
        try {
          out.loop_permutations[j] = track_loop(data, car, j, out.base_fiber, topt, &out.diagnostics[j]);
        } catch (...) {
          errors[j] = std::current_exception();
        }
      }
    };
    const unsigned nthreads = std::min<unsigned>(thread_count(opt.threads), static_cast<unsigned>(loops));
    if (nthreads <= 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (unsigned i = 0; i < nthreads; ++i) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }

    bool failed = false;
    for (Index j = 0; j < loops && !failed; ++j) {
      if (!errors[j]) continue;
      try {
        std::rethrow_exception(errors[j]);
      } catch (const TrackingFailure& e) {
        last_error = e.what();
        failed = true;
      }
    }
    if (failed) continue;
    if (!path_product(out.loop_permutations).is_identity()) {
      last_error = "monodromy: product of loop permutations is not the identity for stage " + to_string(stage);
      continue;
    }

    out.full = Cover(car.marked_base(), out.base_fiber.size(), out.loop_permutations);
    if (auto v = validate_cover(out.full)) {
      last_error = "monodromy: " + v->message;
      continue;
    }
    for (Index j = 0; j < loops; ++j) {
      if (out.loop_permutations[j].is_identity()) out.spurious.push_back(car.candidates[j].tag);
    }
    out.reduced = forget_marked_points(out.full, out.spurious);
    return out;
  }
  throw TrackingFailure(last_error + " (up to " + std::to_string(opt.max_precision_bits) + " bits)");
}

}  // namespace prill
