#pragma once

// Explicit coordinates for the stages of the tower over a genus-2 curve
// y^2 = prod (t - s_j).
//
//   E   : w^2 = q(t) = (t - s1)(t - s2)(t - s3)(t - s4), marked point t5 = (s5, w5)
//   W   : Weierstrass model v^2 = u^3 + a u + b of (E, t5), F : E -> W
//   C1  : (w, y)
//   C2  : (w, y, e') with e' = (u, v) and [3]e' = F(t, w)
//   X   : (w, y, e', z) with z^2 = psi_3(u)
//
// Stages over the first line use t as base coordinate. The stage over the
// second line (the u-line) uses r = 1 / (u - u_c), which keeps u = infinity at
// a finite chart value.

#include <array>
#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "prill/elliptic.hpp"
#include "prill/numeric.hpp"
#include "prill/perm.hpp"

namespace prill {

/// Input too degenerate to process (coincident branch points or candidates).
class DegenerateInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Stage { Y, E, C1, C2_over_P, C2_over_Pprime, X_over_P };

inline constexpr std::array<Stage, 6> kAllStages{Stage::Y,         Stage::E,        Stage::C1,
                                                 Stage::C2_over_P, Stage::C2_over_Pprime, Stage::X_over_P};

Index expected_degree(Stage s);
std::string to_string(Stage s);
bool over_second_line(Stage s);
/// Names of the coordinates stored in a TowerPoint of this stage.
std::vector<std::string> coordinate_names(Stage s);

struct TowerInput {
  std::array<ExactComplex, 6> branch_points;
  int w5_sign = 1;
};

/// Curve data at the current working precision.
struct CurveData {
  /// `chart_center` fixes u_c; when absent it is chosen away from the
  /// second-line candidates (and should then be reused across precisions).
  explicit CurveData(const TowerInput& in, std::optional<std::complex<double>> chart_center = std::nullopt);

  TowerInput input;
  unsigned bits;
  std::array<Complex, 6> s;
  Polynomial<Complex> q;      // quartic of E
  Polynomial<Complex> g;      // sextic of Y
  QuarticModel<Complex> model;
  WeierstrassTransform<Complex> wt;
  TripleMap<Complex> triple;
  Polynomial<Complex> f;      // u^3 + a u + b
  Polynomial<Complex> dphi3, dpsi3;
  Polynomial<std::complex<double>> phi3_d, psi3_d, dphi3_d, dpsi3_d;  // warm starts
  Complex u_center;           // Moebius center of the second-line chart

  /// (U, V) = F(t, w).
  CurvePoint<Complex> forward(const Complex& t, const Complex& w) const { return wt.forward(t, w); }
  Complex u_of_chart(const Complex& r) const { return u_center + Complex(1) / r; }
  Complex chart_of_u(const Complex& u) const { return Complex(1) / (u - u_center); }
};

struct TowerPoint {
  Stage stage = Stage::Y;
  std::vector<Complex> coords;  // see coordinate_names
  unsigned bits = 0;
};

struct Candidate {
  std::complex<double> value;  // base coordinate (t, or the chart r)
  std::string tag;
};

/// Superset of the branch points of `stage` on its base line, plus the
/// removable coordinate singularities of the tuple model. Candidates closer
/// than 1e-8 (relative) are refused with DegenerateInput unless they agree to
/// working precision, in which case they are merged.
std::vector<Candidate> branch_candidates(Stage stage, const CurveData& data);

/// All points over `base`, ordered deterministically. Throws DegenerateInput
/// when the count or separation is wrong.
std::vector<TowerPoint> solve_fiber(Stage stage, const CurveData& data, const Complex& base);

/// Analytic continuation of one point to a nearby base value: square-root
/// coordinates take the sign nearest the previous value, the u-coordinate is
/// Newton-polished from the previous value. Returns false if Newton fails,
/// a square-root sign is ambiguous, or a defining equation is violated.
bool continue_point(const CurveData& data, const TowerPoint& prev, const Complex& base, TowerPoint& out,
                    double* residual_out = nullptr);

/// continue_point for a whole fiber, sharing the square roots and the
/// [3]-preimage solves between points that agree on them.
bool continue_fiber(const CurveData& data, const std::vector<TowerPoint>& prev, const Complex& base,
                    std::vector<TowerPoint>& out, double* max_residual = nullptr);

/// Largest relative residual of the defining equations of the stage.
double residual(const CurveData& data, const TowerPoint& p, const Complex& base);

/// Residual bound 10^(-bits/4) used to accept points.
double residual_tolerance(unsigned bits);

/// Max-norm distance between coordinate tuples, in double precision.
double point_distance(const TowerPoint& a, const TowerPoint& b);
/// Smallest pairwise point_distance in a fiber.
double min_separation(const std::vector<TowerPoint>& fiber);

/// Coordinates rounded to double, one row per point.
std::vector<std::vector<std::complex<double>>> to_double_coords(const std::vector<TowerPoint>& fiber);
double min_separation(const std::vector<std::vector<std::complex<double>>>& fiber);

}  // namespace prill
