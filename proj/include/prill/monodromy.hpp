#pragma once

// Numerical monodromy by analytic continuation along a carousel of loops.

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "prill/covers.hpp"
#include "prill/tower.hpp"

namespace prill {

class TrackingFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Segment from the base point to the circle around the target, one full
/// counter-clockwise turn, and the segment back. Parameterized by arc length.
struct LoopPath {
  std::complex<double> base;
  std::complex<double> center;
  double radius = 0.0;
  Index target = 0;

  std::complex<double> entry() const { return center + radius * (base - center) / std::abs(base - center); }
  double segment_length() const { return std::abs(base - center) - radius; }
  double length() const;
  std::complex<double> at(double arc) const;
};

/// Loops around every candidate from one base point, ordered so that the
/// product of their monodromies in path order is the identity.
struct Carousel {
  std::complex<double> base;
  std::vector<Candidate> candidates;  // loop order
  std::vector<LoopPath> loops;
  double min_candidate_separation = 0.0;
  /// Smallest distance from any path to a candidate it does not encircle.
  double margin = 0.0;

  double distance_to_candidates(std::complex<double> x) const;
  MarkedBase marked_base() const;
};

/// Base point to the right of every candidate, with its height chosen to keep
/// the spokes clear of the other candidates. Circle radii are a third of the
/// target's separation, capped by half the clearance of its own spoke.
Carousel build_carousel(std::vector<Candidate> candidates);

struct LoopDiagnostics {
  Index steps = 0;
  Index rejected_steps = 0;
  double min_separation = 0.0;  // smallest fiber separation met
  double max_residual = 0.0;
  double max_step_ratio = 0.0;  // largest displacement / separation accepted
};

struct TrackOptions {
  /// Step bound as a fraction of the distance to the nearest candidate.
  double kappa = 0.25;
  Index max_steps = 500000;
};

/// Continues `fiber` (solved at the carousel base) around loop `loop` and
/// returns sigma with end point i matching start point sigma(i). A step is
/// accepted only if every point continues, meets the residual bound, and moves
/// by less than a third of the fiber separation. Throws TrackingFailure.
Permutation track_loop(const CurveData& data, const Carousel& carousel, Index loop, const std::vector<TowerPoint>& fiber,
                       const TrackOptions& options, LoopDiagnostics* diagnostics = nullptr);

struct MonodromyOptions {
  unsigned precision_bits = 212;
  unsigned max_precision_bits = 848;
  double kappa = 0.25;
  /// Worker threads for loop tracking; 0 reads PRILL_THREADS, else hardware concurrency.
  unsigned threads = 0;
  std::optional<std::complex<double>> chart_center;
};

struct StageMonodromy {
  Stage stage = Stage::Y;
  unsigned bits = 0;
  Carousel carousel;
  std::vector<TowerPoint> base_fiber;
  std::vector<Permutation> loop_permutations;  // carousel order
  std::vector<LoopDiagnostics> diagnostics;
  std::vector<unsigned> attempted_bits;
  /// One marked point per candidate.
  Cover full;
  /// Candidates with identity monodromy removed.
  Cover reduced;
  std::vector<std::string> spurious;
};

unsigned thread_count(unsigned requested);

/// Solves the fiber at the carousel base and tracks every loop, doubling the
/// precision after a failure (including a failed product relation) up to
/// max_precision_bits. Throws TrackingFailure when all precisions fail.
StageMonodromy monodromy(Stage stage, const TowerInput& input, const Carousel& carousel,
                         const MonodromyOptions& options);

/// Path-order product of the loop permutations, C_1 first.
Permutation path_product(const std::vector<Permutation>& loops);

}  // namespace prill
