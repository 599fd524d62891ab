#pragma once

// The degree-36 tower over one genus-2 curve, and its certificate.
//
//   X --2--> C2 --9--> C1 --2--> Y --2--> P
//   C1 --2--> E --2--> P,  C2 --2--> E' --[3]--> E,  E' --u--> P',  E0 --2--> P'
//
// Every stage over the first line P is computed numerically over one common
// carousel; Y, E, C1 and C2 are also assembled symbolically from permutations.

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "prill/covers.hpp"
#include "prill/elliptic.hpp"
#include "prill/monodromy.hpp"
#include "prill/tower.hpp"

namespace prill {

struct BuildOptions {
  unsigned precision_bits = 212;
  unsigned max_precision_bits = 848;
  double kappa = 0.25;
  unsigned threads = 0;
};

struct DecimalComplex {
  std::string re, im;
};

/// Covers assembled from permutations alone, over the first-line carousel base.
struct SymbolicTower {
  Cover Y, E, C1, E3, C2;
  CoverMap C1_to_Y, C1_to_E, E3_to_E, C2_to_C1, C2_to_E3;
  // Components of the normalized fiber products; C1 and C2 are the first.
  Index C1_components = 0, C2_components = 0;
};

/// Numeric maps between stages over P, read off the base fiber coordinates.
struct NumericMaps {
  CoverMap X_to_C2, C2_to_C1, C1_to_Y, C1_to_E, X_to_Y;
};

struct TowerModel {
  TowerInput input;
  BuildOptions options;
  std::complex<double> chart_center;
  DecimalComplex weierstrass_a, weierstrass_b;
  std::array<DecimalComplex, 4> D;  // u-coordinates of E[3] \ O
  DecimalComplex j_E0;              // j of the double cover branched over D
  double j_E0_abs = 0.0;
  std::array<StageMonodromy, kAllStages.size()> stages;
  SymbolicTower symbolic;
  NumericMaps maps;

  const StageMonodromy& stage(Stage s) const { return stages[static_cast<std::size_t>(s)]; }
  StageMonodromy& stage(Stage s) { return stages[static_cast<std::size_t>(s)]; }
};

/// Throws DegenerateInput or TrackingFailure.
TowerModel build_tower(const TowerInput& input, const BuildOptions& options = {});

/// Y, E, C1, E3 and C2 from their defining permutations over `base`, whose
/// labels s1..s6 carry the branching; other labels get the identity.
SymbolicTower symbolic_tower(const MarkedBase& base);

struct EngineComparison {
  std::string stage;
  bool conjugate = false;
  bool witness_verified = false;
  std::optional<Permutation> witness;  // symbolic -> numeric relabeling
  std::vector<Permutation> symbolic, numeric;
  std::string error;
};

struct CrossValidation {
  std::vector<EngineComparison> comparisons;  // C1, then C2 over P
  bool agree() const;
};

CrossValidation cross_validate(const TowerModel& tower);

struct Verdict {
  std::string name;
  bool passed = false;
  nlohmann::json witness;
};

struct Certificate {
  bool passed = false;
  std::vector<Verdict> verdicts;
  CrossValidation cross_validation;
  HesseResult hesse;
  nlohmann::json stages;   // per-stage summaries
  nlohmann::json symbolic;

  const Verdict* find(const std::string& name) const;
};

Certificate certify(const TowerModel& tower);

/// Certificate as JSON: schema 1, sorted keys, no timings. All reals are
/// decimal strings, permutations are image arrays.
nlohmann::json to_json(const TowerModel& tower, const Certificate& cert);
std::string certificate_text(const TowerModel& tower, const Certificate& cert);

/// DOT graph of the eight curves, labeled with genus, edges with degree.
std::string emit_diagram(const TowerModel& tower);

/// Six distinct Gaussian rationals with denominators 4, drawn from `seed`.
TowerInput random_input(std::uint64_t seed, int w5_sign = 1);

}  // namespace prill
