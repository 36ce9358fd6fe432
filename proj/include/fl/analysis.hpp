#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fl/geometry.hpp"
#include "fl/mechanisms.hpp"
#include "fl/optimal.hpp"

namespace fl {

struct ARReport {
  double mech_cost = 0.0;
  double opt_cost = 0.0;
  double ratio = 1.0;
  Point mech_point;
  Point opt_point;
};

/// Mechanism social cost over optimal social cost. When both costs are below
/// 1e-12 (all points coincident) the ratio is defined as 1.
ARReport approximation_ratio(const MechanismSpec& spec, const Profile& profile,
                             NormOrder order, const SolverConfig& cfg = {});

/// Member of the worst-case family: m agents at (t,0), one at (-t,0), m at
/// (0,1). `alpha` carries the closed-form minisum ratio of the family.
struct FamilyPoint {
  int m = 1;
  double t = 0.0;
  double alpha = 0.0;
  Profile profile;
};

FamilyPoint eta_profile(int m, double t);

/// Closed form ((m+1)t + m) / ((m+1) sqrt(t^2+1)); equals the minisum ratio
/// of the family once t is large enough that (0,1) is the optimal location.
double alpha(int m, double t);

/// sqrt(2) * sqrt(n^2+1) / (n+1), the worst-case minisum ratio of the
/// coordinate-wise median for odd n. Attained on the family at t = (m+1)/m.
double theorem1_value(int n);
double theorem1_tstar(int n);

struct TGrid {
  double t_min = 0.0;
  double t_max = 0.0;
  double step = 1.0;
};

struct FamilyScanRow {
  double t = 0.0;
  double alpha = 0.0;
  double ar = 0.0;
};

struct FamilyScanResult {
  std::vector<FamilyScanRow> rows;
  double max_ar = 0.0;
  double argmax_t = 0.0;
  /// Set when the grid straddles the formula maximizer.
  bool covers_tstar = false;
  bool max_matches_formula = false;
  bool argmax_near_tstar = false;
};

/// Minisum ratio of the coordinate-wise median along the family grid.
FamilyScanResult family_scan(int m, const TGrid& grid);

struct ScanConfig {
  long samples = 0;
  std::uint64_t seed = 0;
  bool keep_samples = false;
  /// Extra starting candidates evaluated and refined alongside the random
  /// draws (known hard profiles).
  std::vector<Profile> corpus;
  int refine_top = 8;
  int threads = 1;
};

struct ScanResult {
  double best_ratio = 0.0;
  Profile best_profile;
  long samples = 0;
  std::uint64_t seed = 0;
  /// Retained per-sample ratios when requested (indexed by sample).
  std::vector<double> sample_ratios;
};

/// Random-restart worst-case search: seeded profiles in [-1,1]^2, ratio
/// evaluation, then coordinate descent on the best candidates with a grid
/// step shrinking by 4x over five rounds. Deterministic given the seed and
/// independent of shard evaluation order.
ScanResult worst_case_scan(const MechanismSpec& spec, int n, NormOrder order,
                           const ScanConfig& cfg);
ScanResult worst_case_scan(const MechanismSpec& spec, int n, NormOrder order,
                           long samples, std::uint64_t seed);

struct PnormBounds {
  double lower = 0.0;
  double upper = 0.0;
  /// Known exact value when the formula bound is not tight (the max norm).
  std::optional<double> exact;
};

/// (2^(1-1/p), 2^(3/2-2/p)) for p >= 2 or the infinite order.
PnormBounds pnorm_bounds(NormOrder order);

struct DeviationReport {
  int agent = 0;
  Point true_point;
  Point deviation;
  /// Decrease of the agent's true distance achieved by the deviation.
  double gain = 0.0;
};

struct DeviationGrid {
  int resolution = 41;
  /// Bounding-box inflation factor for the deviation space.
  double inflation = 0.5;
  int refinements = 0;
};

/// Best manipulation found over the deviation grid (plus the agent's true
/// point and the mechanism output), across all agents.
DeviationReport sp_deviation_search(const MechanismSpec& spec, const Profile& profile,
                                    const DeviationGrid& grid = {});

struct DominanceResult {
  double max_ar = 0.0;
  Point shift;
  int variant = 0;  // 0 identity, 1 reflect about a-axis, 2 reflect about b-axis
  double theorem_value = 0.0;
  int n = 0;
};

/// Adversarial evaluation of a median voting scheme on translations and axis
/// reflections of the worst-case family profile at t = (m+1)/m. Returns the
/// maximum minisum ratio found over the searched family.
DominanceResult dominance_experiment(const MechanismSpec& scheme, int m);

struct ConjectureRow {
  int n = 0;
  double family_ratio = 0.0;
  double scan_ratio = 0.0;
  double best_found = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

/// Evidence table for the p-norm ratio of the coordinate-wise median: the
/// embedded one-dimensional family (m+1 agents at the origin, m at (1,0))
/// with a ternary-search optimum cross-checked against the grid oracle, plus
/// a random worst-case scan per n.
std::vector<ConjectureRow> conjecture_probe(double p, const std::vector<int>& n_list,
                                            long samples, std::uint64_t seed);

/// Ratio of the one-dimensional embedded family for one n (exposed for
/// tests; conjecture_probe aggregates it).
double one_dimensional_family_ratio(int n, double p);

/// Known hard profiles for odd n: the worst-case family at t = (m+1)/m and
/// the one-dimensional two-cluster family. Used as scan corpus candidates.
std::vector<Profile> builtin_hard_profiles(int n);

}  // namespace fl
