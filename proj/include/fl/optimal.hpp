#pragma once

#include <vector>

#include "fl/geometry.hpp"

namespace fl {

struct SolverConfig {
  double tolerance = 1e-10;
  int max_iterations = 100000;
  /// Grid oracle only: nodes per axis for the initial pass. Two local
  /// refinement passes shrink the spacing by 10x each.
  int grid_resolution = 2001;
};

struct OptimalResult {
  Point location;
  double cost = 0.0;
  /// Residual of the optimality condition at `location` (see each solver).
  double certificate = 0.0;
  int iterations = 0;
  bool converged = true;
};

/// Minimizer of sum_i d(y, x_i) (Weiszfeld iteration with anchor handling).
/// The certificate is the norm of the unit-vector sum, with slack equal to
/// the multiplicity of coincident points when the result sits on one.
OptimalResult geometric_median(const Profile& profile, const SolverConfig& cfg = {});

/// Minimizer of the p-norm social cost. Dispatch: p=1 geometric median,
/// p=2 centroid, p=inf minimum enclosing circle center, other finite p
/// damped gradient descent with backtracking on the convex objective.
OptimalResult optimal_location(const Profile& profile, NormOrder order,
                               const SolverConfig& cfg = {});

/// Exhaustive search over the inflated bounding box followed by two 10x
/// local refinements. Deterministic tie-break: lowest cost, then
/// lexicographically smallest (a, b). Independent ground truth for the
/// iterative solvers; the certificate reports the final grid spacing.
OptimalResult grid_oracle(const Profile& profile, NormOrder order,
                          const SolverConfig& cfg = {});

struct Circle {
  Point center;
  double radius = 0.0;
};

/// Smallest circle containing every profile point (Welzl move-to-front,
/// deterministic permutation).
Circle minimum_enclosing_circle(const Profile& profile);

/// Gradient of sum_i d(y, x_i)^p at y, for finite p > 1. Exposed so tests
/// can check it against finite differences.
Point pnorm_power_gradient(const Point& y, const Profile& profile, double p);

/// Norm of the unit-vector optimality residual at y, with multiplicity slack
/// at coincident points: ||sum over points away from y of (x_i-y)/d|| minus
/// the number of points at y, clamped at zero.
double geometric_median_certificate(const Point& y, const Profile& profile);

}  // namespace fl
