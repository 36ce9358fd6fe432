#pragma once

#include <vector>

#include "fl/geometry.hpp"

namespace fl {

/// Constant point of a median voting scheme; coordinates may be +-infinity,
/// which act as order-statistic sentinels in the per-coordinate medians.
struct ExtendedPoint {
  double a = 0.0;
  double b = 0.0;

  friend bool operator==(const ExtendedPoint&, const ExtendedPoint&) = default;
};

enum class MechanismKind { kCwmScheme, kGeometricMedian };

/// A mechanism: either a generalized coordinate-wise median voting scheme
/// (rotation angle, constant points, median tie rule) or the geometric-median
/// mechanism. Angles are canonicalized into [0, pi); reducing by pi flips the
/// tie rule, which is observable only for even vote counts.
class MechanismSpec {
 public:
  static MechanismSpec coordinate_wise_median(MedianRule tie = MedianRule::kLower);
  static MechanismSpec cwm_scheme(double theta, std::vector<ExtendedPoint> constants,
                                  MedianRule tie = MedianRule::kLower);
  static MechanismSpec geometric_median_mechanism();

  MechanismKind kind() const { return kind_; }
  double theta() const { return theta_; }
  const std::vector<ExtendedPoint>& constants() const { return constants_; }
  MedianRule tie_rule() const { return tie_; }

 private:
  MechanismSpec() = default;

  MechanismKind kind_ = MechanismKind::kCwmScheme;
  double theta_ = 0.0;
  std::vector<ExtendedPoint> constants_;
  MedianRule tie_ = MedianRule::kLower;
};

/// Run the mechanism on a profile. Scheme outputs are the per-coordinate
/// medians of the n reports plus the k constants, taken in the rotated
/// coordinate system and mapped back.
Point apply_mechanism(const MechanismSpec& spec, const Profile& profile);

/// Per-coordinate median with no constants, unrotated. Restricted to odd n,
/// where no tie rule is needed; even profiles must go through
/// apply_mechanism with an explicit rule.
Point coordinate_wise_median(const Profile& profile);

/// Coordinate-wise median in axes rotated by theta. Odd n only.
Point rotated_cm(const Profile& profile, double theta);

}  // namespace fl
