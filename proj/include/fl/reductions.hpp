#pragma once

#include <string>
#include <vector>

#include "fl/geometry.hpp"

namespace fl {

enum class StepName {
  kCenter,
  kTowardGm,
  kOrient,
  kReduceAxes,
  kConvexity,
  kDoubleRotation,
  kGeometricToAxis,
  kIsosceles,
  kNormalize,
};

const char* step_name_label(StepName name);

struct ReductionStep {
  StepName name;
  Profile before;
  Profile after;
  double ar_before = 0.0;
  double ar_after = 0.0;
};

enum class TraceStatus { kReduced, kUnreduced };

struct ReductionTrace {
  std::vector<ReductionStep> steps;
  Profile final;
  /// Family parameter of the final profile (only when status is kReduced).
  double final_t = 0.0;
  TraceStatus status = TraceStatus::kUnreduced;
  std::string note;
};

enum class HalfAxis { kPosA, kNegA, kPosB, kNegB };

/// Translate so the coordinate-wise median is exactly the origin. Odd n.
Profile center_profile(const Profile& profile);

/// In agent order, move each point along the segment toward the geometric
/// median as far as the coordinate-wise median allows, landing on an axis or
/// on the geometric median itself. Requires a centered profile.
Profile toward_gm_sweep(const Profile& profile);

/// Apply the axis reflection / swap that puts the geometric median into the
/// closed octant 0 <= a_g <= b_g. Preserves the centered median and the
/// approximation ratio exactly.
Profile orient_profile(const Profile& profile);

/// Move points on the negative b half-axis to the negative a half-axis at
/// equal distance from the origin, when the move keeps the median fixed.
/// Requires a centered profile oriented as in orient_profile.
Profile reduce_axes(const Profile& profile);

/// Replace all points strictly on the given half-axis by their mean.
Profile convexity_merge(const Profile& profile, HalfAxis axis);

/// For the layout with k coincident points on the negative a half-axis and
/// k-1 points on the geometric median (off both axes), move the median
/// points to the b-axis at distance d(g, origin) and all but one of the
/// negative-axis points across, preserving their distance to the geometric
/// median. No-op when the layout or orientation premises do not hold.
Profile double_rotation(const Profile& profile);

/// For the layout 1 point at (-a, 0), m at (0, b), m at (c, 0) with the
/// geometric median off the b-axis, move the b-axis cluster onto the
/// geometric median and recenter. No-op when the layout does not hold.
Profile geometric_to_axis(const Profile& profile);

/// For the layout m points at (a, 0), one at (-b, 0), m at (0, c) with the
/// geometric median at (0, c), rebalance the a-axis points to
/// +-(m a + b)/(m+1), preserving the centered social cost.
Profile isosceles_balance(const Profile& profile);

/// Full pipeline to the isosceles family: center, sweep toward the geometric
/// median, orient, reduce axes, merge, double-rotate, merge, move the
/// geometric median to the axis, rebalance, and rescale so the b-axis
/// cluster sits at (0, 1). Profiles that fall outside the expected layouts
/// are returned with status kUnreduced and the partial trace.
ReductionTrace reduce_to_icp(const Profile& profile);

struct CpCheck {
  bool member = false;
  std::string diagnostic;
};

/// Centered-perpendicular membership: centered median, every point on an
/// axis or at the geometric median, and no point has median slack toward the
/// geometric median (checked through the order-statistic stability
/// intervals, not by sampling).
CpCheck cp_membership(const Profile& profile);

}  // namespace fl
