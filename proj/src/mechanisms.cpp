#include "fl/mechanisms.hpp"

#include <cmath>
#include <stdexcept>

#include "fl/optimal.hpp"

namespace fl {
namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

MedianRule flip(MedianRule r) {
  return r == MedianRule::kLower ? MedianRule::kUpper : MedianRule::kLower;
}

}  // namespace

MechanismSpec MechanismSpec::coordinate_wise_median(MedianRule tie) {
  return cwm_scheme(0.0, {}, tie);
}

MechanismSpec MechanismSpec::cwm_scheme(double theta, std::vector<ExtendedPoint> constants,
                                        MedianRule tie) {
  if (!std::isfinite(theta)) throw std::invalid_argument("rotation angle must be finite");
  // Canonical range [0, pi). A half-turn negates both coordinates, which
  // mirrors the median: each reduction by pi flips the tie rule.
  theta = std::fmod(theta, 2.0 * kPi);
  if (theta < 0.0) theta += 2.0 * kPi;
  while (theta >= kPi) {
    theta -= kPi;
    tie = flip(tie);
  }
  if (theta < 0.0) theta = 0.0;

  bool has_infinite = false;
  for (const ExtendedPoint& c : constants) {
    if (std::isnan(c.a) || std::isnan(c.b)) {
      throw std::invalid_argument("constant point coordinates must not be NaN");
    }
    if (std::isinf(c.a) || std::isinf(c.b)) has_infinite = true;
  }
  if (has_infinite && theta != 0.0) {
    throw std::invalid_argument(
        "schemes with infinite constant coordinates require a zero rotation");
  }

  MechanismSpec spec;
  spec.kind_ = MechanismKind::kCwmScheme;
  spec.theta_ = theta;
  spec.constants_ = std::move(constants);
  spec.tie_ = tie;
  return spec;
}

MechanismSpec MechanismSpec::geometric_median_mechanism() {
  MechanismSpec spec;
  spec.kind_ = MechanismKind::kGeometricMedian;
  return spec;
}

Point apply_mechanism(const MechanismSpec& spec, const Profile& profile) {
  if (profile.empty()) throw std::invalid_argument("empty profile");
  if (spec.kind() == MechanismKind::kGeometricMedian) {
    return geometric_median(profile).location;
  }

  const double theta = spec.theta();
  std::vector<double> as, bs;
  as.reserve(profile.size() + spec.constants().size());
  bs.reserve(profile.size() + spec.constants().size());
  for (const Point& x : profile.points()) {
    const Point r = theta == 0.0 ? x : rotate(x, -theta);
    as.push_back(r.a);
    bs.push_back(r.b);
  }
  for (const ExtendedPoint& c : spec.constants()) {
    if (theta == 0.0 || (std::isinf(c.a) || std::isinf(c.b))) {
      as.push_back(c.a);
      bs.push_back(c.b);
    } else {
      const Point r = rotate(Point{c.a, c.b}, -theta);
      as.push_back(r.a);
      bs.push_back(r.b);
    }
  }

  const Point med{median_1d(as, spec.tie_rule()), median_1d(bs, spec.tie_rule())};
  if (!std::isfinite(med.a) || !std::isfinite(med.b)) {
    throw std::domain_error("scheme output is not finite (infinite constants dominate)");
  }
  return theta == 0.0 ? med : rotate(med, theta);
}

Point coordinate_wise_median(const Profile& profile) {
  if (profile.empty()) throw std::invalid_argument("empty profile");
  if (profile.size() % 2 == 0) {
    throw std::invalid_argument(
        "coordinate_wise_median needs odd n; use apply_mechanism with a tie rule");
  }
  return apply_mechanism(MechanismSpec::coordinate_wise_median(), profile);
}

Point rotated_cm(const Profile& profile, double theta) {
  if (profile.size() % 2 == 0) {
    throw std::invalid_argument("rotated_cm needs odd n");
  }
  return apply_mechanism(MechanismSpec::cwm_scheme(theta, {}), profile);
}

}  // namespace fl
