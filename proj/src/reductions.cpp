#include "fl/reductions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include "fl/analysis.hpp"
#include "fl/mechanisms.hpp"
#include "fl/optimal.hpp"

namespace fl {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double diameter(const Profile& profile) {
  double d = 0.0;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    for (std::size_t j = i + 1; j < profile.size(); ++j) {
      d = std::max(d, distance(profile[i], profile[j]));
    }
  }
  return d;
}

double axis_tolerance(const Profile& profile) {
  return 1e-9 * (1.0 + diameter(profile));
}

void require_odd(const Profile& profile, const char* what) {
  if (profile.empty() || profile.size() % 2 == 0) {
    throw std::invalid_argument(std::string(what) + " needs an odd number of agents");
  }
}

void require_centered(const Profile& profile, const char* what) {
  require_odd(profile, what);
  const Point c = coordinate_wise_median(profile);
  if (std::abs(c.a) > 1e-12 || std::abs(c.b) > 1e-12) {
    throw std::invalid_argument(std::string(what) + " needs a centered profile");
  }
}

std::vector<double> coords_a(const Profile& p) {
  std::vector<double> v;
  v.reserve(p.size());
  for (const Point& x : p.points()) v.push_back(x.a);
  return v;
}

std::vector<double> coords_b(const Profile& p) {
  std::vector<double> v;
  v.reserve(p.size());
  for (const Point& x : p.points()) v.push_back(x.b);
  return v;
}

// Largest fraction of the segment from profile[i] toward `goal` that keeps
// both coordinate medians fixed. The stability bounds sit at the median
// itself, so a binding bound is always an axis landing.
double allowed_fraction(const Profile& profile, std::size_t i, const Point& goal) {
  const Point x = profile[i];
  const double da = goal.a - x.a;
  const double db = goal.b - x.b;
  double s_max = 1.0;
  if (da != 0.0) {
    const Interval ia = median_stability_interval(coords_a(profile), i);
    const double bound = da > 0.0 ? ia.hi : ia.lo;
    if (std::isfinite(bound)) s_max = std::min(s_max, (bound - x.a) / da);
  }
  if (db != 0.0) {
    const Interval ib = median_stability_interval(coords_b(profile), i);
    const double bound = db > 0.0 ? ib.hi : ib.lo;
    if (std::isfinite(bound)) s_max = std::min(s_max, (bound - x.b) / db);
  }
  return std::max(0.0, s_max);
}

// Clamp a landed point into the per-coordinate stability intervals so the
// medians are preserved exactly despite rounding in the fraction.
Point clamp_into_stability(const Profile& profile, std::size_t i, Point landed) {
  const Interval ia = median_stability_interval(coords_a(profile), i);
  const Interval ib = median_stability_interval(coords_b(profile), i);
  landed.a = std::min(std::max(landed.a, ia.lo), ia.hi);
  landed.b = std::min(std::max(landed.b, ib.lo), ib.hi);
  return landed;
}

struct AxisClusters {
  // Indices per half-axis (strictly off the origin) plus points at the
  // geometric median and unclassified leftovers.
  std::vector<std::size_t> pos_a, neg_a, pos_b, neg_b, at_g, origin, other;
};

AxisClusters classify(const Profile& profile, const Point& g, double tol) {
  AxisClusters out;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const Point& x = profile[i];
    if (distance(x, g) <= tol) {
      out.at_g.push_back(i);
    } else if (std::abs(x.a) <= tol && std::abs(x.b) <= tol) {
      out.origin.push_back(i);
    } else if (std::abs(x.b) <= tol) {
      (x.a > 0.0 ? out.pos_a : out.neg_a).push_back(i);
    } else if (std::abs(x.a) <= tol) {
      (x.b > 0.0 ? out.pos_b : out.neg_b).push_back(i);
    } else {
      out.other.push_back(i);
    }
  }
  return out;
}

bool same_location(const Profile& profile, const std::vector<std::size_t>& idx,
                   double tol) {
  for (std::size_t k = 1; k < idx.size(); ++k) {
    if (distance(profile[idx[0]], profile[idx[k]]) > tol) return false;
  }
  return true;
}

double minisum_ar(const Profile& profile) {
  return approximation_ratio(MechanismSpec::coordinate_wise_median(), profile,
                             NormOrder::finite(1.0))
      .ratio;
}

}  // namespace

const char* step_name_label(StepName name) {
  switch (name) {
    case StepName::kCenter: return "center";
    case StepName::kTowardGm: return "toward_gm";
    case StepName::kOrient: return "orient";
    case StepName::kReduceAxes: return "reduce_axes";
    case StepName::kConvexity: return "convexity";
    case StepName::kDoubleRotation: return "double_rotation";
    case StepName::kGeometricToAxis: return "geometric_to_axis";
    case StepName::kIsosceles: return "isosceles";
    case StepName::kNormalize: return "normalize";
  }
  return "?";
}

Profile center_profile(const Profile& profile) {
  require_odd(profile, "center_profile");
  const Point c = coordinate_wise_median(profile);
  Profile out = profile;
  for (Point& x : out.points()) {
    x.a -= c.a;
    x.b -= c.b;
  }
  return out;
}

Profile toward_gm_sweep(const Profile& profile) {
  require_centered(profile, "toward_gm_sweep");
  const double tol = axis_tolerance(profile);
  const Point g = geometric_median(profile).location;

  Profile out = profile;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Point x = out[i];
    const double da = g.a - x.a;
    const double db = g.b - x.b;
    if (da == 0.0 && db == 0.0) continue;

    const double s_max = allowed_fraction(out, i, g);

    // Candidate landings in the axis cross (or the geometric median itself),
    // furthest along the segment first.
    double best_s = -1.0;
    Point best_land;
    auto offer = [&](double s, Point land) {
      if (s > best_s) {
        best_s = s;
        best_land = land;
      }
    };
    const double eps = 1e-12;
    if (s_max >= 1.0 - eps) offer(1.0, g);
    if (da != 0.0) {
      const double s = -x.a / da;
      if (s >= 0.0 && s <= s_max + eps) offer(s, {0.0, x.b + s * db});
    }
    if (db != 0.0) {
      const double s = -x.b / db;
      if (s >= 0.0 && s <= s_max + eps) offer(s, {x.a + s * da, 0.0});
    }
    if (std::abs(x.a) <= tol || std::abs(x.b) <= tol) offer(0.0, x);

    if (best_s > 0.0) {
      out.points()[i] = clamp_into_stability(out, i, best_land);
    }
  }
  return out;
}

Profile orient_profile(const Profile& profile) {
  require_centered(profile, "orient_profile");
  const Point g = geometric_median(profile).location;
  const bool flip_a = g.a < 0.0;
  const bool flip_b = g.b < 0.0;
  const bool swap = std::abs(g.a) > std::abs(g.b);
  Profile out = profile;
  for (Point& x : out.points()) {
    if (flip_a) x.a = -x.a;
    if (flip_b) x.b = -x.b;
    if (swap) std::swap(x.a, x.b);
  }
  return out;
}

Profile reduce_axes(const Profile& profile) {
  require_centered(profile, "reduce_axes");
  const double tol = axis_tolerance(profile);
  const Point g = geometric_median(profile).location;
  if (g.b < g.a - tol || g.a < -tol) {
    throw std::invalid_argument("reduce_axes needs an oriented profile (0 <= a_g <= b_g)");
  }

  Profile out = profile;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Point x = out[i];
    if (!(std::abs(x.a) <= tol && x.b < -tol)) continue;
    // Move (0, -a) to (-a, 0); legal only when the a-median tolerates the
    // new negative value.
    const Interval ia = median_stability_interval(coords_a(out), i);
    const Interval ib = median_stability_interval(coords_b(out), i);
    if (x.b < ia.lo || !ib.contains(0.0)) continue;
    out.points()[i] = {x.b, 0.0};
  }
  return out;
}

Profile convexity_merge(const Profile& profile, HalfAxis axis) {
  require_centered(profile, "convexity_merge");
  const double tol = axis_tolerance(profile);
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const Point& x = profile[i];
    const bool on = [&] {
      switch (axis) {
        case HalfAxis::kPosA: return std::abs(x.b) <= tol && x.a > tol;
        case HalfAxis::kNegA: return std::abs(x.b) <= tol && x.a < -tol;
        case HalfAxis::kPosB: return std::abs(x.a) <= tol && x.b > tol;
        case HalfAxis::kNegB: return std::abs(x.a) <= tol && x.b < -tol;
      }
      return false;
    }();
    if (on) members.push_back(i);
  }
  if (members.size() <= 1) return profile;

  const bool on_a_axis = axis == HalfAxis::kPosA || axis == HalfAxis::kNegA;
  double mean = 0.0;
  for (std::size_t i : members) {
    mean += on_a_axis ? profile[i].a : profile[i].b;
  }
  mean /= members.size();

  Profile out = profile;
  for (std::size_t i : members) {
    out.points()[i] = on_a_axis ? Point{mean, 0.0} : Point{0.0, mean};
  }
  return out;
}

Profile double_rotation(const Profile& profile) {
  require_centered(profile, "double_rotation");
  const double tol = axis_tolerance(profile);
  const Point g = geometric_median(profile).location;
  if (!(g.a > tol) || g.b < g.a - tol) return profile;  // premises absent

  const AxisClusters cl = classify(profile, g, tol);
  if (cl.at_g.empty() || cl.neg_a.empty()) return profile;
  if (cl.neg_a.size() != cl.at_g.size() + 1) return profile;
  if (!cl.other.empty()) return profile;
  if (!same_location(profile, cl.neg_a, tol)) return profile;

  const double away = -profile[cl.neg_a[0]].a;  // the lemma's a > 0
  const double alpha = std::hypot(g.a, g.b);
  const double beta = away + 2.0 * g.a;

  Profile out = profile;
  for (std::size_t i : cl.at_g) out.points()[i] = {0.0, alpha};
  for (std::size_t k = 0; k + 1 < cl.neg_a.size(); ++k) {
    out.points()[cl.neg_a[k]] = {beta, 0.0};
  }
  const Point c = coordinate_wise_median(out);
  if (std::abs(c.a) > 1e-12 || std::abs(c.b) > 1e-12) return profile;
  return out;
}

Profile geometric_to_axis(const Profile& profile) {
  require_centered(profile, "geometric_to_axis");
  const double tol = axis_tolerance(profile);
  const Point g = geometric_median(profile).location;
  if (!(g.a > tol) || g.b < g.a - tol) return profile;  // median already on axis

  const AxisClusters cl = classify(profile, g, tol);
  const std::size_t m = cl.pos_b.size();
  if (m == 0 || cl.pos_a.size() != m) return profile;
  if (cl.neg_a.size() + cl.origin.size() != 1) return profile;
  if (!cl.at_g.empty() || !cl.other.empty() || !cl.neg_b.empty()) return profile;
  if (!same_location(profile, cl.pos_b, tol) || !same_location(profile, cl.pos_a, tol)) {
    return profile;
  }

  Profile out = profile;
  for (std::size_t i : cl.pos_b) out.points()[i] = g;
  const Point c = coordinate_wise_median(out);
  for (Point& x : out.points()) {
    x.a -= c.a;
    x.b -= c.b;
  }
  return out;
}

Profile isosceles_balance(const Profile& profile) {
  require_centered(profile, "isosceles_balance");
  const double tol = axis_tolerance(profile);

  // Layout: m at (a,0), one at (-b,0), m at (0,c) with the geometric median
  // at (0,c).
  const AxisClusters cl = classify(profile, {kInf, kInf}, tol);  // no at-g bucket
  const std::size_t m = cl.pos_a.size();
  if (m == 0 || cl.pos_b.size() != m) return profile;
  if (cl.neg_a.size() + cl.origin.size() != 1) return profile;
  if (!cl.neg_b.empty() || !cl.other.empty()) return profile;
  if (!same_location(profile, cl.pos_a, tol) || !same_location(profile, cl.pos_b, tol)) {
    return profile;
  }
  const Point top = profile[cl.pos_b[0]];
  if (geometric_median_certificate(top, profile) > 1e-9) return profile;

  const double a = profile[cl.pos_a[0]].a;
  const double b = cl.neg_a.empty() ? 0.0 : -profile[cl.neg_a[0]].a;
  const double w = (m * a + b) / (m + 1);

  Profile out = profile;
  for (std::size_t i : cl.pos_a) out.points()[i] = {w, 0.0};
  const std::size_t left = cl.neg_a.empty() ? cl.origin[0] : cl.neg_a[0];
  out.points()[left] = {-w, 0.0};
  return out;
}

namespace {

struct EtaMatch {
  double t = 0.0;
  double top = 0.0;  // height of the b-axis cluster
};

// Recognize the family layout m at (w,0), 1 at (-w,0), m at (0,c).
std::optional<EtaMatch> match_family_layout(const Profile& profile) {
  const double tol = axis_tolerance(profile);
  const AxisClusters cl = classify(profile, {kInf, kInf}, tol);
  const std::size_t m = cl.pos_a.size();
  if (m == 0 || cl.pos_b.size() != m || cl.neg_a.size() != 1) return std::nullopt;
  if (!cl.neg_b.empty() || !cl.origin.empty() || !cl.other.empty()) return std::nullopt;
  if (!same_location(profile, cl.pos_a, tol) || !same_location(profile, cl.pos_b, tol)) {
    return std::nullopt;
  }
  const double w = profile[cl.pos_a[0]].a;
  const double w_left = -profile[cl.neg_a[0]].a;
  const double c = profile[cl.pos_b[0]].b;
  if (std::abs(w - w_left) > tol || !(c > tol)) return std::nullopt;
  return EtaMatch{w / c, c};
}

}  // namespace

ReductionTrace reduce_to_icp(const Profile& profile) {
  if (profile.size() < 3 || profile.size() % 2 == 0) {
    throw std::invalid_argument("reduce_to_icp needs odd n >= 3");
  }
  const int m = static_cast<int>((profile.size() - 1) / 2);

  ReductionTrace trace;
  Profile cur = profile;
  double cur_ar = minisum_ar(cur);
  auto push = [&](StepName name, Profile next) {
    const double next_ar = minisum_ar(next);
    trace.steps.push_back({name, cur, next, cur_ar, next_ar});
    cur = std::move(next);
    cur_ar = next_ar;
  };

  push(StepName::kCenter, center_profile(cur));
  push(StepName::kTowardGm, toward_gm_sweep(cur));

  for (int round = 0; round < 3; ++round) {
    push(StepName::kOrient, orient_profile(cur));
    push(StepName::kReduceAxes, reduce_axes(cur));
    push(StepName::kConvexity, convexity_merge(cur, HalfAxis::kPosA));
    push(StepName::kConvexity, convexity_merge(cur, HalfAxis::kNegA));
    push(StepName::kConvexity, convexity_merge(cur, HalfAxis::kPosB));
    const double tol = axis_tolerance(cur);
    const Point g = geometric_median(cur).location;
    const AxisClusters cl = classify(cur, g, tol);
    if (cl.neg_b.empty() && g.a >= -tol && g.b >= g.a - tol) break;
  }

  push(StepName::kDoubleRotation, double_rotation(cur));
  push(StepName::kConvexity, convexity_merge(cur, HalfAxis::kPosA));
  push(StepName::kConvexity, convexity_merge(cur, HalfAxis::kPosB));
  push(StepName::kGeometricToAxis, geometric_to_axis(cur));
  push(StepName::kTowardGm, toward_gm_sweep(cur));
  push(StepName::kIsosceles, isosceles_balance(cur));

  const std::optional<EtaMatch> match = match_family_layout(cur);
  if (match) {
    Profile scaled = cur;
    for (Point& x : scaled.points()) {
      x.a /= match->top;
      x.b /= match->top;
    }
    // Snap the clusters to the exact family coordinates.
    const double tol = axis_tolerance(scaled);
    for (Point& x : scaled.points()) {
      if (std::abs(x.a) <= tol) x.a = 0.0;
      if (std::abs(x.b) <= tol) x.b = 0.0;
      if (std::abs(x.b - 1.0) <= tol) x.b = 1.0;
    }
    push(StepName::kNormalize, scaled);
  }

  trace.final = cur;
  const std::optional<EtaMatch> final_match = match_family_layout(cur);
  const double t_min = std::sqrt((2.0 * m + 1.0) / (2.0 * m - 1.0));
  if (final_match && std::abs(final_match->top - 1.0) <= 1e-9 &&
      final_match->t >= t_min - 1e-6 &&
      geometric_median_certificate({0.0, 1.0}, cur) <= 1e-9) {
    trace.status = TraceStatus::kReduced;
    trace.final_t = final_match->t;
  } else {
    trace.status = TraceStatus::kUnreduced;
    trace.note = final_match ? "family parameter below the feasible range"
                             : "final profile does not match the family layout";
  }
  return trace;
}

CpCheck cp_membership(const Profile& profile) {
  if (profile.empty() || profile.size() % 2 == 0) {
    return {false, "membership is defined for odd profiles"};
  }
  const double tol = axis_tolerance(profile);
  const Point c = coordinate_wise_median(profile);
  if (std::abs(c.a) > 1e-12 * (1.0 + diameter(profile)) ||
      std::abs(c.b) > 1e-12 * (1.0 + diameter(profile))) {
    return {false, "coordinate-wise median is not the origin"};
  }
  const Point g = geometric_median(profile).location;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const Point& x = profile[i];
    const bool on_axis = std::abs(x.a) <= tol || std::abs(x.b) <= tol;
    const bool at_g = distance(x, g) <= tol;
    if (!on_axis && !at_g) {
      return {false, "point " + std::to_string(i) + " is off the axes and away from the geometric median"};
    }
  }
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const Point& x = profile[i];
    const double gap = distance(x, g);
    if (gap <= tol) continue;
    const double slack = allowed_fraction(profile, i, g) * gap;
    if (slack > tol) {
      return {false, "point " + std::to_string(i) + " has median slack toward the geometric median"};
    }
  }
  return {true, ""};
}

}  // namespace fl
