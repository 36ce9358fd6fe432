#include "fl/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fl {

Point operator+(const Point& y, const Point& z) { return {y.a + z.a, y.b + z.b}; }
Point operator-(const Point& y, const Point& z) { return {y.a - z.a, y.b - z.b}; }
Point operator*(double s, const Point& y) { return {s * y.a, s * y.b}; }

double distance(const Point& y, const Point& z) {
  return std::hypot(y.a - z.a, y.b - z.b);
}

Point rotate(const Point& y, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {y.a * c - y.b * s, y.a * s + y.b * c};
}

Profile::Profile(std::vector<Point> pts) : points_(std::move(pts)) {
  if (points_.empty()) {
    throw std::invalid_argument("profile must contain at least one point");
  }
  for (const Point& p : points_) {
    if (!std::isfinite(p.a) || !std::isfinite(p.b)) {
      throw std::invalid_argument("profile coordinates must be finite");
    }
  }
}

double Profile::spread() const {
  if (points_.empty()) return 0.0;
  double alo = points_[0].a, ahi = points_[0].a;
  double blo = points_[0].b, bhi = points_[0].b;
  for (const Point& p : points_) {
    alo = std::min(alo, p.a);
    ahi = std::max(ahi, p.a);
    blo = std::min(blo, p.b);
    bhi = std::max(bhi, p.b);
  }
  return std::max(ahi - alo, bhi - blo);
}

NormOrder NormOrder::finite(double p) {
  if (!std::isfinite(p) || p < 1.0) {
    throw std::invalid_argument("norm order must be a finite real >= 1");
  }
  return NormOrder(p);
}

NormOrder NormOrder::infinity() noexcept {
  return NormOrder(std::numeric_limits<double>::infinity());
}

bool NormOrder::is_infinite() const noexcept { return std::isinf(p_); }

double NormOrder::value() const {
  if (is_infinite()) {
    throw std::logic_error("value() called on the infinite norm order");
  }
  return p_;
}

double social_cost(const Point& y, const Profile& profile, NormOrder order) {
  if (profile.empty()) {
    throw std::invalid_argument("social cost over an empty profile");
  }
  if (order.is_infinite()) {
    double worst = 0.0;
    for (const Point& x : profile.points()) worst = std::max(worst, distance(y, x));
    return worst;
  }
  const double p = order.value();
  if (p == 1.0) {
    double sum = 0.0;
    for (const Point& x : profile.points()) sum += distance(y, x);
    return sum;
  }
  if (p == 2.0) {
    double sum = 0.0;
    for (const Point& x : profile.points()) {
      const double da = y.a - x.a, db = y.b - x.b;
      sum += da * da + db * db;
    }
    return std::sqrt(sum);
  }
  // Factor out the largest distance so the powers stay in [0,1].
  double dmax = 0.0;
  for (const Point& x : profile.points()) dmax = std::max(dmax, distance(y, x));
  if (dmax == 0.0) return 0.0;
  double sum = 0.0;
  for (const Point& x : profile.points()) {
    sum += std::pow(distance(y, x) / dmax, p);
  }
  return dmax * std::pow(sum, 1.0 / p);
}

double median_1d(std::vector<double> values, MedianRule rule) {
  if (values.empty()) {
    throw std::invalid_argument("median of an empty list");
  }
  for (double v : values) {
    if (std::isnan(v)) throw std::invalid_argument("median input contains NaN");
  }
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return rule == MedianRule::kLower ? values[n / 2 - 1] : values[n / 2];
}

Interval median_stability_interval(const std::vector<double>& values,
                                   std::size_t index) {
  const std::size_t n = values.size();
  if (n % 2 == 0) {
    throw std::invalid_argument("median stability interval needs odd length");
  }
  if (index >= n) throw std::out_of_range("median stability index");
  const double inf = std::numeric_limits<double>::infinity();
  if (n == 1) return {-inf, inf};

  const double med = median_1d(values, MedianRule::kLower);

  // With the chosen element removed, the median of the full list equals
  // clamp(v, o_m, o_{m+1}) where o are the order statistics of the rest.
  std::vector<double> rest;
  rest.reserve(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    if (i != index) rest.push_back(values[i]);
  }
  std::sort(rest.begin(), rest.end());
  const std::size_t m = (n - 1) / 2;
  const double lo_stat = rest[m - 1];
  const double hi_stat = rest[m];

  Interval out{med, med};
  if (lo_stat == med) out.lo = -inf;
  if (hi_stat == med) out.hi = inf;
  return out;
}

}  // namespace fl
