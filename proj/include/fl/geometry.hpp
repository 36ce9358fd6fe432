#pragma once

#include <cstddef>
#include <vector>

namespace fl {

/// Planar location. Coordinates are always finite; mechanism constant points
/// that may sit at infinity use ExtendedPoint instead.
struct Point {
  double a = 0.0;
  double b = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

Point operator+(const Point& y, const Point& z);
Point operator-(const Point& y, const Point& z);
Point operator*(double s, const Point& y);

/// Euclidean distance.
double distance(const Point& y, const Point& z);

/// Rotate about the origin by angle radians (counter-clockwise).
Point rotate(const Point& y, double angle);

/// Ordered list of agent ideal points. Agent order is significant.
class Profile {
 public:
  Profile() = default;
  explicit Profile(std::vector<Point> pts);

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const Point& operator[](std::size_t i) const { return points_[i]; }
  const std::vector<Point>& points() const { return points_; }
  std::vector<Point>& points() { return points_; }

  /// Largest pairwise coordinate spread (max of the two bbox side lengths).
  double spread() const;

  friend bool operator==(const Profile&, const Profile&) = default;

 private:
  std::vector<Point> points_;
};

/// Order of the social-cost norm: a finite p >= 1 or infinity (max norm).
class NormOrder {
 public:
  static NormOrder finite(double p);
  static NormOrder infinity() noexcept;

  bool is_infinite() const noexcept;
  /// The finite order; must not be called on the infinite case.
  double value() const;

  friend bool operator==(const NormOrder&, const NormOrder&) = default;

 private:
  explicit NormOrder(double p) : p_(p) {}
  double p_;
};

/// Tie rule for even-length medians. For odd lengths both rules agree.
enum class MedianRule { kLower, kUpper };

/// (sum_i d(y, x_i)^p)^(1/p), or max_i d(y, x_i) for the infinite order.
double social_cost(const Point& y, const Profile& profile, NormOrder order);

/// Median of a nonempty list. Even lengths pick the lower or upper of the two
/// middle order statistics according to the rule; this equals inserting one
/// -inf (resp. +inf) phantom value and taking the odd-length median.
double median_1d(std::vector<double> values, MedianRule rule);

/// Closed interval (bounds may be +-inf).
struct Interval {
  double lo;
  double hi;

  bool contains(double v) const { return lo <= v && v <= hi; }
};

/// Interval of replacement values for values[index] that keep the
/// (odd-length) median of the list unchanged.
Interval median_stability_interval(const std::vector<double>& values,
                                   std::size_t index);

}  // namespace fl
