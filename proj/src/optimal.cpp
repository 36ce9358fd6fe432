#include "fl/optimal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>

#include "fl/rng.hpp"

namespace fl {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Cluster {
  Point location;
  int weight = 0;
};

// Group coincident points so anchor multiplicities are available to the
// vertex optimality test.
std::vector<Cluster> cluster_points(const Profile& profile) {
  const double tol = 1e-12 * (1.0 + profile.spread());
  std::vector<Cluster> out;
  for (const Point& p : profile.points()) {
    bool merged = false;
    for (Cluster& c : out) {
      if (distance(c.location, p) <= tol) {
        ++c.weight;
        merged = true;
        break;
      }
    }
    if (!merged) out.push_back({p, 1});
  }
  return out;
}

double sum_distance(const Point& y, const std::vector<Cluster>& cl) {
  double s = 0.0;
  for (const Cluster& c : cl) s += c.weight * distance(y, c.location);
  return s;
}

// Pull of every cluster other than `at` (sum of unit vectors toward them),
// plus the local Lipschitz factor used for the step away from a bad anchor.
struct AnchorPull {
  Point r{0.0, 0.0};
  double r_norm = 0.0;
  double lipschitz = 0.0;
};

AnchorPull anchor_pull(const std::vector<Cluster>& cl, std::size_t at) {
  AnchorPull out;
  const Point z = cl[at].location;
  for (std::size_t i = 0; i < cl.size(); ++i) {
    if (i == at) continue;
    const double d = distance(z, cl[i].location);
    out.r.a += cl[i].weight * (cl[i].location.a - z.a) / d;
    out.r.b += cl[i].weight * (cl[i].location.b - z.b) / d;
    out.lipschitz += cl[i].weight / d;
  }
  out.r_norm = std::hypot(out.r.a, out.r.b);
  return out;
}

OptimalResult result_at(const Point& y, const Profile& profile, double cert,
                        int iters, bool converged) {
  return {y, social_cost(y, profile, NormOrder::finite(1.0)), cert, iters, converged};
}

// Fermat point of three distinct points: a vertex whose angle is at least
// 120 degrees, otherwise the intersection of the two lines through each
// vertex and the apex of the equilateral triangle erected on the opposite
// side (away from that vertex).
std::optional<Point> torricelli_point(const Point& A, const Point& B, const Point& C) {
  const Point pts[3] = {A, B, C};
  for (int v = 0; v < 3; ++v) {
    const Point& V = pts[v];
    const Point& P = pts[(v + 1) % 3];
    const Point& Q = pts[(v + 2) % 3];
    const Point u = P - V;
    const Point w = Q - V;
    const double nu = std::hypot(u.a, u.b);
    const double nw = std::hypot(w.a, w.b);
    if (nu == 0.0 || nw == 0.0) return std::nullopt;
    if (u.a * w.a + u.b * w.b <= -0.5 * nu * nw) return V;
  }

  auto apex_opposite = [](const Point& base1, const Point& base2, const Point& other) {
    // Apex of the equilateral triangle on [base1, base2] on the side away
    // from `other`.
    const Point e = base2 - base1;
    const double side = e.a * (other.b - base1.b) - e.b * (other.a - base1.a);
    const double ang = side > 0.0 ? -1.0 : 1.0;  // rotate away from `other`
    const double c = 0.5, s = ang * std::sqrt(3.0) / 2.0;
    return Point{base1.a + e.a * c - e.b * s, base1.b + e.a * s + e.b * c};
  };

  const Point apexA = apex_opposite(B, C, A);
  const Point apexB = apex_opposite(C, A, B);
  // Intersect lines A-apexA and B-apexB.
  const Point d1 = apexA - A;
  const Point d2 = apexB - B;
  const double det = d1.a * d2.b - d1.b * d2.a;
  const double scale = std::hypot(d1.a, d1.b) * std::hypot(d2.a, d2.b);
  if (std::abs(det) <= 1e-14 * scale) return std::nullopt;
  const double t = ((B.a - A.a) * d2.b - (B.b - A.b) * d2.a) / det;
  return Point{A.a + t * d1.a, A.b + t * d1.b};
}

OptimalResult weiszfeld(const Profile& profile, const std::vector<Cluster>& cl,
                        const SolverConfig& cfg) {
  const int n = static_cast<int>(profile.size());
  const double scale = 1.0 + profile.spread();

  Point y{0.0, 0.0};
  for (const Cluster& c : cl) {
    y.a += c.weight * c.location.a / n;
    y.b += c.weight * c.location.b / n;
  }

  Point best = y;
  double best_cost = sum_distance(y, cl);
  double best_cert = kInf;

  const double anchor_eps = std::max(cfg.tolerance, 1e-14 * scale);
  for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
    // Nearest anchor first: if the unit-vector pull of the remaining points
    // does not exceed its multiplicity, that anchor is exactly optimal.
    std::size_t nearest = 0;
    double dz = kInf;
    for (std::size_t i = 0; i < cl.size(); ++i) {
      const double d = distance(y, cl[i].location);
      if (d < dz) {
        dz = d;
        nearest = i;
      }
    }
    const AnchorPull pull = anchor_pull(cl, nearest);
    const double w = cl[nearest].weight;
    if (pull.r_norm <= w + 1e-12) {
      const double cert = std::max(0.0, pull.r_norm - w);
      return result_at(cl[nearest].location, profile, cert, iter, true);
    }

    if (dz <= anchor_eps) {
      // Sitting on a non-optimal anchor: step away along the pull with a
      // shrinking step until the objective decreases.
      const Point z = cl[nearest].location;
      const Point dir{pull.r.a / pull.r_norm, pull.r.b / pull.r_norm};
      double t = (pull.r_norm - w) / pull.lipschitz;
      const double f0 = sum_distance(z, cl);
      for (int back = 0; back < 60; ++back) {
        const Point cand{z.a + t * dir.a, z.b + t * dir.b};
        if (sum_distance(cand, cl) < f0) break;
        t *= 0.5;
      }
      y = {z.a + t * dir.a, z.b + t * dir.b};
      continue;
    }

    Point grad{0.0, 0.0};
    double inv_sum = 0.0;
    Point next{0.0, 0.0};
    for (const Cluster& c : cl) {
      const double d = distance(y, c.location);
      grad.a += c.weight * (c.location.a - y.a) / d;
      grad.b += c.weight * (c.location.b - y.b) / d;
      inv_sum += c.weight / d;
      next.a += c.weight * c.location.a / d;
      next.b += c.weight * c.location.b / d;
    }
    const double cert = std::hypot(grad.a, grad.b);
    if (cert <= cfg.tolerance) {
      return result_at(y, profile, cert, iter, true);
    }
    const double cost = sum_distance(y, cl);
    if (cost < best_cost || (cost == best_cost && cert < best_cert)) {
      best = y;
      best_cost = cost;
      best_cert = cert;
    }
    y = {next.a / inv_sum, next.b / inv_sum};
  }

  const double cert = geometric_median_certificate(best, profile);
  return result_at(best, profile, cert, cfg.max_iterations, false);
}

struct BestNode {
  double cost = kInf;
  Point at;

  void offer(double c, const Point& p) {
    if (c < cost || (c == cost && (p.a < at.a || (p.a == at.a && p.b < at.b)))) {
      cost = c;
      at = p;
    }
  }
};

}  // namespace

double geometric_median_certificate(const Point& y, const Profile& profile) {
  const double tol = 1e-12 * (1.0 + profile.spread());
  Point r{0.0, 0.0};
  int coincident = 0;
  for (const Point& x : profile.points()) {
    const double d = distance(y, x);
    if (d <= tol) {
      ++coincident;
      continue;
    }
    r.a += (x.a - y.a) / d;
    r.b += (x.b - y.b) / d;
  }
  return std::max(0.0, std::hypot(r.a, r.b) - coincident);
}

OptimalResult geometric_median(const Profile& profile, const SolverConfig& cfg) {
  if (profile.empty()) throw std::invalid_argument("empty profile");
  const std::vector<Cluster> cl = cluster_points(profile);
  const int n = static_cast<int>(profile.size());

  if (cl.size() == 1) return result_at(cl[0].location, profile, 0.0, 0, true);

  // A cluster holding a strict majority of the points is always optimal.
  std::size_t heaviest = 0;
  for (std::size_t i = 1; i < cl.size(); ++i) {
    if (cl[i].weight > cl[heaviest].weight) heaviest = i;
  }
  if (2 * cl[heaviest].weight > n) {
    const double cert = geometric_median_certificate(cl[heaviest].location, profile);
    return result_at(cl[heaviest].location, profile, cert, 0, true);
  }

  if (cl.size() == 2) {
    // Equal-weight pair: every point of the segment is optimal; return the
    // midpoint as the deterministic representative.
    if (cl[0].weight == cl[1].weight) {
      const Point mid = 0.5 * (cl[0].location + cl[1].location);
      return result_at(mid, profile, 0.0, 0, true);
    }
    // Unequal weights are covered by the majority rule above.
  }

  if (n == 3 && cl.size() == 3) {
    if (auto f = torricelli_point(cl[0].location, cl[1].location, cl[2].location)) {
      const double cert = geometric_median_certificate(*f, profile);
      if (cert <= std::max(cfg.tolerance, 1e-12) * 10.0) {
        return result_at(*f, profile, cert, 0, true);
      }
    }
  }

  return weiszfeld(profile, cl, cfg);
}

Point pnorm_power_gradient(const Point& y, const Profile& profile, double p) {
  if (!(p > 1.0) || !std::isfinite(p)) {
    throw std::invalid_argument("power gradient needs finite p > 1");
  }
  Point g{0.0, 0.0};
  for (const Point& x : profile.points()) {
    const double d = distance(y, x);
    if (d == 0.0) continue;
    const double f = p * std::pow(d, p - 2.0);
    g.a += f * (y.a - x.a);
    g.b += f * (y.b - x.b);
  }
  return g;
}

namespace {

// Gradient of the social cost itself, computed with distances factored by
// their maximum so arbitrarily large orders stay in range.
Point social_cost_gradient(const Point& y, const Profile& profile, double p) {
  double dmax = 0.0;
  for (const Point& x : profile.points()) dmax = std::max(dmax, distance(y, x));
  if (dmax == 0.0) return {0.0, 0.0};
  double s = 0.0;
  Point g{0.0, 0.0};
  for (const Point& x : profile.points()) {
    const double r = distance(y, x) / dmax;
    if (r == 0.0) continue;
    s += std::pow(r, p);
    const double f = std::pow(r, p - 1.0) / (r * dmax);
    g.a += f * (y.a - x.a);
    g.b += f * (y.b - x.b);
  }
  const double outer = std::pow(s, (1.0 - p) / p);
  return {outer * g.a, outer * g.b};
}

OptimalResult pnorm_descent(const Profile& profile, double p, const SolverConfig& cfg) {
  const NormOrder order = NormOrder::finite(p);
  Point y{0.0, 0.0};
  for (const Point& x : profile.points()) {
    y.a += x.a / profile.size();
    y.b += x.b / profile.size();
  }

  double step = 0.5;
  double cert = 0.0;
  int iter = 0;
  int stalls = 0;
  for (; iter < cfg.max_iterations && stalls < 3; ++iter) {
    const Point g = social_cost_gradient(y, profile, p);
    cert = std::hypot(g.a, g.b);
    if (cert <= cfg.tolerance) {
      return {y, social_cost(y, profile, order), cert, iter, true};
    }
    const double f0 = social_cost(y, profile, order);
    bool moved = false;
    for (int back = 0; back < 70; ++back) {
      const Point cand{y.a - step * g.a, y.b - step * g.b};
      if (social_cost(cand, profile, order) <= f0 - 1e-4 * step * cert * cert) {
        // Count iterations whose decrease is below rounding as stalled; the
        // sufficient-decrease test is vacuous once the gradient is tiny.
        if (f0 - social_cost(cand, profile, order) <= 1e-14 * (1.0 + f0)) {
          ++stalls;
        } else {
          stalls = 0;
        }
        y = cand;
        step = std::min(step * 2.0, 1e6);
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;  // step underflow: no further progress possible
  }
  cert = std::hypot(social_cost_gradient(y, profile, p).a,
                    social_cost_gradient(y, profile, p).b);
  const bool acceptable = cert <= std::max(10.0 * cfg.tolerance, 1e-6);
  return {y, social_cost(y, profile, order), cert, iter, acceptable};
}

Circle circle_two(const Point& p, const Point& q) {
  const Point c = 0.5 * (p + q);
  return {c, std::max(distance(c, p), distance(c, q))};
}

bool circle_contains(const Circle& c, const Point& p) {
  return distance(c.center, p) <= c.radius + 1e-13 * (1.0 + c.radius);
}

Circle circle_three(const Point& p, const Point& q, const Point& r) {
  const double d = 2.0 * (p.a * (q.b - r.b) + q.a * (r.b - p.b) + r.a * (p.b - q.b));
  const double scale = std::max({std::abs(p.a), std::abs(p.b), std::abs(q.a),
                                 std::abs(q.b), std::abs(r.a), std::abs(r.b), 1.0});
  if (std::abs(d) <= 1e-14 * scale * scale) {
    // Collinear: the diametral circle of the farthest pair covers the third.
    Circle best = circle_two(p, q);
    for (const Circle& c : {circle_two(p, r), circle_two(q, r)}) {
      if (c.radius > best.radius) best = c;
    }
    return best;
  }
  const double p2 = p.a * p.a + p.b * p.b;
  const double q2 = q.a * q.a + q.b * q.b;
  const double r2 = r.a * r.a + r.b * r.b;
  const Point center{(p2 * (q.b - r.b) + q2 * (r.b - p.b) + r2 * (p.b - q.b)) / d,
                     (p2 * (r.a - q.a) + q2 * (p.a - r.a) + r2 * (q.a - p.a)) / d};
  const double radius =
      std::max({distance(center, p), distance(center, q), distance(center, r)});
  return {center, radius};
}

Circle welzl_recurse(std::vector<Point>& pts, std::size_t n, std::vector<Point> rim) {
  if (n == 0 || rim.size() == 3) {
    switch (rim.size()) {
      case 0:
        return {{0.0, 0.0}, -1.0};
      case 1:
        return {rim[0], 0.0};
      case 2:
        return circle_two(rim[0], rim[1]);
      default:
        return circle_three(rim[0], rim[1], rim[2]);
    }
  }
  const Point p = pts[n - 1];
  Circle c = welzl_recurse(pts, n - 1, rim);
  if (c.radius >= 0.0 && circle_contains(c, p)) return c;
  rim.push_back(p);
  return welzl_recurse(pts, n - 1, std::move(rim));
}

}  // namespace

Circle minimum_enclosing_circle(const Profile& profile) {
  if (profile.empty()) throw std::invalid_argument("empty profile");
  std::vector<Point> pts = profile.points();
  SplitRng rng(0x4d454332ull);
  for (std::size_t i = pts.size(); i > 1; --i) {
    std::swap(pts[i - 1], pts[rng.next_below(i)]);
  }
  Circle c = welzl_recurse(pts, pts.size(), {});
  if (c.radius < 0.0) c = {pts[0], 0.0};
  return c;
}

OptimalResult optimal_location(const Profile& profile, NormOrder order,
                               const SolverConfig& cfg) {
  if (profile.empty()) throw std::invalid_argument("empty profile");
  if (order.is_infinite()) {
    const Circle c = minimum_enclosing_circle(profile);
    const double cost = social_cost(c.center, profile, order);
    return {c.center, cost, std::max(0.0, cost - c.radius), 0, true};
  }
  const double p = order.value();
  if (p == 1.0) return geometric_median(profile, cfg);
  if (p == 2.0) {
    Point y{0.0, 0.0};
    for (const Point& x : profile.points()) {
      y.a += x.a / profile.size();
      y.b += x.b / profile.size();
    }
    const double cost = social_cost(y, profile, order);
    Point dev{0.0, 0.0};
    for (const Point& x : profile.points()) {
      dev.a += y.a - x.a;
      dev.b += y.b - x.b;
    }
    const double cert = cost > 0.0 ? std::hypot(dev.a, dev.b) / cost : 0.0;
    return {y, cost, cert, 0, true};
  }
  return pnorm_descent(profile, p, cfg);
}

OptimalResult grid_oracle(const Profile& profile, NormOrder order,
                          const SolverConfig& cfg) {
  if (profile.empty()) throw std::invalid_argument("empty profile");
  double alo = kInf, ahi = -kInf, blo = kInf, bhi = -kInf;
  for (const Point& x : profile.points()) {
    alo = std::min(alo, x.a);
    ahi = std::max(ahi, x.a);
    blo = std::min(blo, x.b);
    bhi = std::max(bhi, x.b);
  }
  const double pad = std::max(0.25 * std::max(ahi - alo, bhi - blo), 1e-9);
  alo -= pad;
  ahi += pad;
  blo -= pad;
  bhi += pad;

  const int res0 = std::max(cfg.grid_resolution, 3);
  BestNode best;
  long evals = 0;

  auto sweep = [&](double xa, double xb, double ya, double yb, int res) {
    const double sa = (xb - xa) / (res - 1);
    const double sb = (yb - ya) / (res - 1);
    for (int i = 0; i < res; ++i) {
      const double a = xa + i * sa;
      for (int j = 0; j < res; ++j) {
        const Point y{a, ya + j * sb};
        best.offer(social_cost(y, profile, order), y);
        ++evals;
      }
    }
    return std::max(sa, sb);
  };

  double spacing = sweep(alo, ahi, blo, bhi, res0);
  for (int pass = 0; pass < 2; ++pass) {
    const double half = 2.0 * spacing;
    spacing = sweep(best.at.a - half, best.at.a + half, best.at.b - half,
                    best.at.b + half, 41);
  }
  return {best.at, best.cost, spacing, static_cast<int>(std::min<long>(evals, 1e9)), true};
}

}  // namespace fl
