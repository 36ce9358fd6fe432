#include "fl/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "fl/rng.hpp"

namespace fl {
namespace {

constexpr double kDegenerateCost = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

bool profile_less(const Profile& x, const Profile& y) {
  const std::size_t n = std::min(x.size(), y.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i].a != y[i].a) return x[i].a < y[i].a;
    if (x[i].b != y[i].b) return x[i].b < y[i].b;
  }
  return x.size() < y.size();
}

int family_m(int n) {
  if (n < 3 || n % 2 == 0) throw std::invalid_argument("family needs odd n >= 3");
  return (n - 1) / 2;
}

}  // namespace

ARReport approximation_ratio(const MechanismSpec& spec, const Profile& profile,
                             NormOrder order, const SolverConfig& cfg) {
  ARReport report;
  report.mech_point = apply_mechanism(spec, profile);
  const OptimalResult opt = optimal_location(profile, order, cfg);
  report.opt_point = opt.location;
  report.mech_cost = social_cost(report.mech_point, profile, order);
  report.opt_cost = opt.cost;
  if (report.mech_cost < kDegenerateCost && report.opt_cost < kDegenerateCost) {
    report.ratio = 1.0;
  } else if (report.opt_cost < kDegenerateCost) {
    report.ratio = kInf;
  } else {
    report.ratio = report.mech_cost / report.opt_cost;
  }
  return report;
}

FamilyPoint eta_profile(int m, double t) {
  if (m < 1) throw std::invalid_argument("family needs m >= 1");
  if (!(t >= 0.0)) throw std::invalid_argument("family needs t >= 0");
  std::vector<Point> pts;
  pts.reserve(2 * m + 1);
  for (int i = 0; i < m; ++i) pts.push_back({t, 0.0});
  pts.push_back({-t, 0.0});
  for (int i = 0; i < m; ++i) pts.push_back({0.0, 1.0});
  FamilyPoint fp;
  fp.m = m;
  fp.t = t;
  fp.alpha = alpha(m, t);
  fp.profile = Profile(std::move(pts));
  return fp;
}

double alpha(int m, double t) {
  if (m < 1) throw std::invalid_argument("alpha needs m >= 1");
  return ((m + 1) * t + m) / ((m + 1) * std::sqrt(t * t + 1.0));
}

double theorem1_value(int n) {
  if (n < 3 || n % 2 == 0) throw std::invalid_argument("value defined for odd n >= 3");
  const double nn = static_cast<double>(n);
  return std::sqrt(2.0) * std::sqrt(nn * nn + 1.0) / (nn + 1.0);
}

double theorem1_tstar(int n) {
  const int m = family_m(n);
  return static_cast<double>(m + 1) / m;
}

FamilyScanResult family_scan(int m, const TGrid& grid) {
  if (m < 1) throw std::invalid_argument("family needs m >= 1");
  if (!(grid.t_min >= 0.0) || grid.t_min > grid.t_max || !(grid.step > 0.0)) {
    throw std::invalid_argument("family grid needs 0 <= t_min <= t_max and step > 0");
  }
  const MechanismSpec cm = MechanismSpec::coordinate_wise_median();
  const NormOrder minisum = NormOrder::finite(1.0);

  FamilyScanResult out;
  long count = static_cast<long>(std::floor((grid.t_max - grid.t_min) / grid.step)) + 1;
  if (count < 1) count = 1;
  out.rows.reserve(count);
  out.max_ar = -kInf;
  for (long k = 0; k < count; ++k) {
    const double t = grid.t_min + k * grid.step;
    const FamilyPoint fp = eta_profile(m, t);
    const double ar = approximation_ratio(cm, fp.profile, minisum).ratio;
    out.rows.push_back({t, fp.alpha, ar});
    if (ar > out.max_ar) {
      out.max_ar = ar;
      out.argmax_t = t;
    }
  }

  const int n = 2 * m + 1;
  const double tstar = theorem1_tstar(n);
  out.covers_tstar = grid.t_min <= tstar && tstar <= grid.t_max;
  if (out.covers_tstar) {
    out.max_matches_formula = std::abs(out.max_ar - theorem1_value(n)) <= 1e-9;
    out.argmax_near_tstar = std::abs(out.argmax_t - tstar) <= grid.step;
  }
  return out;
}

namespace {

Profile random_profile(const SplitRng& root, long sample, int n) {
  SplitRng rng = root.split(static_cast<std::uint64_t>(sample));
  std::vector<Point> pts;
  pts.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double a = rng.next_in(-1.0, 1.0);
    const double b = rng.next_in(-1.0, 1.0);
    pts.push_back({a, b});
  }
  return Profile(std::move(pts));
}

struct Candidate {
  double ratio = -kInf;
  long sample = std::numeric_limits<long>::max();
  Profile profile;
};

bool candidate_better(const Candidate& x, const Candidate& y) {
  if (x.ratio != y.ratio) return x.ratio > y.ratio;
  if (x.sample != y.sample) return x.sample < y.sample;
  return profile_less(x.profile, y.profile);
}

// Coordinate descent on agent positions: five rounds of a step shrinking by
// 4x from 0.25, full sweeps until no single-coordinate move improves.
Candidate refine_candidate(const MechanismSpec& spec, NormOrder order, Candidate cand) {
  double step = 0.25;
  for (int round = 0; round < 5; ++round) {
    bool improved = true;
    int sweeps = 0;
    while (improved && sweeps < 60) {
      improved = false;
      ++sweeps;
      for (std::size_t i = 0; i < cand.profile.size(); ++i) {
        for (int coord = 0; coord < 2; ++coord) {
          for (double dir : {-1.0, 1.0}) {
            Profile trial = cand.profile;
            if (coord == 0) {
              trial.points()[i].a += dir * step;
            } else {
              trial.points()[i].b += dir * step;
            }
            const double r = approximation_ratio(spec, trial, order).ratio;
            if (r > cand.ratio) {
              cand.ratio = r;
              cand.profile = std::move(trial);
              improved = true;
            }
          }
        }
      }
    }
    step /= 4.0;
  }
  return cand;
}

}  // namespace

ScanResult worst_case_scan(const MechanismSpec& spec, int n, NormOrder order,
                           const ScanConfig& cfg) {
  if (n < 1) throw std::invalid_argument("scan needs n >= 1");
  if (cfg.samples < 1) throw std::invalid_argument("scan needs samples >= 1");

  const SplitRng root = SplitRng(cfg.seed).split(0x5ca9);
  ScanResult out;
  out.samples = cfg.samples;
  out.seed = cfg.seed;
  if (cfg.keep_samples) out.sample_ratios.assign(cfg.samples, 0.0);

  const int top_k = std::max(1, cfg.refine_top);
  const long shard_size = 4096;
  const long shard_count = (cfg.samples + shard_size - 1) / shard_size;

  std::vector<std::vector<Candidate>> shard_top(shard_count);
  auto run_shard = [&](long shard) {
    const long lo = shard * shard_size;
    const long hi = std::min(cfg.samples, lo + shard_size);
    std::vector<Candidate>& top = shard_top[shard];
    for (long s = lo; s < hi; ++s) {
      Candidate cand;
      cand.sample = s;
      cand.profile = random_profile(root, s, n);
      cand.ratio = approximation_ratio(spec, cand.profile, order).ratio;
      if (cfg.keep_samples) out.sample_ratios[s] = cand.ratio;
      top.push_back(std::move(cand));
      std::sort(top.begin(), top.end(), candidate_better);
      if (static_cast<int>(top.size()) > top_k) top.resize(top_k);
    }
  };

  const int threads = std::max(1, cfg.threads);
  if (threads == 1 || shard_count == 1) {
    for (long shard = 0; shard < shard_count; ++shard) run_shard(shard);
  } else {
    std::atomic<long> next{0};
    std::vector<std::thread> pool;
    const int workers = std::min<long>(threads, shard_count);
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (long shard = next.fetch_add(1); shard < shard_count;
             shard = next.fetch_add(1)) {
          run_shard(shard);
        }
      });
    }
    for (std::thread& t : pool) t.join();
  }

  std::vector<Candidate> merged;
  for (std::vector<Candidate>& top : shard_top) {
    for (Candidate& c : top) merged.push_back(std::move(c));
  }
  for (const Profile& extra : cfg.corpus) {
    Candidate cand;
    cand.sample = -1;
    cand.profile = extra;
    cand.ratio = approximation_ratio(spec, extra, order).ratio;
    merged.push_back(std::move(cand));
  }
  std::sort(merged.begin(), merged.end(), candidate_better);
  if (merged.empty()) throw std::logic_error("scan produced no candidates");

  Candidate best = merged.front();
  const int refine_count = std::min<std::size_t>(top_k, merged.size());
  for (int i = 0; i < refine_count; ++i) {
    Candidate refined = refine_candidate(spec, order, merged[i]);
    if (candidate_better(refined, best)) best = std::move(refined);
  }

  out.best_ratio = best.ratio;
  out.best_profile = best.profile;
  return out;
}

ScanResult worst_case_scan(const MechanismSpec& spec, int n, NormOrder order,
                           long samples, std::uint64_t seed) {
  ScanConfig cfg;
  cfg.samples = samples;
  cfg.seed = seed;
  return worst_case_scan(spec, n, order, cfg);
}

PnormBounds pnorm_bounds(NormOrder order) {
  PnormBounds out;
  if (order.is_infinite()) {
    out.lower = 2.0;
    out.upper = std::pow(2.0, 1.5);
    out.exact = 2.0;
    return out;
  }
  const double p = order.value();
  if (p < 2.0) {
    throw std::invalid_argument("bounds are stated for p >= 2 (or the max norm)");
  }
  out.lower = std::pow(2.0, 1.0 - 1.0 / p);
  out.upper = std::pow(2.0, 1.5 - 2.0 / p);
  return out;
}

DeviationReport sp_deviation_search(const MechanismSpec& spec, const Profile& profile,
                                    const DeviationGrid& grid) {
  if (profile.empty()) throw std::invalid_argument("empty profile");
  if (grid.resolution < 2) throw std::invalid_argument("deviation grid needs resolution >= 2");

  double alo = kInf, ahi = -kInf, blo = kInf, bhi = -kInf;
  for (const Point& x : profile.points()) {
    alo = std::min(alo, x.a);
    ahi = std::max(ahi, x.a);
    blo = std::min(blo, x.b);
    bhi = std::max(bhi, x.b);
  }
  double span = std::max(ahi - alo, bhi - blo);
  if (span == 0.0) span = 1.0;
  const double pad = 0.5 * grid.inflation * span;

  const Point honest_out = apply_mechanism(spec, profile);

  DeviationReport best;
  best.gain = -kInf;

  for (std::size_t agent = 0; agent < profile.size(); ++agent) {
    const Point truth = profile[agent];
    const double honest_cost = distance(honest_out, truth);
    Profile work = profile;

    auto try_deviation = [&](const Point& dev, DeviationReport& incumbent) {
      work.points()[agent] = dev;
      const Point out = apply_mechanism(spec, work);
      const double gain = honest_cost - distance(out, truth);
      if (gain > incumbent.gain) {
        incumbent = {static_cast<int>(agent), truth, dev, gain};
      }
    };

    DeviationReport agent_best;
    agent_best.gain = -kInf;
    try_deviation(truth, agent_best);
    try_deviation(honest_out, agent_best);

    double xa = alo - pad, xb = ahi + pad, ya = blo - pad, yb = bhi + pad;
    for (int pass = 0; pass <= grid.refinements; ++pass) {
      const double sa = (xb - xa) / (grid.resolution - 1);
      const double sb = (yb - ya) / (grid.resolution - 1);
      for (int i = 0; i < grid.resolution; ++i) {
        for (int j = 0; j < grid.resolution; ++j) {
          try_deviation({xa + i * sa, ya + j * sb}, agent_best);
        }
      }
      // Refine around the incumbent deviation with a window of one spacing.
      xa = agent_best.deviation.a - sa;
      xb = agent_best.deviation.a + sa;
      ya = agent_best.deviation.b - sb;
      yb = agent_best.deviation.b + sb;
    }
    work.points()[agent] = truth;

    if (agent_best.gain > best.gain) best = agent_best;
  }
  return best;
}

DominanceResult dominance_experiment(const MechanismSpec& scheme, int m) {
  if (scheme.kind() != MechanismKind::kCwmScheme) {
    throw std::invalid_argument("dominance experiment needs a median voting scheme");
  }
  const int n = 2 * m + 1;
  const double tstar = theorem1_tstar(n);
  const Profile w = eta_profile(m, tstar).profile;

  double diameter = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    for (std::size_t j = i + 1; j < w.size(); ++j) {
      diameter = std::max(diameter, distance(w[i], w[j]));
    }
  }
  double const_mag = 0.0;
  for (const ExtendedPoint& c : scheme.constants()) {
    if (std::isfinite(c.a)) const_mag = std::max(const_mag, std::abs(c.a));
    if (std::isfinite(c.b)) const_mag = std::max(const_mag, std::abs(c.b));
  }
  const double limit = 2.0 * (const_mag + diameter);

  const double opt_cost = geometric_median(w).cost;

  std::vector<Profile> variants;
  variants.push_back(w);
  Profile refl_a = w, refl_b = w;
  for (Point& p : refl_a.points()) p.b = -p.b;
  for (Point& p : refl_b.points()) p.a = -p.a;
  variants.push_back(std::move(refl_a));
  variants.push_back(std::move(refl_b));

  DominanceResult out;
  out.n = n;
  out.theorem_value = theorem1_value(n);
  out.max_ar = -kInf;

  const int res = 81;
  const NormOrder minisum = NormOrder::finite(1.0);
  for (int v = 0; v < 3; ++v) {
    for (int i = 0; i < res; ++i) {
      const double sa = -limit + 2.0 * limit * i / (res - 1);
      for (int j = 0; j < res; ++j) {
        const double sb = -limit + 2.0 * limit * j / (res - 1);
        Profile shifted = variants[v];
        for (Point& p : shifted.points()) {
          p.a += sa;
          p.b += sb;
        }
        const Point mech = apply_mechanism(scheme, shifted);
        const double ar = social_cost(mech, shifted, minisum) / opt_cost;
        if (ar > out.max_ar) {
          out.max_ar = ar;
          out.shift = {sa, sb};
          out.variant = v;
        }
      }
    }
  }
  return out;
}

double one_dimensional_family_ratio(int n, double p) {
  const int m = family_m(n);
  if (!(p >= 2.0) || !std::isfinite(p)) {
    throw std::invalid_argument("probe needs finite p >= 2");
  }
  std::vector<Point> pts;
  for (int i = 0; i < m + 1; ++i) pts.push_back({0.0, 0.0});
  for (int i = 0; i < m; ++i) pts.push_back({1.0, 0.0});
  const Profile profile{std::move(pts)};
  const NormOrder order = NormOrder::finite(p);

  const Point cm = coordinate_wise_median(profile);
  const double mech_cost = social_cost(cm, profile, order);

  // The optimum lies on the segment between the clusters; ternary search on
  // the strictly convex one-dimensional restriction.
  auto cost_at = [&](double y) { return social_cost({y, 0.0}, profile, order); };
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (cost_at(m1) <= cost_at(m2)) {
      hi = m2;
    } else {
      lo = m1;
    }
  }
  const double opt_cost = cost_at(0.5 * (lo + hi));

  SolverConfig oracle_cfg;
  oracle_cfg.grid_resolution = 201;
  const OptimalResult oracle = grid_oracle(profile, order, oracle_cfg);
  if (std::abs(oracle.cost - opt_cost) > 1e-3 * (1.0 + opt_cost)) {
    throw std::runtime_error("one-dimensional family optimum disagrees with grid oracle");
  }
  return mech_cost / opt_cost;
}

std::vector<ConjectureRow> conjecture_probe(double p, const std::vector<int>& n_list,
                                            long samples, std::uint64_t seed) {
  const PnormBounds bounds = pnorm_bounds(NormOrder::finite(p));
  const MechanismSpec cm = MechanismSpec::coordinate_wise_median();
  std::vector<ConjectureRow> rows;
  rows.reserve(n_list.size());
  for (int n : n_list) {
    ConjectureRow row;
    row.n = n;
    row.lower = bounds.lower;
    row.upper = bounds.upper;
    row.family_ratio = one_dimensional_family_ratio(n, p);
    ScanConfig cfg;
    cfg.samples = samples;
    cfg.seed = SplitRng(seed).split(static_cast<std::uint64_t>(n)).next_u64();
    row.scan_ratio = worst_case_scan(cm, n, NormOrder::finite(p), cfg).best_ratio;
    row.best_found = std::max(row.family_ratio, row.scan_ratio);
    rows.push_back(row);
  }
  return rows;
}

std::vector<Profile> builtin_hard_profiles(int n) {
  const int m = family_m(n);
  std::vector<Profile> out;
  out.push_back(eta_profile(m, theorem1_tstar(n)).profile);
  std::vector<Point> pts;
  for (int i = 0; i < m + 1; ++i) pts.push_back({0.0, 0.0});
  for (int i = 0; i < m; ++i) pts.push_back({1.0, 0.0});
  out.push_back(Profile(std::move(pts)));
  return out;
}

}  // namespace fl
