#include <cmath>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "fl/analysis.hpp"
#include "fl/rng.hpp"

using namespace fl;

namespace {

const MechanismSpec kCm = MechanismSpec::coordinate_wise_median();
const NormOrder kMinisum = NormOrder::finite(1.0);

Profile random_profile(SplitRng& rng, int n) {
  std::vector<Point> pts;
  for (int i = 0; i < n; ++i) pts.push_back({rng.next_in(-1, 1), rng.next_in(-1, 1)});
  return Profile{std::move(pts)};
}

}  // namespace

TEST_CASE("ratio on the three-agent worst case") {
  const FamilyPoint eta2 = eta_profile(1, 2.0);
  const ARReport report = approximation_ratio(kCm, eta2.profile, kMinisum);
  CHECK(report.ratio == doctest::Approx(std::sqrt(5.0) / 2.0).epsilon(1e-12));
  CHECK(report.mech_point == Point{0, 0});
  CHECK(distance(report.opt_point, {0, 1}) <= 1e-9);
}

TEST_CASE("ratio degenerates to one on unanimous profiles") {
  const Profile p{{{3, 3}, {3, 3}, {3, 3}}};
  for (const NormOrder order :
       {NormOrder::finite(1), NormOrder::finite(2), NormOrder::infinity()}) {
    CHECK(approximation_ratio(kCm, p, order).ratio == 1.0);
  }
}

TEST_CASE("even-agent lower-median ratio is sqrt(2) on the two-cluster profile") {
  for (int m = 1; m <= 10; ++m) {
    std::vector<Point> pts;
    for (int i = 0; i < m; ++i) pts.push_back({1, 0});
    for (int i = 0; i < m; ++i) pts.push_back({0, 1});
    const ARReport report = approximation_ratio(kCm, Profile{std::move(pts)}, kMinisum);
    REQUIRE(report.ratio == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
  }
}

TEST_CASE("eta profile layout") {
  const FamilyPoint p1 = eta_profile(1, 2.0);
  CHECK(p1.profile.points() == std::vector<Point>{{2, 0}, {-2, 0}, {0, 1}});
  const FamilyPoint p2 = eta_profile(2, 1.5);
  CHECK(p2.profile.points() ==
        std::vector<Point>{{1.5, 0}, {1.5, 0}, {-1.5, 0}, {0, 1}, {0, 1}});
  const FamilyPoint p0 = eta_profile(1, 0.0);
  CHECK(p0.profile.points() == std::vector<Point>{{0, 0}, {0, 0}, {0, 1}});
  CHECK_THROWS_AS(eta_profile(0, 1.0), std::invalid_argument);
}

TEST_CASE("alpha closed form") {
  CHECK(alpha(1, 2.0) == doctest::Approx(std::sqrt(5.0) / 2.0).epsilon(1e-15));
  CHECK(alpha(1, 1e6) == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(alpha(2, 1.5) ==
        doctest::Approx(std::sqrt(2.0) * std::sqrt(26.0) / 6.0).epsilon(1e-15));
  CHECK(alpha(1, std::sqrt(3.0)) ==
        doctest::Approx((2.0 * std::sqrt(3.0) + 1.0) / 4.0).epsilon(1e-15));
}

TEST_CASE("alpha matches the measured ratio past the feasibility threshold") {
  SplitRng rng(40);
  for (int it = 0; it < 120; ++it) {
    const int m = 1 + static_cast<int>(rng.next_below(50));
    const double t_min = std::sqrt((2.0 * m + 1.0) / (2.0 * m - 1.0));
    const double t = t_min + rng.next_in(0.0, 4.0);
    const double measured =
        approximation_ratio(kCm, eta_profile(m, t).profile, kMinisum).ratio;
    REQUIRE(std::abs(measured - alpha(m, t)) <= 1e-9);
  }
}

TEST_CASE("closed-form value and maximizer") {
  CHECK(theorem1_value(3) == doctest::Approx(std::sqrt(5.0) / 2.0).epsilon(1e-15));
  CHECK(theorem1_value(5) ==
        doctest::Approx(std::sqrt(2.0) * std::sqrt(26.0) / 6.0).epsilon(1e-15));
  CHECK(theorem1_value(10001) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-7));
  CHECK(theorem1_tstar(3) == 2.0);
  CHECK_THROWS_AS(theorem1_value(4), std::invalid_argument);
  // alpha at the maximizer equals the closed form
  for (int m = 1; m <= 1000; m *= 3) {
    const int n = 2 * m + 1;
    REQUIRE(std::abs(alpha(m, theorem1_tstar(n)) - theorem1_value(n)) <= 1e-12);
  }
}

TEST_CASE("family scan finds the maximizer") {
  const FamilyScanResult scan = family_scan(1, {std::sqrt(3.0), 4.0, 1e-3});
  CHECK(scan.covers_tstar);
  CHECK(scan.max_matches_formula);
  CHECK(scan.argmax_near_tstar);
  CHECK(scan.max_ar == doctest::Approx(std::sqrt(5.0) / 2.0).epsilon(1e-7));
  CHECK(scan.argmax_t == doctest::Approx(2.0).epsilon(1e-3));

  const FamilyScanResult m3 = family_scan(3, {1.0, 2.0, 1e-3});
  CHECK(m3.max_matches_formula);
  CHECK(std::abs(m3.max_ar - theorem1_value(7)) <= 1e-8);

  // degenerate grid: step beyond the range produces a single row
  const FamilyScanResult single = family_scan(1, {2.0, 2.5, 10.0});
  CHECK(single.rows.size() == 1);
  CHECK(single.rows[0].t == 2.0);
  CHECK_THROWS_AS(family_scan(1, {3.0, 2.0, 0.1}), std::invalid_argument);
}

TEST_CASE("family alpha column diverges from the ratio below the threshold") {
  const FamilyScanResult scan = family_scan(1, {0.0, 1.0, 0.25});
  for (const FamilyScanRow& row : scan.rows) {
    REQUIRE(row.ar >= 1.0 - 1e-9);
    if (row.t < 0.9) REQUIRE(row.ar > row.alpha + 0.05);
  }
}

TEST_CASE("worst-case scan stays under the closed form and refines toward it") {
  ScanConfig cfg;
  cfg.samples = 20000;
  cfg.seed = 0;
  const ScanResult scan = worst_case_scan(kCm, 3, kMinisum, cfg);
  const double bound = std::sqrt(5.0) / 2.0;
  CHECK(scan.best_ratio <= bound + 1e-9);
  CHECK(scan.best_ratio >= bound - 1e-3);
  // invariant: the reported best is reproducible from the profile
  CHECK(approximation_ratio(kCm, scan.best_profile, kMinisum).ratio ==
        doctest::Approx(scan.best_ratio).epsilon(1e-12));
}

TEST_CASE("scan samples are retained on request and respect the bound") {
  ScanConfig cfg;
  cfg.samples = 2000;
  cfg.seed = 7;
  cfg.keep_samples = true;
  const ScanResult scan = worst_case_scan(kCm, 3, kMinisum, cfg);
  CHECK(scan.sample_ratios.size() == 2000);
  for (double r : scan.sample_ratios) {
    REQUIRE(r >= 1.0 - 1e-9);
    REQUIRE(r <= std::sqrt(2.0) + 1e-9);
  }
}

TEST_CASE("scan is deterministic and thread-count independent") {
  ScanConfig cfg;
  cfg.samples = 6000;
  cfg.seed = 42;
  cfg.keep_samples = true;
  const ScanResult a = worst_case_scan(kCm, 3, kMinisum, cfg);
  const ScanResult b = worst_case_scan(kCm, 3, kMinisum, cfg);
  cfg.threads = 4;
  const ScanResult c = worst_case_scan(kCm, 3, kMinisum, cfg);
  CHECK(a.best_ratio == b.best_ratio);
  CHECK(a.best_profile == b.best_profile);
  CHECK(a.best_ratio == c.best_ratio);
  CHECK(a.best_profile == c.best_profile);
  CHECK(a.sample_ratios == c.sample_ratios);
}

TEST_CASE("max-norm scan with the builtin corpus hits two") {
  ScanConfig cfg;
  cfg.samples = 1000;
  cfg.seed = 0;
  cfg.corpus = builtin_hard_profiles(3);
  const ScanResult scan = worst_case_scan(kCm, 3, NormOrder::infinity(), cfg);
  CHECK(scan.best_ratio == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("ratio bounds per norm order") {
  const PnormBounds two = pnorm_bounds(NormOrder::finite(2));
  CHECK(two.lower == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(two.upper == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  const PnormBounds four = pnorm_bounds(NormOrder::finite(4));
  CHECK(four.lower == doctest::Approx(std::pow(2.0, 0.75)).epsilon(1e-15));
  CHECK(four.upper == doctest::Approx(2.0).epsilon(1e-15));
  const PnormBounds inf = pnorm_bounds(NormOrder::infinity());
  CHECK(inf.lower == 2.0);
  CHECK(inf.upper == doctest::Approx(std::pow(2.0, 1.5)).epsilon(1e-15));
  REQUIRE(inf.exact.has_value());
  CHECK(*inf.exact == 2.0);
  CHECK_THROWS_AS(pnorm_bounds(NormOrder::finite(1.5)), std::invalid_argument);
}

TEST_CASE("deviation search: identity deviation never gains") {
  SplitRng rng(5);
  for (int it = 0; it < 30; ++it) {
    const Profile p = random_profile(rng, 3);
    const DeviationReport cm_report = sp_deviation_search(kCm, p);
    REQUIRE(cm_report.gain <= 1e-9);
    REQUIRE(cm_report.gain >= 0.0);  // the honest report itself is in the grid
  }
}

TEST_CASE("deviation search finds a manipulation of the geometric median") {
  const MechanismSpec gm = MechanismSpec::geometric_median_mechanism();
  SplitRng rng(123);
  DeviationGrid grid;
  grid.refinements = 2;
  double best = 0.0;
  for (int it = 0; it < 40 && best < 1e-4; ++it) {
    const Profile p = random_profile(rng, 3);
    best = std::max(best, sp_deviation_search(gm, p, grid).gain);
  }
  CHECK(best >= 1e-4);
}

TEST_CASE("dominance: the plain median itself achieves the closed form") {
  for (int m : {1, 2}) {
    const DominanceResult res = dominance_experiment(kCm, m);
    REQUIRE(std::abs(res.max_ar - theorem1_value(2 * m + 1)) <= 1e-9);
  }
}

TEST_CASE("dominance: origin constants cannot beat the median") {
  std::vector<ExtendedPoint> constants(2, ExtendedPoint{0.0, 0.0});
  const MechanismSpec scheme = MechanismSpec::cwm_scheme(0.0, constants);
  const DominanceResult res = dominance_experiment(scheme, 1);
  CHECK(res.max_ar >= std::sqrt(5.0) / 2.0 - 1e-6);
}

TEST_CASE("dominance: far constants reduce to the plain median near the origin") {
  std::vector<ExtendedPoint> constants{{1e6, 1e6}, {-1e6, -1e6}};
  const MechanismSpec scheme = MechanismSpec::cwm_scheme(0.0, constants);
  const DominanceResult res = dominance_experiment(scheme, 1);
  CHECK(res.max_ar >= std::sqrt(5.0) / 2.0 - 1e-6);
}

TEST_CASE("dominance rejects the geometric-median mechanism") {
  CHECK_THROWS_AS(dominance_experiment(MechanismSpec::geometric_median_mechanism(), 1),
                  std::invalid_argument);
}

TEST_CASE("one-dimensional family ratio at n=51, p=2") {
  const double ratio = one_dimensional_family_ratio(51, 2.0);
  CHECK(ratio == doctest::Approx(std::sqrt(51.0 / 26.0)).epsilon(1e-6));
}

TEST_CASE("conjecture probe stays inside the bounds") {
  const std::vector<ConjectureRow> rows = conjecture_probe(2.0, {3, 5, 51}, 500, 0);
  for (const ConjectureRow& row : rows) {
    REQUIRE(row.best_found <= std::sqrt(2.0) + 1e-9);
    REQUIRE(row.best_found >= 1.0);
    REQUIRE(row.lower == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  }
  const std::vector<ConjectureRow> cubic = conjecture_probe(3.0, {3, 5}, 500, 1);
  for (const ConjectureRow& row : cubic) {
    REQUIRE(row.best_found <= std::pow(2.0, 5.0 / 6.0) + 1e-9);
  }
}

TEST_CASE("ratio is invariant under the symmetries of the median") {
  SplitRng rng(2022);
  for (int it = 0; it < 60; ++it) {
    const int n = 3 + 2 * static_cast<int>(rng.next_below(3));
    const Profile p = random_profile(rng, n);
    const double base = approximation_ratio(kCm, p, kMinisum).ratio;

    Profile translated = p;
    const Point shift{rng.next_in(-4, 4), rng.next_in(-4, 4)};
    for (Point& x : translated.points()) x = x + shift;
    REQUIRE(std::abs(approximation_ratio(kCm, translated, kMinisum).ratio - base) <= 1e-9);

    Profile quarter = p;  // 90-degree rotation permutes the coordinate axes
    for (Point& x : quarter.points()) x = {-x.b, x.a};
    REQUIRE(std::abs(approximation_ratio(kCm, quarter, kMinisum).ratio - base) <= 1e-9);

    Profile mirrored = p;
    for (Point& x : mirrored.points()) x.a = -x.a;
    REQUIRE(std::abs(approximation_ratio(kCm, mirrored, kMinisum).ratio - base) <= 1e-9);

    Profile scaled = p;
    const double s = std::exp(rng.next_in(-1.5, 1.5));
    for (Point& x : scaled.points()) x = s * x;
    REQUIRE(std::abs(approximation_ratio(kCm, scaled, kMinisum).ratio - base) <= 1e-9);
  }
}

TEST_CASE("ratios never drop below one") {
  SplitRng rng(404);
  for (int it = 0; it < 300; ++it) {
    const int n = 1 + 2 * static_cast<int>(rng.next_below(4));
    const Profile p = random_profile(rng, n);
    const NormOrder order =
        it % 3 == 0 ? NormOrder::infinity() : NormOrder::finite(1 + (it % 4));
    REQUIRE(approximation_ratio(kCm, p, order).ratio >= 1.0 - 1e-9);
  }
}
