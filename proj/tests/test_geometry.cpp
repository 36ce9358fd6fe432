#include <cmath>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "fl/geometry.hpp"
#include "fl/rng.hpp"

using namespace fl;

namespace {

Profile tri() { return Profile{{{2, 0}, {-2, 0}, {0, 1}}}; }

}  // namespace

TEST_CASE("distance basics") {
  CHECK(distance({0, 0}, {0, 0}) == 0.0);
  CHECK(distance({0, 0}, {3, 4}) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(distance({0, 1}, {2, 0}) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-15));
  // symmetry
  SplitRng rng(11);
  for (int i = 0; i < 100; ++i) {
    Point y{rng.next_in(-5, 5), rng.next_in(-5, 5)};
    Point z{rng.next_in(-5, 5), rng.next_in(-5, 5)};
    CHECK(distance(y, z) == distance(z, y));
  }
}

TEST_CASE("distance triangle inequality on random triples") {
  SplitRng rng(42);
  for (int i = 0; i < 1000000; ++i) {
    const Point x{rng.next_in(-10, 10), rng.next_in(-10, 10)};
    const Point y{rng.next_in(-10, 10), rng.next_in(-10, 10)};
    const Point z{rng.next_in(-10, 10), rng.next_in(-10, 10)};
    const double lhs = distance(x, z);
    const double rhs = distance(x, y) + distance(y, z);
    REQUIRE(lhs <= rhs * (1.0 + 1e-12) + 1e-15);
  }
}

TEST_CASE("social cost examples") {
  const Profile p = tri();
  CHECK(social_cost({0, 0}, p, NormOrder::finite(1)) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(social_cost({0, 0}, p, NormOrder::finite(2)) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(social_cost({0, 0}, p, NormOrder::infinity()) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(social_cost({4, -3}, Profile{{{4, -3}, {4, -3}}}, NormOrder::finite(3)) == 0.0);
}

TEST_CASE("social cost is convex in the location") {
  SplitRng rng(7);
  const NormOrder orders[] = {NormOrder::finite(1), NormOrder::finite(2),
                              NormOrder::finite(3.5), NormOrder::infinity()};
  for (int it = 0; it < 2000; ++it) {
    const int n = 1 + static_cast<int>(rng.next_below(7));
    std::vector<Point> pts;
    for (int i = 0; i < n; ++i) pts.push_back({rng.next_in(-10, 10), rng.next_in(-10, 10)});
    const Profile prof{std::move(pts)};
    const Point y{rng.next_in(-12, 12), rng.next_in(-12, 12)};
    const Point z{rng.next_in(-12, 12), rng.next_in(-12, 12)};
    const double t = rng.next_unit();
    const Point mid = t * y + (1.0 - t) * z;
    for (const NormOrder& order : orders) {
      const double lhs = social_cost(mid, prof, order);
      const double rhs =
          t * social_cost(y, prof, order) + (1.0 - t) * social_cost(z, prof, order);
      REQUIRE(lhs <= rhs + 1e-9);
    }
  }
}

TEST_CASE("infinite order is the large-p limit") {
  // The gap to the max norm is at most dmax * (n^(1/p) - 1) and collapses to
  // 0.01 once the two largest distances are separated; near-ties keep the gap
  // at the envelope, so the tight figure is only asserted in generic
  // position.
  SplitRng rng(13);
  int generic = 0;
  for (int it = 0; it < 500; ++it) {
    const int n = 1 + static_cast<int>(rng.next_below(9));
    std::vector<Point> pts;
    for (int i = 0; i < n; ++i) pts.push_back({rng.next_in(-10, 10), rng.next_in(-10, 10)});
    const Profile prof{std::move(pts)};
    const Point y{rng.next_in(-10, 10), rng.next_in(-10, 10)};
    const double inf_cost = social_cost(y, prof, NormOrder::infinity());
    const double p_cost = social_cost(y, prof, NormOrder::finite(128));
    const double envelope = inf_cost * (std::pow(n, 1.0 / 128.0) - 1.0);
    REQUIRE(p_cost >= inf_cost - 1e-12);
    REQUIRE(std::abs(inf_cost - p_cost) <= envelope + 1e-12);
    double top = 0.0, second = 0.0;
    for (const Point& x : prof.points()) {
      const double d = distance(y, x);
      if (d > top) {
        second = top;
        top = d;
      } else {
        second = std::max(second, d);
      }
    }
    if (second <= 0.95 * top) {
      REQUIRE(std::abs(inf_cost - p_cost) <= 0.01);
      ++generic;
    }
  }
  CHECK(generic > 300);
}

TEST_CASE("median rules") {
  CHECK(median_1d({2, -2, 0}, MedianRule::kLower) == 0.0);
  CHECK(median_1d({2, -2, 0}, MedianRule::kUpper) == 0.0);
  CHECK(median_1d({0, 1}, MedianRule::kLower) == 0.0);
  CHECK(median_1d({0, 1}, MedianRule::kUpper) == 1.0);
  CHECK_THROWS_AS(median_1d({}, MedianRule::kLower), std::invalid_argument);

  // Even rules match the odd median after inserting the matching phantom.
  const double inf = std::numeric_limits<double>::infinity();
  SplitRng rng(3);
  for (int it = 0; it < 500; ++it) {
    const int n = 2 * (1 + static_cast<int>(rng.next_below(5)));
    std::vector<double> v;
    for (int i = 0; i < n; ++i) v.push_back(rng.next_in(-4, 4));
    std::vector<double> lo = v, hi = v;
    lo.push_back(-inf);
    hi.push_back(inf);
    CHECK(median_1d(v, MedianRule::kLower) == median_1d(lo, MedianRule::kLower));
    CHECK(median_1d(v, MedianRule::kUpper) == median_1d(hi, MedianRule::kUpper));
  }
}

TEST_CASE("median is permutation invariant and translation equivariant") {
  SplitRng rng(5);
  for (int it = 0; it < 500; ++it) {
    const int n = 1 + static_cast<int>(rng.next_below(8));
    std::vector<double> v;
    for (int i = 0; i < n; ++i) v.push_back(rng.next_in(-9, 9));
    const double med = median_1d(v, MedianRule::kLower);

    std::vector<double> shuffled = v;
    for (std::size_t i = shuffled.size(); i > 1; --i) {
      std::swap(shuffled[i - 1], shuffled[rng.next_below(i)]);
    }
    CHECK(median_1d(shuffled, MedianRule::kLower) == med);

    const double c = rng.next_in(-3, 3);
    std::vector<double> shifted = v;
    for (double& x : shifted) x += c;
    CHECK(median_1d(shifted, MedianRule::kLower) == med + c);
  }
}

TEST_CASE("median stability interval matches brute force") {
  SplitRng rng(17);
  for (int it = 0; it < 2000; ++it) {
    const int n = 2 * static_cast<int>(rng.next_below(4)) + 3;  // 3,5,7,9
    std::vector<double> v;
    for (int i = 0; i < n; ++i) {
      // small integer coordinates make exact ties common
      v.push_back(static_cast<double>(static_cast<int>(rng.next_below(7)) - 3));
    }
    const std::size_t idx = rng.next_below(n);
    const double med = median_1d(v, MedianRule::kLower);
    const Interval iv = median_stability_interval(v, idx);
    for (double cand = -5.0; cand <= 5.0; cand += 0.5) {
      std::vector<double> w = v;
      w[idx] = cand;
      const bool keeps = median_1d(w, MedianRule::kLower) == med;
      REQUIRE(keeps == iv.contains(cand));
    }
  }
}

TEST_CASE("profile validation") {
  std::vector<Point> empty;
  CHECK_THROWS_AS(Profile{empty}, std::invalid_argument);
  std::vector<Point> bad{{std::numeric_limits<double>::quiet_NaN(), 0}};
  CHECK_THROWS_AS(Profile{bad}, std::invalid_argument);
  CHECK_THROWS_AS(NormOrder::finite(0.5), std::invalid_argument);
  CHECK(NormOrder::infinity().is_infinite());
}

TEST_CASE("split rng is deterministic and order independent") {
  SplitRng a(123);
  SplitRng b(123);
  CHECK(a.next_u64() == b.next_u64());
  SplitRng s1 = SplitRng(9).split(4);
  SplitRng s2 = SplitRng(9).split(4);
  SplitRng other = SplitRng(9).split(5);
  const auto v1 = s1.next_u64();
  CHECK(v1 == s2.next_u64());
  CHECK(v1 != other.next_u64());
  // unit draws stay in [0, 1)
  SplitRng u(77);
  for (int i = 0; i < 1000; ++i) {
    const double x = u.next_unit();
    REQUIRE(x >= 0.0);
    REQUIRE(x < 1.0);
  }
}
