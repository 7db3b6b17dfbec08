#include <catch_amalgamated.hpp>

#include <random>

#include "lbp/geometry.hpp"
#include "lbp/metrics.hpp"

using namespace lbp;
using Catch::Approx;

TEST_CASE("band crossing: interpolated y inside the span") {
  const PassVector pass{{25, 30}, {40, 35}};
  CHECK(segment_intersects_band(pass, 30, 20, 50));
  CHECK_FALSE(segment_intersects_band(pass, 30, 40, 50));
}

TEST_CASE("band crossing: centroid outside the pass x-interval") {
  CHECK_FALSE(segment_intersects_band(PassVector{{25, 30}, {28, 35}}, 30, 0, 68));
  // Endpoints are excluded.
  CHECK_FALSE(segment_intersects_band(PassVector{{30, 30}, {40, 30}}, 30, 0, 68));
  CHECK_FALSE(segment_intersects_band(PassVector{{20, 30}, {30, 30}}, 30, 0, 68));
}

TEST_CASE("band crossing: span bounds are inclusive") {
  const PassVector flat{{20, 34}, {40, 34}};
  CHECK(segment_intersects_band(flat, 30, 34, 50));
  CHECK(segment_intersects_band(flat, 30, 20, 34));
  CHECK_FALSE(segment_intersects_band(flat, 30, 34.001, 50));
}

TEST_CASE("band crossing is symmetric in the endpoints") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> x(0, 105), y(0, 68);
  for (int i = 0; i < 2000; ++i) {
    const Point2 a{x(rng), y(rng)}, b{x(rng), y(rng)};
    const double xc = x(rng), lo = y(rng), hi = lo + 20;
    CHECK(segment_intersects_band({a, b}, xc, lo, hi) == segment_intersects_band({b, a}, xc, lo, hi));
  }
}

TEST_CASE("point to segment distance") {
  const PassVector seg{{0, 0}, {10, 0}};
  CHECK(point_to_segment_distance({5, 5}, seg) == Approx(5.0));
  CHECK(point_to_segment_distance({-3, 4}, seg) == Approx(5.0));
  CHECK(point_to_segment_distance({13, -4}, seg) == Approx(5.0));
}

TEST_CASE("point to segment distance matches dense sampling") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> x(0, 105), y(0, 68);
  for (int trial = 0; trial < 50; ++trial) {
    const Point2 p{x(rng), y(rng)};
    const PassVector seg{{x(rng), y(rng)}, {x(rng), y(rng)}};
    double best = 1e300;
    constexpr int kSamples = 100000;
    for (int k = 0; k <= kSamples; ++k) {
      const double f = static_cast<double>(k) / kSamples;
      best = std::min(best, distance(p, {seg.start.x + (seg.end.x - seg.start.x) * f,
                                         seg.start.y + (seg.end.y - seg.start.y) * f}));
    }
    CHECK(std::abs(point_to_segment_distance(p, seg) - best) < 1e-3);
  }
}

TEST_CASE("nearest opponent distance") {
  const std::vector<Point2> one{{3, 4}};
  CHECK(nearest_opponent_distance({0, 0}, one) == Approx(5.0));
  const std::vector<Point2> on_top{{7, 7}, {20, 20}};
  CHECK(nearest_opponent_distance({7, 7}, on_top) == 0.0);

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> x(0, 105), y(0, 68);
  std::vector<Point2> many;
  for (int i = 0; i < 22; ++i) many.push_back({x(rng), y(rng)});
  const Point2 p{x(rng), y(rng)};
  double best = 1e300;
  for (const auto& q : many) best = std::min(best, distance(p, q));
  CHECK(nearest_opponent_distance(p, many) == best);
}

TEST_CASE("pass vector validity") {
  CHECK(PassVector{{0, 0}, {3, 4}}.is_valid());
  CHECK_FALSE(PassVector{{1, 1}, {1, 1}}.is_valid());
  CHECK_FALSE(PassVector{{1, 1}, {1.05, 1}}.is_valid());
  CHECK_FALSE(PassVector{{std::nan(""), 1}, {10, 1}}.is_valid());
}

TEST_CASE("verticality and pass distance") {
  CHECK(compute_verticality({{10, 30}, {30, 30}}) == Approx(1.0));
  CHECK(compute_verticality({{10, 30}, {10, 50}}) == Approx(0.0));
  CHECK(compute_verticality({{10, 30}, {22, 39}}) == Approx(0.8));
  CHECK(compute_verticality({{30, 30}, {10, 30}}) == 0.0);  // backward clamps at 0
  CHECK(pass_distance({{0, 0}, {3, 4}}) == Approx(5.0));
}
