#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "asvplan/obstacles.hpp"

using namespace asvplan;

namespace {

EllipseObstacle random_ellipse(std::mt19937& rng) {
  std::uniform_real_distribution<double> center(-100.0, 100.0);
  std::uniform_real_distribution<double> axis(2.0, 60.0);
  std::uniform_real_distribution<double> angle(-std::numbers::pi,
                                               std::numbers::pi);
  return {center(rng), center(rng), axis(rng), axis(rng), angle(rng)};
}

// Point on the boundary at parameter angle t (exact up to roundoff).
Eigen::Vector2d boundary_point(const EllipseObstacle& e, double t) {
  const double c = std::cos(e.alpha), s = std::sin(e.alpha);
  const double bx = e.x_a * std::cos(t), by = e.y_a * std::sin(t);
  return {e.x_c + c * bx - s * by, e.y_c + s * bx + c * by};
}

}  // namespace

TEST_CASE("g_o boundary, center, and outside values") {
  const double eps = 1e-6;
  SUBCASE("boundary point evaluates to ~0") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> t(-std::numbers::pi, std::numbers::pi);
    for (int i = 0; i < 1000; ++i) {
      const EllipseObstacle e = random_ellipse(rng);
      const Eigen::Vector2d p = boundary_point(e, t(rng));
      CHECK(std::abs(g_o(e, eps, p.x(), p.y())) <= 1e-12);
    }
  }
  SUBCASE("center value is log(1+eps) - log(eps)") {
    const EllipseObstacle e{10.0, -4.0, 7.0, 3.0, 0.6};
    const double expected = std::log(1.0 + eps) - std::log(eps);
    CHECK(g_o(e, eps, e.x_c, e.y_c) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(g_o(e, eps, e.x_c, e.y_c) > 0.0);
  }
  SUBCASE("circle of radius 10, point at distance 20: q = 4") {
    for (double alpha : {0.0, 0.3, -1.2}) {
      const EllipseObstacle e{5.0, 5.0, 10.0, 10.0, alpha};
      const double expected = -std::log(4.0 + eps) + std::log(1.0 + eps);
      CHECK(g_o(e, eps, 5.0 + 20.0, 5.0) ==
            doctest::Approx(expected).epsilon(1e-12));
      CHECK(expected < 0.0);
    }
  }
}

TEST_CASE("g_o sign matches point_in_collision") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> coord(-150.0, 150.0);
  for (int trial = 0; trial < 10; ++trial) {
    ObstacleSet set;
    set.obstacles.push_back(random_ellipse(rng));
    const auto& e = set.obstacles[0];
    for (int i = 0; i < 100000; ++i) {
      const double x = coord(rng), y = coord(rng);
      const double q = detail::ellipse_quadratic(e, x, y);
      const bool inside = point_in_collision(set, x, y, false);
      CHECK(inside == (q < 1.0));
      if (q < 1.0 - 1e-9) CHECK(g_o(e, set.epsilon, x, y) > 0.0);
      if (q > 1.0 + 1e-9) CHECK(g_o(e, set.epsilon, x, y) < 0.0);
    }
  }
}

TEST_CASE("g_o invariant under joint rotation about the center") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    EllipseObstacle e = random_ellipse(rng);
    const double px = e.x_c + 80.0 * d(rng);
    const double py = e.y_c + 80.0 * d(rng);
    const double rot = std::numbers::pi * d(rng);
    EllipseObstacle er = e;
    er.alpha += rot;
    const double c = std::cos(rot), s = std::sin(rot);
    const double rx = e.x_c + c * (px - e.x_c) - s * (py - e.y_c);
    const double ry = e.y_c + s * (px - e.x_c) + c * (py - e.y_c);
    CHECK(g_o(e, 1e-6, px, py) ==
          doctest::Approx(g_o(er, 1e-6, rx, ry)).epsilon(1e-10));
  }
}

TEST_CASE("point_in_collision basics") {
  ObstacleSet empty;
  CHECK_FALSE(point_in_collision(empty, 0.0, 0.0, false));
  CHECK_FALSE(point_in_collision(empty, 1e6, -1e6, true));

  ObstacleSet set;
  set.obstacles.push_back({0.0, 0.0, 5.0, 2.0, 0.4});
  set.inflation = 1.0;
  CHECK(point_in_collision(set, 0.0, 0.0, false));

  // A boundary point is not in the open interior, but inflation swallows it.
  const Eigen::Vector2d b = boundary_point(set.obstacles[0], 0.85);
  CHECK_FALSE(point_in_collision(set, b.x(), b.y(), false));
  CHECK(point_in_collision(set, b.x(), b.y(), true));
}

TEST_CASE("segment collision basics") {
  ObstacleSet set;
  set.obstacles.push_back({0.0, 0.0, 10.0, 4.0, 0.0});

  CHECK_FALSE(segment_in_collision(set, {-20.0, 10.0}, {20.0, 10.0}, false));
  CHECK(segment_in_collision(set, {-20.0, 0.0}, {20.0, 0.0}, false));
  // Both endpoints outside, crossing through.
  CHECK(segment_in_collision(set, {-20.0, -8.0}, {20.0, 8.0}, false));
  // Fully inside.
  CHECK(segment_in_collision(set, {-1.0, 0.0}, {1.0, 0.0}, false));

  SUBCASE("tangent line is collision-free (open interior)") {
    ObstacleSet circ;
    circ.obstacles.push_back({3.0, -2.0, 6.0, 6.0, 1.1});
    // Horizontal line touching the top of the circle.
    CHECK_FALSE(segment_in_collision(circ, {-30.0, 4.0}, {30.0, 4.0}, false));
    // Slightly lower line crosses.
    CHECK(segment_in_collision(circ, {-30.0, 3.9999}, {30.0, 3.9999}, false));
  }

  SUBCASE("inflation applies when requested") {
    CHECK_FALSE(segment_in_collision(set, {-20.0, 4.5}, {20.0, 4.5}, false));
    ObstacleSet inflated = set;
    inflated.inflation = 1.0;
    CHECK(segment_in_collision(inflated, {-20.0, 4.5}, {20.0, 4.5}, true));
    CHECK_FALSE(segment_in_collision(inflated, {-20.0, 4.5}, {20.0, 4.5}, false));
  }
}

TEST_CASE("segment collision agrees with dense sampling") {
  std::mt19937 rng(314159);
  std::uniform_real_distribution<double> coord(-120.0, 120.0);
  int disagreements = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    ObstacleSet set;
    set.obstacles.push_back(random_ellipse(rng));
    const Eigen::Vector2d p1(coord(rng), coord(rng));
    const Eigen::Vector2d p2(coord(rng), coord(rng));
    const bool analytic = segment_in_collision(set, p1, p2, false);

    bool sampled = false;
    for (int i = 0; i <= 1000; ++i) {
      const Eigen::Vector2d p = p1 + (p2 - p1) * (double(i) / 1000.0);
      if (point_in_collision(set, p.x(), p.y(), false)) {
        sampled = true;
        break;
      }
    }
    // Sampling can only miss grazing intersections, never invent one.
    if (sampled && !analytic) ++disagreements;
    if (analytic && !sampled) {
      // Verify the analytic hit with a refined probe near the deepest point.
      const auto& e = set.obstacles[0];
      double best = 1e30;
      for (int i = 0; i <= 100000; ++i) {
        const Eigen::Vector2d p = p1 + (p2 - p1) * (double(i) / 100000.0);
        best = std::min(best, detail::ellipse_quadratic(e, p.x(), p.y()));
      }
      if (best >= 1.0) ++disagreements;
    }
  }
  CHECK(disagreements == 0);
}

TEST_CASE("obstacle set validation") {
  ObstacleSet set;
  set.obstacles.push_back({0.0, 0.0, 1.0, -1.0, 0.0});
  CHECK_THROWS_AS(set.validate(), std::invalid_argument);
  set.obstacles[0].y_a = 1.0;
  set.epsilon = 0.0;
  CHECK_THROWS_AS(set.validate(), std::invalid_argument);
  set.epsilon = 1e-6;
  set.inflation = -2.0;
  CHECK_THROWS_AS(set.validate(), std::invalid_argument);
}
