#pragma once

#include <Eigen/Dense>
#include <vector>

#include "asvplan/dual.hpp"

namespace asvplan {

/// Rotated ellipse; alpha is the angle of the x_a semi-axis measured from
/// the global x axis.
struct EllipseObstacle {
  double x_c = 0.0, y_c = 0.0;  // center [m]
  double x_a = 1.0, y_a = 1.0;  // semi-axes [m]
  double alpha = 0.0;           // rotation [rad]
};

/// Obstacle collection plus the epsilon of the log-barrier encoding and the
/// inflation margin used by the discrete search stages only.
struct ObstacleSet {
  std::vector<EllipseObstacle> obstacles;
  double epsilon = 1e-6;
  double inflation = 0.0;

  void validate() const;  // throws std::invalid_argument
};

namespace detail {

/// Normalized rotated quadratic q(x, y): q < 1 inside, q = 1 on the
/// boundary. Scalar-generic for derivative propagation.
template <class S>
S ellipse_quadratic(const EllipseObstacle& e, const S& x, const S& y,
                    double margin = 0.0) {
  const double ca = std::cos(e.alpha);
  const double sa = std::sin(e.alpha);
  const S dx = x - e.x_c;
  const S dy = y - e.y_c;
  const S xi = (dx * ca + dy * sa) * (1.0 / (e.x_a + margin));
  const S eta = (dx * (-sa) + dy * ca) * (1.0 / (e.y_a + margin));
  return xi * xi + eta * eta;
}

/// Smooth constraint value -log(q + eps) + log(1 + eps): positive inside,
/// zero on the boundary, negative outside, finite at the center. Both logs
/// use the same expression so a boundary point (q = 1) cancels exactly.
template <class S>
S g_o_impl(const EllipseObstacle& e, double eps, const S& x, const S& y) {
  return std::log(1.0 + eps) - log(ellipse_quadratic(e, x, y) + eps);
}

}  // namespace detail

double g_o(const EllipseObstacle& e, double eps, double x, double y);

/// True iff (x, y) lies strictly inside any obstacle (inflated semi-axes
/// when requested).
bool point_in_collision(const ObstacleSet& set, double x, double y,
                        bool use_inflation);

/// True iff the closed segment p1-p2 intersects the open interior of any
/// obstacle; analytic quadratic test in each ellipse's unit-circle frame.
bool segment_in_collision(const ObstacleSet& set, const Eigen::Vector2d& p1,
                          const Eigen::Vector2d& p2, bool use_inflation);

}  // namespace asvplan
