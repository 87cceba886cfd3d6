#include "asvplan/obstacles.hpp"

#include <algorithm>
#include <stdexcept>

namespace asvplan {

void ObstacleSet::validate() const {
  if (epsilon <= 0.0) throw std::invalid_argument("epsilon must be positive");
  if (inflation < 0.0)
    throw std::invalid_argument("inflation must be nonnegative");
  for (const auto& e : obstacles)
    if (e.x_a <= 0.0 || e.y_a <= 0.0)
      throw std::invalid_argument("ellipse semi-axes must be positive");
}

double g_o(const EllipseObstacle& e, double eps, double x, double y) {
  return detail::g_o_impl(e, eps, x, y);
}

bool point_in_collision(const ObstacleSet& set, double x, double y,
                        bool use_inflation) {
  const double margin = use_inflation ? set.inflation : 0.0;
  for (const auto& e : set.obstacles)
    if (detail::ellipse_quadratic(e, x, y, margin) < 1.0) return true;
  return false;
}

namespace {

// Maps a point into the ellipse's unit-circle frame.
Eigen::Vector2d to_unit_frame(const EllipseObstacle& e, double margin,
                              const Eigen::Vector2d& p) {
  const double ca = std::cos(e.alpha);
  const double sa = std::sin(e.alpha);
  const double dx = p.x() - e.x_c;
  const double dy = p.y() - e.y_c;
  return {(dx * ca + dy * sa) / (e.x_a + margin),
          (-dx * sa + dy * ca) / (e.y_a + margin)};
}

// Strict-interior intersection of a segment with the unit disc: the minimum
// of |a + t(b - a)|^2 over t in [0, 1] must drop below 1. Tangency keeps the
// segment collision-free.
bool segment_hits_unit_disc(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  const Eigen::Vector2d d = b - a;
  const double qa = d.squaredNorm();
  if (qa == 0.0) return a.squaredNorm() < 1.0;
  const double t = std::clamp(-a.dot(d) / qa, 0.0, 1.0);
  return (a + t * d).squaredNorm() < 1.0;
}

}  // namespace

bool segment_in_collision(const ObstacleSet& set, const Eigen::Vector2d& p1,
                          const Eigen::Vector2d& p2, bool use_inflation) {
  const double margin = use_inflation ? set.inflation : 0.0;
  for (const auto& e : set.obstacles) {
    const Eigen::Vector2d a = to_unit_frame(e, margin, p1);
    const Eigen::Vector2d b = to_unit_frame(e, margin, p2);
    if (segment_hits_unit_disc(a, b)) return true;
  }
  return false;
}

}  // namespace asvplan
