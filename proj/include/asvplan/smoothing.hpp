#pragma once

#include <Eigen/Dense>
#include <string>
#include <variant>
#include <vector>

#include "asvplan/astar.hpp"
#include "asvplan/obstacles.hpp"

namespace asvplan {

/// Reduced waypoint sequence, start first. Consecutive segments are
/// collision-free against the inflated obstacle set.
struct WaypointPath {
  std::vector<Eigen::Vector2d> waypoints;
};

/// Sample of the geometric path at arc length s.
struct PathSample {
  Eigen::Vector2d position;
  double gamma = 0.0;      // tangent angle, unwrapped [rad]
  double turn_rate = 0.0;  // 0 on straights, +-u_nom / R on arcs [rad/s]
};

/// Alternating straight segments and tangent circle arcs, parametrized by
/// arc length. Tangent angles are stored unwrapped and are continuous
/// across element joints.
class GeomPath {
 public:
  struct Straight {
    Eigen::Vector2d start;
    Eigen::Vector2d direction;  // unit
  };
  struct Arc {
    Eigen::Vector2d center;
    double radius = 0.0;
    double entry_angle = 0.0;  // angle of (entry point - center)
    double turn_sign = 0.0;    // +1 left, -1 right
  };
  struct Element {
    std::variant<Straight, Arc> shape;
    double s_start = 0.0;
    double length = 0.0;
    double gamma_entry = 0.0;
  };

  GeomPath() = default;
  GeomPath(std::vector<Element> elements, double total_length)
      : elements_(std::move(elements)), total_length_(total_length) {}

  double total_length() const { return total_length_; }
  const std::vector<Element>& elements() const { return elements_; }

  /// Position, tangent angle and turn rate at arc length s in [0, L].
  /// Throws std::out_of_range outside the domain.
  PathSample eval(double s, double u_nom) const;

  /// Nominal speed used when exporting turn rates; set by the lifting
  /// stage, zero until then.
  double u_nom = 0.0;

 private:
  std::vector<Element> elements_;
  double total_length_ = 0.0;
};

/// Waypoint reduction: starting from the last grid waypoint, repeatedly
/// jump to the lowest-index waypoint with a collision-free connecting
/// segment until the first is reached, then reverse into start-to-goal
/// order. Requires at least two input nodes.
WaypointPath reduce_waypoints(const GridPath& raw, const Grid& grid,
                              const ObstacleSet& set);

/// Connects waypoints with straights and inscribed tangent arcs. At each
/// interior corner with course change dg, the arc radius is
/// max(r_min, r_acc / tan(|dg| / 2)) and the tangent points sit
/// d = R tan(|dg| / 2) back/forward along the adjacent segments.
/// Throws InfeasibleCorner when d exceeds half of either segment.
GeomPath connect_waypoints(const WaypointPath& wp, double r_acc, double r_min);

/// Sampled dump (s, x, y, gamma, r) for plotting.
void write_path_csv(const GeomPath& g, double u_nom, int samples,
                    const std::string& path);

}  // namespace asvplan
