#include "asvplan/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "asvplan/errors.hpp"

namespace asvplan {

PathSample GeomPath::eval(double s, double u_nom_arg) const {
  // Roundoff grace at the ends; anything further out is a caller bug.
  const double grace = 1e-9 * std::max(1.0, total_length_);
  if (s < -grace || s > total_length_ + grace)
    throw std::out_of_range("arc length outside [0, L_path]");
  s = std::clamp(s, 0.0, total_length_);
  // Linear scan is fine: element counts are small (two per corner).
  std::size_t idx = 0;
  while (idx + 1 < elements_.size() &&
         s >= elements_[idx].s_start + elements_[idx].length)
    ++idx;
  const Element& e = elements_[idx];
  const double ds = s - e.s_start;
  PathSample out;
  if (const auto* st = std::get_if<Straight>(&e.shape)) {
    out.position = st->start + ds * st->direction;
    out.gamma = e.gamma_entry;
    out.turn_rate = 0.0;
  } else {
    const auto& arc = std::get<Arc>(e.shape);
    const double phi = arc.entry_angle + arc.turn_sign * ds / arc.radius;
    out.position =
        arc.center + arc.radius * Eigen::Vector2d(std::cos(phi), std::sin(phi));
    out.gamma = e.gamma_entry + arc.turn_sign * ds / arc.radius;
    out.turn_rate = arc.turn_sign * u_nom_arg / arc.radius;
  }
  return out;
}

WaypointPath reduce_waypoints(const GridPath& raw, const Grid& grid,
                              const ObstacleSet& set) {
  const std::vector<Eigen::Vector2d> pts = raw.points(grid);
  if (pts.size() < 2)
    throw std::invalid_argument("waypoint reduction needs at least two nodes");

  // Greedy jump-to-lowest-index scan, built goal-to-start.
  std::vector<Eigen::Vector2d> reduced;
  std::size_t i = pts.size() - 1;
  reduced.push_back(pts[i]);
  while (i > 0) {
    for (std::size_t j = 0; j < i; ++j) {
      if (!segment_in_collision(set, pts[i], pts[j], /*use_inflation=*/true)) {
        reduced.push_back(pts[j]);
        i = j;
        break;
      }
    }
  }
  std::reverse(reduced.begin(), reduced.end());
  return {std::move(reduced)};
}

GeomPath connect_waypoints(const WaypointPath& wp, double r_acc, double r_min) {
  const auto& p = wp.waypoints;
  if (p.size() < 2)
    throw std::invalid_argument("need at least two waypoints");
  if (r_acc <= 0.0 || r_min <= 0.0)
    throw std::invalid_argument("radii must be positive");

  const std::size_t n = p.size();
  std::vector<Eigen::Vector2d> dir(n - 1);
  std::vector<double> seg_len(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const Eigen::Vector2d d = p[k + 1] - p[k];
    seg_len[k] = d.norm();
    if (seg_len[k] <= 0.0)
      throw std::invalid_argument("zero-length waypoint segment");
    dir[k] = d / seg_len[k];
  }

  // Tangent offsets d_k per interior corner; 0 marks a collinear corner.
  std::vector<double> turn(n, 0.0), radius(n, 0.0), offset(n, 0.0);
  constexpr double kCollinearTol = 1e-12;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const Eigen::Vector2d& a = dir[k - 1];
    const Eigen::Vector2d& b = dir[k];
    const double cross = a.x() * b.y() - a.y() * b.x();
    const double dg = std::atan2(cross, a.dot(b));
    if (std::abs(dg) <= kCollinearTol) continue;
    if (std::abs(dg) >= std::numbers::pi - 1e-9)
      throw InfeasibleCorner("course reversal cannot be filleted",
                             static_cast<int>(k));
    const double half_tan = std::tan(std::abs(dg) / 2.0);
    const double r = std::max(r_min, r_acc / half_tan);
    const double d = r * half_tan;
    if (d > 0.5 * seg_len[k - 1] + 1e-12 || d > 0.5 * seg_len[k] + 1e-12)
      throw InfeasibleCorner("turn arc does not fit between waypoints",
                             static_cast<int>(k));
    turn[k] = dg;
    radius[k] = r;
    offset[k] = d;
  }

  std::vector<GeomPath::Element> elements;
  double s = 0.0;
  double gamma = std::atan2(dir[0].y(), dir[0].x());
  Eigen::Vector2d cursor = p[0];

  auto push_straight = [&](const Eigen::Vector2d& from, const Eigen::Vector2d& to,
                           const Eigen::Vector2d& d) {
    const double len = (to - from).norm();
    if (len <= 1e-12) return;
    elements.push_back({GeomPath::Straight{from, d}, s, len, gamma});
    s += len;
  };

  for (std::size_t k = 1; k + 1 < n; ++k) {
    const Eigen::Vector2d entry = p[k] - offset[k] * dir[k - 1];
    push_straight(cursor, entry, dir[k - 1]);
    if (turn[k] != 0.0) {
      const double theta = std::abs(turn[k]);
      const Eigen::Vector2d bisector = (dir[k] - dir[k - 1]).normalized();
      const Eigen::Vector2d center =
          p[k] + (radius[k] / std::cos(theta / 2.0)) * bisector;
      const double entry_angle =
          std::atan2(entry.y() - center.y(), entry.x() - center.x());
      const double arc_len = radius[k] * theta;
      const double sign = turn[k] > 0.0 ? 1.0 : -1.0;
      elements.push_back(
          {GeomPath::Arc{center, radius[k], entry_angle, sign}, s, arc_len,
           gamma});
      s += arc_len;
      gamma += turn[k];
    }
    cursor = p[k] + offset[k] * dir[k];
  }
  push_straight(cursor, p[n - 1], dir[n - 2]);

  if (elements.empty()) {
    // Degenerate all-coincident input is rejected above; a single straight
    // still needs an element.
    elements.push_back({GeomPath::Straight{p[0], dir[0]}, 0.0,
                        (p[n - 1] - p[0]).norm(), gamma});
    s = elements.back().length;
  }
  return GeomPath(std::move(elements), s);
}

void write_path_csv(const GeomPath& g, double u_nom, int samples,
                    const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "s,x,y,gamma,r\n";
  for (int i = 0; i < samples; ++i) {
    const double s = g.total_length() * i / (samples - 1);
    const PathSample ps = g.eval(s, u_nom);
    out << s << ',' << ps.position.x() << ',' << ps.position.y() << ','
        << ps.gamma << ',' << ps.turn_rate << '\n';
  }
}

}  // namespace asvplan
