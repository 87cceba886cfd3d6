#include "asvplan/astar.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <stdexcept>

#include "asvplan/errors.hpp"

namespace asvplan {

std::vector<Eigen::Vector2d> GridPath::points(const Grid& g) const {
  std::vector<Eigen::Vector2d> out;
  out.reserve(nodes.size());
  for (const auto& n : nodes) out.push_back(g.point(n.x(), n.y()));
  return out;
}

Grid build_grid(const ObstacleSet& set, const MapBounds& bounds,
                double spacing) {
  if (spacing <= 0.0) throw std::invalid_argument("grid spacing must be > 0");
  if (bounds.x_max <= bounds.x_min || bounds.y_max <= bounds.y_min)
    throw std::invalid_argument("degenerate map bounds");
  Grid g;
  g.origin_x = bounds.x_min;
  g.origin_y = bounds.y_min;
  g.spacing = spacing;
  g.width = static_cast<int>(std::floor((bounds.x_max - bounds.x_min) / spacing)) + 1;
  g.height = static_cast<int>(std::floor((bounds.y_max - bounds.y_min) / spacing)) + 1;
  if (g.width < 2 || g.height < 2)
    throw std::invalid_argument("grid must have at least 2x2 nodes");
  g.blocked.assign(static_cast<std::size_t>(g.width) * g.height, 0);
  for (int j = 0; j < g.height; ++j)
    for (int i = 0; i < g.width; ++i) {
      const Eigen::Vector2d p = g.point(i, j);
      if (point_in_collision(set, p.x(), p.y(), /*use_inflation=*/true))
        g.blocked[g.index(i, j)] = 1;
    }
  return g;
}

namespace {

constexpr int kMoves[8][2] = {{1, 0},  {-1, 0}, {0, 1},  {0, -1},
                              {1, 1},  {1, -1}, {-1, 1}, {-1, -1}};

struct OpenEntry {
  double f;
  double h;
  int node;
  bool operator>(const OpenEntry& o) const {
    if (f != o.f) return f > o.f;
    if (h != o.h) return h > o.h;
    return node > o.node;
  }
};

// Path cost held as step counts; the comparable value n_s*d + n_d*sqrt(2)*d
// is assembled from them in one canonical expression.
struct StepCount {
  int straight = 0;
  int diagonal = 0;
  double value(double spacing) const {
    return straight * spacing + diagonal * (std::sqrt(2.0) * spacing);
  }
};

// Nearest unblocked node within one grid spacing of p; lexicographic (i, j)
// breaks distance ties. Returns -1 if none qualifies.
int snap_node(const Grid& g, const Eigen::Vector2d& p) {
  const int ci = static_cast<int>(std::lround((p.x() - g.origin_x) / g.spacing));
  const int cj = static_cast<int>(std::lround((p.y() - g.origin_y) / g.spacing));
  int best = -1;
  double best_dist = std::numeric_limits<double>::infinity();
  for (int dj = -1; dj <= 1; ++dj)
    for (int di = -1; di <= 1; ++di) {
      const int i = ci + di;
      const int j = cj + dj;
      if (!g.in_range(i, j) || g.is_blocked(i, j)) continue;
      const double dist = (g.point(i, j) - p).norm();
      if (dist > g.spacing + 1e-12) continue;
      if (dist < best_dist - 1e-15 ||
          (std::abs(dist - best_dist) <= 1e-15 &&
           (best < 0 || g.index(i, j) < best))) {
        best = g.index(i, j);
        best_dist = dist;
      }
    }
  return best;
}

}  // namespace

GridPath astar_search(const Grid& grid, const ObstacleSet& set,
                      const Eigen::Vector2d& start,
                      const Eigen::Vector2d& goal) {
  const int start_node = snap_node(grid, start);
  const int goal_node = snap_node(grid, goal);
  if (start_node < 0) throw SnapFailed("start does not snap to an unblocked node");
  if (goal_node < 0) throw SnapFailed("goal does not snap to an unblocked node");

  const int n = grid.width * grid.height;
  const Eigen::Vector2d goal_pt =
      grid.point(goal_node % grid.width, goal_node / grid.width);

  std::vector<StepCount> g_cost(n);
  std::vector<double> g_value(n, std::numeric_limits<double>::infinity());
  std::vector<int> parent(n, -1);
  std::vector<std::uint8_t> closed(n, 0);

  auto heuristic = [&](int node) {
    return (grid.point(node % grid.width, node / grid.width) - goal_pt).norm();
  };

  std::priority_queue<OpenEntry, std::vector<OpenEntry>, std::greater<>> open;
  g_value[start_node] = 0.0;
  open.push({heuristic(start_node), heuristic(start_node), start_node});

  while (!open.empty()) {
    const OpenEntry top = open.top();
    open.pop();
    if (closed[top.node]) continue;  // stale duplicate
    closed[top.node] = 1;
    if (top.node == goal_node) break;

    const int ci = top.node % grid.width;
    const int cj = top.node / grid.width;
    const Eigen::Vector2d cp = grid.point(ci, cj);
    for (const auto& mv : kMoves) {
      const int ni = ci + mv[0];
      const int nj = cj + mv[1];
      if (!grid.in_range(ni, nj) || grid.is_blocked(ni, nj)) continue;
      const int nn = grid.index(ni, nj);
      if (closed[nn]) continue;
      const bool diagonal = mv[0] != 0 && mv[1] != 0;
      if (segment_in_collision(set, cp, grid.point(ni, nj),
                               /*use_inflation=*/true))
        continue;
      StepCount cand = g_cost[top.node];
      (diagonal ? cand.diagonal : cand.straight) += 1;
      const double cand_value = cand.value(grid.spacing);
      if (cand_value < g_value[nn]) {
        g_cost[nn] = cand;
        g_value[nn] = cand_value;
        parent[nn] = top.node;
        const double h = heuristic(nn);
        open.push({cand_value + h, h, nn});
      }
    }
  }

  if (!closed[goal_node]) throw NoPathFound("goal unreachable on the grid");

  GridPath path;
  for (int node = goal_node; node >= 0; node = parent[node])
    path.nodes.emplace_back(node % grid.width, node / grid.width);
  std::reverse(path.nodes.begin(), path.nodes.end());
  path.straight_steps = g_cost[goal_node].straight;
  path.diagonal_steps = g_cost[goal_node].diagonal;
  path.length = g_cost[goal_node].value(grid.spacing);
  return path;
}

void write_grid_csv(const Grid& grid, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "i,j,x,y,blocked\n";
  for (int j = 0; j < grid.height; ++j)
    for (int i = 0; i < grid.width; ++i) {
      const Eigen::Vector2d p = grid.point(i, j);
      out << i << ',' << j << ',' << p.x() << ',' << p.y() << ','
          << int(grid.is_blocked(i, j)) << '\n';
    }
}

}  // namespace asvplan
