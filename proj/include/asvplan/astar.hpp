#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "asvplan/obstacles.hpp"

namespace asvplan {

/// Axis-aligned planning region.
struct MapBounds {
  double x_min = 0.0, x_max = 0.0;
  double y_min = 0.0, y_max = 0.0;
};

/// Uniform grid over the map; node (i, j) sits at
/// origin + (i * spacing, j * spacing).
struct Grid {
  double origin_x = 0.0, origin_y = 0.0;
  double spacing = 1.0;
  int width = 0, height = 0;
  std::vector<std::uint8_t> blocked;  // width * height, row-major in j

  int index(int i, int j) const { return j * width + i; }
  bool in_range(int i, int j) const {
    return i >= 0 && i < width && j >= 0 && j < height;
  }
  bool is_blocked(int i, int j) const { return blocked[index(i, j)] != 0; }
  Eigen::Vector2d point(int i, int j) const {
    return {origin_x + i * spacing, origin_y + j * spacing};
  }
};

/// A* result: grid nodes from start to goal plus the path length. The
/// length is assembled from the straight/diagonal step counts so that two
/// searches returning equally long paths produce bit-identical values.
struct GridPath {
  std::vector<Eigen::Vector2i> nodes;
  double length = 0.0;
  int straight_steps = 0;
  int diagonal_steps = 0;

  std::vector<Eigen::Vector2d> points(const Grid& g) const;
};

/// Builds the occupancy grid: a node is blocked iff its world point lies in
/// the inflated interior of some obstacle. Throws std::invalid_argument on
/// degenerate bounds or nonpositive spacing.
Grid build_grid(const ObstacleSet& set, const MapBounds& bounds,
                double spacing);

/// Shortest 8-connected path between the nodes nearest to start and goal.
/// Edges must also pass the segment collision test against the inflated
/// set, which stops diagonal corner-cutting. Euclidean cost and heuristic.
/// Throws SnapFailed / NoPathFound.
GridPath astar_search(const Grid& grid, const ObstacleSet& set,
                      const Eigen::Vector2d& start, const Eigen::Vector2d& goal);

/// Occupancy dump (i, j, x, y, blocked) for debugging.
void write_grid_csv(const Grid& grid, const std::string& path);

}  // namespace asvplan
