#pragma once

#include <optional>
#include <string>

#include "asvplan/astar.hpp"
#include "asvplan/obstacles.hpp"
#include "asvplan/solver.hpp"
#include "asvplan/vessel.hpp"

namespace asvplan {

/// Optional axis-aligned box marking the narrow passage of a scenario;
/// used by evaluation tooling, ignored by the planner itself.
struct CorridorBox {
  double x_min = 0.0, x_max = 0.0, y_min = 0.0, y_max = 0.0;
  bool contains(double x, double y) const {
    return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
  }
};

/// Complete description of one planning problem, loaded from a JSON file.
struct Scenario {
  std::string name;
  MapBounds map;
  ObstacleSet obstacles;
  double x_s = 0.0, y_s = 0.0, u_r_s = 0.0;  // start position and speed
  double x_f = 0.0, y_f = 0.0;               // goal position
  double delta_d = 0.0;                      // grid spacing
  double t_max = 0.0;
  int n_ocp = 1;
  int k_ocp = 1;
  CostWeights weights;
  double r_acc = 0.0;       // radius of acceptance
  double r_turn_min = 0.0;  // minimum turning radius
  VesselParams vessel;
  SolverConfig solver;
  std::optional<CorridorBox> passage_corridor;

  /// Cross-field invariants; throws ConfigError.
  void validate() const;
};

/// Parses and validates a scenario file. Throws ConfigError with the
/// offending field on malformed input.
Scenario load_scenario(const std::string& path);

}  // namespace asvplan
