#pragma once

#include <stdexcept>
#include <string>

namespace asvplan {

/// Base class for failures of the planning stages. The CLI maps these to
/// exit code 2 (planning infeasible).
class PlanningError : public std::runtime_error {
 public:
  explicit PlanningError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Goal unreachable on the search grid.
class NoPathFound : public PlanningError {
 public:
  explicit NoPathFound(const std::string& msg) : PlanningError(msg) {}
};

/// Start or goal position does not snap to an unblocked grid node.
class SnapFailed : public PlanningError {
 public:
  explicit SnapFailed(const std::string& msg) : PlanningError(msg) {}
};

/// A turn arc does not fit between its adjacent waypoint segments.
class InfeasibleCorner : public PlanningError {
 public:
  InfeasibleCorner(const std::string& msg, int waypoint)
      : PlanningError(msg), waypoint_index(waypoint) {}
  int waypoint_index;
};

/// The nominal speed implied by L_path / t_max exceeds the surge bound.
class InfeasibleSpeed : public PlanningError {
 public:
  explicit InfeasibleSpeed(const std::string& msg) : PlanningError(msg) {}
};

/// Scenario file malformed or violates an invariant. Exit code 4.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace asvplan
