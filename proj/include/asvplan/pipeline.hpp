#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "asvplan/scenario.hpp"
#include "asvplan/smoothing.hpp"
#include "asvplan/solver.hpp"
#include "asvplan/warmstart.hpp"

namespace asvplan {

enum class Mode { Warm, Cold, GuessOnly };

Mode parse_mode(const std::string& name);  // throws ConfigError
const char* to_string(Mode m);

struct RunOptions {
  int n_ocp_override = 0;         // 0 keeps the scenario value
  int k_ocp_override = 0;         // 0 keeps the scenario value
  std::ostream* trace = nullptr;  // solver iteration trace
};

struct StageTimings {
  double astar_s = 0.0;
  double smoothing_s = 0.0;
  double ocp_s = 0.0;
  double total() const { return astar_s + smoothing_s + ocp_s; }
};

/// One row of the benchmark comparison.
struct MethodMetrics {
  std::string mode;
  bool feasible = false;
  double scaled_total_cost = 0.0;
  double unscaled_energy_cost = 0.0;  // [J]
  StageTimings time;
  int solver_outer_iterations = 0;
  int solver_inner_iterations = 0;
  long function_evaluations = 0;
  std::string solver_status = "NotApplicable";
};

/// Cumulative cost split along the output grid; total = K_e je + K_t jt.
struct CostBreakdown {
  std::vector<double> je;  // unscaled energy integral
  std::vector<double> jt;  // normalized turn integral
};

struct PipelineResult {
  Mode mode = Mode::Warm;
  int n_ocp = 0;
  Eigen::VectorXd w;  // decision vector on the output grid
  NlpSolution solution;  // meaningful for Warm / Cold
  MethodMetrics metrics;
  CostBreakdown breakdown;

  // Intermediate artifacts, populated for Warm and GuessOnly.
  bool has_geometry = false;
  Grid grid;
  GridPath grid_path;
  WaypointPath waypoints;
  GeomPath geom_path;
  WarmTrajectory warm;
};

/// Runs the requested pipeline variant end to end. Throws PlanningError
/// subclasses when a stage is infeasible.
PipelineResult run_pipeline(const Scenario& s, Mode mode,
                            const RunOptions& opt = {});

/// Writes trajectory.csv, cost.csv and metrics.json into out_dir;
/// optionally grid.csv / astar_path.csv / geom_path.csv debug dumps.
void emit_outputs(const Scenario& s, const PipelineResult& r,
                  const std::string& out_dir, bool dump_debug);

/// True iff every trajectory point whose x lies in the corridor's x-range
/// also lies inside the corridor box (the transit stays in the passage),
/// and the trajectory actually enters the corridor.
bool route_uses_corridor(const PipelineResult& r, const CorridorBox& box);

}  // namespace asvplan
