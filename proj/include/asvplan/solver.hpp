#pragma once

#include <Eigen/Dense>
#include <iosfwd>

#include "asvplan/transcription.hpp"

namespace asvplan {

struct SolverConfig {
  double kkt_tolerance = 1e-6;         // scaled projected-gradient norm
  double constraint_tolerance = 1e-6;  // unscaled residual infinity norms
  int max_outer_iterations = 100;
  int max_inner_iterations = 200;  // per outer iteration
  double initial_penalty = 10.0;
  double penalty_growth = 10.0;  // applied when violation fails to drop 4x
  int lbfgs_memory = 20;
  double initial_inner_tolerance = 1e-2;
  std::ostream* trace = nullptr;  // per-iteration CSV stream, optional

  void validate() const;  // throws std::invalid_argument
};

enum class SolveStatus { Converged, IterationLimit, EvaluationFailure };

const char* to_string(SolveStatus s);

struct NlpSolution {
  Eigen::VectorXd w_star;
  double objective = 0.0;
  double equality_residual = 0.0;   // ||g_s||_inf, recomputed at w_star
  double obstacle_violation = 0.0;  // max(0, g_o), recomputed at w_star
  double kkt_residual = 0.0;        // scaled projected gradient at w_star
  int outer_iterations = 0;
  int inner_iterations = 0;  // total accepted quasi-Newton steps
  long function_evaluations = 0;
  double wall_time_s = 0.0;
  SolveStatus status = SolveStatus::IterationLimit;
};

/// Solves the NLP to local optimality from w0 (clipped into the variable
/// box). Augmented-Lagrangian outer loop over the equality and one-sided
/// constraint rows; limited-memory BFGS with projection onto the variable
/// box inside. Deterministic: identical inputs give identical iterates.
NlpSolution solve(const ConstrainedProblem& problem, const Eigen::VectorXd& w0,
                  const SolverConfig& cfg);

/// Uninformed initial guess: straight-line position interpolation between
/// start and goal, heading equal to the line bearing, constant surge
/// route-length / t_max, steady-state thrust inputs, cost channel by the
/// trapezoid rule along the guess.
Eigen::VectorXd cold_start_guess(const OcpSetup& setup,
                                 const VesselParams& params,
                                 const CostWeights& weights, int n_ocp);

}  // namespace asvplan
