#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <string>
#include <vector>

#include "asvplan/obstacles.hpp"
#include "asvplan/vessel.hpp"

namespace asvplan {

/// Generic box-and-constraint NLP seen by the solver:
///   min  cost(w)   s.t.  g_lb <= g(w) <= g_ub,  w_lb <= w <= w_ub.
/// Rows with g_lb == g_ub are equalities; rows with g_lb == -inf are
/// one-sided. Scaling hints are advisory; identity by default.
class ConstrainedProblem {
 public:
  virtual ~ConstrainedProblem() = default;

  virtual int num_variables() const = 0;
  virtual int num_constraints() const = 0;
  virtual const Eigen::VectorXd& variable_lower() const = 0;
  virtual const Eigen::VectorXd& variable_upper() const = 0;
  virtual const Eigen::VectorXd& constraint_lower() const = 0;
  virtual const Eigen::VectorXd& constraint_upper() const = 0;

  /// Value-only path; returns false when any output is non-finite.
  virtual bool eval(const Eigen::VectorXd& w, double& cost,
                    Eigen::VectorXd& g) const = 0;

  /// Values plus first derivatives. The Jacobian keeps the same sparsity
  /// pattern on every call. Returns false on non-finite results.
  virtual bool eval_derivs(const Eigen::VectorXd& w, double& cost,
                           Eigen::VectorXd& cost_grad, Eigen::VectorXd& g,
                           Eigen::SparseMatrix<double>& jac) const = 0;

  virtual Eigen::VectorXd variable_scaling() const {
    return Eigen::VectorXd::Ones(num_variables());
  }
  virtual Eigen::VectorXd constraint_scaling() const {
    return Eigen::VectorXd::Ones(num_constraints());
  }
  virtual double objective_scaling() const { return 1.0; }
};

/// Boundary data and horizon for one transcription.
struct OcpSetup {
  double t_max = 0.0;
  double x_s = 0.0, y_s = 0.0;  // start position (pinned)
  double u_s = 0.0;             // start surge speed (pinned)
  double x_f = 0.0, y_f = 0.0;  // final position (pinned)
  // Heading box on the unwrapped representative; wide enough that it never
  // binds on realistic routes.
  double psi_lb = -12.566370614359172;
  double psi_ub = 12.566370614359172;
};

/// Direct multiple-shooting transcription. Decision vector (per step k):
/// z_k = [x_k', J_k]' interleaved with inputs, w = [z_0, u_0, ..., z_N].
/// Constraint stack: 7 N shooting equality rows, then N_o (N + 1) obstacle
/// rows g_o <= 0 applied at every time step.
class NlpProblem final : public ConstrainedProblem {
 public:
  static constexpr int kStateDim = 6;
  static constexpr int kAugDim = 7;
  static constexpr int kControlDim = 2;
  static constexpr int kStride = kAugDim + kControlDim;

  NlpProblem(OcpSetup setup, VesselParams params, CostWeights weights,
             ObstacleSet obstacles, int n_ocp, int k_ocp);

  int n_ocp() const { return n_ocp_; }
  int k_ocp() const { return k_ocp_; }
  double step_length() const { return h_; }
  int num_shooting_rows() const { return kAugDim * n_ocp_; }
  int num_obstacle_rows() const {
    return static_cast<int>(obstacles_.obstacles.size()) * (n_ocp_ + 1);
  }
  static int z_offset(int k) { return k * kStride; }
  static int u_offset(int k) { return k * kStride + kAugDim; }

  const VesselParams& params() const { return params_; }
  const CostWeights& weights() const { return weights_; }
  const ObstacleSet& obstacles() const { return obstacles_; }
  const OcpSetup& setup() const { return setup_; }

  // ConstrainedProblem surface.
  int num_variables() const override { return kStride * n_ocp_ + kAugDim; }
  int num_constraints() const override {
    return num_shooting_rows() + num_obstacle_rows();
  }
  const Eigen::VectorXd& variable_lower() const override { return w_lb_; }
  const Eigen::VectorXd& variable_upper() const override { return w_ub_; }
  const Eigen::VectorXd& constraint_lower() const override { return g_lb_; }
  const Eigen::VectorXd& constraint_upper() const override { return g_ub_; }
  bool eval(const Eigen::VectorXd& w, double& cost,
            Eigen::VectorXd& g) const override;
  bool eval_derivs(const Eigen::VectorXd& w, double& cost,
                   Eigen::VectorXd& cost_grad, Eigen::VectorXd& g,
                   Eigen::SparseMatrix<double>& jac) const override;
  Eigen::VectorXd variable_scaling() const override;
  Eigen::VectorXd constraint_scaling() const override;
  double objective_scaling() const override;

  /// Objective value alone: the final accumulated cost J_N.
  double objective(const Eigen::VectorXd& w) const {
    return w[z_offset(n_ocp_) + kAugDim - 1];
  }
  /// Gradient of the objective: a single unit coordinate.
  Eigen::VectorXd objective_gradient(const Eigen::VectorXd& w) const;

  /// Fixed Jacobian sparsity as (row, col) pairs in assembly order.
  const std::vector<std::pair<int, int>>& jacobian_pattern() const {
    return pattern_;
  }

  /// Dimension/sparsity statistics as a JSON string.
  std::string statistics_json() const;

 private:
  void build_bounds();
  void build_pattern();

  OcpSetup setup_;
  VesselParams params_;
  CostWeights weights_;
  ObstacleSet obstacles_;
  int n_ocp_ = 0;
  int k_ocp_ = 1;
  double h_ = 0.0;
  Eigen::VectorXd w_lb_, w_ub_, g_lb_, g_ub_;
  std::vector<std::pair<int, int>> pattern_;
};

/// Packs a roll-out that satisfies the shooting constraints exactly:
/// integrates from z0 with the supplied control sequence.
Eigen::VectorXd pack_rollout(const NlpProblem& p, const AugmentedState& z0,
                             const std::vector<Control>& controls);

}  // namespace asvplan
