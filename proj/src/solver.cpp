#include "asvplan/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace asvplan {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void SolverConfig::validate() const {
  if (!(kkt_tolerance > 0.0 && constraint_tolerance > 0.0 &&
        initial_inner_tolerance > 0.0))
    throw std::invalid_argument("tolerances must be positive");
  if (penalty_growth <= 1.0)
    throw std::invalid_argument("penalty growth factor must exceed 1");
  if (max_outer_iterations < 1 || max_inner_iterations < 1)
    throw std::invalid_argument("iteration caps must be >= 1");
  if (initial_penalty <= 0.0)
    throw std::invalid_argument("initial penalty must be positive");
  if (lbfgs_memory < 1) throw std::invalid_argument("memory must be >= 1");
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "Converged";
    case SolveStatus::IterationLimit: return "IterationLimit";
    case SolveStatus::EvaluationFailure: return "EvaluationFailure";
  }
  return "Unknown";
}

namespace {

// Augmented-Lagrangian driver working on scaled variables. Constraint rows
// are classified once: lb == ub gives an equality target, lb == -inf with a
// finite ub gives a one-sided row handled by the clipped (PHR) penalty.
class AugLagDriver {
 public:
  AugLagDriver(const ConstrainedProblem& p, const SolverConfig& cfg)
      : p_(p), cfg_(cfg) {
    n_ = p.num_variables();
    m_ = p.num_constraints();
    sw_ = p.variable_scaling();
    sg_ = p.constraint_scaling();
    sphi_ = p.objective_scaling();
    if ((sw_.array() <= 0.0).any() || (sg_.array() <= 0.0).any() || sphi_ <= 0.0)
      throw std::invalid_argument("scalings must be positive");

    const auto& glb = p.constraint_lower();
    const auto& gub = p.constraint_upper();
    for (int i = 0; i < m_; ++i) {
      if (glb[i] == gub[i] && std::isfinite(gub[i]))
        eq_rows_.push_back(i);
      else if (glb[i] == -kInf && std::isfinite(gub[i]))
        in_rows_.push_back(i);
      else
        throw std::invalid_argument("unsupported constraint row bounds");
    }
    lo_ = p.variable_lower().cwiseQuotient(sw_);
    hi_ = p.variable_upper().cwiseQuotient(sw_);
  }

  NlpSolution run(Eigen::VectorXd w0) {
    const auto t_start = std::chrono::steady_clock::now();

    Eigen::VectorXd w = project(w0.cwiseQuotient(sw_));
    lambda_.setZero(static_cast<int>(eq_rows_.size()));
    mu_.setZero(static_cast<int>(in_rows_.size()));
    rho_ = cfg_.initial_penalty;

    NlpSolution sol;
    sol.status = SolveStatus::IterationLimit;

    if (trace()) *trace() << "outer,inner,merit,kkt,eq_residual,obstacle_violation,step_norm\n";

    double omega = cfg_.initial_inner_tolerance;
    double v_prev = kInf;
    bool eval_failed = false;

    for (int outer = 1; outer <= cfg_.max_outer_iterations; ++outer) {
      sol.outer_iterations = outer;
      InnerResult ir = minimize_inner(w, omega, outer);
      w = ir.w;
      sol.inner_iterations += ir.iterations;
      if (ir.eval_failed) {
        eval_failed = true;
        break;
      }

      // Unscaled feasibility at the inner solution.
      const double eq_res = unscaled_eq_residual(ir.g_raw);
      const double obs_viol = unscaled_ineq_violation(ir.g_raw);
      const double v_scaled =
          std::max(scaled_eq_residual(ir.g_raw), scaled_ineq_violation(ir.g_raw));

      if (eq_res <= cfg_.constraint_tolerance &&
          obs_viol <= cfg_.constraint_tolerance &&
          ir.kkt <= cfg_.kkt_tolerance) {
        sol.status = SolveStatus::Converged;
        break;
      }

      if (v_scaled <= 0.25 * v_prev) {
        // Good feasibility progress: first-order multiplier update. The
        // quasi-Newton memory stays valid, the curvature term is unchanged.
        for (std::size_t j = 0; j < eq_rows_.size(); ++j)
          lambda_[j] += rho_ * scaled_row(ir.g_raw, eq_rows_[j]);
        for (std::size_t j = 0; j < in_rows_.size(); ++j)
          mu_[j] = std::max(0.0, mu_[j] + rho_ * scaled_row(ir.g_raw, in_rows_[j]));
        v_prev = v_scaled;
        omega = std::max(0.2 * omega, cfg_.kkt_tolerance);
      } else {
        rho_ = std::min(rho_ * cfg_.penalty_growth, 1e12);
        history_.clear();  // merit curvature rescaled; stale pairs mislead
      }
    }

    if (eval_failed) sol.status = SolveStatus::EvaluationFailure;

    // Final reporting, recomputed from the returned point.
    sol.w_star = w.cwiseProduct(sw_);
    double cost;
    Eigen::VectorXd g;
    if (p_.eval(sol.w_star, cost, g)) {
      sol.objective = cost;
      sol.equality_residual = unscaled_eq_residual(g);
      sol.obstacle_violation = unscaled_ineq_violation(g);
    } else {
      sol.status = SolveStatus::EvaluationFailure;
    }
    ++nfev_;
    sol.kkt_residual = last_kkt_;
    sol.function_evaluations = nfev_;
    sol.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
            .count();
    return sol;
  }

 private:
  struct InnerResult {
    Eigen::VectorXd w;
    Eigen::VectorXd g_raw;
    double kkt = kInf;
    int iterations = 0;
    bool eval_failed = false;
  };

  std::ostream* trace() const { return cfg_.trace; }

  Eigen::VectorXd project(Eigen::VectorXd v) const {
    return v.cwiseMax(lo_).cwiseMin(hi_);
  }

  double scaled_row(const Eigen::VectorXd& g_raw, int row) const {
    return (g_raw[row] - p_.constraint_upper()[row]) / sg_[row];
  }
  double unscaled_eq_residual(const Eigen::VectorXd& g_raw) const {
    double r = 0.0;
    for (int row : eq_rows_)
      r = std::max(r, std::abs(g_raw[row] - p_.constraint_upper()[row]));
    return r;
  }
  double unscaled_ineq_violation(const Eigen::VectorXd& g_raw) const {
    double r = 0.0;
    for (int row : in_rows_)
      r = std::max(r, g_raw[row] - p_.constraint_upper()[row]);
    return std::max(r, 0.0);
  }
  double scaled_eq_residual(const Eigen::VectorXd& g_raw) const {
    double r = 0.0;
    for (int row : eq_rows_) r = std::max(r, std::abs(scaled_row(g_raw, row)));
    return r;
  }
  double scaled_ineq_violation(const Eigen::VectorXd& g_raw) const {
    double r = 0.0;
    for (int row : in_rows_) r = std::max(r, scaled_row(g_raw, row));
    return std::max(r, 0.0);
  }

  // Merit value from raw problem outputs.
  double merit(double cost_raw, const Eigen::VectorXd& g_raw) const {
    double m = cost_raw / sphi_;
    for (std::size_t j = 0; j < eq_rows_.size(); ++j) {
      const double c = scaled_row(g_raw, eq_rows_[j]);
      m += lambda_[j] * c + 0.5 * rho_ * c * c;
    }
    for (std::size_t j = 0; j < in_rows_.size(); ++j) {
      const double s = scaled_row(g_raw, in_rows_[j]);
      const double t = std::max(0.0, mu_[j] + rho_ * s);
      m += (t * t - mu_[j] * mu_[j]) / (2.0 * rho_);
    }
    return m;
  }

  // Merit gradient in scaled variables: sw .* (grad_phi/sphi + J' y)
  // with y folding the row scaling and multiplier terms.
  Eigen::VectorXd merit_gradient(const Eigen::VectorXd& cost_grad,
                                 const Eigen::VectorXd& g_raw,
                                 const Eigen::SparseMatrix<double>& jac) const {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(m_);
    for (std::size_t j = 0; j < eq_rows_.size(); ++j) {
      const int row = eq_rows_[j];
      y[row] = (lambda_[j] + rho_ * scaled_row(g_raw, row)) / sg_[row];
    }
    for (std::size_t j = 0; j < in_rows_.size(); ++j) {
      const int row = in_rows_[j];
      y[row] = std::max(0.0, mu_[j] + rho_ * scaled_row(g_raw, row)) / sg_[row];
    }
    Eigen::VectorXd grad = cost_grad / sphi_ + jac.transpose() * y;
    return grad.cwiseProduct(sw_);
  }

  bool eval_value(const Eigen::VectorXd& w_scaled, double& m_out,
                  Eigen::VectorXd& g_raw) {
    double cost;
    ++nfev_;
    if (!p_.eval(w_scaled.cwiseProduct(sw_), cost, g_raw)) return false;
    m_out = merit(cost, g_raw);
    return std::isfinite(m_out);
  }

  bool eval_full(const Eigen::VectorXd& w_scaled, double& m_out,
                 Eigen::VectorXd& grad_out, Eigen::VectorXd& g_raw) {
    double cost;
    Eigen::VectorXd cost_grad;
    Eigen::SparseMatrix<double> jac;
    ++nfev_;
    if (!p_.eval_derivs(w_scaled.cwiseProduct(sw_), cost, cost_grad, g_raw, jac))
      return false;
    m_out = merit(cost, g_raw);
    grad_out = merit_gradient(cost_grad, g_raw, jac);
    return std::isfinite(m_out) && grad_out.allFinite();
  }

  double projected_gradient_norm(const Eigen::VectorXd& w,
                                 const Eigen::VectorXd& grad) const {
    return (project(w - grad) - w).lpNorm<Eigen::Infinity>();
  }

  // Two-loop recursion restricted to variables free at the current point.
  Eigen::VectorXd lbfgs_direction(const Eigen::VectorXd& grad,
                                  const Eigen::VectorXd& mask) const {
    Eigen::VectorXd q = grad.cwiseProduct(mask);
    const int h = static_cast<int>(history_.size());
    std::vector<double> alpha(h);
    for (int i = h - 1; i >= 0; --i) {
      const auto& [s, y, rho_i] = history_[i];
      alpha[i] = rho_i * s.dot(q);
      q -= alpha[i] * y;
    }
    if (h > 0) {
      const auto& [s, y, rho_i] = history_.back();
      q *= s.dot(y) / y.squaredNorm();
    }
    for (int i = 0; i < h; ++i) {
      const auto& [s, y, rho_i] = history_[i];
      const double beta = rho_i * y.dot(q);
      q += (alpha[i] - beta) * s;
    }
    return (-q).cwiseProduct(mask);
  }

  Eigen::VectorXd active_mask(const Eigen::VectorXd& w,
                              const Eigen::VectorXd& grad) const {
    Eigen::VectorXd mask(n_);
    for (int i = 0; i < n_; ++i) {
      const double eps = 1e-10 * (1.0 + std::abs(w[i]));
      const bool at_lo = w[i] <= lo_[i] + eps && grad[i] > 0.0;
      const bool at_hi = w[i] >= hi_[i] - eps && grad[i] < 0.0;
      const bool pinned = lo_[i] == hi_[i];
      mask[i] = (at_lo || at_hi || pinned) ? 0.0 : 1.0;
    }
    return mask;
  }

  InnerResult minimize_inner(Eigen::VectorXd w, double omega, int outer) {
    InnerResult res;

    double m;
    Eigen::VectorXd grad, g_raw;
    if (!eval_full(w, m, grad, g_raw)) {
      res.w = w;
      res.eval_failed = true;
      return res;
    }

    for (int it = 0; it < cfg_.max_inner_iterations; ++it) {
      const double kkt = projected_gradient_norm(w, grad);
      if (kkt <= omega) break;

      const Eigen::VectorXd mask = active_mask(w, grad);
      Eigen::VectorXd d = lbfgs_direction(grad, mask);
      if (!d.allFinite() || grad.dot(d) >= 0.0) {
        history_.clear();
        d = (-grad).cwiseProduct(mask);
      }

      // Backtracking along the projection arc. The unit step is evaluated
      // with derivatives right away since it is usually accepted; shorter
      // steps probe with values only.
      bool accepted = false;
      bool retried_steepest = false;
      bool have_derivs = false;
      double step_norm = 0.0;
      Eigen::VectorXd w_new, g_new, grad_new;
      double m_new = 0.0;
      double alpha = 1.0;
      while (true) {
        w_new = project(w + alpha * d);
        const Eigen::VectorXd dw = w_new - w;
        const double decrement = grad.dot(dw);
        if (decrement < 0.0) {
          bool ok;
          if (alpha == 1.0) {
            ok = eval_full(w_new, m_new, grad_new, g_new);
            have_derivs = ok;
          } else {
            ok = eval_value(w_new, m_new, g_new);
            have_derivs = false;
          }
          if (ok && m_new <= m + 1e-4 * decrement) {
            accepted = true;
            step_norm = dw.norm();
            break;
          }
        }
        alpha *= 0.5;
        if (alpha < 1e-18) {
          if (!retried_steepest) {
            retried_steepest = true;
            history_.clear();
            d = (-grad).cwiseProduct(mask);
            alpha = 1.0;
            continue;
          }
          break;
        }
      }
      if (!accepted) break;  // line-search stall; outer loop will react

      if (!have_derivs) {
        double m_full;
        if (!eval_full(w_new, m_full, grad_new, g_new)) {
          res.w = w;
          res.g_raw = g_raw;
          res.eval_failed = true;
          return res;
        }
        m_new = m_full;
      }

      const Eigen::VectorXd s = w_new - w;
      const Eigen::VectorXd yv = grad_new - grad;
      const double sy = s.dot(yv);
      if (sy > 1e-12 * s.norm() * yv.norm()) {
        history_.emplace_back(s, yv, 1.0 / sy);
        if (static_cast<int>(history_.size()) > cfg_.lbfgs_memory)
          history_.pop_front();
      }

      w = std::move(w_new);
      m = m_new;
      grad = std::move(grad_new);
      g_raw = std::move(g_new);
      ++res.iterations;

      if (trace())
        *trace() << outer << ',' << res.iterations << ',' << m << ','
                 << projected_gradient_norm(w, grad) << ','
                 << unscaled_eq_residual(g_raw) << ','
                 << unscaled_ineq_violation(g_raw) << ',' << step_norm << '\n';
    }

    last_kkt_ = projected_gradient_norm(w, grad);
    res.w = std::move(w);
    res.g_raw = std::move(g_raw);
    res.kkt = last_kkt_;
    return res;
  }

  const ConstrainedProblem& p_;
  const SolverConfig& cfg_;
  int n_ = 0, m_ = 0;
  Eigen::VectorXd sw_, sg_, lo_, hi_;
  double sphi_ = 1.0;
  std::vector<int> eq_rows_, in_rows_;
  Eigen::VectorXd lambda_, mu_;
  double rho_ = 1.0;
  double last_kkt_ = kInf;
  long nfev_ = 0;
  std::deque<std::tuple<Eigen::VectorXd, Eigen::VectorXd, double>> history_;
};

}  // namespace

NlpSolution solve(const ConstrainedProblem& problem, const Eigen::VectorXd& w0,
                  const SolverConfig& cfg) {
  cfg.validate();
  if (w0.size() != problem.num_variables())
    throw std::invalid_argument("initial guess dimension mismatch");
  AugLagDriver driver(problem, cfg);
  return driver.run(w0);
}

Eigen::VectorXd cold_start_guess(const OcpSetup& setup,
                                 const VesselParams& params,
                                 const CostWeights& weights, int n_ocp) {
  if (n_ocp < 1) throw std::invalid_argument("n_ocp must be >= 1");
  const double dx = setup.x_f - setup.x_s;
  const double dy = setup.y_f - setup.y_s;
  const double dist = std::hypot(dx, dy);
  const double bearing = (dist > 0.0) ? std::atan2(dy, dx) : 0.0;
  const double u = dist / setup.t_max;
  const double tau_x = steady_state_thrust(params, u);
  const double dt = setup.t_max / n_ocp;

  const int n_vars = (n_ocp + 1) * 7 + n_ocp * 2;
  Eigen::VectorXd w(n_vars);
  double j_acc = 0.0;
  State prev_state;
  Control ctrl{tau_x, 0.0};
  for (int k = 0; k <= n_ocp; ++k) {
    const double a = double(k) / n_ocp;
    State st;
    st.x = setup.x_s + a * dx;
    st.y = setup.y_s + a * dy;
    st.psi = bearing;
    st.u = u;
    const int off = k * 9;
    if (k > 0) {
      j_acc += 0.5 * dt *
               (cost_to_go(weights, params, prev_state, ctrl) +
                cost_to_go(weights, params, st, ctrl));
    }
    w[off + 0] = st.x;
    w[off + 1] = st.y;
    w[off + 2] = st.psi;
    w[off + 3] = st.u;
    w[off + 4] = 0.0;
    w[off + 5] = 0.0;
    w[off + 6] = j_acc;
    if (k < n_ocp) {
      w[off + 7] = ctrl.tau_x;
      w[off + 8] = ctrl.tau_n;
    }
    prev_state = st;
  }
  return w;
}

}  // namespace asvplan
