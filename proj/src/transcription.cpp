#include "asvplan/transcription.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "asvplan/dual.hpp"

namespace asvplan {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

NlpProblem::NlpProblem(OcpSetup setup, VesselParams params, CostWeights weights,
                       ObstacleSet obstacles, int n_ocp, int k_ocp)
    : setup_(setup),
      params_(std::move(params)),
      weights_(weights),
      obstacles_(std::move(obstacles)),
      n_ocp_(n_ocp),
      k_ocp_(k_ocp) {
  if (n_ocp_ < 1 || k_ocp_ < 1)
    throw std::invalid_argument("n_ocp and k_ocp must be >= 1");
  if (setup_.t_max <= 0.0) throw std::invalid_argument("t_max must be > 0");
  if (!params_.finalized())
    throw std::invalid_argument("vessel parameters not finalized");
  weights_.validate();
  obstacles_.validate();
  h_ = setup_.t_max / n_ocp_;
  build_bounds();
  build_pattern();
}

void NlpProblem::build_bounds() {
  const int n = num_variables();
  w_lb_.setConstant(n, -kInf);
  w_ub_.setConstant(n, kInf);

  const auto& sb = params_.state_bounds;
  const double psi_lb = std::max(sb.lower[2], setup_.psi_lb);
  const double psi_ub = std::min(sb.upper[2], setup_.psi_ub);
  if (psi_lb > psi_ub) throw std::invalid_argument("empty heading box");

  // Interior z bounds: state box plus J in [0, inf).
  for (int k = 0; k <= n_ocp_; ++k) {
    const int off = z_offset(k);
    for (int i = 0; i < kStateDim; ++i) {
      w_lb_[off + i] = sb.lower[i];
      w_ub_[off + i] = sb.upper[i];
    }
    w_lb_[off + 2] = psi_lb;
    w_ub_[off + 2] = psi_ub;
    w_lb_[off + kStateDim] = 0.0;
    w_ub_[off + kStateDim] = kInf;
  }
  for (int k = 0; k < n_ocp_; ++k) {
    const int off = u_offset(k);
    w_lb_[off + 0] = params_.tau_x_min;
    w_ub_[off + 0] = params_.tau_x_max;
    w_lb_[off + 1] = params_.tau_n_min;
    w_ub_[off + 1] = params_.tau_n_max;
  }

  // Start: position and surge pinned, heading free, v = r = 0, J_0 = 0.
  {
    const int off = z_offset(0);
    w_lb_[off + 0] = w_ub_[off + 0] = setup_.x_s;
    w_lb_[off + 1] = w_ub_[off + 1] = setup_.y_s;
    w_lb_[off + 3] = w_ub_[off + 3] = setup_.u_s;
    w_lb_[off + 4] = w_ub_[off + 4] = 0.0;
    w_lb_[off + 5] = w_ub_[off + 5] = 0.0;
    w_lb_[off + 6] = w_ub_[off + 6] = 0.0;
  }
  // Final: position pinned, surge free within its box, v = r = 0, J free.
  {
    const int off = z_offset(n_ocp_);
    w_lb_[off + 0] = w_ub_[off + 0] = setup_.x_f;
    w_lb_[off + 1] = w_ub_[off + 1] = setup_.y_f;
    w_lb_[off + 4] = w_ub_[off + 4] = 0.0;
    w_lb_[off + 5] = w_ub_[off + 5] = 0.0;
    w_lb_[off + 6] = 0.0;
    w_ub_[off + 6] = kInf;
  }

  for (int i = 0; i < n; ++i)
    if (w_lb_[i] > w_ub_[i])
      throw std::invalid_argument("inconsistent variable bounds at index " +
                                  std::to_string(i));

  const int m = num_constraints();
  g_lb_.resize(m);
  g_ub_.resize(m);
  g_lb_.head(num_shooting_rows()).setZero();
  g_ub_.head(num_shooting_rows()).setZero();
  g_lb_.tail(num_obstacle_rows()).setConstant(-kInf);
  g_ub_.tail(num_obstacle_rows()).setZero();
}

void NlpProblem::build_pattern() {
  pattern_.clear();
  // Shooting block: rows k*7 + i depend on z_k, u_k (dense 7x9 block from
  // the integrator) and carry the identity on z_{k+1}.
  for (int k = 0; k < n_ocp_; ++k) {
    for (int i = 0; i < kAugDim; ++i) {
      const int row = k * kAugDim + i;
      for (int c = 0; c < kStride; ++c) pattern_.emplace_back(row, z_offset(k) + c);
      pattern_.emplace_back(row, z_offset(k + 1) + i);
    }
  }
  // Obstacle block: one row per (time step, obstacle), touching x_k, y_k.
  const int base = num_shooting_rows();
  const int n_o = static_cast<int>(obstacles_.obstacles.size());
  for (int k = 0; k <= n_ocp_; ++k)
    for (int i = 0; i < n_o; ++i) {
      const int row = base + k * n_o + i;
      pattern_.emplace_back(row, z_offset(k) + 0);
      pattern_.emplace_back(row, z_offset(k) + 1);
    }
}

bool NlpProblem::eval(const Eigen::VectorXd& w, double& cost,
                      Eigen::VectorXd& g) const {
  if (w.size() != num_variables())
    throw std::invalid_argument("decision vector dimension mismatch");
  g.resize(num_constraints());

  for (int k = 0; k < n_ocp_; ++k) {
    std::array<double, kAugDim> z;
    for (int i = 0; i < kAugDim; ++i) z[i] = w[z_offset(k) + i];
    const double tx = w[u_offset(k) + 0];
    const double tn = w[u_offset(k) + 1];
    const auto zn = detail::rk4_shooting(params_, weights_, z, tx, tn, h_, k_ocp_);
    for (int i = 0; i < kAugDim; ++i)
      g[k * kAugDim + i] = w[z_offset(k + 1) + i] - zn[i];
  }

  const int base = num_shooting_rows();
  const int n_o = static_cast<int>(obstacles_.obstacles.size());
  for (int k = 0; k <= n_ocp_; ++k) {
    const double x = w[z_offset(k) + 0];
    const double y = w[z_offset(k) + 1];
    for (int i = 0; i < n_o; ++i)
      g[base + k * n_o + i] =
          detail::g_o_impl(obstacles_.obstacles[i], obstacles_.epsilon, x, y);
  }

  cost = objective(w);
  return std::isfinite(cost) && g.allFinite();
}

bool NlpProblem::eval_derivs(const Eigen::VectorXd& w, double& cost,
                             Eigen::VectorXd& cost_grad, Eigen::VectorXd& g,
                             Eigen::SparseMatrix<double>& jac) const {
  if (w.size() != num_variables())
    throw std::invalid_argument("decision vector dimension mismatch");
  g.resize(num_constraints());
  cost_grad = objective_gradient(w);

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(pattern_.size());
  bool finite = true;

  using D = Dual<kStride>;
  for (int k = 0; k < n_ocp_; ++k) {
    std::array<D, kAugDim> z;
    for (int i = 0; i < kAugDim; ++i)
      z[i] = D::seed(w[z_offset(k) + i], i);
    const D tx = D::seed(w[u_offset(k) + 0], kAugDim + 0);
    const D tn = D::seed(w[u_offset(k) + 1], kAugDim + 1);
    const auto zn = detail::rk4_shooting(params_, weights_, z, tx, tn, h_, k_ocp_);
    for (int i = 0; i < kAugDim; ++i) {
      const int row = k * kAugDim + i;
      g[row] = w[z_offset(k + 1) + i] - zn[i].val;
      finite = finite && isfinite(zn[i]);
      // Same column order as build_pattern.
      for (int c = 0; c < kStride; ++c)
        trip.emplace_back(row, z_offset(k) + c, -zn[i].der[c]);
      trip.emplace_back(row, z_offset(k + 1) + i, 1.0);
    }
  }

  const int base = num_shooting_rows();
  const int n_o = static_cast<int>(obstacles_.obstacles.size());
  using D2 = Dual<2>;
  for (int k = 0; k <= n_ocp_; ++k) {
    const D2 x = D2::seed(w[z_offset(k) + 0], 0);
    const D2 y = D2::seed(w[z_offset(k) + 1], 1);
    for (int i = 0; i < n_o; ++i) {
      const int row = base + k * n_o + i;
      const D2 v =
          detail::g_o_impl(obstacles_.obstacles[i], obstacles_.epsilon, x, y);
      g[row] = v.val;
      finite = finite && isfinite(v);
      trip.emplace_back(row, z_offset(k) + 0, v.der[0]);
      trip.emplace_back(row, z_offset(k) + 1, v.der[1]);
    }
  }

  jac.resize(num_constraints(), num_variables());
  jac.setFromTriplets(trip.begin(), trip.end());
  cost = objective(w);
  return finite && std::isfinite(cost);
}

Eigen::VectorXd NlpProblem::objective_gradient(const Eigen::VectorXd&) const {
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(num_variables());
  grad[z_offset(n_ocp_) + kAugDim - 1] = 1.0;
  return grad;
}

Eigen::VectorXd NlpProblem::variable_scaling() const {
  // Per-channel magnitudes: position from the route box, velocities and
  // inputs from their bounds, J from a crude running-cost estimate.
  const double pos =
      std::max({std::abs(setup_.x_f - setup_.x_s),
                std::abs(setup_.y_f - setup_.y_s), 100.0}) /
      10.0;
  const double surge = std::max(1.0, params_.state_bounds.upper[3]);
  const double sway = std::max(0.5, params_.state_bounds.upper[4]);
  const double yaw = std::max(0.1, params_.r_max);
  const double tau_x = std::max(1.0, std::max(std::abs(params_.tau_x_min),
                                              std::abs(params_.tau_x_max))) / 4.0;
  const double tau_n = std::max(1.0, std::max(std::abs(params_.tau_n_min),
                                              std::abs(params_.tau_n_max))) / 4.0;
  State nominal;
  nominal.u = std::max(1.0, setup_.u_s);
  const Control u_nom{steady_state_thrust(params_, nominal.u), 0.0};
  const double j_scale = std::max(
      1.0, cost_to_go(weights_, params_, nominal, u_nom) * setup_.t_max);

  Eigen::VectorXd s(num_variables());
  for (int k = 0; k <= n_ocp_; ++k) {
    const int off = z_offset(k);
    s[off + 0] = pos;
    s[off + 1] = pos;
    s[off + 2] = 1.0;
    s[off + 3] = surge;
    s[off + 4] = sway;
    s[off + 5] = yaw;
    s[off + 6] = j_scale;
    if (k < n_ocp_) {
      s[off + 7] = tau_x;
      s[off + 8] = tau_n;
    }
  }
  return s;
}

Eigen::VectorXd NlpProblem::constraint_scaling() const {
  // Shooting rows inherit the channel scale of the state they constrain;
  // obstacle rows are already O(1) through the log encoding.
  const Eigen::VectorXd vs = variable_scaling();
  Eigen::VectorXd s = Eigen::VectorXd::Ones(num_constraints());
  for (int k = 0; k < n_ocp_; ++k)
    for (int i = 0; i < kAugDim; ++i)
      s[k * kAugDim + i] = vs[z_offset(k) + i];
  return s;
}

double NlpProblem::objective_scaling() const {
  return variable_scaling()[z_offset(n_ocp_) + kAugDim - 1];
}

std::string NlpProblem::statistics_json() const {
  std::ostringstream os;
  os << "{\"n_variables\":" << num_variables()
     << ",\"n_constraints\":" << num_constraints()
     << ",\"n_shooting_rows\":" << num_shooting_rows()
     << ",\"n_obstacle_rows\":" << num_obstacle_rows()
     << ",\"jacobian_nonzeros\":" << pattern_.size() << ",\"n_ocp\":" << n_ocp_
     << ",\"k_ocp\":" << k_ocp_ << ",\"step_length\":" << h_ << "}";
  return os.str();
}

Eigen::VectorXd pack_rollout(const NlpProblem& p, const AugmentedState& z0,
                             const std::vector<Control>& controls) {
  if (static_cast<int>(controls.size()) != p.n_ocp())
    throw std::invalid_argument("need one control per shooting interval");
  Eigen::VectorXd w(p.num_variables());
  AugmentedState z = z0;
  auto put_z = [&](int k, const AugmentedState& zz) {
    const auto arr = pack(zz);
    for (int i = 0; i < NlpProblem::kAugDim; ++i)
      w[NlpProblem::z_offset(k) + i] = arr[i];
  };
  put_z(0, z);
  for (int k = 0; k < p.n_ocp(); ++k) {
    w[NlpProblem::u_offset(k) + 0] = controls[k].tau_x;
    w[NlpProblem::u_offset(k) + 1] = controls[k].tau_n;
    z = shooting_map(p.params(), p.weights(), z, controls[k], p.step_length(),
                     p.k_ocp());
    put_z(k + 1, z);
  }
  return w;
}

}  // namespace asvplan
