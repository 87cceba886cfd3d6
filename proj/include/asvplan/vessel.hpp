#pragma once

#include <Eigen/Dense>
#include <array>

#include "asvplan/dual.hpp"

namespace asvplan {

/// Per-state box bounds for x = [x, y, psi, u, v, r].
struct StateBounds {
  std::array<double, 6> lower{};
  std::array<double, 6> upper{};
};

/// 3-DOF maneuvering model parameters: inertia M, damping D(nu) =
/// diag(linear) + diag(quadratic .* |nu|), actuator and state bounds.
/// The Coriolis matrix C(nu) is derived from M with the skew-symmetric
/// parametrization, so nu' C(nu) nu = 0 identically.
struct VesselParams {
  Eigen::Matrix3d mass_matrix = Eigen::Matrix3d::Identity();
  Eigen::Vector3d damping_linear = Eigen::Vector3d::Zero();
  Eigen::Vector3d damping_quadratic = Eigen::Vector3d::Zero();
  double tau_x_min = 0.0, tau_x_max = 0.0;  // surge force bounds [N]
  double tau_n_min = 0.0, tau_n_max = 0.0;  // yaw moment bounds [N*m]
  StateBounds state_bounds;
  double r_max = 0.0;            // max yaw rate [rad/s], normalizes F_t
  double min_turn_radius = 0.0;  // R_turn,min [m]

  /// Validates invariants (throws std::invalid_argument) and caches M^-1.
  /// Must be called before the dynamics are evaluated.
  void finalize();
  bool finalized() const { return finalized_; }
  const Eigen::Matrix3d& mass_inverse() const { return mass_inverse_; }

  /// Representative defaults for an ~8.5 m planing workboat. Shipped so
  /// every scenario field has a working value; real deployments override
  /// them from the scenario file.
  static VesselParams default_vessel();

 private:
  Eigen::Matrix3d mass_inverse_ = Eigen::Matrix3d::Identity();
  bool finalized_ = false;
};

/// Full vessel state [x, y, psi, u, v, r]; psi is kept unwrapped.
struct State {
  double x = 0.0, y = 0.0, psi = 0.0;
  double u = 0.0, v = 0.0, r = 0.0;
};

/// Control vector [X, N]: surge force and yaw moment.
struct Control {
  double tau_x = 0.0;
  double tau_n = 0.0;
};

/// State stacked with the accumulated running cost, z = [x', J]'.
struct AugmentedState {
  State state;
  double cost = 0.0;
};

/// Weights of the two-part running cost K_e*F_e + K_t*F_t, plus the
/// half-width of the smooth |.| surrogate sqrt(s^2 + d^2) - d.
struct CostWeights {
  double k_e = 3.5e-4;          // [1/J]
  double k_t = 800.0;           // [-]
  double a_t = 112.0;           // [s^2/rad^2]
  double b_t = 6.25e-5;         // [rad^2/s^2]
  double abs_smoothing = 1e-3;  // delta for the smooth absolute value

  void validate() const;  // throws std::invalid_argument
};

/// Rotation from body-fixed velocities to the NED frame.
Eigen::Matrix3d rotation(double psi);

// ---------------------------------------------------------------------------
// Scalar-generic kernels. Instantiated with double for plain evaluation and
// with Dual<K> when derivative propagation is required.

namespace detail {

template <class S>
inline S smooth_abs(const S& s, double delta) {
  return sqrt(s * s + delta * delta) - delta;
}

/// d/dt [x, y, psi, u, v, r] for the compact model
/// [R(psi) nu; M^-1 (tau - C(nu) nu - D(nu) nu)].
template <class S>
std::array<S, 6> state_derivative(const VesselParams& p,
                                  const std::array<S, 6>& x, const S& tau_x,
                                  const S& tau_n) {
  const S& psi = x[2];
  const S& u = x[3];
  const S& v = x[4];
  const S& r = x[5];

  const Eigen::Matrix3d& m = p.mass_matrix;
  // First two rows of M*nu feed the skew parametrization of C(nu).
  const S c1 = m(0, 0) * u + m(0, 1) * v + m(0, 2) * r;
  const S c2 = m(1, 0) * u + m(1, 1) * v + m(1, 2) * r;
  // C(nu) nu with C = [[0,0,-c2],[0,0,c1],[c2,-c1,0]].
  const S cor0 = -c2 * r;
  const S cor1 = c1 * r;
  const S cor2 = c2 * u - c1 * v;

  const Eigen::Vector3d& dl = p.damping_linear;
  const Eigen::Vector3d& dq = p.damping_quadratic;
  const S damp0 = dl[0] * u + dq[0] * abs(u) * u;
  const S damp1 = dl[1] * v + dq[1] * abs(v) * v;
  const S damp2 = dl[2] * r + dq[2] * abs(r) * r;

  const S f0 = tau_x - cor0 - damp0;
  const S f1 = -cor1 - damp1;
  const S f2 = tau_n - cor2 - damp2;

  const Eigen::Matrix3d& minv = p.mass_inverse();
  const S cp = cos(psi);
  const S sp = sin(psi);
  return {cp * u - sp * v,
          sp * u + cp * v,
          r,
          minv(0, 0) * f0 + minv(0, 1) * f1 + minv(0, 2) * f2,
          minv(1, 0) * f0 + minv(1, 1) * f1 + minv(1, 2) * f2,
          minv(2, 0) * f0 + minv(2, 1) * f1 + minv(2, 2) * f2};
}

/// Actuator-work rate F_e = |u tau_X| + |r tau_N| with the smooth |.|
/// surrogate. Unscaled (no K_e).
template <class S>
S energy_rate(const CostWeights& w, const std::array<S, 6>& x, const S& tau_x,
              const S& tau_n) {
  return smooth_abs(x[3] * tau_x, w.abs_smoothing) +
         smooth_abs(x[5] * tau_n, w.abs_smoothing);
}

/// Turn-rate shaping term F_t(r), normalized so F_t(+-r_max) = 1.
template <class S>
S turn_rate_cost(const CostWeights& w, const VesselParams& p,
                 const std::array<S, 6>& x) {
  const double rm2 = p.r_max * p.r_max;
  const double f_t_max = w.a_t * rm2 + (1.0 - std::exp(-rm2 / w.b_t));
  const S r2 = x[5] * x[5];
  // True division: F_t at r = +-r_max must equal 1 exactly.
  return (w.a_t * r2 + (1.0 - exp(-(r2 / w.b_t)))) / f_t_max;
}

/// Running cost F = K_e F_e + K_t F_t.
template <class S>
S running_cost(const CostWeights& w, const VesselParams& p,
               const std::array<S, 6>& x, const S& tau_x, const S& tau_n) {
  return w.k_e * energy_rate(w, x, tau_x, tau_n) +
         w.k_t * turn_rate_cost(w, p, x);
}

/// Augmented 7-state derivative: dynamics stacked with dJ/dt = F(x, u).
template <class S>
std::array<S, 7> augmented_derivative(const VesselParams& p,
                                      const CostWeights& w,
                                      const std::array<S, 7>& z, const S& tau_x,
                                      const S& tau_n) {
  const std::array<S, 6> x{z[0], z[1], z[2], z[3], z[4], z[5]};
  const std::array<S, 6> dx = state_derivative(p, x, tau_x, tau_n);
  return {dx[0], dx[1], dx[2], dx[3], dx[4], dx[5],
          running_cost(w, p, x, tau_x, tau_n)};
}

/// Classical RK4 over [0, h] in `substeps` equal sub-intervals with the
/// control held constant.
template <class S>
std::array<S, 7> rk4_shooting(const VesselParams& p, const CostWeights& w,
                              std::array<S, 7> z, const S& tau_x,
                              const S& tau_n, double h, int substeps) {
  const double hs = h / substeps;
  for (int step = 0; step < substeps; ++step) {
    const auto k1 = augmented_derivative(p, w, z, tau_x, tau_n);
    std::array<S, 7> tmp;
    for (int i = 0; i < 7; ++i) tmp[i] = z[i] + (0.5 * hs) * k1[i];
    const auto k2 = augmented_derivative(p, w, tmp, tau_x, tau_n);
    for (int i = 0; i < 7; ++i) tmp[i] = z[i] + (0.5 * hs) * k2[i];
    const auto k3 = augmented_derivative(p, w, tmp, tau_x, tau_n);
    for (int i = 0; i < 7; ++i) tmp[i] = z[i] + hs * k3[i];
    const auto k4 = augmented_derivative(p, w, tmp, tau_x, tau_n);
    for (int i = 0; i < 7; ++i)
      z[i] = z[i] + (hs / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return z;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Typed double-precision entry points.

/// xdot = f(x, u) of the compact 3-DOF model.
Eigen::Matrix<double, 6, 1> dynamics(const VesselParams& p, const State& x,
                                     const Control& u);

/// Running cost F(x, u) >= 0.
double cost_to_go(const CostWeights& w, const VesselParams& p, const State& x,
                  const Control& u);

/// Unscaled actuator-work rate F_e(x, u).
double energy_cost_rate(const CostWeights& w, const State& x, const Control& u);

/// Normalized turn-shaping rate F_t(x).
double turn_cost_rate(const CostWeights& w, const VesselParams& p,
                      const State& x);

/// Discrete shooting map z_{k+1} = F(z_k, u_k) over a step of length h.
AugmentedState shooting_map(const VesselParams& p, const CostWeights& w,
                            const AugmentedState& z, const Control& u, double h,
                            int substeps);

/// Surge force that holds nu = [u_nom, 0, 0] steady; closed form
/// d1*u + d2*|u|*u for the shipped damping structure.
double steady_state_thrust(const VesselParams& p, double u_nom);

inline std::array<double, 7> pack(const AugmentedState& z) {
  return {z.state.x, z.state.y, z.state.psi, z.state.u,
          z.state.v, z.state.r, z.cost};
}
inline AugmentedState unpack(const std::array<double, 7>& z) {
  return {{z[0], z[1], z[2], z[3], z[4], z[5]}, z[6]};
}

}  // namespace asvplan
