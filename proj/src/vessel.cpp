#include "asvplan/vessel.hpp"

#include <Eigen/Cholesky>
#include <numbers>
#include <stdexcept>

namespace asvplan {

void VesselParams::finalize() {
  if (!mass_matrix.isApprox(mass_matrix.transpose(), 1e-12))
    throw std::invalid_argument("mass matrix must be symmetric");
  Eigen::LLT<Eigen::Matrix3d> llt(mass_matrix);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("mass matrix must be positive definite");
  if ((damping_linear.array() < 0.0).any() ||
      (damping_quadratic.array() < 0.0).any())
    throw std::invalid_argument("damping coefficients must be nonnegative");
  if (tau_x_min > tau_x_max || tau_n_min > tau_n_max)
    throw std::invalid_argument("control bounds must satisfy lb <= ub");
  for (int i = 0; i < 6; ++i)
    if (state_bounds.lower[i] > state_bounds.upper[i])
      throw std::invalid_argument("state bounds must satisfy lb <= ub");
  if (r_max <= 0.0) throw std::invalid_argument("r_max must be positive");
  if (min_turn_radius <= 0.0)
    throw std::invalid_argument("min_turn_radius must be positive");
  mass_inverse_ = mass_matrix.inverse();
  finalized_ = true;
}

VesselParams VesselParams::default_vessel() {
  VesselParams p;
  p.mass_matrix = Eigen::Vector3d(3980.0, 3980.0, 19703.0).asDiagonal();
  p.damping_linear = Eigen::Vector3d(50.0, 2000.0, 3000.0);
  p.damping_quadratic = Eigen::Vector3d(135.0, 1000.0, 500.0);
  p.tau_x_min = -2500.0;
  p.tau_x_max = 8000.0;
  p.tau_n_min = -5000.0;
  p.tau_n_max = 5000.0;
  const double big = 1e5;
  const double four_pi = 4.0 * std::numbers::pi;
  p.state_bounds.lower = {-big, -big, -four_pi, -1.0, -2.0, -0.6981317007977318};
  p.state_bounds.upper = {big, big, four_pi, 9.0, 2.0, 0.6981317007977318};
  p.r_max = 0.6981317007977318;  // 40 deg/s
  p.min_turn_radius = 24.5;
  p.finalize();
  return p;
}

void CostWeights::validate() const {
  if (!(k_e > 0.0 && k_t > 0.0 && a_t > 0.0 && b_t > 0.0 &&
        abs_smoothing > 0.0))
    throw std::invalid_argument("cost weights must all be positive");
}

Eigen::Matrix3d rotation(double psi) {
  const double c = std::cos(psi);
  const double s = std::sin(psi);
  Eigen::Matrix3d r;
  r << c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0;
  return r;
}

Eigen::Matrix<double, 6, 1> dynamics(const VesselParams& p, const State& x,
                                     const Control& u) {
  const std::array<double, 6> xs{x.x, x.y, x.psi, x.u, x.v, x.r};
  const auto dx = detail::state_derivative(p, xs, u.tau_x, u.tau_n);
  Eigen::Matrix<double, 6, 1> out;
  for (int i = 0; i < 6; ++i) out[i] = dx[i];
  return out;
}

double cost_to_go(const CostWeights& w, const VesselParams& p, const State& x,
                  const Control& u) {
  const std::array<double, 6> xs{x.x, x.y, x.psi, x.u, x.v, x.r};
  return detail::running_cost(w, p, xs, u.tau_x, u.tau_n);
}

double energy_cost_rate(const CostWeights& w, const State& x, const Control& u) {
  const std::array<double, 6> xs{x.x, x.y, x.psi, x.u, x.v, x.r};
  return detail::energy_rate(w, xs, u.tau_x, u.tau_n);
}

double turn_cost_rate(const CostWeights& w, const VesselParams& p,
                      const State& x) {
  const std::array<double, 6> xs{x.x, x.y, x.psi, x.u, x.v, x.r};
  return detail::turn_rate_cost(w, p, xs);
}

AugmentedState shooting_map(const VesselParams& p, const CostWeights& w,
                            const AugmentedState& z, const Control& u, double h,
                            int substeps) {
  return unpack(detail::rk4_shooting(p, w, pack(z), u.tau_x, u.tau_n, h, substeps));
}

double steady_state_thrust(const VesselParams& p, double u_nom) {
  return p.damping_linear[0] * u_nom +
         p.damping_quadratic[0] * std::abs(u_nom) * u_nom;
}

}  // namespace asvplan
