#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "asvplan/smoothing.hpp"
#include "asvplan/vessel.hpp"

namespace asvplan {

/// Time-parametrized lift of a geometric path: constant surge u_nom, zero
/// sway, piecewise-constant yaw rate, constant inputs (tau_X,ss, 0), and an
/// accumulated-cost channel. Not dynamically feasible; only a guess.
struct WarmTrajectory {
  struct Sample {
    double t = 0.0;
    AugmentedState z;
    Control u;
  };
  double t_max = 0.0;
  double u_nom = 0.0;
  std::vector<Sample> samples;  // uniform time grid, first at t = 0
};

/// Lifts the path with u_nom = L_path / t_max and L(t) = u_nom * t; the
/// cost channel integrates the running cost by the composite trapezoid
/// rule over the sample grid. Throws InfeasibleSpeed when u_nom exceeds
/// the surge upper bound.
WarmTrajectory lift(const GeomPath& g, double t_max, const VesselParams& params,
                    const CostWeights& weights, int samples);

/// Linear interpolation of every channel onto the t_k = k * t_max / n_ocp
/// grid, packed into the multiple-shooting decision vector layout
/// [z_0, u_0, z_1, ..., u_{N-1}, z_N].
Eigen::VectorXd sample_to_grid(const WarmTrajectory& w, int n_ocp);

/// CSV dump (t, x, y, psi, u, v, r, tau_X, tau_N, J).
void write_warm_csv(const WarmTrajectory& w, const std::string& path);

}  // namespace asvplan
