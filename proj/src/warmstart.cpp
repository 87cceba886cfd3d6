#include "asvplan/warmstart.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "asvplan/errors.hpp"

namespace asvplan {

WarmTrajectory lift(const GeomPath& g, double t_max, const VesselParams& params,
                    const CostWeights& weights, int samples) {
  if (t_max <= 0.0) throw std::invalid_argument("t_max must be positive");
  if (samples < 2) throw std::invalid_argument("need at least two samples");

  WarmTrajectory w;
  w.t_max = t_max;
  w.u_nom = g.total_length() / t_max;
  if (w.u_nom > params.state_bounds.upper[3])
    throw InfeasibleSpeed("nominal speed " + std::to_string(w.u_nom) +
                          " m/s exceeds the surge bound");
  const double tau_x_ss = steady_state_thrust(params, w.u_nom);

  w.samples.resize(samples);
  const double dt = t_max / (samples - 1);
  for (int i = 0; i < samples; ++i) {
    const double t = i * dt;
    const double s = std::min(w.u_nom * t, g.total_length());
    const PathSample ps = g.eval(s, w.u_nom);
    auto& smp = w.samples[i];
    smp.t = t;
    smp.z.state = {ps.position.x(), ps.position.y(), ps.gamma,
                   w.u_nom,         0.0,             ps.turn_rate};
    smp.u = {tau_x_ss, 0.0};
  }
  // Cost channel: trapezoid rule over the sample grid.
  w.samples[0].z.cost = 0.0;
  double prev_f = cost_to_go(weights, params, w.samples[0].z.state, w.samples[0].u);
  for (int i = 1; i < samples; ++i) {
    const double f = cost_to_go(weights, params, w.samples[i].z.state, w.samples[i].u);
    w.samples[i].z.cost = w.samples[i - 1].z.cost + 0.5 * dt * (prev_f + f);
    prev_f = f;
  }
  return w;
}

Eigen::VectorXd sample_to_grid(const WarmTrajectory& w, int n_ocp) {
  if (n_ocp < 1) throw std::invalid_argument("n_ocp must be >= 1");
  const int n_vars = (n_ocp + 1) * 7 + n_ocp * 2;
  Eigen::VectorXd out(n_vars);

  const int ns = static_cast<int>(w.samples.size());
  // Interpolation runs in fractional-index space: k * (ns - 1) / n_ocp is
  // exact in floating point whenever the grids coincide, so resampling onto
  // the same grid is a bit-exact copy.
  auto interpolate = [&](double pos) {
    const int lo = std::min(static_cast<int>(pos), ns - 2);
    const double a = pos - lo;
    const auto& s0 = w.samples[lo];
    const auto& s1 = w.samples[lo + 1];
    std::array<double, 9> v;
    const auto z0 = pack(s0.z);
    const auto z1 = pack(s1.z);
    for (int i = 0; i < 7; ++i) v[i] = (1.0 - a) * z0[i] + a * z1[i];
    v[7] = (1.0 - a) * s0.u.tau_x + a * s1.u.tau_x;
    v[8] = (1.0 - a) * s0.u.tau_n + a * s1.u.tau_n;
    return v;
  };

  for (int k = 0; k <= n_ocp; ++k) {
    const double pos =
        std::clamp(double(k) * double(ns - 1) / double(n_ocp), 0.0, double(ns - 1));
    const auto v = interpolate(pos);
    const int z_off = k * 9;
    for (int i = 0; i < 7; ++i) out[z_off + i] = v[i];
    if (k < n_ocp) {
      out[z_off + 7] = v[7];
      out[z_off + 8] = v[8];
    }
  }
  return out;
}

void write_warm_csv(const WarmTrajectory& w, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "t,x,y,psi,u,v,r,tau_X,tau_N,J\n";
  for (const auto& s : w.samples) {
    out << s.t << ',' << s.z.state.x << ',' << s.z.state.y << ','
        << s.z.state.psi << ',' << s.z.state.u << ',' << s.z.state.v << ','
        << s.z.state.r << ',' << s.u.tau_x << ',' << s.u.tau_n << ','
        << s.z.cost << '\n';
  }
}

}  // namespace asvplan
