#include "asvplan/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "asvplan/errors.hpp"
#include "asvplan/transcription.hpp"

namespace asvplan {

Mode parse_mode(const std::string& name) {
  if (name == "warm") return Mode::Warm;
  if (name == "cold") return Mode::Cold;
  if (name == "guess") return Mode::GuessOnly;
  throw ConfigError("unknown mode '" + name + "' (expected warm|cold|guess)");
}

const char* to_string(Mode m) {
  switch (m) {
    case Mode::Warm: return "warm";
    case Mode::Cold: return "cold";
    case Mode::GuessOnly: return "guess";
  }
  return "unknown";
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

State state_at(const Eigen::VectorXd& w, int k) {
  const int off = k * NlpProblem::kStride;
  return {w[off + 0], w[off + 1], w[off + 2], w[off + 3], w[off + 4], w[off + 5]};
}

Control control_at(const Eigen::VectorXd& w, int k) {
  const int off = k * NlpProblem::kStride + NlpProblem::kAugDim;
  return {w[off + 0], w[off + 1]};
}

// Cost split for a solved trajectory: per shooting interval, integrate
// [x; J_e; J_t] with the same RK4 scheme the transcription uses, restarting
// from the stored state at each grid point.
CostBreakdown decompose_rk4(const VesselParams& p, const CostWeights& cw,
                            const Eigen::VectorXd& w, int n, double h,
                            int substeps) {
  CostBreakdown b;
  b.je.assign(n + 1, 0.0);
  b.jt.assign(n + 1, 0.0);
  for (int k = 0; k < n; ++k) {
    const State xk = state_at(w, k);
    const Control uk = control_at(w, k);
    std::array<double, 8> z{xk.x, xk.y, xk.psi, xk.u, xk.v, xk.r, 0.0, 0.0};
    auto deriv = [&](const std::array<double, 8>& zz) {
      const std::array<double, 6> xs{zz[0], zz[1], zz[2], zz[3], zz[4], zz[5]};
      const auto dx = detail::state_derivative(p, xs, uk.tau_x, uk.tau_n);
      return std::array<double, 8>{dx[0],
                                   dx[1],
                                   dx[2],
                                   dx[3],
                                   dx[4],
                                   dx[5],
                                   detail::energy_rate(cw, xs, uk.tau_x, uk.tau_n),
                                   detail::turn_rate_cost(cw, p, xs)};
    };
    const double hs = h / substeps;
    for (int st = 0; st < substeps; ++st) {
      const auto k1 = deriv(z);
      std::array<double, 8> tmp;
      for (int i = 0; i < 8; ++i) tmp[i] = z[i] + 0.5 * hs * k1[i];
      const auto k2 = deriv(tmp);
      for (int i = 0; i < 8; ++i) tmp[i] = z[i] + 0.5 * hs * k2[i];
      const auto k3 = deriv(tmp);
      for (int i = 0; i < 8; ++i) tmp[i] = z[i] + hs * k3[i];
      const auto k4 = deriv(tmp);
      for (int i = 0; i < 8; ++i)
        z[i] += (hs / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    b.je[k + 1] = b.je[k] + z[6];
    b.jt[k + 1] = b.jt[k] + z[7];
  }
  return b;
}

// Cost split for the raw guess: trapezoid rule on the grid samples, the
// discrete counterpart of the guess-cost integral.
CostBreakdown decompose_trapezoid(const VesselParams& p, const CostWeights& cw,
                                  const Eigen::VectorXd& w, int n, double dt) {
  CostBreakdown b;
  b.je.assign(n + 1, 0.0);
  b.jt.assign(n + 1, 0.0);
  double fe_prev = energy_cost_rate(cw, state_at(w, 0), control_at(w, 0));
  double ft_prev = turn_cost_rate(cw, p, state_at(w, 0));
  for (int k = 1; k <= n; ++k) {
    // Inputs at the final node are not decision variables; hold the last.
    const Control u = control_at(w, std::min(k, n - 1));
    const double fe = energy_cost_rate(cw, state_at(w, k), u);
    const double ft = turn_cost_rate(cw, p, state_at(w, k));
    b.je[k] = b.je[k - 1] + 0.5 * dt * (fe_prev + fe);
    b.jt[k] = b.jt[k - 1] + 0.5 * dt * (ft_prev + ft);
    fe_prev = fe;
    ft_prev = ft;
  }
  return b;
}

}  // namespace

PipelineResult run_pipeline(const Scenario& s, Mode mode, const RunOptions& opt) {
  s.validate();
  PipelineResult r;
  r.mode = mode;
  r.n_ocp = opt.n_ocp_override > 0 ? opt.n_ocp_override : s.n_ocp;
  const int k_ocp = opt.k_ocp_override > 0 ? opt.k_ocp_override : s.k_ocp;

  OcpSetup setup;
  setup.t_max = s.t_max;
  setup.x_s = s.x_s;
  setup.y_s = s.y_s;
  setup.u_s = s.u_r_s;
  setup.x_f = s.x_f;
  setup.y_f = s.y_f;

  if (mode == Mode::Warm || mode == Mode::GuessOnly) {
    const auto t0 = Clock::now();
    r.grid = build_grid(s.obstacles, s.map, s.delta_d);
    r.grid_path = astar_search(r.grid, s.obstacles, {s.x_s, s.y_s}, {s.x_f, s.y_f});
    r.metrics.time.astar_s = seconds_since(t0);

    const auto t1 = Clock::now();
    r.waypoints = reduce_waypoints(r.grid_path, r.grid, s.obstacles);
    r.geom_path = connect_waypoints(r.waypoints, s.r_acc, s.r_turn_min);
    r.geom_path.u_nom = r.geom_path.total_length() / s.t_max;
    r.warm = lift(r.geom_path, s.t_max, s.vessel, s.weights, 10 * r.n_ocp + 1);
    r.metrics.time.smoothing_s = seconds_since(t1);

    r.has_geometry = true;
    r.w = sample_to_grid(r.warm, r.n_ocp);
  }

  if (mode == Mode::Warm || mode == Mode::Cold) {
    NlpProblem problem(setup, s.vessel, s.weights, s.obstacles, r.n_ocp, k_ocp);
    Eigen::VectorXd w0 = (mode == Mode::Warm)
                             ? r.w
                             : cold_start_guess(setup, s.vessel, s.weights, r.n_ocp);
    SolverConfig cfg = s.solver;
    cfg.trace = opt.trace;
    const auto t2 = Clock::now();
    r.solution = solve(problem, w0, cfg);
    r.metrics.time.ocp_s = seconds_since(t2);
    r.w = r.solution.w_star;

    r.metrics.feasible = r.solution.status == SolveStatus::Converged;
    r.metrics.solver_status = to_string(r.solution.status);
    r.metrics.solver_outer_iterations = r.solution.outer_iterations;
    r.metrics.solver_inner_iterations = r.solution.inner_iterations;
    r.metrics.function_evaluations = r.solution.function_evaluations;
    r.breakdown =
        decompose_rk4(s.vessel, s.weights, r.w, r.n_ocp, s.t_max / r.n_ocp, k_ocp);
  } else {
    r.metrics.feasible = false;  // guess stage is not dynamically feasible
    r.breakdown = decompose_trapezoid(s.vessel, s.weights, r.w, r.n_ocp,
                                      s.t_max / r.n_ocp);
  }

  r.metrics.mode = to_string(mode);
  r.metrics.scaled_total_cost =
      s.weights.k_e * r.breakdown.je.back() + s.weights.k_t * r.breakdown.jt.back();
  r.metrics.unscaled_energy_cost = r.breakdown.je.back();
  return r;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

double wrap_pi(double a) {
  double w = std::fmod(a + std::numbers::pi, 2.0 * std::numbers::pi);
  if (w <= 0.0) w += 2.0 * std::numbers::pi;
  return w - std::numbers::pi;
}

}  // namespace

void emit_outputs(const Scenario& s, const PipelineResult& r,
                  const std::string& out_dir, bool dump_debug) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + out_dir);

  const int n = r.n_ocp;
  const double dt = s.t_max / n;

  {
    const std::string path = out_dir + "/trajectory.csv";
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "t,x,y,psi,psi_wrapped,u,v,r,tau_X,tau_N,J\n";
    for (int k = 0; k <= n; ++k) {
      const State st = state_at(r.w, k);
      const Control u = control_at(r.w, std::min(k, n - 1));
      const double j = r.w[k * NlpProblem::kStride + NlpProblem::kAugDim - 1];
      out << fmt(k * dt) << ',' << fmt(st.x) << ',' << fmt(st.y) << ','
          << fmt(st.psi) << ',' << fmt(wrap_pi(st.psi)) << ',' << fmt(st.u)
          << ',' << fmt(st.v) << ',' << fmt(st.r) << ',' << fmt(u.tau_x) << ','
          << fmt(u.tau_n) << ',' << fmt(j) << '\n';
    }
  }

  {
    const std::string path = out_dir + "/cost.csv";
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "t,J_total,Ke_Je,Kt_Jt\n";
    for (int k = 0; k <= n; ++k) {
      const double je = s.weights.k_e * r.breakdown.je[k];
      const double jt = s.weights.k_t * r.breakdown.jt[k];
      out << fmt(k * dt) << ',' << fmt(je + jt) << ',' << fmt(je) << ','
          << fmt(jt) << '\n';
    }
  }

  {
    nlohmann::json j;
    j["scenario"] = s.name;
    j["mode"] = r.metrics.mode;
    j["feasible"] = r.metrics.feasible;
    j["scaled_total_cost"] = r.metrics.scaled_total_cost;
    j["unscaled_energy_cost_J"] = r.metrics.unscaled_energy_cost;
    j["n_ocp"] = r.n_ocp;
    j["run_time_s"] = {{"astar", r.metrics.time.astar_s},
                       {"smoothing", r.metrics.time.smoothing_s},
                       {"ocp", r.metrics.time.ocp_s},
                       {"total", r.metrics.time.total()}};
    j["solver"] = {{"status", r.metrics.solver_status},
                   {"outer_iterations", r.metrics.solver_outer_iterations},
                   {"inner_iterations", r.metrics.solver_inner_iterations},
                   {"function_evaluations", r.metrics.function_evaluations}};
    if (r.mode != Mode::GuessOnly) {
      j["solver"]["objective"] = r.solution.objective;
      j["solver"]["equality_residual"] = r.solution.equality_residual;
      j["solver"]["obstacle_violation"] = r.solution.obstacle_violation;
      j["solver"]["kkt_residual"] = r.solution.kkt_residual;
      j["solver"]["wall_time_s"] = r.solution.wall_time_s;
    }
    std::ofstream out(out_dir + "/metrics.json");
    if (!out) throw std::runtime_error("cannot open metrics.json");
    out << j.dump(2) << '\n';
  }

  if (dump_debug && r.has_geometry) {
    write_grid_csv(r.grid, out_dir + "/grid.csv");
    {
      std::ofstream out(out_dir + "/astar_path.csv");
      out << "x,y\n";
      for (const auto& p : r.grid_path.points(r.grid))
        out << fmt(p.x()) << ',' << fmt(p.y()) << '\n';
    }
    {
      std::ofstream out(out_dir + "/waypoints.csv");
      out << "x,y\n";
      for (const auto& p : r.waypoints.waypoints)
        out << fmt(p.x()) << ',' << fmt(p.y()) << '\n';
    }
    write_path_csv(r.geom_path, r.warm.u_nom, 500, out_dir + "/geom_path.csv");
    write_warm_csv(r.warm, out_dir + "/warm_trajectory.csv");
  }
}

bool route_uses_corridor(const PipelineResult& r, const CorridorBox& box) {
  bool entered = false;
  for (int k = 0; k <= r.n_ocp; ++k) {
    const State st = state_at(r.w, k);
    if (box.contains(st.x, st.y)) entered = true;
    const bool in_x_window = st.x >= box.x_min && st.x <= box.x_max;
    if (in_x_window && !box.contains(st.x, st.y)) return false;
  }
  return entered;
}

}  // namespace asvplan
