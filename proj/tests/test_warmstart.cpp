#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>

#include "asvplan/errors.hpp"
#include "asvplan/warmstart.hpp"

using namespace asvplan;

namespace {

VesselParams test_params() { return VesselParams::default_vessel(); }

GeomPath straight_path(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  WaypointPath wp;
  wp.waypoints = {a, b};
  return connect_waypoints(wp, 10.0, 24.5);
}

// Recursive adaptive Simpson quadrature; the independent oracle for the
// guess-cost integral.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fm = f(m);
  std::function<double(double, double, double, double, double, double)> rec =
      [&](double lo, double hi, double flo, double fhi, double fmid,
          double eps) -> double {
    const double mid = 0.5 * (lo + hi);
    const double lmid = 0.5 * (lo + mid), rmid = 0.5 * (mid + hi);
    const double fl = f(lmid), fr = f(rmid);
    const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
    const double left = (mid - lo) / 6.0 * (flo + 4.0 * fl + fmid);
    const double right = (hi - mid) / 6.0 * (fmid + 4.0 * fr + fhi);
    if (std::abs(left + right - whole) < 15.0 * eps)
      return left + right + (left + right - whole) / 15.0;
    return rec(lo, mid, flo, fmid, fl, eps / 2.0) +
           rec(mid, hi, fmid, fhi, fr, eps / 2.0);
  };
  return rec(a, b, fa, fb, fm, tol);
}

}  // namespace

TEST_CASE("straight-line lift") {
  const auto p = test_params();
  const CostWeights w;
  const double gamma = 0.6;
  const double len = 900.0;
  const Eigen::Vector2d a(10.0, -20.0);
  const Eigen::Vector2d b = a + len * Eigen::Vector2d(std::cos(gamma), std::sin(gamma));
  const GeomPath g = straight_path(a, b);
  const double t_max = 300.0;

  const WarmTrajectory traj = lift(g, t_max, p, w, 501);
  CHECK(traj.u_nom == doctest::Approx(len / t_max).epsilon(1e-12));

  SUBCASE("endpoints and constant channels") {
    const auto& first = traj.samples.front();
    const auto& last = traj.samples.back();
    CHECK(first.t == 0.0);
    CHECK(first.z.cost == 0.0);
    CHECK(first.z.state.x == doctest::Approx(a.x()));
    CHECK(first.z.state.y == doctest::Approx(a.y()));
    CHECK(last.z.state.x == doctest::Approx(b.x()).epsilon(1e-9));
    CHECK(last.z.state.y == doctest::Approx(b.y()).epsilon(1e-9));
    const double tau_ss = steady_state_thrust(p, traj.u_nom);
    for (const auto& s : traj.samples) {
      CHECK(s.z.state.u == traj.u_nom);
      CHECK(s.z.state.v == 0.0);
      CHECK(s.z.state.r == 0.0);
      CHECK(s.u.tau_x == tau_ss);
      CHECK(s.u.tau_n == 0.0);
      CHECK(s.z.state.psi == doctest::Approx(gamma).epsilon(1e-12));
    }
  }
  SUBCASE("cost linear in t on a straight") {
    const double j_end = traj.samples.back().z.cost;
    for (const auto& s : traj.samples)
      CHECK(s.z.cost == doctest::Approx(j_end * s.t / t_max).epsilon(1e-9));
  }
}

TEST_CASE("lift with the minimum sample count") {
  const auto p = test_params();
  const CostWeights w;
  const GeomPath g = straight_path({0.0, 0.0}, {300.0, 0.0});
  const WarmTrajectory traj = lift(g, 120.0, p, w, 2);
  REQUIRE(traj.samples.size() == 2);
  CHECK(traj.samples[0].t == 0.0);
  CHECK(traj.samples[1].t == 120.0);
  CHECK(traj.samples[1].z.cost > 0.0);
  CHECK_THROWS_AS(lift(g, 120.0, p, w, 1), std::invalid_argument);
}

TEST_CASE("lift rejects excessive nominal speed") {
  const auto p = test_params();  // surge upper bound 9 m/s
  const CostWeights w;
  const GeomPath g = straight_path({0.0, 0.0}, {1000.0, 0.0});
  CHECK_THROWS_AS(lift(g, 100.0, p, w, 11), InfeasibleSpeed);
}

TEST_CASE("single-arc cost matches adaptive quadrature") {
  const auto p = test_params();
  const CostWeights w;
  // One pure arc element: quarter circle of radius 60.
  const double radius = 60.0;
  std::vector<GeomPath::Element> elems;
  elems.push_back({GeomPath::Arc{{0.0, 0.0}, radius, -std::numbers::pi / 2, 1.0},
                   0.0, radius * std::numbers::pi / 2, 0.0});
  const GeomPath g(std::move(elems), radius * std::numbers::pi / 2);
  const double t_max = 40.0;

  const WarmTrajectory traj = lift(g, t_max, p, w, 2001);
  const double u_nom = traj.u_nom;
  const double tau_ss = steady_state_thrust(p, u_nom);

  const auto integrand = [&](double t) {
    const PathSample ps = g.eval(std::min(u_nom * t, g.total_length()), u_nom);
    const State st{ps.position.x(), ps.position.y(), ps.gamma,
                   u_nom,           0.0,              ps.turn_rate};
    return cost_to_go(w, p, st, {tau_ss, 0.0});
  };
  const double oracle = adaptive_simpson(integrand, 0.0, t_max, 1e-10);
  CHECK(traj.samples.back().z.cost ==
        doctest::Approx(oracle).epsilon(1e-4));
}

TEST_CASE("lifted cost channel is nondecreasing") {
  const auto p = test_params();
  const CostWeights w;
  WaypointPath wp;
  wp.waypoints = {{0, 0}, {400, 0}, {400, 500}, {900, 500}};
  const GeomPath g = connect_waypoints(wp, 10.0, 24.5);
  const WarmTrajectory traj = lift(g, 600.0, p, w, 1501);
  for (std::size_t i = 1; i < traj.samples.size(); ++i)
    CHECK(traj.samples[i].z.cost >= traj.samples[i - 1].z.cost);
}

TEST_CASE("heading channel continuity") {
  const auto p = test_params();
  const CostWeights w;
  WaypointPath wp;
  wp.waypoints = {{0, 0}, {400, 0}, {400, 500}, {900, 500}, {900, 0}};
  const GeomPath g = connect_waypoints(wp, 10.0, 24.5);
  const double t_max = 700.0;
  const WarmTrajectory traj = lift(g, t_max, p, w, 2001);
  const double dt = t_max / 2000.0;
  const double bound = traj.u_nom * dt / p.min_turn_radius + 1e-9;
  for (std::size_t i = 1; i < traj.samples.size(); ++i)
    CHECK(std::abs(traj.samples[i].z.state.psi -
                   traj.samples[i - 1].z.state.psi) <= bound);
}

TEST_CASE("dynamic infeasibility of the lift is finite and nonzero") {
  // The guess is not a trajectory of the model; its defect is reported,
  // never asserted to vanish.
  const auto p = test_params();
  const CostWeights w;
  WaypointPath wp;
  wp.waypoints = {{0, 0}, {500, 0}, {500, 500}};
  const GeomPath g = connect_waypoints(wp, 10.0, 24.5);
  const WarmTrajectory traj = lift(g, 400.0, p, w, 801);

  double max_defect = 0.0;
  const double dt = traj.samples[1].t - traj.samples[0].t;
  for (std::size_t i = 1; i + 1 < traj.samples.size(); ++i) {
    const auto& prev = traj.samples[i - 1].z.state;
    const auto& next = traj.samples[i + 1].z.state;
    const auto dx = dynamics(p, traj.samples[i].z.state, traj.samples[i].u);
    const double fd[6] = {(next.x - prev.x) / (2 * dt),
                          (next.y - prev.y) / (2 * dt),
                          (next.psi - prev.psi) / (2 * dt),
                          (next.u - prev.u) / (2 * dt),
                          (next.v - prev.v) / (2 * dt),
                          (next.r - prev.r) / (2 * dt)};
    for (int c = 0; c < 6; ++c)
      max_defect = std::max(max_defect, std::abs(fd[c] - dx[c]));
  }
  CHECK(std::isfinite(max_defect));
  CHECK(max_defect > 0.0);
  MESSAGE("max dynamics defect of the lifted guess: ", max_defect);
}

TEST_CASE("sample_to_grid") {
  const auto p = test_params();
  const CostWeights w;
  WaypointPath wp;
  wp.waypoints = {{0, 0}, {400, 0}, {400, 500}};
  const GeomPath g = connect_waypoints(wp, 10.0, 24.5);
  const double t_max = 400.0;

  SUBCASE("matching grids copy exactly") {
    const int n_ocp = 16;
    const WarmTrajectory traj = lift(g, t_max, p, w, n_ocp + 1);
    const Eigen::VectorXd v = sample_to_grid(traj, n_ocp);
    REQUIRE(v.size() == (n_ocp + 1) * 7 + n_ocp * 2);
    for (int k = 0; k <= n_ocp; ++k) {
      const auto z = pack(traj.samples[k].z);
      for (int i = 0; i < 7; ++i) CHECK(v[k * 9 + i] == z[i]);
      if (k < n_ocp) {
        CHECK(v[k * 9 + 7] == traj.samples[k].u.tau_x);
        CHECK(v[k * 9 + 8] == traj.samples[k].u.tau_n);
      }
    }
  }
  SUBCASE("dense-to-coarse keeps the endpoint cost") {
    const int n_ocp = 20;
    const WarmTrajectory traj = lift(g, t_max, p, w, 10 * n_ocp + 1);
    const Eigen::VectorXd v = sample_to_grid(traj, n_ocp);
    CHECK(v.size() == (n_ocp + 1) * 7 + n_ocp * 2);
    CHECK(v[n_ocp * 9 + 6] == traj.samples.back().z.cost);
    CHECK(v[n_ocp * 9 + 0] == doctest::Approx(400.0).epsilon(1e-9));
    CHECK(v[n_ocp * 9 + 1] == doctest::Approx(500.0).epsilon(1e-9));
  }
}
