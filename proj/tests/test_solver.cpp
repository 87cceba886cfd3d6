#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <vector>

#include "asvplan/solver.hpp"

using namespace asvplan;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Small dense problem defined by callbacks; rows carry their own gradients.
class DenseProblem final : public ConstrainedProblem {
 public:
  using ValueGrad =
      std::function<double(const Eigen::VectorXd&, Eigen::VectorXd*)>;

  DenseProblem(int n, ValueGrad cost) : n_(n), cost_(std::move(cost)) {
    wl_ = Eigen::VectorXd::Constant(n, -kInf);
    wu_ = Eigen::VectorXd::Constant(n, kInf);
  }

  void add_equality(ValueGrad row, double target) {
    rows_.push_back(std::move(row));
    gl_.push_back(target);
    gu_.push_back(target);
    sync();
  }
  void add_upper(ValueGrad row, double ub) {
    rows_.push_back(std::move(row));
    gl_.push_back(-kInf);
    gu_.push_back(ub);
    sync();
  }
  void set_box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
    wl_ = lo;
    wu_ = hi;
  }

  int num_variables() const override { return n_; }
  int num_constraints() const override { return static_cast<int>(rows_.size()); }
  const Eigen::VectorXd& variable_lower() const override { return wl_; }
  const Eigen::VectorXd& variable_upper() const override { return wu_; }
  const Eigen::VectorXd& constraint_lower() const override { return glv_; }
  const Eigen::VectorXd& constraint_upper() const override { return guv_; }

  bool eval(const Eigen::VectorXd& w, double& cost,
            Eigen::VectorXd& g) const override {
    cost = cost_(w, nullptr);
    g.resize(num_constraints());
    for (std::size_t i = 0; i < rows_.size(); ++i) g[i] = rows_[i](w, nullptr);
    return std::isfinite(cost) && g.allFinite();
  }
  bool eval_derivs(const Eigen::VectorXd& w, double& cost,
                   Eigen::VectorXd& cost_grad, Eigen::VectorXd& g,
                   Eigen::SparseMatrix<double>& jac) const override {
    cost_grad.resize(n_);
    cost = cost_(w, &cost_grad);
    g.resize(num_constraints());
    std::vector<Eigen::Triplet<double>> trip;
    Eigen::VectorXd row_grad(n_);
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      g[i] = rows_[i](w, &row_grad);
      for (int c = 0; c < n_; ++c)
        trip.emplace_back(static_cast<int>(i), c, row_grad[c]);
    }
    jac.resize(num_constraints(), n_);
    jac.setFromTriplets(trip.begin(), trip.end());
    return std::isfinite(cost) && g.allFinite();
  }

 private:
  void sync() {
    glv_ = Eigen::Map<const Eigen::VectorXd>(gl_.data(), gl_.size());
    guv_ = Eigen::Map<const Eigen::VectorXd>(gu_.data(), gu_.size());
  }
  int n_;
  ValueGrad cost_;
  std::vector<ValueGrad> rows_;
  std::vector<double> gl_, gu_;
  Eigen::VectorXd wl_, wu_, glv_, guv_;
};

OcpSetup tiny_setup() {
  OcpSetup s;
  s.t_max = 10.0;
  s.x_s = 0.0;
  s.y_s = 0.0;
  s.u_s = 2.0;
  s.x_f = 22.0;
  s.y_f = 3.0;
  return s;
}

}  // namespace

TEST_CASE("unconstrained quadratic reaches the analytic minimizer") {
  DenseProblem p(2, [](const Eigen::VectorXd& w, Eigen::VectorXd* grad) {
    if (grad) {
      (*grad)[0] = 2.0 * (w[0] - 3.0);
      (*grad)[1] = 20.0 * (w[1] + 1.0);
    }
    return (w[0] - 3.0) * (w[0] - 3.0) + 10.0 * (w[1] + 1.0) * (w[1] + 1.0);
  });
  SolverConfig cfg;
  cfg.kkt_tolerance = 1e-10;
  const NlpSolution sol = solve(p, Eigen::Vector2d(10.0, 10.0), cfg);
  CHECK(sol.status == SolveStatus::Converged);
  CHECK(sol.w_star[0] == doctest::Approx(3.0).epsilon(1e-8));
  CHECK(sol.w_star[1] == doctest::Approx(-1.0).epsilon(1e-8));
  CHECK(sol.equality_residual == 0.0);
  CHECK(sol.obstacle_violation == 0.0);
}

TEST_CASE("equality-constrained quadratic: min x^2+y^2 s.t. x+y=1") {
  DenseProblem p(2, [](const Eigen::VectorXd& w, Eigen::VectorXd* grad) {
    if (grad) *grad = 2.0 * w;
    return w.squaredNorm();
  });
  p.add_equality(
      [](const Eigen::VectorXd& w, Eigen::VectorXd* grad) {
        if (grad) grad->setOnes();
        return w[0] + w[1];
      },
      1.0);
  SolverConfig cfg;
  const NlpSolution sol = solve(p, Eigen::Vector2d(5.0, -7.0), cfg);
  CHECK(sol.status == SolveStatus::Converged);
  CHECK(sol.w_star[0] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(sol.w_star[1] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(sol.equality_residual <= cfg.constraint_tolerance);
}

TEST_CASE("one-sided row and box bound become active") {
  // min (x-3)^2 + (y-2)^2 s.t. x + y <= 2, y <= 1.25 (box).
  DenseProblem p(2, [](const Eigen::VectorXd& w, Eigen::VectorXd* grad) {
    if (grad) {
      (*grad)[0] = 2.0 * (w[0] - 3.0);
      (*grad)[1] = 2.0 * (w[1] - 2.0);
    }
    return (w[0] - 3.0) * (w[0] - 3.0) + (w[1] - 2.0) * (w[1] - 2.0);
  });
  p.add_upper(
      [](const Eigen::VectorXd& w, Eigen::VectorXd* grad) {
        if (grad) grad->setOnes();
        return w[0] + w[1];
      },
      2.0);
  p.set_box(Eigen::Vector2d(-kInf, -kInf), Eigen::Vector2d(kInf, 1.25));
  SolverConfig cfg;
  const NlpSolution sol = solve(p, Eigen::Vector2d(0.0, 0.0), cfg);
  CHECK(sol.status == SolveStatus::Converged);
  // KKT: constraint active, box inactive at the optimum (1.5, 0.5)... the
  // unconstrained pull (3,2) projects onto x+y=2 at (1.5, 0.5).
  CHECK(sol.w_star[0] == doctest::Approx(1.5).epsilon(1e-5));
  CHECK(sol.w_star[1] == doctest::Approx(0.5).epsilon(1e-5));
  CHECK(sol.obstacle_violation <= cfg.constraint_tolerance);
}

TEST_CASE("evaluation failure is flagged") {
  DenseProblem p(1, [](const Eigen::VectorXd& w, Eigen::VectorXd* grad) {
    if (grad) (*grad)[0] = std::numeric_limits<double>::quiet_NaN();
    return std::numeric_limits<double>::quiet_NaN() * w[0];
  });
  SolverConfig cfg;
  const NlpSolution sol = solve(p, Eigen::VectorXd::Ones(1), cfg);
  CHECK(sol.status == SolveStatus::EvaluationFailure);
}

TEST_CASE("initial guess outside the box is projected, not rejected") {
  DenseProblem p(1, [](const Eigen::VectorXd& w, Eigen::VectorXd* grad) {
    if (grad) (*grad)[0] = 2.0 * w[0];
    return w[0] * w[0];
  });
  p.set_box(Eigen::VectorXd::Constant(1, 2.0), Eigen::VectorXd::Constant(1, 5.0));
  const NlpSolution sol = solve(p, Eigen::VectorXd::Constant(1, 100.0), {});
  CHECK(sol.status == SolveStatus::Converged);
  CHECK(sol.w_star[0] == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("cold start guess construction") {
  const auto params = VesselParams::default_vessel();
  const CostWeights w;
  SUBCASE("straight-line channels") {
    const auto setup = tiny_setup();
    const Eigen::VectorXd g = cold_start_guess(setup, params, w, 4);
    REQUIRE(g.size() == 5 * 7 + 4 * 2);
    const double dist = std::hypot(22.0, 3.0);
    const double bearing = std::atan2(3.0, 22.0);
    for (int k = 0; k <= 4; ++k) {
      const double a = k / 4.0;
      CHECK(g[k * 9 + 0] == doctest::Approx(a * 22.0).epsilon(1e-12));
      CHECK(g[k * 9 + 1] == doctest::Approx(a * 3.0).epsilon(1e-12));
      CHECK(g[k * 9 + 2] == doctest::Approx(bearing).epsilon(1e-12));
      CHECK(g[k * 9 + 3] == doctest::Approx(dist / 10.0).epsilon(1e-12));
      CHECK(g[k * 9 + 4] == 0.0);
      CHECK(g[k * 9 + 5] == 0.0);
      if (k > 0) CHECK(g[k * 9 + 6] >= g[(k - 1) * 9 + 6]);
    }
    CHECK(g[6] == 0.0);
  }
  SUBCASE("degenerate start == goal") {
    OcpSetup s = tiny_setup();
    s.x_f = s.x_s;
    s.y_f = s.y_s;
    const Eigen::VectorXd g = cold_start_guess(s, params, w, 3);
    for (int k = 0; k <= 3; ++k) {
      CHECK(g[k * 9 + 0] == s.x_s);
      CHECK(g[k * 9 + 3] == 0.0);
    }
  }
}

TEST_CASE("small shooting problem: solve, residuals, rollout oracle") {
  const auto params = VesselParams::default_vessel();
  const CostWeights cw;
  NlpProblem problem(tiny_setup(), params, cw, ObstacleSet{}, 5, 1);

  SolverConfig cfg;
  cfg.constraint_tolerance = 1e-8;
  cfg.kkt_tolerance = 1e-5;
  cfg.max_outer_iterations = 60;
  cfg.max_inner_iterations = 2500;

  const Eigen::VectorXd w0 =
      cold_start_guess(tiny_setup(), params, cw, problem.n_ocp());
  const NlpSolution sol = solve(problem, w0, cfg);
  REQUIRE(sol.status == SolveStatus::Converged);
  CHECK(sol.equality_residual <= 1e-6);

  // Independent roll-out of the returned controls.
  AugmentedState z{{sol.w_star[0], sol.w_star[1], sol.w_star[2], sol.w_star[3],
                    sol.w_star[4], sol.w_star[5]},
                   sol.w_star[6]};
  double worst = 0.0;
  for (int k = 0; k < 5; ++k) {
    const Control u{sol.w_star[NlpProblem::u_offset(k)],
                    sol.w_star[NlpProblem::u_offset(k) + 1]};
    z = shooting_map(params, cw, z, u, problem.step_length(), problem.k_ocp());
    const auto zarr = pack(z);
    for (int i = 0; i < 7; ++i)
      worst = std::max(
          worst, std::abs(zarr[i] - sol.w_star[NlpProblem::z_offset(k + 1) + i]));
  }
  CHECK(worst <= 1e-6);

  // Reported residuals match an independent recomputation exactly.
  double cost;
  Eigen::VectorXd g;
  REQUIRE(problem.eval(sol.w_star, cost, g));
  double eq = 0.0;
  for (int i = 0; i < problem.num_shooting_rows(); ++i)
    eq = std::max(eq, std::abs(g[i]));
  CHECK(std::abs(eq - sol.equality_residual) <= 1e-12);
  CHECK(std::abs(cost - sol.objective) <= 1e-12);
}

TEST_CASE("determinism: identical inputs give identical runs") {
  const auto params = VesselParams::default_vessel();
  const CostWeights cw;
  ObstacleSet obs;
  obs.obstacles.push_back({12.0, 1.0, 4.0, 3.0, 0.2});
  NlpProblem problem(tiny_setup(), params, cw, obs, 5, 1);
  SolverConfig cfg;
  cfg.max_outer_iterations = 20;
  cfg.max_inner_iterations = 150;

  const Eigen::VectorXd w0 =
      cold_start_guess(tiny_setup(), params, cw, problem.n_ocp());
  const NlpSolution a = solve(problem, w0, cfg);
  const NlpSolution b = solve(problem, w0, cfg);
  CHECK(a.inner_iterations == b.inner_iterations);
  CHECK(a.outer_iterations == b.outer_iterations);
  CHECK(a.function_evaluations == b.function_evaluations);
  REQUIRE(a.w_star.size() == b.w_star.size());
  for (int i = 0; i < a.w_star.size(); ++i) CHECK(a.w_star[i] == b.w_star[i]);
}

TEST_CASE("merit trace is non-increasing within each outer iteration") {
  const auto params = VesselParams::default_vessel();
  const CostWeights cw;
  NlpProblem problem(tiny_setup(), params, cw, ObstacleSet{}, 4, 1);
  std::ostringstream trace;
  SolverConfig cfg;
  cfg.trace = &trace;
  cfg.max_outer_iterations = 15;
  const Eigen::VectorXd w0 =
      cold_start_guess(tiny_setup(), params, cw, problem.n_ocp());
  solve(problem, w0, cfg);

  std::istringstream in(trace.str());
  std::string line;
  std::getline(in, line);  // header
  CHECK(line == "outer,inner,merit,kkt,eq_residual,obstacle_violation,step_norm");
  int prev_outer = -1;
  double prev_merit = kInf;
  int rows = 0;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string field;
    std::getline(ls, field, ',');
    const int outer = std::stoi(field);
    std::getline(ls, field, ',');
    std::getline(ls, field, ',');
    const double merit = std::stod(field);
    if (outer != prev_outer) {
      prev_outer = outer;
      prev_merit = kInf;
    }
    CHECK(merit <= prev_merit + 1e-12);
    prev_merit = merit;
    ++rows;
  }
  CHECK(rows > 0);
}

TEST_CASE("solver config validation") {
  SolverConfig cfg;
  cfg.penalty_growth = 1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.kkt_tolerance = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.max_outer_iterations = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
