#include "asvplan/scenario.hpp"

#include <fstream>

#include <json.hpp>

#include "asvplan/errors.hpp"

namespace asvplan {

using nlohmann::json;

namespace {

double num(const json& j, const std::string& key) {
  if (!j.contains(key) || !j.at(key).is_number())
    throw ConfigError("missing or non-numeric field '" + key + "'");
  return j.at(key).get<double>();
}

double num_or(const json& j, const std::string& key, double fallback) {
  return j.contains(key) ? num(j, key) : fallback;
}

int integer(const json& j, const std::string& key) {
  if (!j.contains(key) || !j.at(key).is_number_integer())
    throw ConfigError("missing or non-integer field '" + key + "'");
  return j.at(key).get<int>();
}

Eigen::Vector3d vec3(const json& j, const std::string& key) {
  if (!j.contains(key) || !j.at(key).is_array() || j.at(key).size() != 3)
    throw ConfigError("field '" + key + "' must be a 3-element array");
  const auto& a = j.at(key);
  return {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
}

std::pair<double, double> bound_pair(const json& j, const std::string& key) {
  if (!j.contains(key) || !j.at(key).is_array() || j.at(key).size() != 2)
    throw ConfigError("bound '" + key + "' must be a [lb, ub] pair");
  return {j.at(key)[0].get<double>(), j.at(key)[1].get<double>()};
}

VesselParams parse_vessel(const json& j, double r_turn_min) {
  VesselParams p;
  if (j.contains("mass_matrix_diag")) {
    p.mass_matrix = vec3(j, "mass_matrix_diag").asDiagonal();
  } else if (j.contains("mass_matrix")) {
    const auto& m = j.at("mass_matrix");
    if (!m.is_array() || m.size() != 3)
      throw ConfigError("mass_matrix must be a 3x3 array");
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) p.mass_matrix(r, c) = m[r][c].get<double>();
  } else {
    throw ConfigError("vessel needs mass_matrix or mass_matrix_diag");
  }
  p.damping_linear = vec3(j, "damping_linear");
  p.damping_quadratic = vec3(j, "damping_quadratic");
  p.tau_x_min = num(j, "X_lb");
  p.tau_x_max = num(j, "X_ub");
  p.tau_n_min = num(j, "N_lb");
  p.tau_n_max = num(j, "N_ub");

  const json& sb = j.contains("state_bounds") ? j.at("state_bounds") : json::object();
  const char* names[6] = {"x", "y", "psi", "u_r", "v", "r"};
  const double four_pi = 4.0 * 3.14159265358979323846;
  const std::pair<double, double> defaults[6] = {
      {-1e6, 1e6}, {-1e6, 1e6}, {-four_pi, four_pi},
      {-1.0, 9.0}, {-2.0, 2.0}, {-num(j, "r_max"), num(j, "r_max")}};
  for (int i = 0; i < 6; ++i) {
    auto [lb, ub] = sb.contains(names[i]) ? bound_pair(sb, names[i]) : defaults[i];
    p.state_bounds.lower[i] = lb;
    p.state_bounds.upper[i] = ub;
  }
  p.r_max = num(j, "r_max");
  p.min_turn_radius = r_turn_min;
  try {
    p.finalize();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("vessel parameters invalid: ") + e.what());
  }
  return p;
}

}  // namespace

void Scenario::validate() const {
  try {
    obstacles.validate();
    weights.validate();
    solver.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!vessel.finalized()) throw ConfigError("vessel parameters not finalized");
  if (map.x_max <= map.x_min || map.y_max <= map.y_min)
    throw ConfigError("degenerate map bounds");
  if (delta_d <= 0.0) throw ConfigError("delta_d must be positive");
  if (t_max <= 0.0) throw ConfigError("t_max must be positive");
  if (n_ocp < 1 || k_ocp < 1) throw ConfigError("n_ocp and k_ocp must be >= 1");
  if (r_acc <= 0.0 || r_turn_min <= 0.0)
    throw ConfigError("R_acc and R_turn_min must be positive");
  if (point_in_collision(obstacles, x_s, y_s, false))
    throw ConfigError("start position lies inside an obstacle");
  if (point_in_collision(obstacles, x_f, y_f, false))
    throw ConfigError("goal position lies inside an obstacle");
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file " + path);
  json j;
  try {
    j = json::parse(in, nullptr, /*allow_exceptions=*/true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("scenario parse error: ") + e.what());
  }

  Scenario s;
  try {
  s.name = j.value("name", "unnamed");
  const json& m = j.at("map");
  s.map = {num(m, "x_min"), num(m, "x_max"), num(m, "y_min"), num(m, "y_max")};

  if (!j.contains("obstacles") || !j.at("obstacles").is_array())
    throw ConfigError("missing obstacle list");
  for (const auto& o : j.at("obstacles"))
    s.obstacles.obstacles.push_back({num(o, "x_c"), num(o, "y_c"), num(o, "x_a"),
                                     num(o, "y_a"), num(o, "alpha")});
  s.obstacles.epsilon = num_or(j, "epsilon", 1e-6);
  s.obstacles.inflation = num_or(j, "inflation", 0.0);

  const json& st = j.at("start");
  s.x_s = num(st, "x_s");
  s.y_s = num(st, "y_s");
  s.u_r_s = num(st, "u_r_s");
  const json& gl = j.at("goal");
  s.x_f = num(gl, "x_f");
  s.y_f = num(gl, "y_f");

  s.delta_d = num(j, "delta_d");
  s.t_max = num(j, "t_max");
  s.n_ocp = integer(j, "n_ocp");
  s.k_ocp = integer(j, "k_ocp");
  s.r_acc = num(j, "R_acc");
  s.r_turn_min = num(j, "R_turn_min");

  const json& c = j.at("cost");
  s.weights.k_e = num(c, "K_e");
  s.weights.k_t = num(c, "K_t");
  s.weights.a_t = num(c, "a_t");
  s.weights.b_t = num(c, "b_t");
  s.weights.abs_smoothing = num_or(c, "abs_smoothing", 1e-3);

  s.vessel = parse_vessel(j.at("vessel"), s.r_turn_min);

  if (j.contains("solver")) {
    const json& sv = j.at("solver");
    s.solver.kkt_tolerance = num_or(sv, "kkt_tolerance", s.solver.kkt_tolerance);
    s.solver.constraint_tolerance =
        num_or(sv, "constraint_tolerance", s.solver.constraint_tolerance);
    if (sv.contains("max_outer_iterations"))
      s.solver.max_outer_iterations = integer(sv, "max_outer_iterations");
    if (sv.contains("max_inner_iterations"))
      s.solver.max_inner_iterations = integer(sv, "max_inner_iterations");
    s.solver.initial_penalty =
        num_or(sv, "initial_penalty", s.solver.initial_penalty);
    s.solver.penalty_growth =
        num_or(sv, "penalty_growth", s.solver.penalty_growth);
    if (sv.contains("lbfgs_memory"))
      s.solver.lbfgs_memory = integer(sv, "lbfgs_memory");
    s.solver.initial_inner_tolerance = num_or(sv, "initial_inner_tolerance",
                                              s.solver.initial_inner_tolerance);
  }

  if (j.contains("passage_corridor")) {
    const json& pc = j.at("passage_corridor");
    s.passage_corridor = CorridorBox{num(pc, "x_min"), num(pc, "x_max"),
                                     num(pc, "y_min"), num(pc, "y_max")};
  }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario field error: ") + e.what());
  }

  s.validate();
  return s;
}

}  // namespace asvplan
