// Pipelined trajectory planner for surface vessels: grid A* shortest path,
// arc smoothing into a warm-start trajectory, and a direct multiple-shooting
// optimal-control solve. See README.md for the scenario file format.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "asvplan/errors.hpp"
#include "asvplan/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"asv_plan: pipelined trajectory planning benchmark"};

  std::string scenario_path;
  std::string mode_name = "warm";
  std::string out_dir = ".";
  int n_ocp_override = 0;
  int k_ocp_override = 0;
  bool trace = false;
  bool dump_grid = false;

  app.add_option("--scenario", scenario_path, "scenario JSON file")->required();
  app.add_option("--mode", mode_name, "warm|cold|guess (default warm)");
  app.add_option("--out", out_dir, "output directory (default .)");
  app.add_option("--n-ocp", n_ocp_override, "override the scenario's N_ocp");
  app.add_option("--k-ocp", k_ocp_override,
                 "override the RK4 sub-steps per interval (pair with --n-ocp "
                 "to keep the sub-step length stable)");
  app.add_flag("--trace", trace, "write per-iteration solver trace CSV");
  app.add_flag("--dump-grid", dump_grid, "write grid/path debug CSVs");

  CLI11_PARSE(app, argc, argv);

  try {
    const asvplan::Scenario scenario = asvplan::load_scenario(scenario_path);
    const asvplan::Mode mode = asvplan::parse_mode(mode_name);

    asvplan::RunOptions opt;
    opt.n_ocp_override = n_ocp_override;
    opt.k_ocp_override = k_ocp_override;
    std::ofstream trace_stream;
    if (trace && mode != asvplan::Mode::GuessOnly) {
      std::filesystem::create_directories(out_dir);
      trace_stream.open(out_dir + "/trace.csv");
      if (!trace_stream) {
        std::cerr << "cannot open trace stream in " << out_dir << '\n';
        return 4;
      }
      opt.trace = &trace_stream;
    }

    const asvplan::PipelineResult result =
        asvplan::run_pipeline(scenario, mode, opt);
    asvplan::emit_outputs(scenario, result, out_dir, dump_grid);

    std::cout << "mode=" << asvplan::to_string(mode)
              << " scaled_total_cost=" << result.metrics.scaled_total_cost
              << " unscaled_energy_cost=" << result.metrics.unscaled_energy_cost
              << " status=" << result.metrics.solver_status
              << " iterations=" << result.metrics.solver_inner_iterations
              << " time_s=" << result.metrics.time.total() << '\n';

    if (mode != asvplan::Mode::GuessOnly &&
        result.solution.status != asvplan::SolveStatus::Converged) {
      std::cerr << "solver did not converge: "
                << asvplan::to_string(result.solution.status) << '\n';
      return 3;
    }
    return 0;
  } catch (const asvplan::PlanningError& e) {
    std::cerr << "planning infeasible: " << e.what() << '\n';
    return 2;
  } catch (const asvplan::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
}
