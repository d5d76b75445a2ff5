// Command-line front end: run scenarios or presets, validate scenario
// files, list presets. Exit codes: 0 success, 1 validation error,
// 2 divergence.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "nrhc/errors.hpp"
#include "nrhc/output.hpp"
#include "nrhc/scenario.hpp"
#include "nrhc/simulator.hpp"

namespace {

nrhc::Scenario resolve_scenario(const std::string& preset_name,
                                const std::string& scenario_path) {
  if (!preset_name.empty()) return nrhc::preset(preset_name);
  return nrhc::load_scenario(scenario_path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed nonlinear receding-horizon consensus simulator"};
  app.require_subcommand(1);

  std::string preset_name;
  std::string scenario_path;
  std::string out_dir = "out";
  double duration = -1.0;
  double dt = -1.0;
  double dtau = -1.0;
  unsigned int seed = 0;

  auto* run_cmd = app.add_subcommand("run", "Run a scenario and write outputs");
  auto* preset_opt =
      run_cmd->add_option("--preset", preset_name, "Preset name");
  run_cmd->add_option("--scenario", scenario_path, "Scenario JSON file")
      ->excludes(preset_opt);
  run_cmd->add_option("--duration", duration, "Override duration (s)");
  run_cmd->add_option("--dt", dt, "Override real-time step (s)");
  run_cmd->add_option("--dtau", dtau, "Override horizon step target (s)");
  run_cmd->add_option("--out", out_dir, "Output directory");
  auto* seed_opt = run_cmd->add_option(
      "--seed", seed, "Reserved for randomized scenarios; presets ignore it");

  std::string validate_path;
  auto* validate_cmd =
      app.add_subcommand("validate", "Validate a scenario file");
  validate_cmd->add_option("--scenario", validate_path, "Scenario JSON file")
      ->required();

  auto* presets_cmd = app.add_subcommand("presets", "Preset utilities");
  auto* list_cmd = presets_cmd->add_subcommand("list", "List preset names");
  presets_cmd->require_subcommand(1);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      if (preset_name.empty() && scenario_path.empty()) {
        std::cerr << "run: need --preset or --scenario\n";
        return 1;
      }
      nrhc::Scenario scenario = resolve_scenario(preset_name, scenario_path);
      if (duration >= 0.0) scenario.sim.duration = duration;
      if (dt > 0.0) scenario.sim.dt = dt;
      if (dtau > 0.0) scenario.sim.dtau_target = dtau;
      if (seed_opt->count() > 0) scenario.sim.seed = seed;

      const nrhc::TrajectoryLog log = nrhc::run(scenario);
      std::printf("scenario: %s (%s, %d agents)\n", scenario.name.c_str(),
                  scenario.model_name.c_str(), scenario.topology.n_agents());
      if (!log.records.empty()) {
        nrhc::write_outputs(log, scenario, out_dir);
        const auto& first = log.records.front();
        const auto& last = log.records.back();
        std::printf("max pairwise disagreement: %.6g -> %.6g over t=[0, %g]\n",
                    first.max_pairwise, last.max_pairwise, last.t);
        if (last.leader.has_value() && !last.leader_errors.empty()) {
          double e0 = 0.0, e1 = 0.0;
          for (double v : first.leader_errors) e0 = std::max(e0, v);
          for (double v : last.leader_errors) e1 = std::max(e1, v);
          std::printf("max leader error: %.6g -> %.6g\n", e0, e1);
        }
        std::printf("outputs written to %s\n", out_dir.c_str());
      }
      if (log.diverged) {
        std::cerr << "divergence: " << log.divergence_message << "\n";
        return 2;
      }
      return 0;
    }

    if (validate_cmd->parsed()) {
      std::ifstream in(validate_path);
      if (!in) {
        std::cerr << "cannot open " << validate_path << "\n";
        return 1;
      }
      std::ostringstream buf;
      buf << in.rdbuf();
      nlohmann::json doc;
      try {
        doc = nlohmann::json::parse(buf.str());
      } catch (const nlohmann::json::parse_error& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 1;
      }
      const auto errors = nrhc::validate_scenario_json(doc);
      if (errors.empty()) {
        std::cout << "valid\n";
        return 0;
      }
      for (const auto& e : errors) std::cerr << e << "\n";
      return 1;
    }

    if (list_cmd->parsed()) {
      for (const auto& name : nrhc::preset_names()) std::cout << name << "\n";
      return 0;
    }
  } catch (const nrhc::ScenarioError& e) {
    for (const auto& msg : e.errors) std::cerr << msg << "\n";
    return 1;
  } catch (const nrhc::DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
