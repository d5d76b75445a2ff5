#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nrhc/costs.hpp"
#include "nrhc/topology.hpp"

namespace nrhc {

/// Parameters of the closed-loop engine. Neighbor states are always
/// advanced open-loop along the horizon (the solver reconstructs the
/// shared dynamics from the single per-instant exchange);
/// `leader_prediction` extends the same treatment to the leader, and
/// turning it off holds the leader at its snapshot value instead.
struct SimulationConfig {
  double dt = 0.01;
  double dtau_target = 0.005;
  double duration = 10.0;
  bool leader_mode = false;
  bool leader_prediction = true;
  unsigned int seed = 0;  // reserved for randomized scenarios; presets ignore it
};

/// A fully validated problem description: everything a run needs.
struct Scenario {
  std::string name;
  std::string model_name;  // "lorenz" | "lu" | "chen"
  Topology topology;
  Eigen::MatrixXd initial_conditions;  // n_agents x state_dim
  std::optional<Eigen::VectorXd> leader_initial;
  CostSpec costs;
  HorizonSchedule schedule;
  Eigen::MatrixXd A_s;
  SimulationConfig sim;
};

/// Loads and validates a scenario file. Throws ScenarioError carrying
/// every validation problem found, or std::runtime_error on I/O failure.
Scenario load_scenario(const std::filesystem::path& path);

/// Same, from JSON text.
Scenario parse_scenario(const std::string& text,
                        const std::string& name_hint = "scenario");

/// All validation errors for a parsed document; empty means valid.
std::vector<std::string> validate_scenario_json(const nlohmann::json& doc);

/// The four benchmark presets: lorenz5, lu4, leader_lorenz, leader_chen.
Scenario preset(const std::string& name);
std::vector<std::string> preset_names();

/// Canonical serialization; load(to_json(s)) reproduces s exactly.
nlohmann::json to_json(const Scenario& scenario);

}  // namespace nrhc
