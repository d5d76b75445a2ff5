#include "nrhc/scenario.hpp"

#include <fstream>
#include <sstream>

#include "nrhc/dynamics.hpp"
#include "nrhc/errors.hpp"
#include "nrhc/sweep.hpp"

namespace nrhc {

namespace {

using nlohmann::json;

bool is_number(const json& j) { return j.is_number(); }

// Weight entries may be a scalar (s * I), a length-n diagonal, or a full
// row-major matrix.
std::optional<Eigen::MatrixXd> parse_matrix_like(const json& j, int n,
                                                 const std::string& label,
                                                 std::vector<std::string>& errors) {
  if (is_number(j)) {
    return Eigen::MatrixXd(j.get<double>() *
                           Eigen::MatrixXd::Identity(n, n));
  }
  if (j.is_array() && !j.empty() && is_number(j[0])) {
    if (static_cast<int>(j.size()) != n) {
      errors.push_back(label + ": diagonal must have " + std::to_string(n) +
                       " entries");
      return std::nullopt;
    }
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      if (!is_number(j[i])) {
        errors.push_back(label + ": diagonal entries must be numbers");
        return std::nullopt;
      }
      m(i, i) = j[i].get<double>();
    }
    return m;
  }
  if (j.is_array()) {
    if (static_cast<int>(j.size()) != n) {
      errors.push_back(label + ": expected " + std::to_string(n) + " rows");
      return std::nullopt;
    }
    Eigen::MatrixXd m(n, n);
    for (int r = 0; r < n; ++r) {
      if (!j[r].is_array() || static_cast<int>(j[r].size()) != n) {
        errors.push_back(label + ": row " + std::to_string(r) + " must have " +
                         std::to_string(n) + " entries");
        return std::nullopt;
      }
      for (int c = 0; c < n; ++c) {
        if (!is_number(j[r][c])) {
          errors.push_back(label + ": entries must be numbers");
          return std::nullopt;
        }
        m(r, c) = j[r][c].get<double>();
      }
    }
    return m;
  }
  errors.push_back(label + ": expected a number, a diagonal, or a matrix");
  return std::nullopt;
}

std::optional<Eigen::MatrixXd> parse_rect(const json& j, int rows, int cols,
                                          const std::string& label,
                                          std::vector<std::string>& errors) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows) {
    errors.push_back(label + ": expected " + std::to_string(rows) + " rows");
    return std::nullopt;
  }
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    if (!j[r].is_array() || static_cast<int>(j[r].size()) != cols) {
      errors.push_back(label + ": row " + std::to_string(r) + " must have " +
                       std::to_string(cols) + " entries");
      return std::nullopt;
    }
    for (int c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) {
        errors.push_back(label + ": entries must be numbers");
        return std::nullopt;
      }
      m(r, c) = j[r][c].get<double>();
    }
  }
  if (!m.allFinite()) {
    errors.push_back(label + ": entries must be finite");
    return std::nullopt;
  }
  return m;
}

void check_spd(const std::optional<Eigen::MatrixXd>& m, const std::string& label,
               std::vector<std::string>& errors) {
  if (!m) return;
  const double scale = 1.0 + m->cwiseAbs().maxCoeff();
  if ((*m - m->transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    errors.push_back(label + ": not symmetric");
    return;
  }
  if (Eigen::LLT<Eigen::MatrixXd>(*m).info() != Eigen::Success) {
    errors.push_back(label + ": not positive definite");
  }
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Scenario build_scenario(const json& doc, const std::string& name_hint) {
  auto errors = validate_scenario_json(doc);
  if (!errors.empty()) throw ScenarioError(std::move(errors));

  std::vector<std::string> sink;
  const std::string model_name = doc.at("model").get<std::string>();
  const DynamicsModel model = model_by_name(model_name);
  const int n = model.state_dim;

  const auto& topo = doc.at("topology");
  const int m = static_cast<int>(topo.at("adjacency").size());
  Eigen::MatrixXd adjacency =
      *parse_rect(topo.at("adjacency"), m, m, "adjacency", sink);
  bool directed = adjacency != adjacency.transpose().eval();
  if (topo.contains("directed")) directed = topo.at("directed").get<bool>();

  std::optional<Eigen::VectorXd> leader_adjacency;
  if (topo.contains("leader_adjacency")) {
    Eigen::VectorXd v(m);
    for (int i = 0; i < m; ++i) v(i) = topo.at("leader_adjacency")[i].get<double>();
    leader_adjacency = v;
  }
  Topology topology(std::move(adjacency), directed, leader_adjacency);

  Eigen::MatrixXd initial =
      *parse_rect(doc.at("initial_conditions"), m, n, "initial_conditions", sink);

  std::optional<Eigen::VectorXd> leader_initial;
  if (doc.contains("leader_initial")) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = doc.at("leader_initial")[i].get<double>();
    leader_initial = v;
  }

  const auto& w = doc.at("weights");
  std::optional<Eigen::MatrixXd> q_leader;
  if (w.contains("Q0")) q_leader = parse_matrix_like(w.at("Q0"), n, "Q0", sink);
  const bool terminal_enabled =
      doc.contains("terminal_cost") ? doc.at("terminal_cost").get<bool>() : true;
  CostSpec costs(*parse_matrix_like(w.at("Q"), n, "Q", sink),
                 *parse_matrix_like(w.at("QN"), n, "QN", sink),
                 *parse_matrix_like(w.at("R"), n, "R", sink), q_leader,
                 terminal_enabled);

  HorizonSchedule schedule{doc.at("horizon").at("T_f").get<double>(),
                           doc.at("horizon").at("alpha").get<double>()};

  Eigen::MatrixXd a_s = -50.0 * Eigen::MatrixXd::Identity(n, n);
  if (doc.contains("stabilization") && doc.at("stabilization").contains("A_s")) {
    a_s = *parse_matrix_like(doc.at("stabilization").at("A_s"), n, "A_s", sink);
  }

  SimulationConfig sim;
  const auto& s = doc.at("simulation");
  if (s.contains("dt")) sim.dt = s.at("dt").get<double>();
  if (s.contains("dtau")) sim.dtau_target = s.at("dtau").get<double>();
  sim.duration = s.at("duration").get<double>();
  sim.leader_mode = topology.has_leader();
  if (doc.contains("leader_prediction")) {
    sim.leader_prediction = doc.at("leader_prediction").get<bool>();
  }
  if (doc.contains("seed")) sim.seed = doc.at("seed").get<unsigned int>();

  std::string name = name_hint;
  if (doc.contains("name")) name = doc.at("name").get<std::string>();

  return Scenario{std::move(name),     model_name, std::move(topology),
                  std::move(initial),  leader_initial, std::move(costs),
                  schedule,            std::move(a_s), sim};
}

}  // namespace

std::vector<std::string> validate_scenario_json(const json& doc) {
  std::vector<std::string> errors;
  if (!doc.is_object()) {
    errors.push_back("document must be a JSON object");
    return errors;
  }

  int n = 3;
  if (!doc.contains("model") || !doc.at("model").is_string()) {
    errors.push_back("model: required string, one of lorenz|lu|chen");
  } else {
    try {
      n = model_by_name(doc.at("model").get<std::string>()).state_dim;
    } catch (const std::invalid_argument& e) {
      errors.push_back(std::string("model: ") + e.what());
    }
  }

  int m = 0;
  bool has_leader = false;
  if (!doc.contains("topology") || !doc.at("topology").is_object() ||
      !doc.at("topology").contains("adjacency")) {
    errors.push_back("topology.adjacency: required");
  } else {
    const auto& topo = doc.at("topology");
    m = static_cast<int>(topo.at("adjacency").size());
    auto adjacency = parse_rect(topo.at("adjacency"), m, m, "adjacency", errors);
    if (adjacency) {
      for (int i = 0; i < m; ++i) {
        if ((*adjacency)(i, i) != 0.0) {
          errors.push_back("adjacency: self-loop at agent " + std::to_string(i));
        }
      }
      if (adjacency->minCoeff() < 0.0) {
        errors.push_back("adjacency: weights must be nonnegative");
      }
      if (topo.contains("directed") && !topo.at("directed").get<bool>() &&
          *adjacency != adjacency->transpose().eval()) {
        errors.push_back("adjacency: undirected graph requires a symmetric matrix");
      }
    }
    if (topo.contains("leader_adjacency")) {
      has_leader = true;
      const auto& la = topo.at("leader_adjacency");
      if (!la.is_array() || static_cast<int>(la.size()) != m) {
        errors.push_back("leader_adjacency: expected " + std::to_string(m) +
                         " entries");
      } else {
        for (int i = 0; i < m; ++i) {
          if (!la[i].is_number() || la[i].get<double>() < 0.0) {
            errors.push_back("leader_adjacency: entries must be nonnegative numbers");
            break;
          }
        }
      }
    }
  }

  if (!doc.contains("initial_conditions")) {
    errors.push_back("initial_conditions: required");
  } else if (m > 0) {
    parse_rect(doc.at("initial_conditions"), m, n, "initial_conditions", errors);
  }

  if (has_leader && !doc.contains("leader_initial")) {
    errors.push_back("leader_initial: required when a leader adjacency is given");
  }
  if (!has_leader && doc.contains("leader_initial")) {
    errors.push_back("leader_initial: given without a leader adjacency");
  }
  if (doc.contains("leader_initial")) {
    const auto& li = doc.at("leader_initial");
    if (!li.is_array() || static_cast<int>(li.size()) != n) {
      errors.push_back("leader_initial: expected " + std::to_string(n) + " entries");
    }
  }

  if (!doc.contains("weights") || !doc.at("weights").is_object()) {
    errors.push_back("weights: required object with Q, QN, R");
  } else {
    const auto& w = doc.at("weights");
    for (const char* key : {"Q", "QN", "R"}) {
      if (!w.contains(key)) {
        errors.push_back(std::string("weights.") + key + ": required");
      } else {
        check_spd(parse_matrix_like(w.at(key), n, key, errors), key, errors);
      }
    }
    if (w.contains("Q0")) {
      check_spd(parse_matrix_like(w.at("Q0"), n, "Q0", errors), "Q0", errors);
    } else if (has_leader) {
      errors.push_back("weights.Q0: required in leader mode");
    }
  }

  if (!doc.contains("horizon") || !doc.at("horizon").is_object()) {
    errors.push_back("horizon: required object with T_f, alpha");
  } else {
    const auto& h = doc.at("horizon");
    if (!h.contains("T_f") || !h.at("T_f").is_number() ||
        h.at("T_f").get<double>() <= 0.0) {
      errors.push_back("horizon.T_f: must be a positive number");
    }
    if (!h.contains("alpha") || !h.at("alpha").is_number() ||
        h.at("alpha").get<double>() <= 0.0) {
      errors.push_back("horizon.alpha: must be a positive number");
    }
  }

  // Optional; defaults to -50 I.
  if (doc.contains("stabilization") && doc.at("stabilization").contains("A_s")) {
    auto a_s =
        parse_matrix_like(doc.at("stabilization").at("A_s"), n, "A_s", errors);
    if (a_s && !is_hurwitz(*a_s)) {
      errors.push_back("A_s: not a stable matrix (eigenvalues must have negative "
                       "real part)");
    }
  }

  if (!doc.contains("simulation") || !doc.at("simulation").is_object()) {
    errors.push_back("simulation: required object with a duration");
  } else {
    const auto& s = doc.at("simulation");
    for (const char* key : {"dt", "dtau"}) {  // optional, default 0.01 / 0.005
      if (s.contains(key) &&
          (!s.at(key).is_number() || s.at(key).get<double>() <= 0.0)) {
        errors.push_back(std::string("simulation.") + key +
                         ": must be a positive number");
      }
    }
    if (!s.contains("duration") || !s.at("duration").is_number() ||
        s.at("duration").get<double>() < 0.0) {
      errors.push_back("simulation.duration: must be a nonnegative number");
    }
  }

  return errors;
}

Scenario parse_scenario(const std::string& text, const std::string& name_hint) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError({std::string("parse error: ") + e.what()});
  }
  return build_scenario(doc, name_hint);
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open scenario file: " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.stem().string());
}

std::vector<std::string> preset_names() {
  return {"lorenz5", "lu4", "leader_lorenz", "leader_chen"};
}

Scenario preset(const std::string& name) {
  const Eigen::MatrixXd identity3 = Eigen::MatrixXd::Identity(3, 3);
  const Eigen::MatrixXd a_s = -50.0 * identity3;
  SimulationConfig sim;  // dt = 0.01, dtau = 0.005, duration = 10

  if (name == "lorenz5") {
    Eigen::MatrixXd adjacency(5, 5);
    adjacency << 0, 0, 1, 0, 0,
                 1, 0, 1, 0, 0,
                 0, 1, 0, 1, 0,
                 1, 0, 0, 0, 1,
                 1, 0, 0, 0, 0;
    // The benchmark publishes initial states for four agents only; the
    // fifth agent starts at (5, 5, 5), an explicit choice of this preset.
    Eigen::MatrixXd initial(5, 3);
    initial << 1, 10, 2,
               2, -1, 5,
               -10, 20, 8,
               9, -10, -2,
               5, 5, 5;
    return Scenario{"lorenz5",
                    "lorenz",
                    Topology(adjacency, /*directed=*/true),
                    initial,
                    std::nullopt,
                    CostSpec(identity3, identity3, identity3),
                    HorizonSchedule{1.0, 0.01},
                    a_s,
                    sim};
  }
  if (name == "lu4") {
    Eigen::MatrixXd adjacency(4, 4);
    adjacency << 0, 1, 0, 1,
                 1, 0, 1, 0,
                 0, 1, 0, 1,
                 1, 0, 1, 0;
    Eigen::MatrixXd initial(4, 3);
    initial << 1, 10, 2,
               2, -1, 5,
               -10, 20, 8,
               9, -10, -2;
    return Scenario{"lu4",
                    "lu",
                    Topology(adjacency, /*directed=*/false),
                    initial,
                    std::nullopt,
                    CostSpec(identity3, identity3, identity3),
                    HorizonSchedule{1.0, 0.01},
                    a_s,
                    sim};
  }
  if (name == "leader_lorenz" || name == "leader_chen") {
    // Follower + leader initial states shared by both leader benchmarks.
    Eigen::MatrixXd initial(4, 3);
    initial << -1, 10, 2,
               2, -1, 5,
               -10, 20, 8,
               9, -10, -2;
    const Eigen::Vector3d leader_initial(0.1, 0.2, 0.3);
    sim.leader_mode = true;

    if (name == "leader_lorenz") {
      // Augmented matrix H with the leader links on the diagonal:
      //   [1 1 0 0; 1 0 1 0; 0 1 1 1; 0 0 1 0]
      Eigen::MatrixXd adjacency(4, 4);
      adjacency << 0, 1, 0, 0,
                   1, 0, 1, 0,
                   0, 1, 0, 1,
                   0, 0, 1, 0;
      Eigen::VectorXd leader_adjacency(4);
      leader_adjacency << 1, 0, 1, 0;
      return Scenario{"leader_lorenz",
                      "lorenz",
                      Topology(adjacency, /*directed=*/false, leader_adjacency),
                      initial,
                      leader_initial,
                      CostSpec(identity3, identity3, identity3, 10.0 * identity3),
                      HorizonSchedule{1.0, 0.01},
                      a_s,
                      sim};
    }
    // Augmented matrix H: [1 1 1 1; 1 0 1 0; 0 0 0 1; 1 0 0 1]
    Eigen::MatrixXd adjacency(4, 4);
    adjacency << 0, 1, 1, 1,
                 1, 0, 1, 0,
                 0, 0, 0, 1,
                 1, 0, 0, 0;
    Eigen::VectorXd leader_adjacency(4);
    leader_adjacency << 1, 0, 0, 1;
    return Scenario{"leader_chen",
                    "chen",
                    Topology(adjacency, /*directed=*/true, leader_adjacency),
                    initial,
                    leader_initial,
                    CostSpec(identity3, identity3, identity3, 10.0 * identity3),
                    HorizonSchedule{0.5, 0.01},
                    a_s,
                    sim};
  }
  throw std::invalid_argument("unknown preset: " + name +
                              " (expected lorenz5|lu4|leader_lorenz|leader_chen)");
}

nlohmann::json to_json(const Scenario& sc) {
  json doc;
  doc["name"] = sc.name;
  doc["model"] = sc.model_name;
  doc["topology"]["adjacency"] = matrix_to_json(sc.topology.adjacency());
  doc["topology"]["directed"] = sc.topology.directed();
  if (sc.topology.has_leader()) {
    doc["topology"]["leader_adjacency"] =
        vector_to_json(*sc.topology.leader_adjacency());
  }
  doc["initial_conditions"] = matrix_to_json(sc.initial_conditions);
  if (sc.leader_initial) {
    doc["leader_initial"] = vector_to_json(*sc.leader_initial);
  }
  doc["weights"]["Q"] = matrix_to_json(sc.costs.Q());
  doc["weights"]["QN"] = matrix_to_json(sc.costs.QN());
  doc["weights"]["R"] = matrix_to_json(sc.costs.R());
  if (sc.costs.Q_leader()) {
    doc["weights"]["Q0"] = matrix_to_json(*sc.costs.Q_leader());
  }
  doc["horizon"]["T_f"] = sc.schedule.T_f;
  doc["horizon"]["alpha"] = sc.schedule.alpha;
  doc["stabilization"]["A_s"] = matrix_to_json(sc.A_s);
  doc["simulation"]["dt"] = sc.sim.dt;
  doc["simulation"]["dtau"] = sc.sim.dtau_target;
  doc["simulation"]["duration"] = sc.sim.duration;
  doc["terminal_cost"] = sc.costs.use_terminal_cost();
  doc["leader_prediction"] = sc.sim.leader_prediction;
  doc["seed"] = sc.sim.seed;
  return doc;
}

}  // namespace nrhc
