#include <doctest.h>

#include <cmath>
#include <numeric>

#include "nrhc/errors.hpp"
#include "nrhc/metrics.hpp"
#include "nrhc/rk4.hpp"
#include "nrhc/simulator.hpp"
#include "nrhc/tpbvp.hpp"
#include "support/oracles.hpp"

using Eigen::MatrixXd;
using Eigen::Vector3d;
using Eigen::VectorXd;
using nrhc::CostSpec;
using nrhc::HorizonSchedule;
using nrhc::Scenario;
using nrhc::SimulationConfig;
using nrhc::SimulationState;
using nrhc::Topology;

namespace {

CostSpec scalar_spec(double q, double qn, double r, bool terminal) {
  return CostSpec(MatrixXd::Constant(1, 1, q), MatrixXd::Constant(1, 1, qn),
                  MatrixXd::Constant(1, 1, r), std::nullopt, terminal);
}

SimulationState manual_state(const std::vector<VectorXd>& xs,
                             const Topology& topo, const CostSpec& spec) {
  SimulationState st;
  st.t = 0.0;
  st.agent_states = xs;
  st.costates = nrhc::bootstrap_costates(xs, std::nullopt, topo, spec);
  st.last_controls.assign(xs.size(), VectorXd::Zero(xs[0].size()));
  return st;
}

}  // namespace

TEST_SUITE("simulator") {

TEST_CASE("neighbor snapshot") {
  MatrixXd complete(2, 2);
  complete << 0, 1, 1, 0;
  const Topology topo(complete, false);
  SimulationState st;
  st.agent_states = {Vector3d(1, 2, 3), Vector3d(4, 5, 6)};

  auto frozen = nrhc::snapshot_neighbors(st, topo);
  REQUIRE(frozen.size() == 2);
  CHECK(frozen[0].indices == std::vector<int>{1});
  CHECK(frozen[0].states[0] == Vector3d(4, 5, 6));
  CHECK(frozen[1].states[0] == Vector3d(1, 2, 3));

  // Snapshot immutability: live-state mutation cannot leak into a solve.
  st.agent_states[1] = Vector3d::Zero();
  CHECK(frozen[0].states[0] == Vector3d(4, 5, 6));
}

TEST_CASE("snapshot follows the directed benchmark topology") {
  const Scenario sc = nrhc::preset("lorenz5");
  nrhc::SimulationState st = nrhc::initialize(sc);
  const auto frozen = nrhc::snapshot_neighbors(st, sc.topology);
  CHECK(frozen[0].indices == std::vector<int>{2});  // agent 0 sees only x_2
  CHECK(frozen[0].states[0] == st.agent_states[2]);
}

TEST_CASE("initialize") {
  SUBCASE("lu4 initial columns") {
    const Scenario sc = nrhc::preset("lu4");
    const auto st = nrhc::initialize(sc);
    REQUIRE(st.agent_states.size() == 4);
    CHECK(st.agent_states[0] == Vector3d(1, 10, 2));
    CHECK(st.agent_states[2] == Vector3d(-10, 20, 8));
    CHECK_FALSE(st.leader_state.has_value());
    // Terminal cost enabled: Lambda(0) = phi_x(x(0)).
    const auto frozen = nrhc::snapshot_neighbors(st, sc.topology);
    for (int i = 0; i < 4; ++i) {
      CHECK(st.costates[i] ==
            nrhc::terminal_costate(sc.costs, st.agent_states[i], frozen[i]));
    }
  }
  SUBCASE("leader preset loads the leader column") {
    const Scenario sc = nrhc::preset("leader_lorenz");
    const auto st = nrhc::initialize(sc);
    REQUIRE(st.leader_state.has_value());
    CHECK(*st.leader_state == Vector3d(0.1, 0.2, 0.3));
    CHECK(st.agent_states[0] == Vector3d(-1, 10, 2));
  }
  SUBCASE("zero terminal cost bootstraps zero costates") {
    Scenario sc = nrhc::preset("lu4");
    sc.costs = CostSpec(sc.costs.Q(), sc.costs.QN(), sc.costs.R(), std::nullopt,
                        /*use_terminal_cost=*/false);
    const auto st = nrhc::initialize(sc);
    for (const auto& lam : st.costates) CHECK(lam.isZero(0.0));
  }
}

TEST_CASE("consensus subspace is invariant: equal starts, zero control forever") {
  Scenario sc = nrhc::preset("lu4");
  sc.costs = CostSpec(sc.costs.Q(), sc.costs.QN(), sc.costs.R(), std::nullopt,
                      false);
  for (int i = 0; i < 4; ++i) {
    sc.initial_conditions.row(i) = Eigen::RowVector3d(1.5, -2.0, 0.75);
  }
  auto st = nrhc::initialize(sc);
  const auto model = nrhc::model_by_name(sc.model_name);
  for (int k = 0; k < 50; ++k) {
    const auto diag = nrhc::step(st, sc.sim, sc.topology, sc.costs, sc.schedule,
                                 sc.A_s, model);
    for (const auto& u : diag.controls) CHECK(u.cwiseAbs().maxCoeff() == 0.0);
    for (int i = 1; i < 4; ++i) {
      CHECK((st.agent_states[i] - st.agent_states[0]).cwiseAbs().maxCoeff() ==
            0.0);
    }
  }
}

TEST_CASE("single agent with no neighbors follows the uncontrolled plant") {
  MatrixXd a = MatrixXd::Zero(1, 1);
  const Topology topo(a, false);
  const MatrixXd eye = MatrixXd::Identity(3, 3);
  const CostSpec spec(eye, eye, eye, std::nullopt, /*use_terminal_cost=*/false);
  const auto model = nrhc::lorenz();
  const HorizonSchedule sched{1.0, 0.01};
  const MatrixXd a_s = -50.0 * MatrixXd::Identity(3, 3);
  SimulationConfig cfg;

  auto st = manual_state({Vector3d(1.0, 1.0, 1.0)}, topo, spec);
  VectorXd reference = Vector3d(1.0, 1.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    nrhc::step(st, cfg, topo, spec, sched, a_s, model);
    reference = nrhc::rk4_step(
        [&](const VectorXd& x) { return model.field(x); }, reference, cfg.dt);
    CHECK(st.agent_states[0] == reference);  // bit-for-bit
  }
}

TEST_CASE("two scalar integrators: disagreement decays at the LQR consensus rate") {
  // xdot_i = u_i, complete graph, q = r = 1, zero terminal cost. After the
  // horizon ramp the closed loop contracts the disagreement e at
  // de/dt = -2 tanh(T) e, with T ~ T_f.
  MatrixXd a(2, 2);
  a << 0, 1, 1, 0;
  const Topology topo(a, false);
  const CostSpec spec = scalar_spec(1.0, 1.0, 1.0, false);
  const auto model = testsupport::scalar_plant(0.0);
  const HorizonSchedule sched{1.0, 2.0};  // fast ramp
  const MatrixXd a_s = -50.0 * MatrixXd::Identity(1, 1);
  SimulationConfig cfg;

  auto st = manual_state(
      {VectorXd::Constant(1, 1.0), VectorXd::Constant(1, -1.0)}, topo, spec);

  std::vector<double> ts, log_e;
  for (int k = 0; k < 700; ++k) {
    nrhc::step(st, cfg, topo, spec, sched, a_s, model);
    if (st.t >= 4.0) {
      ts.push_back(st.t);
      log_e.push_back(
          std::log(std::abs(st.agent_states[0](0) - st.agent_states[1](0))));
    }
  }
  // Least-squares slope of log|e|.
  const double n = static_cast<double>(ts.size());
  const double mean_t = std::accumulate(ts.begin(), ts.end(), 0.0) / n;
  const double mean_y = std::accumulate(log_e.begin(), log_e.end(), 0.0) / n;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    num += (ts[i] - mean_t) * (log_e[i] - mean_y);
    den += (ts[i] - mean_t) * (ts[i] - mean_t);
  }
  const double rate = -num / den;
  const double expected = 2.0 * std::tanh(1.0);
  CHECK(rate == doctest::Approx(expected).epsilon(0.05));
}

TEST_CASE("run") {
  SUBCASE("zero duration leaves only the initial record") {
    Scenario sc = nrhc::preset("lu4");
    sc.sim.duration = 0.0;
    const auto log = nrhc::run(sc);
    REQUIRE(log.records.size() == 1);
    CHECK(log.records[0].t == 0.0);
    CHECK(log.records[0].residual_norms[0] == 0.0);  // bootstrap identity
  }
  SUBCASE("deterministic records") {
    Scenario sc = nrhc::preset("lu4");
    sc.sim.duration = 0.5;
    const auto log1 = nrhc::run(sc);
    const auto log2 = nrhc::run(sc);
    REQUIRE(log1.records.size() == log2.records.size());
    for (std::size_t k = 0; k < log1.records.size(); ++k) {
      CHECK(log1.records[k].t == log2.records[k].t);
      for (int i = 0; i < 4; ++i) {
        CHECK(log1.records[k].states[i] == log2.records[k].states[i]);
        CHECK(log1.records[k].controls[i] == log2.records[k].controls[i]);
      }
      CHECK(log1.records[k].max_pairwise == log2.records[k].max_pairwise);
    }
  }
  SUBCASE("divergence keeps the partial log") {
    Scenario sc = nrhc::preset("lorenz5");
    sc.initial_conditions *= 1e60;  // forces a plant blow-up within a few steps
    const auto log = nrhc::run(sc);
    CHECK(log.diverged);
    CHECK_FALSE(log.divergence_message.empty());
  }
  SUBCASE("lu4 over ten seconds ends near exact consensus") {
    const auto log = nrhc::run(nrhc::preset("lu4"));
    CHECK_FALSE(log.diverged);
    CHECK(log.records.back().max_pairwise < 1e-2);
  }
}

TEST_CASE("permutation equivariance") {
  const Scenario base = nrhc::preset("lu4");
  const std::vector<int> perm{2, 0, 3, 1};  // new index of each old agent

  Scenario permuted = base;
  MatrixXd a_new = MatrixXd::Zero(4, 4);
  MatrixXd init_new(4, 3);
  for (int i = 0; i < 4; ++i) {
    init_new.row(perm[i]) = base.initial_conditions.row(i);
    for (int j = 0; j < 4; ++j) {
      a_new(perm[i], perm[j]) = base.topology.adjacency()(i, j);
    }
  }
  permuted.topology = Topology(a_new, false);
  permuted.initial_conditions = init_new;
  permuted.sim.duration = 0.3;

  Scenario plain = base;
  plain.sim.duration = 0.3;

  const auto log_base = nrhc::run(plain);
  const auto log_perm = nrhc::run(permuted);
  REQUIRE(log_base.records.size() == log_perm.records.size());
  for (std::size_t k = 0; k < log_base.records.size(); ++k) {
    for (int i = 0; i < 4; ++i) {
      CHECK(log_base.records[k].states[i] ==
            log_perm.records[k].states[perm[i]]);
      CHECK(log_base.records[k].controls[i] ==
            log_perm.records[k].controls[perm[i]]);
    }
  }
}

TEST_CASE("leader advances uncontrolled and exactly matches a reference") {
  Scenario sc = nrhc::preset("leader_lorenz");
  sc.sim.duration = 0.5;
  const auto log = nrhc::run(sc);
  const auto model = nrhc::model_by_name(sc.model_name);
  VectorXd reference = *sc.leader_initial;
  for (const auto& rec : log.records) {
    REQUIRE(rec.leader.has_value());
    CHECK(*rec.leader == reference);
    reference = nrhc::rk4_step(
        [&](const VectorXd& x) { return model.field(x); }, reference, sc.sim.dt);
  }
}

}  // TEST_SUITE
