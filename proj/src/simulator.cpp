#include "nrhc/simulator.hpp"

#include <stdexcept>
#include <string>

#include "nrhc/errors.hpp"
#include "nrhc/metrics.hpp"
#include "nrhc/rk4.hpp"
#include "nrhc/sweep.hpp"
#include "nrhc/tpbvp.hpp"

namespace nrhc {

namespace {

struct AgentSolve {
  Eigen::VectorXd control;       // u_i(t) = -R^{-1} Lambda_i(t)
  Eigen::VectorXd next_costate;  // Lambda_i(t + dt)
  double residual_norm = 0.0;
  double horizon_cost = 0.0;
};

AgentSolve solve_agent(const Eigen::VectorXd& x_i, const Eigen::VectorXd& lambda_i,
                       double t, const FrozenNeighbors& frozen,
                       const SimulationConfig& config, const CostSpec& spec,
                       const HorizonSchedule& schedule, const Eigen::MatrixXd& A_s,
                       const DynamicsModel& model) {
  const HorizonPoint hp = horizon(schedule, t);
  const HorizonGrid grid =
      integrate_horizon_forward(model, spec, x_i, lambda_i, hp.T, frozen,
                                config.dtau_target, config.leader_prediction);
  const Eigen::VectorXd P = residual(grid, spec);
  const SweepTerminal terminal =
      sweep_terminal_conditions(model, spec, grid, hp.dT_dt, P, A_s);
  const SweepGrid sweep = integrate_sweep_backward(model, spec, grid, terminal);

  AgentSolve out;
  out.next_costate = costate_time_update(model, spec, x_i, lambda_i, frozen,
                                         sweep.c.front(), config.dt);
  out.control = optimal_control(spec, lambda_i);
  out.residual_norm = P.norm();
  out.horizon_cost = predicted_cost(grid, spec);
  return out;
}

std::vector<AgentSolve> solve_all(const SimulationState& state,
                                  const SimulationConfig& config,
                                  const Topology& topology, const CostSpec& spec,
                                  const HorizonSchedule& schedule,
                                  const Eigen::MatrixXd& A_s,
                                  const DynamicsModel& model) {
  const std::vector<FrozenNeighbors> frozen = snapshot_neighbors(state, topology);
  const int m = topology.n_agents();
  std::vector<AgentSolve> solves;
  solves.reserve(m);
  for (int i = 0; i < m; ++i) {
    try {
      solves.push_back(solve_agent(state.agent_states[i], state.costates[i],
                                   state.t, frozen[i], config, spec, schedule,
                                   A_s, model));
    } catch (const DivergenceError& e) {
      throw DivergenceError("agent " + std::to_string(i) + " at t=" +
                                std::to_string(state.t) + ": " + e.what(),
                            i, state.t, e.tau);
    }
  }
  return solves;
}

StepDiagnostics assemble_diagnostics(const SimulationState& state,
                                     std::vector<AgentSolve>& solves) {
  StepDiagnostics diag;
  for (auto& s : solves) {
    diag.controls.push_back(s.control);
    diag.residual_norms.push_back(s.residual_norm);
    diag.horizon_costs.push_back(s.horizon_cost);
  }
  diag.max_pairwise = consensus_error(state.t, state.agent_states).max_pairwise;
  if (state.leader_state) {
    diag.leader_errors = leader_error(state.agent_states, *state.leader_state);
  }
  return diag;
}

}  // namespace

std::vector<FrozenNeighbors> snapshot_neighbors(const SimulationState& state,
                                                const Topology& topology) {
  const int m = topology.n_agents();
  if (static_cast<int>(state.agent_states.size()) != m) {
    throw std::invalid_argument("state/topology agent count mismatch");
  }
  std::vector<FrozenNeighbors> out(m);
  for (int i = 0; i < m; ++i) {
    for (int j : topology.neighbors(i)) {
      out[i].indices.push_back(j);
      out[i].weights.push_back(topology.adjacency()(i, j));
      out[i].states.push_back(state.agent_states[j]);
    }
    if (topology.has_leader()) {
      out[i].leader_weight = (*topology.leader_adjacency())(i);
      if (state.leader_state) out[i].leader_state = *state.leader_state;
    }
  }
  return out;
}

std::vector<Eigen::VectorXd> bootstrap_costates(
    const std::vector<Eigen::VectorXd>& states,
    const std::optional<Eigen::VectorXd>& leader, const Topology& topology,
    const CostSpec& spec) {
  SimulationState snapshot_source;
  snapshot_source.agent_states = states;
  snapshot_source.leader_state = leader;
  const auto frozen = snapshot_neighbors(snapshot_source, topology);
  std::vector<Eigen::VectorXd> costates;
  costates.reserve(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    costates.push_back(terminal_costate(spec, states[i], frozen[i]));
  }
  return costates;
}

SimulationState initialize(const Scenario& scenario) {
  const int m = scenario.topology.n_agents();
  const auto n = scenario.initial_conditions.cols();
  if (scenario.initial_conditions.rows() != m) {
    throw std::invalid_argument("initial conditions row count != agent count");
  }
  if (!scenario.initial_conditions.allFinite()) {
    throw std::invalid_argument("initial conditions contain non-finite entries");
  }

  SimulationState state;
  state.t = 0.0;
  for (int i = 0; i < m; ++i) {
    state.agent_states.push_back(scenario.initial_conditions.row(i).transpose());
  }
  if (scenario.sim.leader_mode) {
    if (!scenario.leader_initial) {
      throw std::invalid_argument("leader mode requires a leader initial state");
    }
    if (!scenario.leader_initial->allFinite()) {
      throw std::invalid_argument("leader initial state is non-finite");
    }
    state.leader_state = *scenario.leader_initial;
  }
  state.costates = bootstrap_costates(state.agent_states, state.leader_state,
                                      scenario.topology, scenario.costs);
  state.last_controls.assign(m, Eigen::VectorXd::Zero(n));
  return state;
}

StepDiagnostics evaluate_diagnostics(const SimulationState& state,
                                     const SimulationConfig& config,
                                     const Topology& topology, const CostSpec& spec,
                                     const HorizonSchedule& schedule,
                                     const Eigen::MatrixXd& A_s,
                                     const DynamicsModel& model) {
  auto solves = solve_all(state, config, topology, spec, schedule, A_s, model);
  SimulationState scratch = state;
  return assemble_diagnostics(scratch, solves);
}

StepDiagnostics step(SimulationState& state, const SimulationConfig& config,
                     const Topology& topology, const CostSpec& spec,
                     const HorizonSchedule& schedule, const Eigen::MatrixXd& A_s,
                     const DynamicsModel& model) {
  const int m = topology.n_agents();
  auto solves = solve_all(state, config, topology, spec, schedule, A_s, model);
  StepDiagnostics diag = assemble_diagnostics(state, solves);

  // Synchronized plant advance: controls are zero-order-held over the step.
  std::vector<Eigen::VectorXd> next_states(m);
  for (int i = 0; i < m; ++i) {
    const Eigen::VectorXd& u = solves[i].control;
    next_states[i] = rk4_step(
        [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
          return model.field(x) + u;
        },
        state.agent_states[i], config.dt);
    if (!next_states[i].allFinite()) {
      throw DivergenceError("agent " + std::to_string(i) + " plant diverged at t=" +
                                std::to_string(state.t),
                            i, state.t, -1.0);
    }
  }
  std::optional<Eigen::VectorXd> next_leader;
  if (state.leader_state) {
    next_leader = rk4_step(
        [&](const Eigen::VectorXd& x) { return model.field(x); },
        *state.leader_state, config.dt);
    if (!next_leader->allFinite()) {
      throw DivergenceError("leader plant diverged at t=" + std::to_string(state.t),
                            -1, state.t, -1.0);
    }
  }

  for (int i = 0; i < m; ++i) {
    state.agent_states[i] = std::move(next_states[i]);
    state.costates[i] = std::move(solves[i].next_costate);
    state.last_controls[i] = diag.controls[i];
  }
  state.leader_state = std::move(next_leader);
  state.t += config.dt;
  return diag;
}

TrajectoryLog run(const Scenario& scenario) {
  const DynamicsModel model = model_by_name(scenario.model_name);
  SimulationState state = initialize(scenario);
  TrajectoryLog log;

  const long n_steps = std::lround(scenario.sim.duration / scenario.sim.dt);
  const auto record_of = [&](const SimulationState& s, const StepDiagnostics& d) {
    StepRecord rec;
    rec.t = s.t;
    rec.states = s.agent_states;
    rec.leader = s.leader_state;
    rec.controls = d.controls;
    rec.residual_norms = d.residual_norms;
    rec.horizon_costs = d.horizon_costs;
    rec.max_pairwise = d.max_pairwise;
    rec.leader_errors = d.leader_errors;
    return rec;
  };

  try {
    for (long k = 0; k < n_steps; ++k) {
      const SimulationState before = state;
      const StepDiagnostics diag =
          step(state, scenario.sim, scenario.topology, scenario.costs,
               scenario.schedule, scenario.A_s, model);
      log.records.push_back(record_of(before, diag));
    }
    const StepDiagnostics final_diag =
        evaluate_diagnostics(state, scenario.sim, scenario.topology, scenario.costs,
                             scenario.schedule, scenario.A_s, model);
    log.records.push_back(record_of(state, final_diag));
  } catch (const DivergenceError& e) {
    log.diverged = true;
    log.divergence_message = e.what();
  }
  return log;
}

}  // namespace nrhc
