#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "nrhc/costs.hpp"
#include "nrhc/dynamics.hpp"
#include "nrhc/log.hpp"
#include "nrhc/scenario.hpp"

namespace nrhc {

/// Mutable closed-loop state on the real time axis.
struct SimulationState {
  double t = 0.0;
  std::vector<Eigen::VectorXd> agent_states;
  std::optional<Eigen::VectorXd> leader_state;
  std::vector<Eigen::VectorXd> costates;
  std::vector<Eigen::VectorXd> last_controls;
};

struct StepDiagnostics {
  std::vector<Eigen::VectorXd> controls;  // u_i(t) applied over the step
  std::vector<double> residual_norms;     // |P_i(t)| per agent
  std::vector<double> horizon_costs;      // predicted J_i(t) per agent
  double max_pairwise = 0.0;
  std::vector<double> leader_errors;
};

/// Captures every agent's neighbor states (and the leader) once per time
/// instant. One exchange per step: the horizon solver works from these
/// copies alone, advancing them open-loop along tau.
std::vector<FrozenNeighbors> snapshot_neighbors(const SimulationState& state,
                                                const Topology& topology);

/// Costate bootstrap: Lambda_i(0) = phi_x(x_i(0)), which is zero when the
/// terminal cost is disabled. With T(0) = 0 this makes the initial
/// continuation residual vanish identically.
std::vector<Eigen::VectorXd> bootstrap_costates(
    const std::vector<Eigen::VectorXd>& states,
    const std::optional<Eigen::VectorXd>& leader, const Topology& topology,
    const CostSpec& spec);

SimulationState initialize(const Scenario& scenario);

/// One bulk-synchronous closed-loop step at state.t: snapshot, per-agent
/// solves (forward horizon, backward sweep, costate update, control
/// extraction), then a synchronized plant advance with zero-order-hold
/// inputs. The leader advances uncontrolled. Each agent solve is a pure
/// function of the snapshot, so solves are independent within the step.
/// Divergence anywhere throws DivergenceError (state left unchanged).
StepDiagnostics step(SimulationState& state, const SimulationConfig& config,
                     const Topology& topology, const CostSpec& spec,
                     const HorizonSchedule& schedule, const Eigen::MatrixXd& A_s,
                     const DynamicsModel& model);

/// The per-agent solve pass of step() without advancing anything; used
/// for the final log record.
StepDiagnostics evaluate_diagnostics(const SimulationState& state,
                                     const SimulationConfig& config,
                                     const Topology& topology, const CostSpec& spec,
                                     const HorizonSchedule& schedule,
                                     const Eigen::MatrixXd& A_s,
                                     const DynamicsModel& model);

/// Full closed-loop run. Deterministic given the scenario. On divergence
/// the partial log is returned with `diverged` set.
TrajectoryLog run(const Scenario& scenario);

}  // namespace nrhc
