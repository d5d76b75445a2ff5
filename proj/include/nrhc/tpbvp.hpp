#pragma once

#include <Eigen/Dense>
#include <vector>

#include "nrhc/costs.hpp"
#include "nrhc/dynamics.hpp"

namespace nrhc {

/// State/costate trajectories over one prediction horizon, on a uniform
/// tau grid, together with the per-node view of the neighbor and leader
/// predictions. x[0] is the agent's measured state at the solve instant
/// and frozen[0] is the raw communication snapshot. A zero-length
/// horizon is stored as n_tau = 1 with dtau = 0, so every grid owns at
/// least two (possibly coincident) nodes.
struct HorizonGrid {
  int n_tau = 0;
  double dtau = 0.0;
  std::vector<Eigen::VectorXd> x;
  std::vector<Eigen::VectorXd> lambda;
  std::vector<FrozenNeighbors> frozen;
  bool leader_predicted = true;

  double horizon_length() const { return dtau * n_tau; }
};

/// Grid sizing rule: the target spacing is kept, and the grid exactly
/// spans [0, T].
int horizon_steps(double T, double dtau_target);

/// H = L(x, u) + lambda^T (F(x) + u).
double hamiltonian(const DynamicsModel& model, const CostSpec& spec,
                   const Eigen::VectorXd& x, const Eigen::VectorXd& lambda,
                   const Eigen::VectorXd& u, const FrozenNeighbors& frozen);

/// Stationary control from H_u = R u + lambda = 0, i.e. u = -R^{-1} lambda.
Eigen::VectorXd optimal_control(const CostSpec& spec, const Eigen::VectorXd& lambda);

/// H_x = sum_j a_ij Q (x - x_j) + F_x(x)^T lambda  (column form).
Eigen::VectorXd hamiltonian_state_gradient(const DynamicsModel& model,
                                           const CostSpec& spec,
                                           const Eigen::VectorXd& x,
                                           const Eigen::VectorXd& lambda,
                                           const FrozenNeighbors& frozen);

/// Costate tau-derivative dLambda/dtau = -H_x.
Eigen::VectorXd costate_rhs(const DynamicsModel& model, const CostSpec& spec,
                            const Eigen::VectorXd& x, const Eigen::VectorXd& lambda,
                            const FrozenNeighbors& frozen);

/// Terminal costate Lambda(T) = phi_x(x(T)); zero when the terminal cost
/// is disabled.
Eigen::VectorXd terminal_costate(const CostSpec& spec, const Eigen::VectorXd& x_T,
                                 const FrozenNeighbors& frozen);

/// Optimality residual P = Lambda(T) - phi_x(x(T)) on an integrated grid.
/// The consensus protocol is exact when this vanishes.
Eigen::VectorXd residual(const HorizonGrid& grid, const CostSpec& spec);

/// Integrates the horizon ODEs forward over [0, T] with fixed-step RK4:
///   dx/dtau      = F(x) - R^{-1} lambda,
///   dlambda/dtau = -H_x,
///   dx_j/dtau    = F(x_j)            (open-loop neighbor prediction),
///   dx_0/dtau    = F(x_0) or 0       (leader predicted or held frozen).
/// Neighbor states are obtained once, at tau = 0; their evolution is the
/// agent's local reconstruction of the shared dynamics, so no further
/// exchange happens within a solve. Non-finite values abort with a
/// DivergenceError locating the offending tau.
HorizonGrid integrate_horizon_forward(const DynamicsModel& model,
                                      const CostSpec& spec,
                                      const Eigen::VectorXd& x_at_t,
                                      const Eigen::VectorXd& lambda_at_0, double T,
                                      const FrozenNeighbors& frozen,
                                      double dtau_target,
                                      bool predict_leader = true);

/// Predicted performance index over the horizon: trapezoidal stage cost
/// with u(tau) = -R^{-1} lambda(tau), plus the terminal cost when enabled.
double predicted_cost(const HorizonGrid& grid, const CostSpec& spec);

}  // namespace nrhc
