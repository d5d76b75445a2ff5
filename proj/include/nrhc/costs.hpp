#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <vector>

#include "nrhc/topology.hpp"

namespace nrhc {

/// Neighbor data for one agent at one evaluation point. Snapshots are
/// captured once per time instant (deep copies: mutating the live
/// simulation never alters an in-flight solve); the horizon integrator
/// then advances the neighbor and leader entries open-loop along tau, so
/// a grid node's view holds their predicted states at that tau.
struct FrozenNeighbors {
  std::vector<int> indices;             // neighbor ids, ascending
  std::vector<double> weights;          // a_ij, aligned with indices
  std::vector<Eigen::VectorXd> states;  // x_j at the evaluation point
  double leader_weight = 0.0;           // a_i0 (0 when not attached)
  std::optional<Eigen::VectorXd> leader_state;
};

/// Builds agent i's frozen snapshot from an explicit state map, throwing
/// if any required neighbor is missing.
FrozenNeighbors freeze_from_map(const Topology& topology, int i,
                                const std::map<int, Eigen::VectorXd>& states);

/// Quadratic weights of one agent's performance index. All matrices are
/// validated symmetric positive definite at construction; failure is a
/// configuration error, not a runtime condition.
class CostSpec {
 public:
  CostSpec(Eigen::MatrixXd stage_weight, Eigen::MatrixXd terminal_weight,
           Eigen::MatrixXd control_weight,
           std::optional<Eigen::MatrixXd> leader_terminal_weight = std::nullopt,
           bool use_terminal_cost = true);

  int dim() const { return static_cast<int>(stage_weight_.rows()); }
  const Eigen::MatrixXd& Q() const { return stage_weight_; }
  const Eigen::MatrixXd& QN() const { return terminal_weight_; }
  const Eigen::MatrixXd& R() const { return control_weight_; }
  const Eigen::MatrixXd& R_inverse() const { return control_weight_inverse_; }
  const std::optional<Eigen::MatrixXd>& Q_leader() const {
    return leader_terminal_weight_;
  }
  bool use_terminal_cost() const { return use_terminal_cost_; }

 private:
  Eigen::MatrixXd stage_weight_;
  Eigen::MatrixXd terminal_weight_;
  Eigen::MatrixXd control_weight_;
  Eigen::MatrixXd control_weight_inverse_;
  std::optional<Eigen::MatrixXd> leader_terminal_weight_;
  bool use_terminal_cost_;
};

/// Growing prediction horizon T(t) = T_f (1 - e^{-alpha t}).
struct HorizonSchedule {
  double T_f = 1.0;
  double alpha = 0.01;
};

struct HorizonPoint {
  double T;
  double dT_dt;
};

/// Evaluates the schedule and its analytic time derivative at t >= 0.
HorizonPoint horizon(const HorizonSchedule& schedule, double t);

/// Stage cost L_i = 1/2 [ sum_j a_ij (x-x_j)^T Q (x-x_j) + u^T R u ].
double stage_cost(const CostSpec& spec, const Eigen::VectorXd& x,
                  const FrozenNeighbors& frozen, const Eigen::VectorXd& u);

struct TerminalCost {
  double value = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;
};

/// Terminal cost phi_i = sum_j a_ij |x-x_j|^2_QN (+ a_i0 |x-x_0|^2_Q0 in
/// leader mode), with gradient and Hessian taken through x only: the
/// frozen neighbor and leader states are constants of the solve, so the
/// Hessian 2 (sum_j a_ij) QN (+ 2 a_i0 Q0) is constant over the horizon.
/// Note the deliberate asymmetry with the stage cost: no 1/2 prefactor.
TerminalCost terminal_cost(const CostSpec& spec, const Eigen::VectorXd& x,
                           const FrozenNeighbors& frozen);

}  // namespace nrhc
