#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "nrhc/costs.hpp"
#include "nrhc/log.hpp"
#include "nrhc/topology.hpp"

namespace nrhc {

/// Consensus-error snapshot. `delta` stacks x_i - x_1 for every agent
/// (first block zero); `max_pairwise` is the largest Euclidean distance
/// over unordered agent pairs and is the headline metric: it is
/// topology-symmetric and stricter than the distance to agent 1.
struct DisagreementReport {
  double t = 0.0;
  Eigen::VectorXd delta;
  double max_pairwise = 0.0;
  std::optional<std::vector<double>> leader_errors;
  std::optional<double> cost_estimate;  // running discretized J, when tracked
};

DisagreementReport consensus_error(double t,
                                   const std::vector<Eigen::VectorXd>& states);

/// Euclidean distance of every follower to the leader.
std::vector<double> leader_error(const std::vector<Eigen::VectorXd>& states,
                                 const Eigen::VectorXd& leader);

/// Per-agent realized cost: trapezoidal accumulation of stage costs along
/// the logged states and controls.
std::vector<double> running_cost(const TrajectoryLog& log, const CostSpec& spec,
                                 const Topology& topology);

}  // namespace nrhc
