#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

namespace nrhc {

/// One time slice of a closed-loop run. `controls` holds the input
/// applied over [t, t+dt] (for the last record: the input that would be
/// applied next). `horizon_costs` are the per-agent predicted optimal
/// costs over the horizon at time t.
struct StepRecord {
  double t = 0.0;
  std::vector<Eigen::VectorXd> states;
  std::optional<Eigen::VectorXd> leader;
  std::vector<Eigen::VectorXd> controls;
  std::vector<double> residual_norms;
  std::vector<double> horizon_costs;
  double max_pairwise = 0.0;
  std::vector<double> leader_errors;
};

struct TrajectoryLog {
  std::vector<StepRecord> records;
  bool diverged = false;
  std::string divergence_message;
};

}  // namespace nrhc
