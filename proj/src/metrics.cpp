#include "nrhc/metrics.hpp"

#include <stdexcept>

namespace nrhc {

DisagreementReport consensus_error(double t,
                                   const std::vector<Eigen::VectorXd>& states) {
  if (states.empty()) {
    throw std::invalid_argument("consensus_error requires at least one agent");
  }
  const auto m = states.size();
  const auto n = states[0].size();
  DisagreementReport report;
  report.t = t;
  report.delta.resize(static_cast<Eigen::Index>(m) * n);
  for (std::size_t i = 0; i < m; ++i) {
    report.delta.segment(static_cast<Eigen::Index>(i) * n, n) =
        states[i] - states[0];
  }
  report.max_pairwise = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      report.max_pairwise =
          std::max(report.max_pairwise, (states[i] - states[j]).norm());
    }
  }
  return report;
}

std::vector<double> leader_error(const std::vector<Eigen::VectorXd>& states,
                                 const Eigen::VectorXd& leader) {
  if (leader.size() == 0) {
    throw std::invalid_argument("leader_error requires a leader state");
  }
  std::vector<double> out;
  out.reserve(states.size());
  for (const auto& x : states) out.push_back((x - leader).norm());
  return out;
}

std::vector<double> running_cost(const TrajectoryLog& log, const CostSpec& spec,
                                 const Topology& topology) {
  if (log.records.empty()) {
    throw std::invalid_argument("running_cost requires a non-empty log");
  }
  const int m = topology.n_agents();
  std::vector<double> totals(m, 0.0);

  const auto stage_at = [&](const StepRecord& rec, int i) {
    std::map<int, Eigen::VectorXd> all;
    for (int j = 0; j < m; ++j) all.emplace(j, rec.states[j]);
    const FrozenNeighbors frozen = freeze_from_map(topology, i, all);
    return stage_cost(spec, rec.states[i], frozen, rec.controls[i]);
  };

  std::vector<double> prev(m);
  for (int i = 0; i < m; ++i) prev[i] = stage_at(log.records.front(), i);
  for (std::size_t k = 1; k < log.records.size(); ++k) {
    const double h = log.records[k].t - log.records[k - 1].t;
    for (int i = 0; i < m; ++i) {
      const double cur = stage_at(log.records[k], i);
      totals[i] += 0.5 * h * (prev[i] + cur);
      prev[i] = cur;
    }
  }
  return totals;
}

}  // namespace nrhc
