#include "nrhc/costs.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace nrhc {

namespace {

void require_spd(const Eigen::MatrixXd& m, const char* label) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw std::invalid_argument(std::string(label) + " must be square");
  }
  const double scale = 1.0 + m.cwiseAbs().maxCoeff();
  if (((m - m.transpose()).cwiseAbs().maxCoeff()) > 1e-10 * scale) {
    throw std::invalid_argument(std::string(label) + " is not symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument(std::string(label) + " is not positive definite");
  }
}

}  // namespace

FrozenNeighbors freeze_from_map(const Topology& topology, int i,
                                const std::map<int, Eigen::VectorXd>& states) {
  FrozenNeighbors out;
  std::string missing;
  for (int j : topology.neighbors(i)) {
    auto it = states.find(j);
    if (it == states.end()) {
      missing += (missing.empty() ? "" : ", ") + std::to_string(j);
      continue;
    }
    out.indices.push_back(j);
    out.weights.push_back(topology.adjacency()(i, j));
    out.states.push_back(it->second);
  }
  if (!missing.empty()) {
    throw std::invalid_argument("missing neighbor state(s) for agent " +
                                std::to_string(i) + ": " + missing);
  }
  if (topology.has_leader()) {
    out.leader_weight = (*topology.leader_adjacency())(i);
  }
  return out;
}

CostSpec::CostSpec(Eigen::MatrixXd stage_weight, Eigen::MatrixXd terminal_weight,
                   Eigen::MatrixXd control_weight,
                   std::optional<Eigen::MatrixXd> leader_terminal_weight,
                   bool use_terminal_cost)
    : stage_weight_(std::move(stage_weight)),
      terminal_weight_(std::move(terminal_weight)),
      control_weight_(std::move(control_weight)),
      leader_terminal_weight_(std::move(leader_terminal_weight)),
      use_terminal_cost_(use_terminal_cost) {
  require_spd(stage_weight_, "Q");
  require_spd(terminal_weight_, "QN");
  require_spd(control_weight_, "R");
  if (terminal_weight_.rows() != stage_weight_.rows() ||
      control_weight_.rows() != stage_weight_.rows()) {
    throw std::invalid_argument("cost weights must share one dimension");
  }
  if (leader_terminal_weight_) {
    require_spd(*leader_terminal_weight_, "Q0");
    if (leader_terminal_weight_->rows() != stage_weight_.rows()) {
      throw std::invalid_argument("cost weights must share one dimension");
    }
  }
  control_weight_inverse_ =
      Eigen::LLT<Eigen::MatrixXd>(control_weight_)
          .solve(Eigen::MatrixXd::Identity(dim(), dim()));
}

HorizonPoint horizon(const HorizonSchedule& schedule, double t) {
  if (schedule.T_f <= 0.0 || schedule.alpha <= 0.0) {
    throw std::invalid_argument("horizon schedule requires T_f > 0 and alpha > 0");
  }
  if (t < 0.0) {
    throw std::invalid_argument("horizon requires t >= 0");
  }
  const double decay = std::exp(-schedule.alpha * t);
  return {schedule.T_f * (1.0 - decay), schedule.T_f * schedule.alpha * decay};
}

double stage_cost(const CostSpec& spec, const Eigen::VectorXd& x,
                  const FrozenNeighbors& frozen, const Eigen::VectorXd& u) {
  double quad = 0.0;
  for (std::size_t k = 0; k < frozen.indices.size(); ++k) {
    const Eigen::VectorXd diff = x - frozen.states[k];
    quad += frozen.weights[k] * diff.dot(spec.Q() * diff);
  }
  quad += u.dot(spec.R() * u);
  return 0.5 * quad;
}

TerminalCost terminal_cost(const CostSpec& spec, const Eigen::VectorXd& x,
                           const FrozenNeighbors& frozen) {
  const int n = spec.dim();
  TerminalCost out;
  out.gradient = Eigen::VectorXd::Zero(n);
  out.hessian = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t k = 0; k < frozen.indices.size(); ++k) {
    const Eigen::VectorXd diff = x - frozen.states[k];
    const double a = frozen.weights[k];
    out.value += a * diff.dot(spec.QN() * diff);
    out.gradient += (2.0 * a) * (spec.QN() * diff);
    out.hessian += (2.0 * a) * spec.QN();
  }
  if (frozen.leader_weight > 0.0) {
    if (!spec.Q_leader()) {
      throw std::invalid_argument("leader-attached agent requires a Q0 weight");
    }
    if (!frozen.leader_state) {
      throw std::invalid_argument("leader mode requires a frozen leader state");
    }
    const Eigen::VectorXd diff = x - *frozen.leader_state;
    const double a = frozen.leader_weight;
    out.value += a * diff.dot(*spec.Q_leader() * diff);
    out.gradient += (2.0 * a) * (*spec.Q_leader() * diff);
    out.hessian += (2.0 * a) * (*spec.Q_leader());
  }
  return out;
}

}  // namespace nrhc
