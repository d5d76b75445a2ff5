#include "nrhc/tpbvp.hpp"

#include <cmath>
#include <stdexcept>

#include "nrhc/errors.hpp"
#include "nrhc/rk4.hpp"

namespace nrhc {

int horizon_steps(double T, double dtau_target) {
  if (T < 0.0) throw std::invalid_argument("horizon length must be >= 0");
  if (dtau_target <= 0.0) throw std::invalid_argument("dtau target must be > 0");
  return std::max(1, static_cast<int>(std::lround(T / dtau_target)));
}

double hamiltonian(const DynamicsModel& model, const CostSpec& spec,
                   const Eigen::VectorXd& x, const Eigen::VectorXd& lambda,
                   const Eigen::VectorXd& u, const FrozenNeighbors& frozen) {
  if (x.size() != model.state_dim || lambda.size() != model.state_dim ||
      u.size() != model.state_dim) {
    throw std::invalid_argument("hamiltonian: dimension mismatch");
  }
  return stage_cost(spec, x, frozen, u) + lambda.dot(model.field(x) + u);
}

Eigen::VectorXd optimal_control(const CostSpec& spec, const Eigen::VectorXd& lambda) {
  return -(spec.R_inverse() * lambda);
}

Eigen::VectorXd hamiltonian_state_gradient(const DynamicsModel& model,
                                           const CostSpec& spec,
                                           const Eigen::VectorXd& x,
                                           const Eigen::VectorXd& lambda,
                                           const FrozenNeighbors& frozen) {
  if (x.size() != model.state_dim || lambda.size() != model.state_dim) {
    throw std::invalid_argument("hamiltonian_state_gradient: dimension mismatch");
  }
  Eigen::VectorXd g = Eigen::VectorXd::Zero(model.state_dim);
  for (std::size_t k = 0; k < frozen.indices.size(); ++k) {
    g += frozen.weights[k] * (spec.Q() * (x - frozen.states[k]));
  }
  g += model.jacobian(x).transpose() * lambda;
  return g;
}

Eigen::VectorXd costate_rhs(const DynamicsModel& model, const CostSpec& spec,
                            const Eigen::VectorXd& x, const Eigen::VectorXd& lambda,
                            const FrozenNeighbors& frozen) {
  return -hamiltonian_state_gradient(model, spec, x, lambda, frozen);
}

Eigen::VectorXd terminal_costate(const CostSpec& spec, const Eigen::VectorXd& x_T,
                                 const FrozenNeighbors& frozen) {
  if (!spec.use_terminal_cost()) {
    return Eigen::VectorXd::Zero(x_T.size());
  }
  return terminal_cost(spec, x_T, frozen).gradient;
}

Eigen::VectorXd residual(const HorizonGrid& grid, const CostSpec& spec) {
  if (grid.x.empty() || grid.lambda.size() != grid.x.size() ||
      grid.frozen.size() != grid.x.size()) {
    throw std::invalid_argument("residual requires an integrated horizon grid");
  }
  return grid.lambda.back() - terminal_costate(spec, grid.x.back(), grid.frozen.back());
}

HorizonGrid integrate_horizon_forward(const DynamicsModel& model,
                                      const CostSpec& spec,
                                      const Eigen::VectorXd& x_at_t,
                                      const Eigen::VectorXd& lambda_at_0, double T,
                                      const FrozenNeighbors& frozen,
                                      double dtau_target, bool predict_leader) {
  const int n = model.state_dim;
  if (x_at_t.size() != n || lambda_at_0.size() != n) {
    throw std::invalid_argument("integrate_horizon_forward: dimension mismatch");
  }
  if (!x_at_t.allFinite() || !lambda_at_0.allFinite()) {
    throw std::invalid_argument("integrate_horizon_forward: non-finite input");
  }
  const int n_neighbors = static_cast<int>(frozen.indices.size());
  const bool has_leader = frozen.leader_state.has_value();

  HorizonGrid grid;
  grid.n_tau = horizon_steps(T, dtau_target);
  grid.dtau = T / grid.n_tau;
  grid.leader_predicted = predict_leader;
  grid.x.reserve(grid.n_tau + 1);
  grid.lambda.reserve(grid.n_tau + 1);
  grid.frozen.reserve(grid.n_tau + 1);
  grid.x.push_back(x_at_t);
  grid.lambda.push_back(lambda_at_0);
  grid.frozen.push_back(frozen);

  // Stacked horizon state: [x; lambda; x_j...; x_0].
  const auto rhs = [&](const Eigen::VectorXd& z) {
    const auto x = z.head(n);
    const auto lam = z.segment(n, n);
    Eigen::VectorXd dz(z.size());
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(n);
    for (int m = 0; m < n_neighbors; ++m) {
      const auto xj = z.segment(2 * n + m * n, n);
      grad += frozen.weights[m] * (spec.Q() * (x - xj));
    }
    grad += model.jacobian(x).transpose() * lam;
    dz.head(n) = model.field(x) + optimal_control(spec, lam);
    dz.segment(n, n) = -grad;
    for (int m = 0; m < n_neighbors; ++m) {
      dz.segment(2 * n + m * n, n) = model.field(z.segment(2 * n + m * n, n));
    }
    if (has_leader) {
      dz.tail(n) = predict_leader ? model.field(z.tail(n))
                                  : Eigen::VectorXd::Zero(n);
    }
    return dz;
  };

  Eigen::VectorXd z((2 + n_neighbors + (has_leader ? 1 : 0)) * n);
  z.head(n) = x_at_t;
  z.segment(n, n) = lambda_at_0;
  for (int m = 0; m < n_neighbors; ++m) {
    z.segment(2 * n + m * n, n) = frozen.states[m];
  }
  if (has_leader) z.tail(n) = *frozen.leader_state;

  for (int k = 0; k < grid.n_tau; ++k) {
    z = rk4_step(rhs, z, grid.dtau);
    if (!z.allFinite()) {
      throw DivergenceError("horizon integration diverged", -1, -1.0,
                            (k + 1) * grid.dtau);
    }
    grid.x.push_back(z.head(n));
    grid.lambda.push_back(z.segment(n, n));
    FrozenNeighbors node = frozen;
    for (int m = 0; m < n_neighbors; ++m) {
      node.states[m] = z.segment(2 * n + m * n, n);
    }
    if (has_leader) node.leader_state = z.tail(n);
    grid.frozen.push_back(std::move(node));
  }
  return grid;
}

double predicted_cost(const HorizonGrid& grid, const CostSpec& spec) {
  if (grid.x.empty() || grid.frozen.size() != grid.x.size()) {
    throw std::invalid_argument("predicted_cost requires an integrated grid");
  }
  double integral = 0.0;
  double prev = stage_cost(spec, grid.x[0], grid.frozen[0],
                           optimal_control(spec, grid.lambda[0]));
  for (std::size_t k = 1; k < grid.x.size(); ++k) {
    const double cur = stage_cost(spec, grid.x[k], grid.frozen[k],
                                  optimal_control(spec, grid.lambda[k]));
    integral += 0.5 * grid.dtau * (prev + cur);
    prev = cur;
  }
  double total = integral;
  if (spec.use_terminal_cost()) {
    total += terminal_cost(spec, grid.x.back(), grid.frozen.back()).value;
  }
  return total;
}

}  // namespace nrhc
