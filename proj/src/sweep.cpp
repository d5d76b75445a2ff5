#include "nrhc/sweep.hpp"

#include <stdexcept>

#include "nrhc/errors.hpp"
#include "nrhc/rk4.hpp"

namespace nrhc {

namespace {

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& m) {
  return 0.5 * (m + m.transpose());
}

}  // namespace

bool is_hurwitz(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() < 1 || !m.allFinite()) return false;
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, /*computeEigenvectors=*/false);
  return (es.eigenvalues().real().array() < 0.0).all();
}

VariationalCoefficients variational_matrices(const DynamicsModel& model,
                                             const CostSpec& spec,
                                             const Eigen::VectorXd& x,
                                             const Eigen::VectorXd& lambda,
                                             const FrozenNeighbors& frozen) {
  VariationalCoefficients out;
  out.A = model.jacobian(x);
  out.B = spec.R_inverse();
  double weight_sum = 0.0;
  for (double w : frozen.weights) weight_sum += w;
  out.C = weight_sum * spec.Q() + model.costate_hessian(lambda, x);
  return out;
}

GridCoefficients::GridCoefficients(const HorizonGrid& grid,
                                   const DynamicsModel& model, const CostSpec& spec)
    : grid_(grid), model_(model), spec_(spec) {
  dx_.reserve(grid.x.size());
  dl_.reserve(grid.x.size());
  for (std::size_t k = 0; k < grid.x.size(); ++k) {
    dx_.push_back(model_.field(grid.x[k]) + optimal_control(spec_, grid.lambda[k]));
    dl_.push_back(
        costate_rhs(model_, spec_, grid.x[k], grid.lambda[k], grid.frozen[k]));
  }
}

VariationalCoefficients GridCoefficients::node(int k) const {
  return variational_matrices(model_, spec_, grid_.x[k], grid_.lambda[k],
                              grid_.frozen[k]);
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> GridCoefficients::state_at_midpoint(
    int k) const {
  const double h = grid_.dtau;
  // Cubic Hermite at the interval midpoint: O(h^4) accurate values.
  const Eigen::VectorXd xm = 0.5 * (grid_.x[k] + grid_.x[k + 1]) +
                             (h / 8.0) * (dx_[k] - dx_[k + 1]);
  const Eigen::VectorXd lm = 0.5 * (grid_.lambda[k] + grid_.lambda[k + 1]) +
                             (h / 8.0) * (dl_[k] - dl_[k + 1]);
  return {xm, lm};
}

VariationalCoefficients GridCoefficients::midpoint(int k) const {
  const auto [xm, lm] = state_at_midpoint(k);
  return variational_matrices(model_, spec_, xm, lm, grid_.frozen[k]);
}

SweepTerminal sweep_terminal_conditions(const DynamicsModel& model,
                                        const CostSpec& spec,
                                        const HorizonGrid& grid, double dT_dt,
                                        const Eigen::VectorXd& residual_P,
                                        const Eigen::MatrixXd& A_s) {
  const int n = model.state_dim;
  const Eigen::VectorXd& x_T = grid.x.back();
  const Eigen::VectorXd& lambda_T = grid.lambda.back();
  const FrozenNeighbors& frozen_T = grid.frozen.back();

  SweepTerminal out;
  out.S = Eigen::MatrixXd::Zero(n, n);
  if (spec.use_terminal_cost()) {
    out.S = terminal_cost(spec, x_T, frozen_T).hessian;
  }
  const Eigen::VectorXd h_x =
      hamiltonian_state_gradient(model, spec, x_T, lambda_T, frozen_T);
  const Eigen::VectorXd xdot_T = model.field(x_T) + optimal_control(spec, lambda_T);

  Eigen::VectorXd target_drift = Eigen::VectorXd::Zero(n);
  if (spec.use_terminal_cost()) {
    for (std::size_t m = 0; m < frozen_T.indices.size(); ++m) {
      target_drift += (2.0 * frozen_T.weights[m]) *
                      (spec.QN() * model.field(frozen_T.states[m]));
    }
    if (frozen_T.leader_weight > 0.0 && frozen_T.leader_state) {
      Eigen::VectorXd leader_rate = model.field(*frozen_T.leader_state);
      if (!grid.leader_predicted) {
        // A frozen leader target drifts only through its snapshot refresh.
        leader_rate /= (1.0 + dT_dt);
      }
      target_drift += (2.0 * frozen_T.leader_weight) *
                      ((*spec.Q_leader()) * leader_rate);
    }
  }
  out.c = (h_x + out.S * xdot_T - target_drift) * (1.0 + dT_dt) + A_s * residual_P;
  return out;
}

SweepGrid integrate_sweep_backward(const DynamicsModel& model, const CostSpec& spec,
                                   const HorizonGrid& grid,
                                   const SweepTerminal& terminal) {
  const int steps = grid.n_tau;
  if (static_cast<int>(grid.x.size()) != steps + 1 ||
      grid.frozen.size() != grid.x.size()) {
    throw std::invalid_argument("sweep requires an integrated forward grid");
  }

  SweepGrid sweep;
  sweep.S.resize(steps + 1);
  sweep.c.resize(steps + 1);
  sweep.S[steps] = symmetrize(terminal.S);
  sweep.c[steps] = terminal.c;

  GridCoefficients coeffs(grid, model, spec);
  const double h = grid.dtau;

  const auto rhs = [](const VariationalCoefficients& vc, const Eigen::MatrixXd& S,
                      const Eigen::VectorXd& c) {
    const Eigen::MatrixXd dS =
        -vc.A.transpose() * S - S * vc.A + S * vc.B * S - vc.C;
    const Eigen::VectorXd dc = -(vc.A.transpose() - S * vc.B) * c;
    return std::make_pair(dS, dc);
  };

  for (int k = steps - 1; k >= 0; --k) {
    const auto at_upper = coeffs.node(k + 1);
    const auto at_mid = coeffs.midpoint(k);
    const auto at_lower = coeffs.node(k);
    const Eigen::MatrixXd& S1 = sweep.S[k + 1];
    const Eigen::VectorXd& c1 = sweep.c[k + 1];

    const auto [k1S, k1c] = rhs(at_upper, S1, c1);
    const auto [k2S, k2c] = rhs(at_mid, S1 - (0.5 * h) * k1S, c1 - (0.5 * h) * k1c);
    const auto [k3S, k3c] = rhs(at_mid, S1 - (0.5 * h) * k2S, c1 - (0.5 * h) * k2c);
    const auto [k4S, k4c] = rhs(at_lower, S1 - h * k3S, c1 - h * k3c);

    Eigen::MatrixXd S0 =
        S1 - (h / 6.0) * (k1S + 2.0 * k2S + 2.0 * k3S + k4S);
    Eigen::VectorXd c0 = c1 - (h / 6.0) * (k1c + 2.0 * k2c + 2.0 * k3c + k4c);
    if (!S0.allFinite() || !c0.allFinite()) {
      throw DivergenceError("backward sweep diverged", -1, -1.0, k * h);
    }
    sweep.S[k] = symmetrize(S0);
    sweep.c[k] = std::move(c0);
  }
  return sweep;
}

Eigen::VectorXd costate_time_update(const DynamicsModel& model, const CostSpec& spec,
                                    const Eigen::VectorXd& x_t,
                                    const Eigen::VectorXd& lambda_t,
                                    const FrozenNeighbors& frozen,
                                    const Eigen::VectorXd& c_at_0, double dt) {
  // Split H_x into its constant part and the Lambda-linear Jacobian term
  // so the RK4 stages only re-evaluate what actually varies.
  Eigen::VectorXd stage_grad = Eigen::VectorXd::Zero(model.state_dim);
  for (std::size_t k = 0; k < frozen.indices.size(); ++k) {
    stage_grad += frozen.weights[k] * (spec.Q() * (x_t - frozen.states[k]));
  }
  const Eigen::MatrixXd jac_t = model.jacobian(x_t).transpose();

  const auto rhs = [&](const Eigen::VectorXd& lam) -> Eigen::VectorXd {
    return -(stage_grad + jac_t * lam) + c_at_0;
  };
  Eigen::VectorXd next = rk4_step(rhs, lambda_t, dt);
  if (!next.allFinite()) {
    throw DivergenceError("costate update diverged", -1, -1.0, 0.0);
  }
  return next;
}

}  // namespace nrhc
