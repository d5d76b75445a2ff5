#include <doctest.h>

#include <random>

#include "nrhc/errors.hpp"
#include "nrhc/sweep.hpp"
#include "support/finite_diff.hpp"
#include "support/oracles.hpp"
#include "support/variational.hpp"

using Eigen::MatrixXd;
using Eigen::Vector3d;
using Eigen::VectorXd;
using nrhc::CostSpec;
using nrhc::FrozenNeighbors;

namespace {

CostSpec identity_spec3(bool terminal = true) {
  const MatrixXd eye = MatrixXd::Identity(3, 3);
  return CostSpec(eye, eye, eye, std::nullopt, terminal);
}

CostSpec scalar_spec(double q, double qn, double r, bool terminal) {
  return CostSpec(MatrixXd::Constant(1, 1, q), MatrixXd::Constant(1, 1, qn),
                  MatrixXd::Constant(1, 1, r), std::nullopt, terminal);
}

FrozenNeighbors neighbor3(const VectorXd& state, double weight = 1.0) {
  FrozenNeighbors f;
  f.indices = {1};
  f.weights = {weight};
  f.states = {state};
  return f;
}

FrozenNeighbors pinned_origin1() {
  FrozenNeighbors f;
  f.indices = {1};
  f.weights = {1.0};
  f.states = {VectorXd::Zero(1)};
  return f;
}

}  // namespace

TEST_SUITE("sweep") {

TEST_CASE("hurwitz check") {
  CHECK(nrhc::is_hurwitz(-50.0 * MatrixXd::Identity(3, 3)));
  CHECK_FALSE(nrhc::is_hurwitz(MatrixXd::Identity(2, 2)));
  MatrixXd rotation(2, 2);
  rotation << 0, -1, 1, 0;  // purely imaginary spectrum
  CHECK_FALSE(nrhc::is_hurwitz(rotation));
  CHECK(nrhc::is_hurwitz(rotation - 0.1 * MatrixXd::Identity(2, 2)));
}

TEST_CASE("variational matrices") {
  const auto model = nrhc::lorenz();
  const auto spec = identity_spec3();
  const Vector3d zero = Vector3d::Zero();

  SUBCASE("no neighbors, zero costate") {
    const auto vc =
        nrhc::variational_matrices(model, spec, zero, zero, FrozenNeighbors{});
    CHECK(vc.A == model.jacobian(zero));
    CHECK(vc.B.isApprox(MatrixXd::Identity(3, 3)));
    CHECK(vc.C.isZero(0.0));
  }
  SUBCASE("B is the control weight inverse") {
    const MatrixXd eye = MatrixXd::Identity(3, 3);
    const CostSpec r2(eye, eye, MatrixXd(2.0 * eye));
    const auto vc = nrhc::variational_matrices(nrhc::lu_system(), r2, zero,
                                               zero, FrozenNeighbors{});
    CHECK(vc.B.isApprox(0.5 * eye));
  }
  SUBCASE("C matches the finite-difference hessian of H") {
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> dist(-5.0, 5.0);
    for (const auto& m : {nrhc::lorenz(), nrhc::lu_system(), nrhc::chen()}) {
      for (int trial = 0; trial < 20; ++trial) {
        const Vector3d x(dist(rng), dist(rng), dist(rng));
        const Vector3d lam(dist(rng), dist(rng), dist(rng));
        const auto f = neighbor3(Vector3d(dist(rng), dist(rng), dist(rng)), 1.5);
        const auto ham = [&](const VectorXd& xv) {
          return nrhc::hamiltonian(m, spec, xv, lam, Vector3d::Zero(), f);
        };
        const MatrixXd fd =
            testsupport::fd_hessian(ham, x, 1e-4 * (1.0 + x.norm()));
        const auto vc = nrhc::variational_matrices(m, spec, x, lam, f);
        CHECK((vc.C - fd).norm() <= 1e-5 * (1.0 + fd.norm()));
      }
    }
  }
}

TEST_CASE("sweep terminal conditions") {
  const auto model = nrhc::lorenz();

  SUBCASE("all-zero instance") {
    const auto spec = identity_spec3(false);
    const auto grid = nrhc::integrate_horizon_forward(
        model, spec, Vector3d::Zero(), Vector3d::Zero(), 0.1,
        FrozenNeighbors{}, 0.005);
    const auto term = nrhc::sweep_terminal_conditions(
        model, spec, grid, 0.01, Vector3d::Zero(),
        -50.0 * MatrixXd::Identity(3, 3));
    CHECK(term.S.isZero(0.0));
    CHECK(term.c.isZero(0.0));
  }
  SUBCASE("constant terminal hessian of the quadratic cost") {
    const auto spec = identity_spec3();
    const auto f = neighbor3(Vector3d(0.3, -0.7, 0.2));
    const auto grid = nrhc::integrate_horizon_forward(
        model, spec, Vector3d(2, 1, -1), Vector3d::Zero(), 0.2, f, 0.005);
    const auto term = nrhc::sweep_terminal_conditions(
        model, spec, grid, 0.0, Vector3d::Zero(),
        -50.0 * MatrixXd::Identity(3, 3));
    CHECK(term.S.isApprox(2.0 * MatrixXd::Identity(3, 3)));
  }
  SUBCASE("stabilization term acts on the residual") {
    const auto spec = identity_spec3(false);
    const auto grid = nrhc::integrate_horizon_forward(
        model, spec, Vector3d::Zero(), Vector3d::Zero(), 0.1,
        FrozenNeighbors{}, 0.005);
    const auto term = nrhc::sweep_terminal_conditions(
        model, spec, grid, 0.0, Vector3d(1, 0, 0),
        -50.0 * MatrixXd::Identity(3, 3));
    CHECK(term.c.isApprox(Vector3d(-50, 0, 0)));
  }
}

TEST_CASE("backward sweep: trivial equilibria") {
  const auto model = nrhc::lu_system();
  const auto spec = identity_spec3(false);
  const auto grid = nrhc::integrate_horizon_forward(
      model, spec, Vector3d(0.5, 0.2, -0.1), Vector3d::Zero(), 0.3,
      FrozenNeighbors{}, 0.005);

  SUBCASE("zero stays zero when C vanishes") {
    nrhc::SweepTerminal term{MatrixXd::Zero(3, 3), Vector3d::Zero()};
    const auto sweep =
        nrhc::integrate_sweep_backward(model, spec, grid, term);
    for (const auto& s : sweep.S) CHECK(s.isZero(0.0));
    for (const auto& c : sweep.c) CHECK(c.isZero(0.0));
  }
  SUBCASE("zero terminal c stays zero under S = 0") {
    nrhc::SweepTerminal term{MatrixXd::Zero(3, 3), Vector3d::Zero()};
    const auto sweep =
        nrhc::integrate_sweep_backward(model, spec, grid, term);
    CHECK(sweep.c.front().isZero(0.0));
  }
}

TEST_CASE("backward sweep matches the scalar Riccati closed form") {
  const auto model = testsupport::scalar_plant(-1.0);
  const double T = 1.0;

  const auto check_branch = [&](bool terminal, double Pf) {
    const auto spec = scalar_spec(1.0, 1.0, 1.0, terminal);
    const auto f = pinned_origin1();
    const auto grid = nrhc::integrate_horizon_forward(
        model, spec, VectorXd::Constant(1, 1.7), VectorXd::Constant(1, 0.3), T,
        f, 0.005);
    const auto term = nrhc::sweep_terminal_conditions(
        model, spec, grid, 0.0, nrhc::residual(grid, spec),
        -50.0 * MatrixXd::Identity(1, 1));
    CHECK(term.S(0, 0) == doctest::Approx(Pf).epsilon(1e-14));
    const auto sweep = nrhc::integrate_sweep_backward(model, spec, grid, term);
    for (int k = 0; k <= grid.n_tau; ++k) {
      const double expected = testsupport::scalar_riccati(
          -1.0, 1.0, 1.0, Pf, T - k * grid.dtau);
      CHECK(sweep.S[k](0, 0) == doctest::Approx(expected).epsilon(1e-7));
    }
  };

  check_branch(false, 0.0);  // tanh branch
  check_branch(true, 2.0);   // coth branch
}

TEST_CASE("sweep-vs-variational equivalence on a Lorenz instance") {
  const auto model = nrhc::lorenz();
  const auto spec = identity_spec3();
  const auto f = neighbor3(Vector3d(0.5, -0.3, 0.2));
  const Vector3d x0(1.2, -0.8, 1.4);
  const VectorXd l0 = nrhc::terminal_costate(spec, x0, f);

  const auto grid =
      nrhc::integrate_horizon_forward(model, spec, x0, l0, 0.2, f, 0.005);
  const VectorXd P = nrhc::residual(grid, spec);
  const auto term = nrhc::sweep_terminal_conditions(
      model, spec, grid, 0.009, P, -50.0 * MatrixXd::Identity(3, 3));
  const auto sweep = nrhc::integrate_sweep_backward(model, spec, grid, term);

  for (const auto& s : sweep.S) {
    CHECK((s - s.transpose()).cwiseAbs().maxCoeff() == 0.0);
  }

  const auto check = testsupport::sweep_vs_variational(model, spec, grid, sweep);
  CHECK(check.max_z_norm > 1.0);  // non-trivial instance
  CHECK(check.relative_error() < 1e-5);
}

TEST_CASE("riccati blow-up is surfaced") {
  const auto model = testsupport::scalar_plant(-1.0);
  const auto spec = scalar_spec(1.0, 1.0, 1.0, false);
  const auto grid = nrhc::integrate_horizon_forward(
      model, spec, VectorXd::Constant(1, 1.0), VectorXd::Zero(1), 1.0,
      pinned_origin1(), 0.005);
  nrhc::SweepTerminal term{MatrixXd::Constant(1, 1, 1e160), VectorXd::Zero(1)};
  CHECK_THROWS_AS(
      nrhc::integrate_sweep_backward(model, spec, grid, term),
      nrhc::DivergenceError);
}

TEST_CASE("costate time update") {
  SUBCASE("no drive leaves the costate unchanged") {
    const auto model = nrhc::lorenz();
    const auto spec = identity_spec3();
    const VectorXd next = nrhc::costate_time_update(
        model, spec, Vector3d(1, 2, 3), Vector3d::Zero(), FrozenNeighbors{},
        Vector3d::Zero(), 0.01);
    CHECK(next.isZero(0.0));
  }
  SUBCASE("constant drive integrates exactly") {
    const auto model = testsupport::constant_field3(Vector3d(1, 2, 3));
    const auto spec = identity_spec3();
    const VectorXd next = nrhc::costate_time_update(
        model, spec, Vector3d::Zero(), Vector3d::Zero(), FrozenNeighbors{},
        Vector3d(50, 0, 0), 0.01);
    CHECK(next.isApprox(Vector3d(0.5, 0, 0), 1e-14));
  }
  SUBCASE("linear-in-lambda right-hand side matches the exponential") {
    const auto model = testsupport::scalar_plant(2.0);  // jac = 2
    const auto spec = scalar_spec(1.0, 1.0, 1.0, false);
    const double l0 = 0.8, dt = 0.01;
    const VectorXd next = nrhc::costate_time_update(
        model, spec, VectorXd::Constant(1, 1.0), VectorXd::Constant(1, l0),
        FrozenNeighbors{}, VectorXd::Zero(1), dt);
    // dl/dt = -2 l  ->  l(dt) = l0 exp(-2 dt)
    CHECK(next(0) == doctest::Approx(l0 * std::exp(-2.0 * dt)).epsilon(1e-9));
  }
}

}  // TEST_SUITE
