#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>

#include "teachopt/optsolve.hpp"

using namespace teachopt;
using Eigen::VectorXd;

namespace {

VectorXd vec2(double a, double b) {
  VectorXd v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("project_ball") {
  CHECK((project_ball(vec2(0.2, 0.1), 1.0) - vec2(0.2, 0.1)).norm() == 0.0);
  const VectorXd p = project_ball(vec2(3, 4), 1.0);
  CHECK(p(0) == doctest::Approx(0.6));
  CHECK(p(1) == doctest::Approx(0.8));
  CHECK((project_ball(p, 1.0) - p).norm() == 0.0);  // idempotence
  CHECK_THROWS_AS(project_ball(vec2(1, 1), 0.0), std::invalid_argument);
}

TEST_CASE("minimize_projected on quadratics") {
  SolverOptions opts;
  const auto projector = [](const VectorXd& x) { return project_ball(x, 1.0); };

  SUBCASE("interior target") {
    const VectorXd c = vec2(0.3, -0.4);
    const auto f = [&](const VectorXd& x, VectorXd* g) {
      if (g) *g = 2.0 * (x - c);
      return (x - c).squaredNorm();
    };
    const SolveOutcome out = minimize_projected(f, projector, vec2(0.9, 0.2), opts);
    CHECK(out.converged);
    CHECK((out.point - c).norm() <= 1e-8);
  }

  SUBCASE("target outside the ball projects radially") {
    const VectorXd c = vec2(3, 4);
    const auto f = [&](const VectorXd& x, VectorXd* g) {
      if (g) *g = 2.0 * (x - c);
      return (x - c).squaredNorm();
    };
    const SolveOutcome out = minimize_projected(f, projector, vec2(0, 0), opts);
    CHECK(out.converged);
    CHECK((out.point - vec2(0.6, 0.8)).norm() <= 1e-7);
  }
}

TEST_CASE("minimize_projected solves Rosenbrock in a large ball") {
  SolverOptions opts;
  opts.max_inner = 200000;
  opts.grad_tol = 1e-10;
  const auto projector = [](const VectorXd& x) { return project_ball(x, 10.0); };
  const auto rosenbrock = [](const VectorXd& x, VectorXd* g) {
    const double a = 1.0 - x(0);
    const double b = x(1) - x(0) * x(0);
    if (g) {
      g->resize(2);
      (*g)(0) = -2.0 * a - 400.0 * x(0) * b;
      (*g)(1) = 200.0 * b;
    }
    return a * a + 100.0 * b * b;
  };
  const SolveOutcome out =
      minimize_projected(rosenbrock, projector, vec2(-1.2, 1.0), opts);
  CHECK(out.objective <= 1e-8);
}

TEST_CASE("minimize_projected with the fixed-step rule") {
  SolverOptions opts;
  opts.step_rule = StepRule::FixedStep;
  opts.fixed_step = 0.2;  // below 1/L for this quadratic
  opts.max_inner = 20000;
  const VectorXd c = vec2(0.2, -0.3);
  const auto f = [&](const VectorXd& x, VectorXd* g) {
    if (g) *g = 2.0 * (x - c);
    return (x - c).squaredNorm();
  };
  const auto projector = [](const VectorXd& x) { return project_ball(x, 1.0); };
  const SolveOutcome out = minimize_projected(f, projector, vec2(0.9, 0.2), opts);
  CHECK(out.converged);
  CHECK((out.point - c).norm() <= 1e-8);
}

TEST_CASE("minimize_projected rejects non-finite objectives") {
  SolverOptions opts;
  const auto projector = [](const VectorXd& x) { return x; };
  const auto f = [](const VectorXd& x, VectorXd* g) {
    if (g) *g = vec2(1, 1);
    return std::numeric_limits<double>::quiet_NaN();
  };
  CHECK_THROWS_AS(minimize_projected(f, projector, vec2(0, 0), opts),
                  std::runtime_error);
}

TEST_CASE("augmented_lagrangian on the textbook circle constraint") {
  // minimize x1 subject to x1^2 + x2^2 = 1  ->  (-1, 0)
  SolverOptions opts;
  const auto f = [](const VectorXd& x, VectorXd* g) {
    if (g) {
      g->setZero(x.size());
      (*g)(0) = 1.0;
    }
    return x(0);
  };
  const auto c = [](const VectorXd& x) {
    VectorXd out(1);
    out(0) = x.squaredNorm() - 1.0;
    return out;
  };
  const auto cT = [](const VectorXd& x, const VectorXd& mu) {
    return VectorXd(2.0 * mu(0) * x);
  };
  const auto projector = [](const VectorXd& x) { return x; };
  const SolveOutcome out =
      augmented_lagrangian(f, c, cT, projector, vec2(0.4, 0.8), opts);
  CHECK(out.converged);
  CHECK(out.constraint_violation <= opts.constraint_tol);
  CHECK((out.point - vec2(-1, 0)).norm() <= 1e-6);
}

TEST_CASE("augmented_lagrangian matches the KKT solution of an equality QP") {
  // minimize 1/2 x'Qx + q'x subject to A x = b with the KKT system as oracle.
  Eigen::MatrixXd Q(3, 3);
  Q << 4, 1, 0, 1, 3, 0.5, 0, 0.5, 2;
  VectorXd q(3);
  q << -1, 0.5, 2;
  Eigen::MatrixXd A(1, 3);
  A << 1, 1, 1;
  VectorXd b(1);
  b << 1;

  Eigen::MatrixXd kkt(4, 4);
  kkt.setZero();
  kkt.topLeftCorner(3, 3) = Q;
  kkt.topRightCorner(3, 1) = A.transpose();
  kkt.bottomLeftCorner(1, 3) = A;
  VectorXd rhs(4);
  rhs << -q, b;
  const VectorXd kkt_solution = kkt.fullPivLu().solve(rhs).head(3);

  const auto f = [&](const VectorXd& x, VectorXd* g) {
    if (g) *g = Q * x + q;
    return 0.5 * x.dot(Q * x) + q.dot(x);
  };
  const auto c = [&](const VectorXd& x) { return VectorXd(A * x - b); };
  const auto cT = [&](const VectorXd&, const VectorXd& mu) {
    return VectorXd(A.transpose() * mu);
  };
  const auto projector = [](const VectorXd& x) { return x; };

  SolverOptions opts;
  const SolveOutcome out = augmented_lagrangian(
      f, c, cT, projector, VectorXd::Zero(3), opts);
  CHECK(out.converged);
  CHECK((out.point - kkt_solution).norm() <= 1e-6);
}

TEST_CASE("augmented_lagrangian reports infeasibility instead of throwing") {
  // x^2 + 1 = 0 has no solution; the penalty blows up and the outcome is
  // flagged, not thrown.
  const auto f = [](const VectorXd&, VectorXd* g) {
    if (g) g->setZero(1);
    return 0.0;
  };
  const auto c = [](const VectorXd& x) {
    VectorXd out(1);
    out(0) = x(0) * x(0) + 1.0;
    return out;
  };
  const auto cT = [](const VectorXd& x, const VectorXd& mu) {
    VectorXd out(1);
    out(0) = 2.0 * mu(0) * x(0);
    return out;
  };
  const auto projector = [](const VectorXd& x) { return x; };
  SolverOptions opts;
  opts.max_inner = 200;
  VectorXd x0(1);
  x0 << 0.3;
  const SolveOutcome out = augmented_lagrangian(f, c, cT, projector, x0, opts);
  CHECK(!out.converged);
  CHECK(out.constraint_violation >= 1.0);
}

TEST_CASE("augmented_lagrangian converges fast from a stationary feasible start") {
  // Objective gradient zero on the feasible set: one outer iteration suffices.
  const auto f = [](const VectorXd&, VectorXd* g) {
    if (g) g->setZero(2);
    return 0.0;
  };
  const auto c = [](const VectorXd& x) {
    VectorXd out(1);
    out(0) = x(0) - 1.0;
    return out;
  };
  const auto cT = [](const VectorXd&, const VectorXd& mu) {
    VectorXd out(2);
    out << mu(0), 0.0;
    return out;
  };
  const auto projector = [](const VectorXd& x) { return x; };
  SolverOptions opts;
  const SolveOutcome out = augmented_lagrangian(f, c, cT, projector, vec2(1, 0), opts);
  CHECK(out.converged);
  CHECK(out.constraint_violation <= opts.constraint_tol);
}
