#pragma once

#include <functional>

#include <Eigen/Core>

namespace teachopt {

enum class StepRule { FixedStep, BacktrackingLineSearch };

struct SolverOptions {
  int max_outer = 50;
  int max_inner = 5000;
  double grad_tol = 1e-9;
  double constraint_tol = 1e-8;
  double penalty_init = 10.0;
  double penalty_growth = 10.0;
  StepRule step_rule = StepRule::BacktrackingLineSearch;
  double fixed_step = 1e-2;  // only used with StepRule::FixedStep
};

struct SolveOutcome {
  Eigen::VectorXd point;
  double objective = 0.0;
  double constraint_violation = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// Objective callback: returns f(x); fills *grad when non-null.
using ObjectiveFn =
    std::function<double(const Eigen::VectorXd&, Eigen::VectorXd*)>;
using ProjectorFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
/// Equality constraints c(x) and the adjoint product J(x)^T mu.
using ConstraintFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using ConstraintAdjointFn = std::function<Eigen::VectorXd(
    const Eigen::VectorXd&, const Eigen::VectorXd&)>;

Eigen::VectorXd project_ball(const Eigen::VectorXd& x, double R);

/// Projected gradient descent with Nesterov momentum and a backtracking
/// line search. Terminates on the natural residual ||x - P(x - g)||.
SolveOutcome minimize_projected(const ObjectiveFn& objective,
                                const ProjectorFn& projector,
                                const Eigen::VectorXd& x0,
                                const SolverOptions& opts);

/// Outer augmented-Lagrangian loop for equality constraints on top of
/// minimize_projected. Penalty blow-up past 1e12 yields a non-converged
/// outcome instead of an exception.
SolveOutcome augmented_lagrangian(const ObjectiveFn& objective,
                                  const ConstraintFn& eq_constraints,
                                  const ConstraintAdjointFn& eq_adjoint,
                                  const ProjectorFn& projector,
                                  const Eigen::VectorXd& x0,
                                  const SolverOptions& opts);

}  // namespace teachopt
