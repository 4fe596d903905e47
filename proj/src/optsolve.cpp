#include "teachopt/optsolve.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace teachopt {

namespace {

void require_finite(double value, const Eigen::VectorXd& grad, bool has_grad,
                    int iteration) {
  if (std::isfinite(value) && (!has_grad || grad.allFinite())) return;
  throw std::runtime_error(
      "minimize_projected: non-finite objective or gradient at iteration " +
      std::to_string(iteration));
}

}  // namespace

Eigen::VectorXd project_ball(const Eigen::VectorXd& x, double R) {
  if (!(R > 0.0)) throw std::invalid_argument("project_ball: R must be positive");
  const double n = x.norm();
  if (n <= R) return x;
  return (R / n) * x;
}

SolveOutcome minimize_projected(const ObjectiveFn& objective,
                                const ProjectorFn& projector,
                                const Eigen::VectorXd& x0,
                                const SolverOptions& opts) {
  Eigen::VectorXd x = projector(x0);
  Eigen::VectorXd y = x;
  Eigen::VectorXd x_prev = x;
  Eigen::VectorXd grad(x.size());

  double fx = objective(x, &grad);
  require_finite(fx, grad, true, 0);

  double step = (opts.step_rule == StepRule::FixedStep) ? opts.fixed_step : 1.0;
  double t_mom = 1.0;

  SolveOutcome out;
  int it = 0;
  for (it = 1; it <= opts.max_inner; ++it) {
    const double fy = objective(y, &grad);
    require_finite(fy, grad, true, it);

    Eigen::VectorXd cand;
    double f_cand;
    if (opts.step_rule == StepRule::BacktrackingLineSearch) {
      step = std::min(step * 2.0, 1e12);  // let the step recover between iterations
      for (int ls = 0;; ++ls) {
        cand = projector(y - step * grad);
        const Eigen::VectorXd diff = cand - y;
        f_cand = objective(cand, nullptr);
        require_finite(f_cand, grad, false, it);
        const double model =
            fy + grad.dot(diff) + diff.squaredNorm() / (2.0 * step);
        if (f_cand <= model + 1e-15 * std::abs(fy) || ls >= 60) break;
        step *= 0.5;
      }
    } else {
      cand = projector(y - step * grad);
      f_cand = objective(cand, nullptr);
      require_finite(f_cand, grad, false, it);
    }

    // Adaptive momentum restart kills the ripple near optima.
    bool restarted = (y - cand).dot(cand - x) > 0.0;

    // Monotone acceptance up to rounding: the iterate never increases the
    // objective beyond machine-epsilon scale.
    Eigen::VectorXd x_new;
    double f_new;
    if (f_cand <= fx + 1e-14 * (1.0 + std::abs(fx))) {
      x_new = cand;
      f_new = f_cand;
    } else {
      x_new = x;
      f_new = fx;
      restarted = true;
    }

    const double t_next =
        restarted ? 1.0 : 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_mom * t_mom));
    if (restarted) {
      y = x_new;
    } else {
      y = x_new + (t_mom / t_next) * (cand - x_new) +
          ((t_mom - 1.0) / t_next) * (x_new - x_prev);
    }

    x_prev = x;
    x = std::move(x_new);
    fx = f_new;
    t_mom = t_next;

    // Natural residual at the accepted iterate.
    const double f_here = objective(x, &grad);
    require_finite(f_here, grad, true, it);
    const double residual = (x - projector(x - grad)).norm();
    if (residual <= opts.grad_tol) {
      out.converged = true;
      break;
    }
  }

  out.point = x;
  out.objective = fx;
  out.iterations = std::min(it, opts.max_inner);
  return out;
}

SolveOutcome augmented_lagrangian(const ObjectiveFn& objective,
                                  const ConstraintFn& eq_constraints,
                                  const ConstraintAdjointFn& eq_adjoint,
                                  const ProjectorFn& projector,
                                  const Eigen::VectorXd& x0,
                                  const SolverOptions& opts) {
  Eigen::VectorXd x = projector(x0);
  Eigen::VectorXd c = eq_constraints(x);
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(c.size());
  double rho = opts.penalty_init;
  double prev_violation = std::numeric_limits<double>::infinity();

  const auto solve_inner = [&](const Eigen::VectorXd& start, double penalty,
                               double stationarity_tol) {
    const auto merit = [&, penalty](const Eigen::VectorXd& z,
                                    Eigen::VectorXd* grad) -> double {
      const Eigen::VectorXd cz = eq_constraints(z);
      const double value = objective(z, grad) + lambda.dot(cz) +
                           0.5 * penalty * cz.squaredNorm();
      if (grad) *grad += eq_adjoint(z, lambda + penalty * cz);
      return value;
    };
    SolverOptions inner_opts = opts;
    inner_opts.grad_tol = stationarity_tol;
    return minimize_projected(merit, projector, start, inner_opts);
  };

  SolveOutcome out;
  int total_inner = 0;
  bool feasible_but_coarse = false;
  for (int outer = 1; outer <= opts.max_outer; ++outer) {
    const SolveOutcome inner = solve_inner(x, rho, opts.grad_tol);
    total_inner += inner.iterations;
    x = inner.point;
    c = eq_constraints(x);
    const double violation = c.lpNorm<Eigen::Infinity>();

    if (violation <= opts.constraint_tol && inner.converged) {
      out.converged = true;
      break;
    }
    feasible_but_coarse = violation <= opts.constraint_tol;

    lambda += rho * c;
    if (violation > opts.constraint_tol && violation > prev_violation / 4.0)
      rho *= opts.penalty_growth;
    prev_violation = violation;
    if (rho > 1e12) break;  // declared non-convergence, not an exception
  }

  // A large penalty pins the inner solve at the rounding floor before the
  // stationarity test can pass. With converged multipliers the augmented
  // Lagrangian stays exact at a modest penalty, so one polish pass there can
  // certify the point; it is kept only if feasibility survives.
  if (!out.converged && feasible_but_coarse) {
    const double rho_polish = opts.penalty_init * opts.penalty_growth;
    if (rho_polish < rho) {
      const SolveOutcome polish = solve_inner(x, rho_polish, opts.grad_tol);
      total_inner += polish.iterations;
      const double violation =
          eq_constraints(polish.point).lpNorm<Eigen::Infinity>();
      if (polish.converged && violation <= opts.constraint_tol) {
        x = polish.point;
        out.converged = true;
      }
    }
  }

  out.point = x;
  out.objective = objective(x, nullptr);
  out.constraint_violation = eq_constraints(x).lpNorm<Eigen::Infinity>();
  out.iterations = total_inner;
  return out;
}

}  // namespace teachopt
