#include "teachopt/heuristics.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <stdexcept>

#include "roots.hpp"
#include "teachopt/subspace.hpp"

namespace teachopt {

TeachingInput straight_step(const Vector& w, const ProblemSpec& spec) {
  const Vector delta = spec.w_star - w;
  const double dist = delta.norm();
  if (dist == 0.0)
    throw std::invalid_argument("straight_step: w already equals w_star");
  const Vector d = delta / dist;
  const double proj = delta.dot(w);  // (w_star - w)' w
  double a = spec.Rx;
  if (proj > 0.0) a = std::min(spec.Rx, spec.Ry * dist / (2.0 * proj));
  return {a * d, spec.Ry};
}

namespace {

// One-step objective pieces for a 2D state. With x = a*u(theta), y = Ry the
// next-state offset from w_star is r + s*u where r = w - w_star and
// s(a) = eta*a*(Ry - a*c), c = w'u. The objective is quartic in a and its
// stationary points factor into a quadratic and a linear root.
struct GreedyGeometry {
  Eigen::Vector2d w;
  Eigen::Vector2d r;
  double eta;
  double Rx;
  double Ry;
};

struct InnerMin {
  double a = 0.0;
  double value = 0.0;
};

InnerMin greedy_inner_min(const GreedyGeometry& g, double cos_t, double sin_t) {
  const Eigen::Vector2d u(cos_t, sin_t);
  const double c = g.w.dot(u);
  const double ru = g.r.dot(u);
  const double rr = g.r.squaredNorm();

  const auto objective = [&](double a) {
    const double s = g.eta * a * (g.Ry - a * c);
    return rr + 2.0 * s * ru + s * s;
  };

  InnerMin best{0.0, objective(0.0)};
  const auto consider = [&](double a) {
    a = std::clamp(a, 0.0, g.Rx);
    const double v = objective(a);
    if (v < best.value) best = {a, v};
  };

  consider(g.Rx);
  if (c != 0.0) consider(g.Ry / (2.0 * c));  // s'(a) = 0
  // s(a) = -ru  <=>  eta*c*a^2 - eta*Ry*a - ru = 0
  const auto roots = detail::solve_quadratic(g.eta * c, -g.eta * g.Ry, -ru);
  for (int i = 0; i < roots.count; ++i) consider(roots.root[i]);
  return best;
}

// Envelope derivative of the inner-minimized objective with respect to theta.
double greedy_phi_prime(const GreedyGeometry& g, double theta) {
  const double cos_t = std::cos(theta);
  const double sin_t = std::sin(theta);
  const InnerMin inner = greedy_inner_min(g, cos_t, sin_t);
  const double a = inner.a;
  const Eigen::Vector2d u(cos_t, sin_t);
  const Eigen::Vector2d up(-sin_t, cos_t);
  const double c = g.w.dot(u);
  const double cp = g.w.dot(up);
  const double ru = g.r.dot(u);
  const double rup = g.r.dot(up);
  const double s = g.eta * a * (g.Ry - a * c);
  const double s_theta = -g.eta * a * a * cp;
  return 2.0 * s_theta * (ru + s) + 2.0 * s * rup;
}

}  // namespace

TeachingInput greedy_step(const Vector& w, const ProblemSpec& spec,
                          int grid_resolution, int polish_iterations) {
  if (w.size() != 2)
    throw std::invalid_argument("greedy_step: requires the reduced 2D problem");
  if (grid_resolution < 8)
    throw std::invalid_argument("greedy_step: grid resolution must be >= 8");
  if (polish_iterations < 0)
    throw std::invalid_argument("greedy_step: polish iterations must be >= 0");
  if ((w - spec.w_star).norm() == 0.0)
    throw std::invalid_argument("greedy_step: w already equals w_star");

  GreedyGeometry g{w.head<2>(), (w - spec.w_star).head<2>(), spec.eta, spec.Rx,
                   spec.Ry};

  double best_theta = 0.0;
  InnerMin best{0.0, std::numeric_limits<double>::infinity()};
  const double dtheta = 2.0 * M_PI / grid_resolution;
  for (int j = 0; j < grid_resolution; ++j) {
    const double theta = dtheta * j;
    const InnerMin inner = greedy_inner_min(g, std::cos(theta), std::sin(theta));
    if (inner.value < best.value) {
      best = inner;
      best_theta = theta;
    }
  }

  // Safeguarded Newton on phi'(theta) = 0 inside the bracketing grid cell.
  double lo = best_theta - dtheta;
  double hi = best_theta + dtheta;
  double dlo = greedy_phi_prime(g, lo);
  double dhi = greedy_phi_prime(g, hi);
  if (dlo < 0.0 && dhi > 0.0) {
    double theta = best_theta;
    for (int it = 0; it < polish_iterations; ++it) {
      const double d = greedy_phi_prime(g, theta);
      const double fd_h = 1e-6;
      const double d2 = (greedy_phi_prime(g, theta + fd_h) -
                         greedy_phi_prime(g, theta - fd_h)) /
                        (2.0 * fd_h);
      double next = (d2 > 0.0) ? theta - d / d2 : 0.5 * (lo + hi);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (d < 0.0)
        lo = theta;
      else
        hi = theta;
      theta = next;
      const InnerMin inner = greedy_inner_min(g, std::cos(theta), std::sin(theta));
      if (inner.value < best.value) {
        best = inner;
        best_theta = theta;
      }
    }
  }

  Vector x(2);
  x << best.a * std::cos(best_theta), best.a * std::sin(best_theta);
  return {x, spec.Ry};
}

TeachRunResult run_teacher(const TeacherPolicy& policy, const ProblemSpec& spec,
                           long max_steps, double tol) {
  spec.validate();
  if (max_steps < 1)
    throw std::invalid_argument("run_teacher: max_steps must be >= 1");
  if (!(tol > 0.0)) throw std::invalid_argument("run_teacher: tol must be positive");
  if (policy.kind == PolicyKind::Greedy && policy.grid_resolution < 8)
    throw std::invalid_argument("run_teacher: grid resolution must be >= 8");

  // The greedy inner solver is a plane sweep; reduce larger instances first.
  if (policy.kind == PolicyKind::Greedy && spec.dim() > 2) {
    const PlaneBasis basis = build_basis(spec.w0, spec.w_star);
    const ProblemSpec reduced = reduce_spec(spec, basis);
    TeachRunResult result = run_teacher(policy, reduced, max_steps, tol);
    result.trajectory = lift_trajectory(result.trajectory, basis, spec.w_star);
    return result;
  }

  Vector w = spec.w0;
  std::vector<Vector> states{w};
  std::vector<TeachingInput> inputs;

  Termination termination = Termination::MaxSteps;
  if ((w - spec.w_star).norm() <= tol) {
    termination = Termination::Tolerance;
  } else {
    for (long t = 0; t < max_steps; ++t) {
      if (const auto landing = exact_landing(w, spec)) {
        w = step(w, *landing, spec.eta);
        states.push_back(w);
        inputs.push_back(*landing);
        termination = Termination::ExactLanding;
        break;
      }
      const TeachingInput u =
          (policy.kind == PolicyKind::Straight)
              ? straight_step(w, spec)
              : greedy_step(w, spec, policy.grid_resolution,
                            policy.polish_iterations);
      w = step(w, u, spec.eta);
      states.push_back(w);
      inputs.push_back(u);
      if ((w - spec.w_star).norm() <= tol) {
        termination = Termination::Tolerance;
        break;
      }
    }
  }

  TeachRunResult result;
  result.trajectory =
      make_trajectory(std::move(states), std::move(inputs), spec.eta, spec.w_star);
  result.steps = static_cast<long>(result.trajectory.inputs.size());
  result.converged = termination != Termination::MaxSteps;
  result.termination = termination;
  return result;
}

}  // namespace teachopt
