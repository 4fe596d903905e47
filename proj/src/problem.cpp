#include "teachopt/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "roots.hpp"

namespace teachopt {

void ProblemSpec::validate() const {
  if (!(eta > 0.0) || !(Rx > 0.0) || !(Ry > 0.0))
    throw std::invalid_argument("ProblemSpec: eta, Rx, Ry must be positive");
  if (w0.size() < 1 || w0.size() != w_star.size())
    throw std::invalid_argument(
        "ProblemSpec: w0 and w_star must have equal dimension n >= 1");
  if (!w0.allFinite() || !w_star.allFinite())
    throw std::invalid_argument("ProblemSpec: non-finite state vector");
}

bool input_admissible(const TeachingInput& u, const ProblemSpec& spec) {
  return u.x.norm() <= spec.Rx + kFeasTol && std::abs(u.y) <= spec.Ry + kFeasTol;
}

Vector step(const Vector& w, const TeachingInput& u, double eta) {
  if (w.size() != u.x.size())
    throw std::invalid_argument("step: dimension mismatch");
  const double residual = w.dot(u.x) - u.y;
  return w - eta * residual * u.x;
}

Trajectory make_trajectory(std::vector<Vector> states,
                           std::vector<TeachingInput> inputs, double eta,
                           const Vector& w_star) {
  if (states.size() != inputs.size() + 1)
    throw std::invalid_argument("Trajectory: states.len must be inputs.len + 1");
  Trajectory traj;
  traj.states = std::move(states);
  traj.inputs = std::move(inputs);
  traj.eta = eta;
  traj.terminal_residual = (traj.states.back() - w_star).norm();
  return traj;
}

bool trajectory_consistent(const Trajectory& traj, double tol) {
  if (traj.states.size() != traj.inputs.size() + 1) return false;
  for (std::size_t t = 0; t < traj.inputs.size(); ++t) {
    const Vector next = step(traj.states[t], traj.inputs[t], traj.eta);
    if ((next - traj.states[t + 1]).norm() > tol) return false;
  }
  return true;
}

TeachingInput rescale_input(const Vector& w, const TeachingInput& u, double Ry) {
  if (!(Ry > 0.0)) throw std::invalid_argument("rescale_input: Ry must be positive");
  if (w.size() != u.x.size())
    throw std::invalid_argument("rescale_input: dimension mismatch");
  if (std::abs(u.y) > Ry + kFeasTol)
    throw std::invalid_argument("rescale_input: |y| exceeds Ry");
  if (u.y == Ry) return {u.x, Ry};  // label already at the bound

  const double wx = w.dot(u.x);
  double a;
  if (wx == 0.0) {
    a = u.y / Ry;
  } else {
    // (w'x) a^2 - Ry a + (y - w'x) = 0; the discriminant is bounded below
    // by (Ry - 2|w'x|)^2 >= 0, so real roots always exist.
    const auto roots = detail::solve_quadratic(wx, -Ry, u.y - wx, true);
    double best = std::numeric_limits<double>::quiet_NaN();
    for (int i = 0; i < roots.count; ++i) {
      const double r = roots.root[i];
      if (std::abs(r) > 1.0 + 1e-9) continue;
      if (std::isnan(best) || std::abs(r) < std::abs(best)) best = r;
    }
    if (std::isnan(best))
      throw std::runtime_error("rescale_input: no root in [-1, 1]");
    a = std::clamp(best, -1.0, 1.0);
  }
  return {a * u.x, Ry};
}

std::optional<TeachingInput> exact_landing(const Vector& w,
                                           const ProblemSpec& spec) {
  const Vector delta = spec.w_star - w;
  const double dist = delta.norm();
  if (dist == 0.0)
    throw std::invalid_argument("exact_landing: w already equals w_star");

  const Vector d = delta / dist;
  const double c = w.dot(d);
  // eta*(Ry - a*c)*a = dist  <=>  (eta*c) a^2 - (eta*Ry) a + dist = 0
  const auto roots =
      detail::solve_quadratic(spec.eta * c, -spec.eta * spec.Ry, dist);
  double best = std::numeric_limits<double>::quiet_NaN();
  for (int i = 0; i < roots.count; ++i) {
    const double a = roots.root[i];
    if (a < 0.0 || a > spec.Rx + kFeasTol) continue;
    if (std::isnan(best) || a < best) best = a;
  }
  if (std::isnan(best)) return std::nullopt;
  return TeachingInput{best * d, spec.Ry};
}

std::vector<Vector> reachable_boundary(const Vector& w, const ProblemSpec& spec,
                                       int samples) {
  if (w.size() != 2)
    throw std::invalid_argument("reachable_boundary: requires n = 2");
  if (samples < 1)
    throw std::invalid_argument("reachable_boundary: samples must be positive");

  std::vector<Vector> boundary;
  boundary.reserve(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) {
    const double theta = 2.0 * M_PI * i / samples;
    Vector u(2);
    u << std::cos(theta), std::sin(theta);
    const double c = w.dot(u);
    // Displacement along u is s(a, y) = eta * a * (y - a*c) over a in [0, Rx],
    // y = +-Ry; the maximum sits at an endpoint or the parabola vertex.
    double best = 0.0;
    for (const double y : {spec.Ry, -spec.Ry}) {
      double cand[2] = {spec.Rx, spec.Rx};
      if (c != 0.0) cand[1] = std::clamp(y / (2.0 * c), 0.0, spec.Rx);
      for (const double a : cand)
        best = std::max(best, spec.eta * a * (y - a * c));
    }
    boundary.push_back(w + best * u);
  }
  return boundary;
}

}  // namespace teachopt
