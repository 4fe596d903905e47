#include "teachopt/shooting.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <stdexcept>

namespace teachopt {

std::pair<Vector, Vector> pmp_rhs(const Vector& w, const Vector& p,
                                  const ProblemSpec& spec) {
  if (p.norm() == 0.0)
    throw std::invalid_argument("pmp_rhs: p must be nonzero");
  const Vector x = qcqp_minimize(w, p, spec).x;
  return {(spec.Ry - w.dot(x)) * x, p.dot(x) * x};
}

namespace {

struct RhsEval {
  Vector w_dot, p_dot, x;
  double value;
};

RhsEval eval_rhs(const Vector& w, const Vector& p, const ProblemSpec& spec) {
  if (p.norm() < 1e-12)
    throw std::runtime_error("integrate: costate norm collapsed below 1e-12");
  QcqpResult q = qcqp_minimize(w, p, spec);
  RhsEval out;
  out.w_dot = (spec.Ry - w.dot(q.x)) * q.x;
  out.p_dot = p.dot(q.x) * q.x;
  out.x = std::move(q.x);
  out.value = q.value;
  return out;
}

}  // namespace

ContinuousTrajectory integrate(const Vector& w0, const Vector& p0,
                               const ProblemSpec& spec, double dt,
                               double t_max) {
  if (!(dt > 0.0)) throw std::invalid_argument("integrate: dt must be positive");
  if (!(t_max > 0.0))
    throw std::invalid_argument("integrate: t_max must be positive");

  const long steps = std::max<long>(1, std::lround(t_max / dt));

  ContinuousTrajectory traj;
  traj.times.reserve(steps + 1);
  traj.states_w.reserve(steps + 1);
  traj.states_p.reserve(steps + 1);
  traj.inputs.reserve(steps + 1);

  Vector w = w0;
  Vector p = p0;
  double drift = 0.0;

  for (long i = 0; i < steps; ++i) {
    const RhsEval k1 = eval_rhs(w, p, spec);
    traj.times.push_back(i * dt);
    traj.states_w.push_back(w);
    traj.states_p.push_back(p);
    traj.inputs.push_back(k1.x);
    drift = std::max(drift, std::abs(k1.value + 1.0));

    const RhsEval k2 =
        eval_rhs(w + 0.5 * dt * k1.w_dot, p + 0.5 * dt * k1.p_dot, spec);
    const RhsEval k3 =
        eval_rhs(w + 0.5 * dt * k2.w_dot, p + 0.5 * dt * k2.p_dot, spec);
    const RhsEval k4 = eval_rhs(w + dt * k3.w_dot, p + dt * k3.p_dot, spec);

    w += (dt / 6.0) * (k1.w_dot + 2.0 * k2.w_dot + 2.0 * k3.w_dot + k4.w_dot);
    p += (dt / 6.0) * (k1.p_dot + 2.0 * k2.p_dot + 2.0 * k3.p_dot + k4.p_dot);
  }

  const RhsEval last = eval_rhs(w, p, spec);
  traj.times.push_back(steps * dt);
  traj.states_w.push_back(w);
  traj.states_p.push_back(p);
  traj.inputs.push_back(last.x);
  drift = std::max(drift, std::abs(last.value + 1.0));

  traj.hamiltonian_drift = drift;
  return traj;
}

namespace {

struct ShotResult {
  double miss = 0.0;
  double t_hit = 0.0;
  ContinuousTrajectory trajectory;
};

ShotResult shoot(double phi, const ProblemSpec& spec,
                 const ShootingSettings& settings) {
  Vector p_hat(2);
  p_hat << std::cos(phi), std::sin(phi);
  const Vector p0 = costate_scale(spec.w0, p_hat, spec);

  ShotResult out;
  out.trajectory = integrate(spec.w0, p0, spec, settings.dt, settings.t_max);
  out.miss = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < out.trajectory.times.size(); ++i) {
    const double d = (out.trajectory.states_w[i] - spec.w_star).norm();
    if (d < out.miss) {
      out.miss = d;
      out.t_hit = out.trajectory.times[i];
    }
  }
  return out;
}

}  // namespace

std::vector<CandidateTrajectory> find_candidates(const ProblemSpec& spec,
                                                 const ShootingSettings& settings) {
  spec.validate();
  if (spec.dim() != 2)
    throw std::invalid_argument("find_candidates: reduce the problem to 2D first");
  if (settings.angle_samples < 4)
    throw std::invalid_argument("find_candidates: angle_samples must be >= 4");

  const double dist0 = (spec.w0 - spec.w_star).norm();
  if (dist0 == 0.0) {
    CandidateTrajectory degenerate;
    degenerate.trajectory.times.push_back(0.0);
    degenerate.trajectory.states_w.push_back(spec.w0);
    degenerate.trajectory.states_p.push_back(Vector::Zero(2));
    degenerate.trajectory.inputs.push_back(Vector::Zero(2));
    return {degenerate};
  }

  const int n = settings.angle_samples;
  std::vector<double> miss(n);
  for (int j = 0; j < n; ++j)
    miss[j] = shoot(2.0 * M_PI * j / n, spec, settings).miss;

  const double bracket_miss =
      settings.bracket_miss > 0.0
          ? settings.bracket_miss
          : std::max(10.0 * settings.hit_tol, 0.05 * dist0);

  std::vector<CandidateTrajectory> candidates;
  const double dphi = 2.0 * M_PI / n;
  for (int j = 0; j < n; ++j) {
    const double left = miss[(j + n - 1) % n];
    const double right = miss[(j + 1) % n];
    if (!(miss[j] <= left && miss[j] < right)) continue;
    if (miss[j] > bracket_miss) continue;

    // Golden-section refinement of the miss over the bracketing cell.
    const double gold = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = dphi * (j - 1);
    double hi = dphi * (j + 1);
    double m1 = hi - gold * (hi - lo);
    double m2 = lo + gold * (hi - lo);
    ShotResult s1 = shoot(m1, spec, settings);
    ShotResult s2 = shoot(m2, spec, settings);
    double best_phi = dphi * j;
    ShotResult best = shoot(best_phi, spec, settings);
    for (int it = 0; it < 60; ++it) {
      if (s1.miss < s2.miss) {
        hi = m2;
        m2 = m1;
        s2 = s1;
        m1 = hi - gold * (hi - lo);
        s1 = shoot(m1, spec, settings);
      } else {
        lo = m1;
        m1 = m2;
        s1 = s2;
        m2 = lo + gold * (hi - lo);
        s2 = shoot(m2, spec, settings);
      }
      const ShotResult& better = (s1.miss < s2.miss) ? s1 : s2;
      const double better_phi = (s1.miss < s2.miss) ? m1 : m2;
      if (better.miss < best.miss) {
        best = better;
        best_phi = better_phi;
      }
      if (best.miss <= settings.hit_tol || (hi - lo) < 1e-10) break;
    }

    if (best.miss > settings.hit_tol) continue;

    CandidateTrajectory cand;
    cand.phi0 = std::fmod(best_phi + 4.0 * M_PI, 2.0 * M_PI);
    cand.t_hit = best.t_hit;
    cand.miss_distance = best.miss;
    cand.trajectory = std::move(best.trajectory);
    candidates.push_back(std::move(cand));
  }

  // Drop duplicates that refined into the same co-state angle.
  std::sort(candidates.begin(), candidates.end(),
            [](const CandidateTrajectory& a, const CandidateTrajectory& b) {
              return a.phi0 < b.phi0;
            });
  std::vector<CandidateTrajectory> unique;
  for (auto& cand : candidates) {
    bool duplicate = false;
    for (const auto& kept : unique) {
      double gap = std::abs(cand.phi0 - kept.phi0);
      gap = std::min(gap, 2.0 * M_PI - gap);
      if (gap < settings.duplicate_phi_tol) duplicate = true;
    }
    if (!duplicate) unique.push_back(std::move(cand));
  }

  std::sort(unique.begin(), unique.end(),
            [](const CandidateTrajectory& a, const CandidateTrajectory& b) {
              return a.t_hit != b.t_hit ? a.t_hit < b.t_hit : a.phi0 < b.phi0;
            });
  return unique;
}

}  // namespace teachopt
