#pragma once

#include <utility>
#include <vector>

#include "teachopt/pmp.hpp"

namespace teachopt {

/// Sampled state/co-state flow with the pointwise input at each sample.
struct ContinuousTrajectory {
  std::vector<double> times;
  std::vector<Vector> states_w;
  std::vector<Vector> states_p;
  std::vector<Vector> inputs;
  double hamiltonian_drift = 0.0;  // max |H| over samples
};

struct CandidateTrajectory {
  double phi0 = 0.0;           // initial co-state angle (2D)
  double t_hit = 0.0;          // time of minimum distance to w_star
  double miss_distance = 0.0;  // min over samples of ||w(t) - w_star||
  ContinuousTrajectory trajectory;
};

/// Pointwise flow: x* from the QCQP, then w_dot = (Ry - w'x*) x*,
/// p_dot = (p'x*) x*.
std::pair<Vector, Vector> pmp_rhs(const Vector& w, const Vector& p,
                                  const ProblemSpec& spec);

/// Fixed-step 4th-order integration of pmp_rhs. p0 should be scaled so
/// H = 0 at t = 0 (costate_scale).
ContinuousTrajectory integrate(const Vector& w0, const Vector& p0,
                               const ProblemSpec& spec, double dt,
                               double t_max);

struct ShootingSettings {
  int angle_samples = 360;
  double dt = 1e-3;
  double t_max = 8.0;
  double hit_tol = 1e-3;
  double duplicate_phi_tol = 1e-3;
  // Local minima of the angle-grid miss curve above this value are not
  // refined; 0 picks max(10*hit_tol, 0.05*||w0 - w_star||).
  double bracket_miss = 0.0;
};

/// Sweeps initial co-state angles, refines the miss local minima by
/// golden-section search, and returns the distinct hits sorted by t_hit.
std::vector<CandidateTrajectory> find_candidates(const ProblemSpec& spec,
                                                 const ShootingSettings& settings);

}  // namespace teachopt
