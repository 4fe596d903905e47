#pragma once

#include <optional>
#include <utility>

#include "teachopt/optsolve.hpp"
#include "teachopt/problem.hpp"

namespace teachopt {

struct NlpSettings {
  double residual_tol = 0.0;  // 0 -> 1e-6 * max(1, ||w_star||)
  int restarts = 8;
  unsigned long seed = 0;  // fixes the multi-start perturbations
  long T_hi = 0;           // 0 -> upper bound from a STRAIGHT run
  SolverOptions solver;
};

double default_residual_tol(const ProblemSpec& spec);

/// Forward simulation with y = Ry throughout; returns (w_T, all states).
std::pair<Vector, std::vector<Vector>> rollout(const Vector& w0,
                                               const std::vector<Vector>& inputs,
                                               double eta, double Ry);

/// Exact adjoint gradient of ||w_T - target||^2 with respect to every x_t.
std::vector<Vector> rollout_gradient(const Vector& w0,
                                     const std::vector<Vector>& inputs,
                                     double eta, double Ry,
                                     const Vector& target);

/// Fixed-horizon feasibility: minimizes the terminal residual over the
/// input balls with multi-start; returns a certificate trajectory when the
/// residual drops below settings.residual_tol.
std::optional<Trajectory> nlp_feasible(long T, const ProblemSpec& spec,
                                       const NlpSettings& settings);

/// Binary search for the smallest feasible horizon.
std::pair<long, Trajectory> nlp_min_T(const ProblemSpec& spec,
                                      const NlpSettings& settings);

struct CnlpSolution {
  double t_f = 0.0;
  std::vector<double> mesh_times;  // K+1 uniform times on [0, t_f]
  std::vector<Vector> states;      // w_0 .. w_K
  std::vector<Vector> inputs;      // x_0 .. x_K
  double defect_norm = 0.0;        // max trapezoidal defect magnitude
  bool converged = false;
};

/// Free-terminal-time trapezoidal collocation on normalized time, solved
/// with the augmented-Lagrangian engine.
CnlpSolution cnlp_solve(const ProblemSpec& spec, int K,
                        const SolverOptions& settings);

/// Solver options tuned to the collocation transcription: the merit value
/// is O(t_f), so a composite-gradient residual below ~1e-6 sits under the
/// double-precision rounding floor of the line search.
SolverOptions cnlp_default_options();

}  // namespace teachopt
