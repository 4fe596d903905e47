#pragma once

#include "teachopt/problem.hpp"

namespace teachopt {

enum class PolicyKind { Greedy, Straight };

struct TeacherPolicy {
  PolicyKind kind = PolicyKind::Straight;
  int grid_resolution = 720;   // theta samples for the greedy sweep
  int polish_iterations = 20;  // Newton steps after the sweep
};

enum class Termination { ExactLanding, Tolerance, MaxSteps };

struct TeachRunResult {
  Trajectory trajectory;
  long steps = 0;
  bool converged = false;
  Termination termination = Termination::MaxSteps;
};

/// Closed-form single step toward w_star along d = (w_star - w)/||w_star - w||.
TeachingInput straight_step(const Vector& w, const ProblemSpec& spec);

/// One-step minimizer of ||step(w, x, y) - w_star||^2 over the input set,
/// y pinned to Ry. Requires the reduced 2D problem.
TeachingInput greedy_step(const Vector& w, const ProblemSpec& spec,
                          int grid_resolution = 720, int polish_iterations = 20);

inline double default_teaching_tol(const ProblemSpec& spec) {
  return 1e-3 * spec.Ry;
}

/// Iterates the policy from w0, attempting an exact landing before each step.
TeachRunResult run_teacher(const TeacherPolicy& policy, const ProblemSpec& spec,
                           long max_steps, double tol);

}  // namespace teachopt
