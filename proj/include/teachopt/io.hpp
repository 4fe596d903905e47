#pragma once

#include <optional>
#include <string>
#include <vector>

#include "teachopt/problem.hpp"
#include "teachopt/shooting.hpp"

namespace teachopt {

/// CSV with header `step,t,w1,...,wn,x1,...,xn,y`, 17 significant digits.
/// Discrete rows use t = step*eta; the final state row carries a zero input.
void emit_trajectory(const Trajectory& traj, const std::string& path);

/// Continuous variant: rows are samples at the given times, y = Ry.
void emit_trajectory_samples(const std::vector<double>& times,
                             const std::vector<Vector>& states,
                             const std::vector<Vector>& inputs, double y,
                             const std::string& path);

struct ParsedTrajectory {
  std::vector<double> steps;
  std::vector<double> times;
  std::vector<Vector> states;
  std::vector<Vector> xs;
  std::vector<double> ys;
};

ParsedTrajectory parse_trajectory_csv(const std::string& path);

/// Costate dump `step,t,w1..wn,p1..pn` for regime classification runs.
void emit_costate_csv(const ContinuousTrajectory& traj, const std::string& path);

struct ParsedCostateTrajectory {
  std::vector<double> times;
  std::vector<Vector> ws;
  std::vector<Vector> ps;
};

ParsedCostateTrajectory parse_costate_csv(const std::string& path);

struct SolveReport {
  std::string method;
  ProblemSpec spec;
  std::optional<long> T;
  std::optional<double> t_f;
  bool converged = false;
  double terminal_residual = 0.0;
  double wall_time_seconds = 0.0;
  std::optional<long> candidate_count;
};

std::string report_to_json(const SolveReport& report);
void write_report(const SolveReport& report, const std::string& path);

}  // namespace teachopt
