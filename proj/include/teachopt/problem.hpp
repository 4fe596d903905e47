#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

namespace teachopt {

using Vector = Eigen::VectorXd;

/// Teaching instance: drive a gradient-descent least-squares learner from
/// w0 to w_star using inputs (x, y) with ||x|| <= Rx and |y| <= Ry.
struct ProblemSpec {
  Vector w0;
  Vector w_star;
  double eta = 0.01;
  double Rx = 1.0;
  double Ry = 1.0;

  int dim() const { return static_cast<int>(w0.size()); }
  void validate() const;  // throws std::invalid_argument on a malformed instance
};

/// One training example acting as the control.
struct TeachingInput {
  Vector x;
  double y = 0.0;
};

// Slack on the input constraints, absorbs projection round-off.
inline constexpr double kFeasTol = 1e-9;

bool input_admissible(const TeachingInput& u, const ProblemSpec& spec);

/// One learner update: w - eta * (w'x - y) x.
Vector step(const Vector& w, const TeachingInput& u, double eta);

/// Discrete state/input sequence; states replay exactly through step().
struct Trajectory {
  std::vector<Vector> states;         // w_0 .. w_T
  std::vector<TeachingInput> inputs;  // length T
  double eta = 0.0;
  double terminal_residual = 0.0;     // ||w_T - w_star||
};

Trajectory make_trajectory(std::vector<Vector> states,
                           std::vector<TeachingInput> inputs, double eta,
                           const Vector& w_star);

/// Replays inputs through step() and checks the stored states match.
bool trajectory_consistent(const Trajectory& traj, double tol = 1e-12);

/// Label rescaling: returns (a*x, Ry) with a in [-1, 1] producing the
/// identical next state as u. When two roots qualify the smaller |a| wins.
TeachingInput rescale_input(const Vector& w, const TeachingInput& u, double Ry);

/// Admissible input landing exactly on w_star in one step, if one exists.
/// The candidate is x = a*(w_star - w)/||w_star - w||, y = Ry with a a root
/// of eta*(Ry - a*w'd)*a = ||w_star - w|| in [0, Rx].
std::optional<TeachingInput> exact_landing(const Vector& w,
                                           const ProblemSpec& spec);

/// Boundary of the one-step reachable set, sampled over sweep angles
/// (2D plotting utility).
std::vector<Vector> reachable_boundary(const Vector& w,
                                       const ProblemSpec& spec, int samples);

}  // namespace teachopt
