#pragma once

#include <Eigen/Core>

#include "teachopt/problem.hpp"

namespace teachopt {

/// Orthonormal 2D basis whose span contains w0 and w_star.
struct PlaneBasis {
  Vector b1;
  Vector b2;

  int dim() const { return static_cast<int>(b1.size()); }
};

/// Gram-Schmidt on {w0, w_star}; aligned or degenerate pairs are completed
/// with the lowest-index coordinate axis not parallel to the span.
PlaneBasis build_basis(const Vector& w0, const Vector& w_star);

Eigen::Vector2d project(const Vector& v, const PlaneBasis& basis);
Vector lift(const Eigen::Vector2d& c, const PlaneBasis& basis);

/// 2D copy of the instance (same eta, Rx, Ry).
ProblemSpec reduce_spec(const ProblemSpec& spec, const PlaneBasis& basis);

/// Lift a trajectory solved in the reduced plane back to n dimensions.
Trajectory lift_trajectory(const Trajectory& reduced, const PlaneBasis& basis,
                           const Vector& w_star);

}  // namespace teachopt
