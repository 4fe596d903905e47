#include "teachopt/subspace.hpp"

#include <cmath>
#include <stdexcept>

namespace teachopt {

PlaneBasis build_basis(const Vector& w0, const Vector& w_star) {
  const Eigen::Index n = w0.size();
  if (w_star.size() != n)
    throw std::invalid_argument("build_basis: dimension mismatch");
  if (n < 2)
    throw std::invalid_argument("build_basis: requires n >= 2");

  PlaneBasis basis;
  const double n0 = w0.norm();
  const double ns = w_star.norm();
  if (n0 == 0.0 && ns == 0.0) {
    basis.b1 = Vector::Unit(n, 0);
    basis.b2 = Vector::Unit(n, 1);
    return basis;
  }

  const Vector& primary = (n0 > 0.0) ? w0 : w_star;
  basis.b1 = primary / primary.norm();

  const Vector residual = w_star - basis.b1.dot(w_star) * basis.b1;
  if (residual.norm() > 1e-10 * std::max(1.0, ns)) {
    basis.b2 = residual / residual.norm();
    return basis;
  }

  // Aligned pair: complete with the lowest-index axis not parallel to b1.
  for (Eigen::Index i = 0; i < n; ++i) {
    Vector axis_residual = Vector::Unit(n, i) - basis.b1(i) * basis.b1;
    if (axis_residual.norm() > 0.5) {
      basis.b2 = axis_residual / axis_residual.norm();
      return basis;
    }
  }
  throw std::runtime_error("build_basis: canonical completion failed");
}

Eigen::Vector2d project(const Vector& v, const PlaneBasis& basis) {
  if (v.size() != basis.b1.size())
    throw std::invalid_argument("project: dimension mismatch");
  return {basis.b1.dot(v), basis.b2.dot(v)};
}

Vector lift(const Eigen::Vector2d& c, const PlaneBasis& basis) {
  return c(0) * basis.b1 + c(1) * basis.b2;
}

ProblemSpec reduce_spec(const ProblemSpec& spec, const PlaneBasis& basis) {
  ProblemSpec reduced;
  reduced.w0 = project(spec.w0, basis);
  reduced.w_star = project(spec.w_star, basis);
  reduced.eta = spec.eta;
  reduced.Rx = spec.Rx;
  reduced.Ry = spec.Ry;
  return reduced;
}

Trajectory lift_trajectory(const Trajectory& reduced, const PlaneBasis& basis,
                           const Vector& w_star) {
  std::vector<Vector> states;
  states.reserve(reduced.states.size());
  for (const Vector& s : reduced.states) states.push_back(lift(s.head<2>(), basis));
  std::vector<TeachingInput> inputs;
  inputs.reserve(reduced.inputs.size());
  for (const TeachingInput& u : reduced.inputs)
    inputs.push_back({lift(u.x.head<2>(), basis), u.y});
  return make_trajectory(std::move(states), std::move(inputs), reduced.eta,
                         w_star);
}

}  // namespace teachopt
