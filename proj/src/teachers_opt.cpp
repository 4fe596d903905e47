#include "teachopt/teachers_opt.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "teachopt/heuristics.hpp"
#include "teachopt/subspace.hpp"

namespace teachopt {

double default_residual_tol(const ProblemSpec& spec) {
  return 1e-6 * std::max(1.0, spec.w_star.norm());
}

namespace {

// Flat single-shooting core. Inputs are stacked column-wise in z; states are
// kept in an n x (T+1) workspace.
void forward_states(const Vector& w0, const Eigen::VectorXd& z, long T,
                    double eta, double Ry, Eigen::MatrixXd& states) {
  const Eigen::Index n = w0.size();
  states.resize(n, T + 1);
  states.col(0) = w0;
  for (long t = 0; t < T; ++t) {
    const auto x = z.segment(t * n, n);
    const auto w = states.col(t);
    states.col(t + 1) = w - eta * (w.dot(x) - Ry) * x;
  }
}

double objective_and_gradient(const Vector& w0, const Eigen::VectorXd& z,
                              long T, double eta, double Ry,
                              const Vector& target, Eigen::MatrixXd& states,
                              Eigen::VectorXd* grad) {
  const Eigen::Index n = w0.size();
  forward_states(w0, z, T, eta, Ry, states);
  const Vector diff = states.col(T) - target;
  const double value = diff.squaredNorm();
  if (grad) {
    grad->resize(z.size());
    Vector lambda = 2.0 * diff;
    for (long t = T - 1; t >= 0; --t) {
      const auto x = z.segment(t * n, n);
      const auto w = states.col(t);
      const double residual = w.dot(x) - Ry;
      grad->segment(t * n, n) =
          -eta * (residual * lambda + x.dot(lambda) * w);
      lambda -= eta * x.dot(lambda) * x;  // (I - eta x x') lambda
    }
  }
  return value;
}

}  // namespace

std::pair<Vector, std::vector<Vector>> rollout(const Vector& w0,
                                               const std::vector<Vector>& inputs,
                                               double eta, double Ry) {
  const Eigen::Index n = w0.size();
  Eigen::VectorXd z(static_cast<Eigen::Index>(inputs.size()) * n);
  for (std::size_t t = 0; t < inputs.size(); ++t) {
    if (inputs[t].size() != n)
      throw std::invalid_argument("rollout: input dimension mismatch");
    z.segment(t * n, n) = inputs[t];
  }
  Eigen::MatrixXd states;
  forward_states(w0, z, static_cast<long>(inputs.size()), eta, Ry, states);
  std::vector<Vector> all;
  all.reserve(inputs.size() + 1);
  for (Eigen::Index c = 0; c < states.cols(); ++c) all.push_back(states.col(c));
  return {states.col(states.cols() - 1), std::move(all)};
}

std::vector<Vector> rollout_gradient(const Vector& w0,
                                     const std::vector<Vector>& inputs,
                                     double eta, double Ry,
                                     const Vector& target) {
  const Eigen::Index n = w0.size();
  Eigen::VectorXd z(static_cast<Eigen::Index>(inputs.size()) * n);
  for (std::size_t t = 0; t < inputs.size(); ++t)
    z.segment(t * n, n) = inputs[t];
  Eigen::MatrixXd states;
  Eigen::VectorXd grad;
  objective_and_gradient(w0, z, static_cast<long>(inputs.size()), eta, Ry,
                         target, states, &grad);
  std::vector<Vector> out;
  out.reserve(inputs.size());
  for (std::size_t t = 0; t < inputs.size(); ++t)
    out.push_back(grad.segment(t * n, n));
  return out;
}

namespace {

// STRAIGHT warm start of exactly T inputs (zero-padded once it lands).
Eigen::VectorXd straight_warm_start(const ProblemSpec& spec, long T) {
  const Eigen::Index n = spec.dim();
  Eigen::VectorXd z = Eigen::VectorXd::Zero(T * n);
  Vector w = spec.w0;
  for (long t = 0; t < T; ++t) {
    if ((w - spec.w_star).norm() == 0.0) break;
    TeachingInput u{Vector(), 0.0};
    if (const auto landing = exact_landing(w, spec))
      u = *landing;
    else
      u = straight_step(w, spec);
    z.segment(t * n, n) = u.x;
    w = step(w, u, spec.eta);
  }
  return z;
}

std::optional<Trajectory> nlp_feasible_reduced(long T, const ProblemSpec& spec,
                                               const NlpSettings& settings) {
  const Eigen::Index n = spec.dim();
  const double res_tol = settings.residual_tol > 0.0
                             ? settings.residual_tol
                             : default_residual_tol(spec);

  const auto projector = [n, T, &spec](const Eigen::VectorXd& z) {
    Eigen::VectorXd out = z;
    for (long t = 0; t < T; ++t) {
      auto block = out.segment(t * n, n);
      const double norm = block.norm();
      if (norm > spec.Rx) block *= spec.Rx / norm;
    }
    return out;
  };

  Eigen::MatrixXd states;
  const auto objective = [&](const Eigen::VectorXd& z,
                             Eigen::VectorXd* grad) -> double {
    return objective_and_gradient(spec.w0, z, T, spec.eta, spec.Ry,
                                  spec.w_star, states, grad);
  };

  const Eigen::VectorXd base = straight_warm_start(spec, T);
  std::mt19937_64 rng(settings.seed);
  std::normal_distribution<double> noise(0.0, 0.1 * spec.Rx);

  for (int r = 0; r < std::max(1, settings.restarts); ++r) {
    Eigen::VectorXd z0 = base;
    if (r > 0)
      for (Eigen::Index i = 0; i < z0.size(); ++i) z0(i) += noise(rng);

    SolveOutcome out =
        minimize_projected(objective, projector, z0, settings.solver);
    Eigen::VectorXd z = out.point;

    // Exact-landing polish: swap the final input when the penultimate state
    // is within one-step reach.
    forward_states(spec.w0, z, T, spec.eta, spec.Ry, states);
    if (T >= 1 && (states.col(T - 1) - spec.w_star).norm() > 0.0) {
      const Vector w_prev = states.col(T - 1);
      if (const auto landing = exact_landing(w_prev, spec))
        z.segment((T - 1) * n, n) = landing->x;
    }

    forward_states(spec.w0, z, T, spec.eta, spec.Ry, states);
    const double residual = (states.col(T) - spec.w_star).norm();
    if (residual <= res_tol) {
      // Label rescaling in reverse: each displacement admits a boundary
      // representative (Rx x_hat, y') whenever |y'| <= Ry, so the
      // certificate can ride the input-norm bound without moving a state.
      std::vector<Vector> traj_states{spec.w0};
      std::vector<TeachingInput> inputs;
      inputs.reserve(T);
      Vector w = spec.w0;
      for (long t = 0; t < T; ++t) {
        TeachingInput u{Vector(z.segment(t * n, n)), spec.Ry};
        const double a0 = u.x.norm();
        if (a0 > 1e-15) {
          const Vector x_hat = u.x / a0;
          const double c = w.dot(x_hat);
          const double disp = spec.eta * (spec.Ry - w.dot(u.x)) * a0;
          const double y_boundary = disp / (spec.eta * spec.Rx) + c * spec.Rx;
          if (std::abs(y_boundary) <= spec.Ry)
            u = {spec.Rx * x_hat, y_boundary};
        }
        w = step(w, u, spec.eta);
        traj_states.push_back(w);
        inputs.push_back(std::move(u));
      }
      if ((w - spec.w_star).norm() <= res_tol)
        return make_trajectory(std::move(traj_states), std::move(inputs),
                               spec.eta, spec.w_star);
      // Saturation is exact in exact arithmetic; fall back just in case.
      std::vector<Vector> plain_states;
      plain_states.reserve(T + 1);
      for (long t = 0; t <= T; ++t) plain_states.push_back(states.col(t));
      std::vector<TeachingInput> plain_inputs;
      plain_inputs.reserve(T);
      for (long t = 0; t < T; ++t)
        plain_inputs.push_back({Vector(z.segment(t * n, n)), spec.Ry});
      return make_trajectory(std::move(plain_states), std::move(plain_inputs),
                             spec.eta, spec.w_star);
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<Trajectory> nlp_feasible(long T, const ProblemSpec& spec,
                                       const NlpSettings& settings) {
  spec.validate();
  if (T < 1) throw std::invalid_argument("nlp_feasible: T must be >= 1");

  if (spec.dim() > 2) {
    const PlaneBasis basis = build_basis(spec.w0, spec.w_star);
    const ProblemSpec reduced = reduce_spec(spec, basis);
    auto result = nlp_feasible_reduced(T, reduced, settings);
    if (!result) return std::nullopt;
    return lift_trajectory(*result, basis, spec.w_star);
  }
  return nlp_feasible_reduced(T, spec, settings);
}

std::pair<long, Trajectory> nlp_min_T(const ProblemSpec& spec,
                                      const NlpSettings& settings) {
  spec.validate();
  if ((spec.w0 - spec.w_star).norm() == 0.0) {
    Trajectory empty = make_trajectory({spec.w0}, {}, spec.eta, spec.w_star);
    return {0, std::move(empty)};
  }

  long T_hi = settings.T_hi;
  if (T_hi <= 0) {
    const TeacherPolicy straight{PolicyKind::Straight, 720, 20};
    const TeachRunResult run =
        run_teacher(straight, spec, 2'000'000, default_teaching_tol(spec));
    if (!run.converged)
      throw std::runtime_error(
          "nlp_min_T: STRAIGHT hit max_steps; provide an explicit T_hi");
    T_hi = std::max<long>(1, run.steps);
  }

  std::optional<Trajectory> cert = nlp_feasible(T_hi, spec, settings);
  while (!cert) {
    // The warm start certifies the STRAIGHT horizon; a miss here means the
    // upper bound itself was too tight (explicit T_hi), so widen it.
    if (T_hi > 100'000'000)
      throw std::runtime_error("nlp_min_T: no feasible horizon found");
    T_hi *= 2;
    cert = nlp_feasible(T_hi, spec, settings);
  }

  long lo = 1;
  long hi = T_hi;
  while (lo < hi) {
    const long mid = lo + (hi - lo) / 2;
    if (auto traj = nlp_feasible(mid, spec, settings)) {
      cert = std::move(traj);
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return {hi, std::move(*cert)};
}

namespace {

struct CnlpLayout {
  int K;
  Eigen::Index n;
  // z = [t_f, w_1..w_{K-1}, x_0..x_K]
  Eigen::Index size() const { return 1 + n * (K - 1) + n * (K + 1); }
  Eigen::Index w_offset(int k) const { return 1 + n * (k - 1); }        // 1..K-1
  Eigen::Index x_offset(int k) const { return 1 + n * (K - 1) + n * k; }  // 0..K
};

class CnlpTranscription {
 public:
  CnlpTranscription(const ProblemSpec& spec, int K)
      : spec_(spec), layout_{K, spec.dim()} {}

  const CnlpLayout& layout() const { return layout_; }

  Vector state(const Eigen::VectorXd& z, int k) const {
    if (k == 0) return spec_.w0;
    if (k == layout_.K) return spec_.w_star;
    return z.segment(layout_.w_offset(k), layout_.n);
  }
  Vector input(const Eigen::VectorXd& z, int k) const {
    return z.segment(layout_.x_offset(k), layout_.n);
  }

  Vector flow(const Eigen::VectorXd& z, int k) const {
    const Vector w = state(z, k);
    const Vector x = input(z, k);
    return (spec_.Ry - w.dot(x)) * x;
  }

  Eigen::VectorXd defects(const Eigen::VectorXd& z) const {
    const int K = layout_.K;
    const Eigen::Index n = layout_.n;
    const double h = z(0) / K;
    Eigen::VectorXd d(n * K);
    Vector f_prev = flow(z, 0);
    for (int k = 0; k < K; ++k) {
      const Vector f_next = flow(z, k + 1);
      d.segment(k * n, n) =
          state(z, k + 1) - state(z, k) - 0.5 * h * (f_prev + f_next);
      f_prev = f_next;
    }
    return d;
  }

  // J(z)^T mu for the defect constraints.
  Eigen::VectorXd adjoint(const Eigen::VectorXd& z,
                          const Eigen::VectorXd& mu) const {
    const int K = layout_.K;
    const Eigen::Index n = layout_.n;
    const double h = z(0) / K;
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(layout_.size());

    double tf_accum = 0.0;
    for (int k = 0; k < K; ++k) {
      const auto mu_k = mu.segment(k * n, n);
      tf_accum += (flow(z, k) + flow(z, k + 1)).dot(mu_k);
    }
    grad(0) = -tf_accum / (2.0 * K);

    for (int j = 1; j <= K - 1; ++j) {
      const Vector x = input(z, j);
      const auto mu_prev = mu.segment((j - 1) * n, n);
      const auto mu_next = mu.segment(j * n, n);
      // d(defect_{j-1})/dw_j = I + (h/2) x x',  d(defect_j)/dw_j = -I + (h/2) x x'
      grad.segment(layout_.w_offset(j), n) =
          mu_prev - mu_next + 0.5 * h * x * x.dot(mu_prev + mu_next);
    }

    for (int j = 0; j <= K; ++j) {
      const Vector w = state(z, j);
      const Vector x = input(z, j);
      Vector m = Vector::Zero(n);
      if (j >= 1) m += mu.segment((j - 1) * n, n);
      if (j <= K - 1) m += mu.segment(j * n, n);
      // d(flow)/dx = (Ry - w'x) I - x w'; chain through -(h/2).
      grad.segment(layout_.x_offset(j), n) =
          -0.5 * h * ((spec_.Ry - w.dot(x)) * m - w * (x.dot(m)));
    }
    return grad;
  }

 private:
  const ProblemSpec& spec_;
  CnlpLayout layout_;
};

}  // namespace

SolverOptions cnlp_default_options() {
  SolverOptions opts;
  opts.grad_tol = 3e-6;
  opts.penalty_growth = 3.0;
  opts.max_outer = 80;
  return opts;
}

CnlpSolution cnlp_solve(const ProblemSpec& spec0, int K,
                        const SolverOptions& settings) {
  spec0.validate();
  if (K < 10) throw std::invalid_argument("cnlp_solve: K must be >= 10");

  if (spec0.dim() > 2) {
    const PlaneBasis basis = build_basis(spec0.w0, spec0.w_star);
    const ProblemSpec reduced = reduce_spec(spec0, basis);
    CnlpSolution sol = cnlp_solve(reduced, K, settings);
    for (auto& w : sol.states) w = lift(Eigen::Vector2d(w.head<2>()), basis);
    for (auto& x : sol.inputs) x = lift(Eigen::Vector2d(x.head<2>()), basis);
    return sol;
  }
  const ProblemSpec& spec = spec0;
  const Eigen::Index n = spec.dim();

  // Initial terminal time from a STRAIGHT run.
  const TeacherPolicy straight{PolicyKind::Straight, 720, 20};
  const TeachRunResult straight_run =
      run_teacher(straight, spec, 2'000'000, default_teaching_tol(spec));
  if (!straight_run.converged)
    throw std::runtime_error(
        "cnlp_solve: STRAIGHT did not terminate; cannot build the initial guess");
  const double tf0 = std::max(1e-2, spec.eta * straight_run.steps);

  CnlpTranscription problem(spec, K);
  const CnlpLayout& layout = problem.layout();

  Eigen::VectorXd z0(layout.size());
  z0(0) = tf0;
  for (int k = 1; k <= K - 1; ++k) {
    const double s = static_cast<double>(k) / K;
    z0.segment(layout.w_offset(k), n) = (1.0 - s) * spec.w0 + s * spec.w_star;
  }
  Vector last_x = Vector::Zero(n);
  for (int k = 0; k <= K; ++k) {
    const double s = static_cast<double>(k) / K;
    const Vector w = (1.0 - s) * spec.w0 + s * spec.w_star;
    if ((w - spec.w_star).norm() > 1e-12)
      last_x = straight_step(w, spec).x;
    z0.segment(layout.x_offset(k), n) = last_x;
  }

  // Diagonal variable scaling: defect derivatives are O(h/2) in the inputs
  // and O(1/K) in t_f but O(1) in the states, which leaves the merit
  // function too ill-conditioned for a first-order inner solver. Solving in
  // scaled variables evens the Jacobian blocks out.
  Eigen::VectorXd scale = Eigen::VectorXd::Ones(layout.size());
  scale(0) = 0.5 * K;
  const double input_scale = 2.0 * K / tf0;
  for (int k = 0; k <= K; ++k)
    scale.segment(layout.x_offset(k), n).setConstant(input_scale);
  const auto unscale = [&scale](const Eigen::VectorXd& z) {
    return Eigen::VectorXd(scale.cwiseProduct(z));
  };

  const auto objective = [&scale](const Eigen::VectorXd& z,
                                  Eigen::VectorXd* grad) -> double {
    if (grad) {
      grad->setZero(z.size());
      (*grad)(0) = scale(0);
    }
    return scale(0) * z(0);
  };
  const auto constraints = [&problem, &unscale](const Eigen::VectorXd& z) {
    return problem.defects(unscale(z));
  };
  const auto adjoint = [&problem, &unscale, &scale](const Eigen::VectorXd& z,
                                                    const Eigen::VectorXd& mu) {
    return Eigen::VectorXd(scale.cwiseProduct(problem.adjoint(unscale(z), mu)));
  };
  const auto projector = [&layout, &spec, &scale,
                          input_scale](const Eigen::VectorXd& z) {
    Eigen::VectorXd out = z;
    out(0) = std::max(out(0), 1e-3 / scale(0));
    const double radius = spec.Rx / input_scale;
    for (int k = 0; k <= layout.K; ++k) {
      auto block = out.segment(layout.x_offset(k), layout.n);
      const double norm = block.norm();
      if (norm > radius) block *= radius / norm;
    }
    return out;
  };

  const SolveOutcome out = augmented_lagrangian(
      objective, constraints, adjoint, projector,
      Eigen::VectorXd(z0.cwiseQuotient(scale)), settings);
  const Eigen::VectorXd point = unscale(out.point);

  CnlpSolution sol;
  sol.t_f = point(0);
  sol.converged = out.converged;
  sol.defect_norm = out.constraint_violation;
  sol.mesh_times.reserve(K + 1);
  sol.states.reserve(K + 1);
  sol.inputs.reserve(K + 1);
  for (int k = 0; k <= K; ++k) {
    sol.mesh_times.push_back(sol.t_f * k / K);
    sol.states.push_back(problem.state(point, k));
    sol.inputs.push_back(problem.input(point, k));
  }
  return sol;
}

}  // namespace teachopt
