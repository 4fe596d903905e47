#pragma once

#include <optional>

#include "teachopt/problem.hpp"

namespace teachopt {

/// Structural classes of (w, p) pairs with distinct pointwise solutions.
enum class Regime {
  I_Origin,
  II_PositiveAligned,
  III_NegAlignedInside,
  IV_NegAlignedOutside,
  V_General
};

const char* regime_name(Regime r);

inline constexpr double kAlignTol = 1e-8;

/// Paired state/co-state sample with its pointwise-optimal input.
struct PMPPoint {
  Vector w;
  Vector p;
  Vector x;
  double value = 0.0;
  Regime regime = Regime::V_General;
};

/// H(w, p, x, y) = p'((y - w'x) x) + 1.
double hamiltonian(const Vector& w, const Vector& p, const Vector& x, double y);

/// Bundles the pointwise solution at (w, p): regime label, optimal input,
/// and the minimized QCQP objective.
PMPPoint evaluate_pmp_point(const Vector& w, const Vector& p,
                            const ProblemSpec& spec,
                            double tol_align = kAlignTol);

struct QcqpResult {
  Vector x;
  double value;
};

/// Global minimizer of (Ry - w'x)(p'x) over ||x|| <= Rx. Regimes I-IV use
/// closed forms; the general case reduces to span{w, p} and sweeps the
/// boundary angle with Newton polish on every derivative sign change.
QcqpResult qcqp_minimize(const Vector& w, const Vector& p,
                         const ProblemSpec& spec, double tol_align = kAlignTol,
                         int theta_samples = 4096);

Regime classify_regime(const Vector& w, const Vector& p,
                       const ProblemSpec& spec, double tol_align = kAlignTol);

/// Closed-form pointwise input for regimes I-IV. Regime IV is non-unique;
/// a supplied target selects the max-curvature solution, otherwise the
/// radial one.
Vector regime_closed_form_input(Regime regime, const Vector& w, const Vector& p,
                                const ProblemSpec& spec,
                                const std::optional<Vector>& target = {});

/// Scales the unit co-state direction so the QCQP minimum equals -1.
Vector costate_scale(const Vector& w, const Vector& p_hat,
                     const ProblemSpec& spec);

/// Exact transit time implied by d||w||^2/dt = Ry^2/2.
double regime4_time_to_target(const Vector& w, const Vector& w_star, double Ry);

/// Input maximizing the angular rate toward w_star subject to w'x = Ry/2,
/// ||x|| = Rx.
Vector regime4_max_curvature_control(const Vector& w, const Vector& w_star,
                                     const ProblemSpec& spec);

}  // namespace teachopt
