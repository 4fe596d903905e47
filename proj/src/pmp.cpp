#include "teachopt/pmp.hpp"

#include <array>
#include <algorithm>
#include <limits>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace teachopt {

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::I_Origin: return "I";
    case Regime::II_PositiveAligned: return "II";
    case Regime::III_NegAlignedInside: return "III";
    case Regime::IV_NegAlignedOutside: return "IV";
    case Regime::V_General: return "V";
  }
  return "?";
}

double hamiltonian(const Vector& w, const Vector& p, const Vector& x, double y) {
  if (w.size() != p.size() || w.size() != x.size())
    throw std::invalid_argument("hamiltonian: dimension mismatch");
  return p.dot((y - w.dot(x)) * x) + 1.0;
}

Regime classify_regime(const Vector& w, const Vector& p,
                       const ProblemSpec& spec, double tol_align) {
  const double pn = p.norm();
  if (pn == 0.0)
    throw std::invalid_argument("classify_regime: p must be nonzero");
  const double wn = w.norm();
  if (wn <= tol_align) return Regime::I_Origin;

  const Vector w_hat = w / wn;
  const double radial = w_hat.dot(p);
  const double cross = (p - radial * w_hat).norm();  // |p| sin(angle)
  if (cross <= tol_align * pn) {
    if (radial > 0.0) return Regime::II_PositiveAligned;
    const double R = spec.Ry / (2.0 * spec.Rx);
    return (wn <= R) ? Regime::III_NegAlignedInside
                     : Regime::IV_NegAlignedOutside;
  }
  return Regime::V_General;
}

namespace {

constexpr int kDefaultThetaSamples = 4096;

struct ThetaTables {
  std::vector<double> cos1, sin1, cos2, sin2;
  explicit ThetaTables(int n) : cos1(n), sin1(n), cos2(n), sin2(n) {
    for (int i = 0; i < n; ++i) {
      const double t = 2.0 * M_PI * i / n;
      cos1[i] = std::cos(t);
      sin1[i] = std::sin(t);
      cos2[i] = std::cos(2.0 * t);
      sin2[i] = std::sin(2.0 * t);
    }
  }
};

const ThetaTables& default_tables() {
  static const ThetaTables tables(kDefaultThetaSamples);
  return tables;
}

// In-plane boundary objective for the general regime:
//   G(theta) = Rx (Ry - gamma Rx cos)(alpha cos + beta sin)
// with derivative
//   G'(theta)/Rx = gamma Rx (alpha sin2t - beta cos2t) + Ry (beta cos - alpha sin).
struct PlaneObjective {
  double Rx, Ry, gamma, alpha, beta;

  double value(double cos_t, double sin_t) const {
    return Rx * (Ry - gamma * Rx * cos_t) * (alpha * cos_t + beta * sin_t);
  }
  double deriv(double cos_t, double sin_t, double cos_2t, double sin_2t) const {
    return gamma * Rx * (alpha * sin_2t - beta * cos_2t) +
           Ry * (beta * cos_t - alpha * sin_t);
  }
  double deriv(double theta) const {
    return deriv(std::cos(theta), std::sin(theta), std::cos(2.0 * theta),
                 std::sin(2.0 * theta));
  }
  double deriv2(double theta) const {
    const double c = std::cos(theta), s = std::sin(theta);
    const double c2 = std::cos(2.0 * theta), s2 = std::sin(2.0 * theta);
    return 2.0 * gamma * Rx * (alpha * c2 + beta * s2) -
           Ry * (beta * s + alpha * c);
  }
};

// Newton iteration on G' = 0 inside a sign-change bracket, guarded by
// bisection.
double polish_root(const PlaneObjective& obj, double lo, double hi) {
  double theta = 0.5 * (lo + hi);
  for (int it = 0; it < 40; ++it) {
    const double d = obj.deriv(theta);
    if (d < 0.0)
      lo = theta;
    else
      hi = theta;
    const double d2 = obj.deriv2(theta);
    double next = (d2 != 0.0) ? theta - d / d2 : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - theta) < 1e-15) return next;
    theta = next;
  }
  return theta;
}

}  // namespace

QcqpResult qcqp_minimize(const Vector& w, const Vector& p,
                         const ProblemSpec& spec, double tol_align,
                         int theta_samples) {
  if (p.norm() == 0.0)
    throw std::invalid_argument("qcqp_minimize: p must be nonzero");
  if (theta_samples < 16)
    throw std::invalid_argument("qcqp_minimize: theta_samples must be >= 16");

  const Regime regime = classify_regime(w, p, spec, tol_align);
  Vector x;
  if (regime != Regime::V_General) {
    x = regime_closed_form_input(regime, w, p, spec);
  } else {
    const double gamma = w.norm();
    const Vector w_hat = w / gamma;
    const double alpha = p.dot(w_hat);
    const Vector u_raw = p - alpha * w_hat;
    const double beta = u_raw.norm();  // > 0 in the general regime
    const Vector u_hat = u_raw / beta;
    const PlaneObjective obj{spec.Rx, spec.Ry, gamma, alpha, beta};

    // Sweep the derivative; every - to + crossing brackets a local minimum.
    const bool use_tables = (theta_samples == kDefaultThetaSamples);
    const ThetaTables* tables = use_tables ? &default_tables() : nullptr;
    const double dtheta = 2.0 * M_PI / theta_samples;

    double prev_d;
    if (use_tables)
      prev_d = obj.deriv(tables->cos1[0], tables->sin1[0], tables->cos2[0],
                         tables->sin2[0]);
    else
      prev_d = obj.deriv(0.0);

    double best_theta = 0.0;
    double best_value = std::numeric_limits<double>::infinity();
    double grid_best_theta = 0.0;
    double grid_best_value = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= theta_samples; ++i) {
      const int j = (i == theta_samples) ? 0 : i;
      double d;
      if (use_tables)
        d = obj.deriv(tables->cos1[j], tables->sin1[j], tables->cos2[j],
                      tables->sin2[j]);
      else
        d = obj.deriv(dtheta * j);
      if (prev_d < 0.0 && d >= 0.0) {
        const double theta =
            polish_root(obj, dtheta * (i - 1), dtheta * i);
        const double value = obj.value(std::cos(theta), std::sin(theta));
        if (value < best_value) {
          best_value = value;
          best_theta = theta;
        }
      }
      prev_d = d;
      const double gv = use_tables
                            ? obj.value(tables->cos1[j], tables->sin1[j])
                            : obj.value(std::cos(dtheta * j), std::sin(dtheta * j));
      if (gv < grid_best_value) {
        grid_best_value = gv;
        grid_best_theta = dtheta * j;
      }
    }
    if (grid_best_value < best_value) {
      best_value = grid_best_value;
      best_theta = grid_best_theta;
    }

    x = spec.Rx * (std::cos(best_theta) * w_hat + std::sin(best_theta) * u_hat);
  }

  const double value = (spec.Ry - w.dot(x)) * p.dot(x);
  return {std::move(x), value};
}

Vector regime_closed_form_input(Regime regime, const Vector& w, const Vector& p,
                                const ProblemSpec& spec,
                                const std::optional<Vector>& target) {
  switch (regime) {
    case Regime::I_Origin: {
      const double pn = p.norm();
      if (pn == 0.0)
        throw std::invalid_argument("regime I input: p must be nonzero");
      return -(spec.Rx / pn) * p;
    }
    case Regime::II_PositiveAligned: {
      const double wn = w.norm();
      if (wn == 0.0)
        throw std::invalid_argument("regime II input: w must be nonzero");
      return -(spec.Rx / wn) * w;
    }
    case Regime::III_NegAlignedInside: {
      const double wn = w.norm();
      if (wn == 0.0)
        throw std::invalid_argument("regime III input: w must be nonzero");
      return (spec.Rx / wn) * w;
    }
    case Regime::IV_NegAlignedOutside: {
      const double wn = w.norm();
      // Relative slack keeps states sitting on the transition sphere valid.
      if (wn * spec.Rx * 2.0 < spec.Ry * (1.0 - 1e-12))
        throw std::invalid_argument(
            "regime IV input: w'x = Ry/2 infeasible inside the ball");
      if (target) {
        const Vector& ws = *target;
        const Vector ortho = ws - (w.dot(ws) / (wn * wn)) * w;
        if (ortho.norm() > 1e-12 * std::max(1.0, ws.norm()))
          return regime4_max_curvature_control(w, ws, spec);
      }
      return (spec.Ry / (2.0 * wn * wn)) * w;
    }
    case Regime::V_General:
      throw std::invalid_argument(
          "regime_closed_form_input: no closed form in the general regime");
  }
  throw std::invalid_argument("regime_closed_form_input: unknown regime");
}

PMPPoint evaluate_pmp_point(const Vector& w, const Vector& p,
                            const ProblemSpec& spec, double tol_align) {
  PMPPoint point;
  point.w = w;
  point.p = p;
  point.regime = classify_regime(w, p, spec, tol_align);
  QcqpResult q = qcqp_minimize(w, p, spec, tol_align);
  point.x = std::move(q.x);
  point.value = q.value;
  return point;
}

Vector costate_scale(const Vector& w, const Vector& p_hat,
                     const ProblemSpec& spec) {
  if (p_hat.norm() == 0.0)
    throw std::invalid_argument("costate_scale: direction must be nonzero");
  const double m = qcqp_minimize(w, p_hat, spec).value;
  if (!(m < 0.0))
    throw std::runtime_error("costate_scale: QCQP minimum must be negative");
  return (-1.0 / m) * p_hat;
}

double regime4_time_to_target(const Vector& w, const Vector& w_star, double Ry) {
  if (!(Ry > 0.0))
    throw std::invalid_argument("regime4_time_to_target: Ry must be positive");
  const double wn2 = w.squaredNorm();
  const double ws2 = w_star.squaredNorm();
  if (ws2 < wn2)
    throw std::invalid_argument(
        "regime4_time_to_target: target norm must not shrink");
  return 2.0 * (ws2 - wn2) / (Ry * Ry);
}

Vector regime4_max_curvature_control(const Vector& w, const Vector& w_star,
                                     const ProblemSpec& spec) {
  const double wn = w.norm();
  if (wn * 2.0 * spec.Rx < spec.Ry * (1.0 - 1e-12))
    throw std::invalid_argument(
        "regime4_max_curvature_control: requires ||w|| >= Ry/(2 Rx)");
  const Vector w_hat = w / wn;
  const Vector ortho = w_star - w_hat.dot(w_star) * w_hat;
  const double on = ortho.norm();
  if (on <= 1e-12 * std::max(1.0, w_star.norm()))
    throw std::invalid_argument(
        "regime4_max_curvature_control: w and w_star must be independent");
  const double radial = spec.Ry / (2.0 * wn);
  const double tangential =
      std::sqrt(std::max(0.0, spec.Rx * spec.Rx - radial * radial));
  return radial * w_hat + tangential * (ortho / on);
}

}  // namespace teachopt
