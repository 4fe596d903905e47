#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "teachopt/pmp.hpp"

using namespace teachopt;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

ProblemSpec unit_spec() {
  ProblemSpec spec;
  spec.w0 = vec2(0, 1);
  spec.w_star = vec2(1, 0);
  spec.eta = 0.01;
  spec.Rx = 1.0;
  spec.Ry = 1.0;
  return spec;
}

double objective(const Vector& w, const Vector& p, const Vector& x, double Ry) {
  return (Ry - w.dot(x)) * p.dot(x);
}

// Independent oracle: dense sweep of x on the input sphere in the standard
// basis. A global minimizer always sits on the sphere for this objective.
double circle_oracle(const Vector& w, const Vector& p, const ProblemSpec& spec,
                     int samples = 65536) {
  double best = std::numeric_limits<double>::infinity();
  Vector x(2);
  for (int i = 0; i < samples; ++i) {
    const double t = 2.0 * M_PI * i / samples;
    x << spec.Rx * std::cos(t), spec.Rx * std::sin(t);
    best = std::min(best, objective(w, p, x, spec.Ry));
  }
  return best;
}

}  // namespace

TEST_CASE("hamiltonian basics") {
  const ProblemSpec spec = unit_spec();
  // Regime-I closed form: w = 0, ||p|| = 1/(Rx Ry), x = -Rx p/||p||  ->  H = 0.
  const Vector w = vec2(0, 0);
  const Vector p = vec2(1, 0);  // ||p|| = 1/(Rx Ry) = 1
  const Vector x = vec2(-1, 0);
  CHECK(hamiltonian(w, p, x, spec.Ry) == doctest::Approx(0.0).epsilon(1e-14));

  CHECK(hamiltonian(vec2(0.4, -0.2), vec2(2, 1), vec2(0, 0), 1.0) == 1.0);
  CHECK_THROWS_AS(hamiltonian(w, Vector::Zero(3), x, 1.0), std::invalid_argument);
}

TEST_CASE("classify_regime examples") {
  const ProblemSpec spec = unit_spec();
  CHECK(classify_regime(vec2(0, 0), vec2(1, 0), spec) == Regime::I_Origin);
  CHECK(classify_regime(vec2(0.4, 0), vec2(0.8, 0), spec) ==
        Regime::II_PositiveAligned);
  // R = Ry/(2 Rx) = 0.5, ||w|| = 0.3 inside the ball.
  CHECK(classify_regime(vec2(0.3, 0), vec2(-1.2, 0), spec) ==
        Regime::III_NegAlignedInside);
  CHECK(classify_regime(vec2(0.7, 0), vec2(-0.1, 0), spec) ==
        Regime::IV_NegAlignedOutside);
  CHECK(classify_regime(vec2(1, 0), vec2(0, 1), spec) == Regime::V_General);
  CHECK_THROWS_AS(classify_regime(vec2(1, 0), vec2(0, 0), spec),
                  std::invalid_argument);
}

TEST_CASE("qcqp closed forms for regimes I and II") {
  const ProblemSpec spec = unit_spec();

  SUBCASE("regime I") {
    const QcqpResult q = qcqp_minimize(vec2(0, 0), vec2(1, 0), spec);
    CHECK((q.x - vec2(-1, 0)).norm() <= 1e-12);
    CHECK(q.value == doctest::Approx(-1.0).epsilon(1e-12));
  }

  SUBCASE("regime II") {
    const QcqpResult q = qcqp_minimize(vec2(1, 0), vec2(0.5, 0), spec);
    CHECK((q.x - vec2(-1, 0)).norm() <= 1e-12);
    CHECK(q.value == doctest::Approx(-1.0).epsilon(1e-12));
    // alpha = Rx ||w|| (Ry + Rx ||w||) = 2 for the scaled costate.
    const Vector p_scaled = costate_scale(vec2(1, 0), vec2(1, 0), spec);
    CHECK((vec2(1, 0) - 2.0 * p_scaled).norm() <= 1e-10);
  }

  SUBCASE("regime V example stays in the span in n = 5") {
    Vector w = Vector::Zero(5);
    Vector p = Vector::Zero(5);
    w(0) = 1.0;
    p(1) = 1.0;
    const QcqpResult q = qcqp_minimize(w, p, spec);
    for (int i = 2; i < 5; ++i) CHECK(std::abs(q.x(i)) <= 1e-12);
    // Against the plane oracle.
    ProblemSpec spec2 = spec;
    const double oracle = circle_oracle(vec2(1, 0), vec2(0, 1), spec2);
    CHECK(q.value <= oracle + 1e-8);
  }
}

TEST_CASE("qcqp matches the dense circle oracle in every regime") {
  const ProblemSpec spec = unit_spec();
  std::mt19937_64 rng(41);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.05, 1.0);
  const double R = spec.Ry / (2.0 * spec.Rx);

  auto check_pair = [&](const Vector& w, const Vector& p) {
    const QcqpResult q = qcqp_minimize(w, p, spec);
    CHECK(q.x.norm() <= spec.Rx + 1e-9);
    const double oracle = circle_oracle(w, p, spec);
    CHECK(q.value <= oracle + 1e-6);
    CHECK(q.value >= oracle - 1e-6);
    // Reported value is the objective at the reported x.
    CHECK(objective(w, p, q.x, spec.Ry) == doctest::Approx(q.value).epsilon(1e-12));
  };

  for (int i = 0; i < 200; ++i) {
    Vector dir = vec2(gauss(rng), gauss(rng));
    while (dir.norm() < 1e-3) dir = vec2(gauss(rng), gauss(rng));
    dir /= dir.norm();
    const double scale = unif(rng) * 2.0;

    check_pair(vec2(0, 0), scale * dir);                      // I
    check_pair(unif(rng) * dir, scale * dir);                 // II
    check_pair(unif(rng) * R * dir, -scale * dir);            // III
    check_pair((R + unif(rng)) * dir, -scale * dir);          // IV
    check_pair(vec2(gauss(rng), gauss(rng)),
               vec2(gauss(rng), gauss(rng)));                 // mostly V
  }
}

TEST_CASE("qcqp scaling in p") {
  const ProblemSpec spec = unit_spec();
  std::mt19937_64 rng(43);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const Vector w = vec2(gauss(rng), gauss(rng));
    Vector p = vec2(gauss(rng), gauss(rng));
    if (p.norm() < 1e-3) continue;
    const double sigma = 0.1 + 3.0 * std::abs(gauss(rng));
    const QcqpResult a = qcqp_minimize(w, p, spec);
    const QcqpResult b = qcqp_minimize(w, sigma * p, spec);
    CHECK((a.x - b.x).norm() <= 1e-9);
    CHECK(b.value == doctest::Approx(sigma * a.value).epsilon(1e-9));
  }
}

TEST_CASE("qcqp minimizers confined to span{w, p}") {
  const ProblemSpec spec = unit_spec();
  std::mt19937_64 rng(47);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int n = 3; n <= 10; ++n) {
    for (int trial = 0; trial < 40; ++trial) {
      Vector w(n), p(n);
      for (int i = 0; i < n; ++i) {
        w(i) = gauss(rng);
        p(i) = gauss(rng);
      }
      const QcqpResult q = qcqp_minimize(w, p, spec);
      // Remove the in-plane part and check the remainder vanishes.
      Vector b1 = w / w.norm();
      Vector r2 = p - b1.dot(p) * b1;
      Vector out_of_plane = q.x - b1.dot(q.x) * b1;
      if (r2.norm() > 1e-12) {
        const Vector b2 = r2 / r2.norm();
        out_of_plane -= b2.dot(q.x) * b2;
      }
      CHECK(out_of_plane.norm() <= 1e-9);
    }
  }
}

TEST_CASE("regime_closed_form_input examples") {
  const ProblemSpec spec = unit_spec();

  CHECK((regime_closed_form_input(Regime::I_Origin, vec2(0, 0), vec2(0, 2), spec) -
         vec2(0, -1)).norm() <= 1e-14);
  CHECK((regime_closed_form_input(Regime::III_NegAlignedInside, vec2(0.3, 0),
                                  vec2(-1, 0), spec) -
         vec2(1, 0)).norm() <= 1e-14);
  // Radial regime-IV input: w'x = Ry/2.
  const Vector x4 = regime_closed_form_input(Regime::IV_NegAlignedOutside,
                                             vec2(1, 0), vec2(-1, 0), spec);
  CHECK((x4 - vec2(0.5, 0)).norm() <= 1e-14);

  // Infeasible regime-IV request inside the ball.
  CHECK_THROWS_AS(regime_closed_form_input(Regime::IV_NegAlignedOutside,
                                           vec2(0.3, 0), vec2(-1, 0), spec),
                  std::invalid_argument);

  // Supplying a target picks the max-curvature solution.
  const Vector x4t = regime_closed_form_input(
      Regime::IV_NegAlignedOutside, vec2(1, 0), vec2(-1, 0), spec,
      std::optional<Vector>(vec2(0, 2)));
  CHECK(x4t(0) == doctest::Approx(0.5));
  CHECK(x4t(1) == doctest::Approx(std::sqrt(0.75)));
}

TEST_CASE("costate_scale pins the QCQP value at -1") {
  const ProblemSpec spec = unit_spec();

  SUBCASE("origin closed form") {
    const Vector p = costate_scale(vec2(0, 0), vec2(1, 0), spec);
    CHECK(p.norm() == doctest::Approx(1.0 / (spec.Rx * spec.Ry)).epsilon(1e-12));
    CHECK(qcqp_minimize(vec2(0, 0), p, spec).value ==
          doctest::Approx(-1.0).epsilon(1e-10));
  }

  SUBCASE("objective linear in p") {
    const Vector p = costate_scale(vec2(0.7, -0.2), vec2(0.3, 0.9), spec);
    CHECK(qcqp_minimize(vec2(0.7, -0.2), 2.0 * p, spec).value ==
          doctest::Approx(-2.0).epsilon(1e-9));
  }

  SUBCASE("general position against the circle oracle") {
    const Vector w = vec2(1, 0);
    const Vector p_hat = vec2(0, 1);
    const double m = circle_oracle(w, p_hat, spec, 1 << 20);
    const Vector p = costate_scale(w, p_hat, spec);
    CHECK(p.norm() == doctest::Approx(-1.0 / m).epsilon(1e-5));
    CHECK(qcqp_minimize(w, p, spec).value == doctest::Approx(-1.0).epsilon(1e-10));
  }
}

TEST_CASE("evaluate_pmp_point bundles the pointwise solution") {
  const ProblemSpec spec = unit_spec();
  const Vector p = costate_scale(vec2(0.7, -0.2), vec2(0.3, 0.9), spec);
  const PMPPoint point = evaluate_pmp_point(vec2(0.7, -0.2), p, spec);
  CHECK(point.regime == Regime::V_General);
  CHECK(point.value == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(point.x.norm() <= spec.Rx + 1e-9);
  CHECK(objective(point.w, point.p, point.x, spec.Ry) ==
        doctest::Approx(point.value).epsilon(1e-12));
}

TEST_CASE("regime4_time_to_target") {
  CHECK(regime4_time_to_target(vec2(0.6, 0), vec2(0, 0.6), 1.0) == 0.0);
  CHECK(regime4_time_to_target(vec2(0.5, 0), vec2(1, 0), 1.0) ==
        doctest::Approx(1.5).epsilon(1e-14));
  CHECK_THROWS_AS(regime4_time_to_target(vec2(1, 0), vec2(0.5, 0), 1.0),
                  std::invalid_argument);

  // RK4 oracle on the radial regime-IV flow from ||w|| = 0.5 to ||w|| = 1.
  const ProblemSpec spec = unit_spec();
  Vector w = vec2(0.5, 0);
  const double dt = 1e-5;
  double elapsed = 0.0;
  const auto rhs = [&](const Vector& z) -> Vector {
    const Vector x = (spec.Ry / (2.0 * z.squaredNorm())) * z;
    return (spec.Ry - z.dot(x)) * x;
  };
  while (w.norm() < 1.0) {
    const Vector k1 = rhs(w);
    const Vector k2 = rhs(w + 0.5 * dt * k1);
    const Vector k3 = rhs(w + 0.5 * dt * k2);
    const Vector k4 = rhs(w + dt * k3);
    w += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    elapsed += dt;
  }
  CHECK(elapsed == doctest::Approx(1.5).epsilon(1e-4));
}

TEST_CASE("regime4_max_curvature_control") {
  const ProblemSpec spec = unit_spec();

  SUBCASE("direct substitution") {
    const Vector x = regime4_max_curvature_control(vec2(1, 0), vec2(0, 2), spec);
    CHECK(x(0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(x(1) == doctest::Approx(std::sqrt(0.75)).epsilon(1e-14));
    CHECK(x.norm() == doctest::Approx(spec.Rx).epsilon(1e-14));
    CHECK(vec2(1, 0).dot(x) == doctest::Approx(spec.Ry / 2.0).epsilon(1e-14));
  }

  SUBCASE("tangential part vanishes on the transition sphere") {
    const Vector w = vec2(0.5, 0);  // ||w|| = Ry/(2 Rx)
    const Vector x = regime4_max_curvature_control(w, vec2(0, 2), spec);
    CHECK((x - vec2(1, 0)).norm() <= 1e-7);
  }

  SUBCASE("preconditions") {
    CHECK_THROWS_AS(regime4_max_curvature_control(vec2(0.3, 0), vec2(0, 2), spec),
                    std::invalid_argument);
    CHECK_THROWS_AS(regime4_max_curvature_control(vec2(1, 0), vec2(2, 0), spec),
                    std::invalid_argument);
  }

  SUBCASE("angular rate matches the curvature of the integrated flow") {
    // In this regime w_dot = (Ry/2) x, so |theta_dot| =
    // (Ry/2) sqrt(Rx^2 - (Ry/(2||w||))^2) / ||w||.
    // Integrate the max-curvature flow and finite-difference the angle.
    const Vector target = vec2(0, 3);
    Vector w = vec2(0.8, 0);
    const double dt = 1e-5;
    const auto rhs = [&](const Vector& z) -> Vector {
      const Vector x = regime4_max_curvature_control(z, target, spec);
      return (spec.Ry - z.dot(x)) * x;
    };
    for (int i = 0; i < 2000; ++i) {
      const double theta_before = std::atan2(w(1), w(0));
      const double norm_before = w.norm();
      const Vector k1 = rhs(w);
      const Vector k2 = rhs(w + 0.5 * dt * k1);
      const Vector k3 = rhs(w + 0.5 * dt * k2);
      const Vector k4 = rhs(w + dt * k3);
      w += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      if (i % 400 == 0) {
        const double rate = (std::atan2(w(1), w(0)) - theta_before) / dt;
        const double expected =
            0.5 * spec.Ry *
            std::sqrt(spec.Rx * spec.Rx -
                      std::pow(spec.Ry / (2.0 * norm_before), 2)) /
            norm_before;
        CHECK(rate == doctest::Approx(expected).epsilon(1e-3));
      }
    }
  }
}
