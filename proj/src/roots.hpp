#pragma once

#include <array>
#include <cmath>

namespace teachopt::detail {

struct QuadraticRoots {
  std::array<double, 2> root{};
  int count = 0;
};

// Real roots of a*t^2 + b*t + c = 0 using the numerically stable split.
// clamp_discriminant treats a slightly negative discriminant as zero, for
// cases where it is nonnegative in exact arithmetic.
inline QuadraticRoots solve_quadratic(double a, double b, double c,
                                      bool clamp_discriminant = false) {
  QuadraticRoots out;
  if (a == 0.0) {
    if (b != 0.0) {
      out.root[0] = -c / b;
      out.count = 1;
    }
    return out;
  }
  double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) {
    if (!clamp_discriminant) return out;
    disc = 0.0;
  }
  const double s = std::sqrt(disc);
  const double q = -0.5 * (b + std::copysign(s, b));
  if (q == 0.0) {
    out.root[0] = 0.0;
    out.count = 1;
    return out;
  }
  out.root[0] = q / a;
  out.root[1] = c / q;
  out.count = 2;
  return out;
}

}  // namespace teachopt::detail
