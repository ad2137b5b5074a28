#pragma once

#include <algorithm>
#include <cmath>
#include <utility>

#include "aoi/error.hpp"

namespace aoi {

// Principal branch W0(z) for z >= 0 by Halley iteration from log(1 + z).
inline double lambert_w0(double z, double tolerance = 1e-12) {
  if (!(z >= 0.0) || std::isinf(z)) throw Error(ErrorCode::kInvalidArgument, "lambert_w0 needs finite z >= 0");
  if (z == 0.0) return 0.0;
  double w = std::log1p(z);
  const double scale = std::max(1.0, z);
  for (int it = 0; it < 100; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - z;
    if (std::abs(f) <= tolerance * scale) return w;
    const double wp1 = w + 1.0;
    const double step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
    w -= step;
    if (step == 0.0) break;
  }
  const double residual = std::abs(w * std::exp(w) - z);
  if (residual <= tolerance * scale) return w;
  throw Error(ErrorCode::kNonConvergence, "Halley iteration for W0 did not converge");
}

// Average age of the single-threshold policy with a unit battery.
inline double b1_average_age(double mu_h, double tau1) {
  const double a = mu_h * tau1;
  const double e = std::exp(-a);
  return (0.5 * a * a + e * (a + 1.0)) / (mu_h * (a + e));
}

struct B1Optimum {
  double tau1;
  double avg_age;
};

// Unit battery optimum: tau1* = avg age* = 2 W(1/sqrt 2) / mu_h.
inline B1Optimum b1_optimal(double mu_h) {
  if (!(mu_h > 0.0)) throw Error(ErrorCode::kInvalidArgument, "harvest rate must be positive");
  const double t = 2.0 * lambert_w0(1.0 / std::sqrt(2.0)) / mu_h;
  return {t, t};
}

// Average age for B = 2 in closed form, with a_i = mu tau_i and
// rho = e^{-a1} / (1 - a1 e^{-a1}).
inline double b2_average_age(double mu_h, double tau1, double tau2) {
  if (tau1 < tau2) throw Error(ErrorCode::kNotMonotone, "need tau1 >= tau2");
  const double a1 = mu_h * tau1;
  const double a2 = mu_h * tau2;
  const double e1 = std::exp(-a1);
  const double e2 = std::exp(-a2);
  const double rho = e1 / (1.0 - e1 * a1);
  const double num = a2 * a2 / 2.0 + e2 * (a2 + 1.0 + rho * (a2 * a2 + 2.0 * a2 + 2.0)) -
                     e1 * (a1 + 1.0 + rho * (a1 * a1 + a1 + 1.0));
  const double den = mu_h * (a2 + e2 * (1.0 + rho * (a2 + 1.0)) - e1 * (1.0 + rho * a1));
  return num / den;
}

}  // namespace aoi
