#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "aoi/error.hpp"
#include "aoi/model.hpp"

namespace aoi {

// Upper integration limit marker. Integrals to kInfinity are closed analytically.
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Waiting time Y_i for i arrivals of a Poisson(rate) process. Orders i <= 0
// denote the degenerate Y_i = 0.
struct ErlangKernel {
  double rate;
  int order;

  ErlangKernel(double rate_, int order_) : rate(rate_), order(order_) {
    if (!std::isfinite(rate) || rate <= 0.0) {
      throw Error(ErrorCode::kInvalidArgument, "Erlang rate must be positive and finite");
    }
  }
};

namespace detail {

// Regularized incomplete gamma pair for integer order n >= 1 at y >= 0:
// lower = P(n, y) = Pr(Y_n <= y / rate), upper = Q(n, y) = e^{-y} sum_{k<n} y^k / k!.
// The smaller of the two is evaluated directly and the other as its complement.
struct GammaSplit {
  double lower;
  double upper;
};

inline GammaSplit regularized_gamma(int n, double y) {
  if (y == 0.0) return {0.0, 1.0};
  if (std::isinf(y)) return {1.0, 0.0};
  if (y < static_cast<double>(n)) {
    // P(n, y) = e^{-y} y^n / n! * sum_{k>=0} y^k / ((n+1)...(n+k)); terms shrink geometrically.
    double lead = std::exp(-y);
    for (int k = 1; k <= n; ++k) lead *= y / k;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 10000; ++k) {
      term *= y / (n + k);
      sum += term;
      if (term < 1e-17 * sum) break;
    }
    const double p = lead * sum;
    return {p, 1.0 - p};
  }
  double term = std::exp(-y);
  double q = term;
  for (int k = 1; k < n; ++k) {
    term *= y / k;
    q += term;
  }
  return {1.0 - q, q};
}

// Q(n, ya) - Q(n, yb) for 0 <= ya <= yb, taken from whichever tails were evaluated directly.
inline double upper_tail_drop(int n, double ya, double yb) {
  const GammaSplit a = regularized_gamma(n, ya);
  const GammaSplit b = regularized_gamma(n, yb);
  const bool lower_direct = yb < static_cast<double>(n);
  const double d = lower_direct ? b.lower - a.lower : a.upper - b.upper;
  return std::max(d, 0.0);
}

inline void check_interval(double a, double b) {
  if (!(a >= 0.0) || !(a <= b) || std::isinf(a)) {
    throw Error(ErrorCode::kInvalidInterval, "need 0 <= a <= b with finite a");
  }
}

}  // namespace detail

inline double erlang_cdf(const ErlangKernel& k, double x) {
  if (!(x >= 0.0)) throw Error(ErrorCode::kNegativeArgument, "Erlang CDF needs x >= 0");
  if (k.order <= 0) return 1.0;
  return detail::regularized_gamma(k.order, k.rate * x).lower;
}

inline double erlang_survival(const ErlangKernel& k, double x) {
  if (!(x >= 0.0)) throw Error(ErrorCode::kNegativeArgument, "Erlang survival needs x >= 0");
  if (k.order <= 0) return 0.0;
  return detail::regularized_gamma(k.order, k.rate * x).upper;
}

// int_a^b x^degree Pr(Y_i > x) dx, exact up to rounding.
//
// With y = rate * x the survival is Q(i, y) = e^{-y} sum_{v<i} y^v / v!, so
//   int_a^b x^d Q(i, rate x) dx = rate^{-(d+1)} sum_{v<i} (v+d)!/v! [Q(v+d+1, rate a) - Q(v+d+1, rate b)].
// b may be kInfinity; every term then vanishes analytically at the upper limit.
// For order <= 0 the survival is identically zero and so is the integral.
inline double survival_weighted_integral(const ErlangKernel& k, double a, double b, int degree) {
  detail::check_interval(a, b);
  if (degree < 0) throw Error(ErrorCode::kInvalidArgument, "weight degree must be >= 0");
  if (a == b || k.order <= 0) return 0.0;
  const double ya = k.rate * a;
  const double yb = k.rate * b;
  double sum = 0.0;
  for (int v = 0; v < k.order; ++v) {
    double rising = 1.0;  // (v+d)! / v!
    for (int m = 1; m <= degree; ++m) rising *= static_cast<double>(v + m);
    sum += rising * detail::upper_tail_drop(v + degree + 1, ya, yb);
  }
  return sum / ipow(k.rate, degree + 1);
}

// int_a^b p(x) Pr(Y_i > x) dx for a polynomial penalty.
inline double penalty_weighted_integral(const ErlangKernel& k, double a, double b, const PenaltySpec& p) {
  detail::check_interval(a, b);
  double sum = 0.0;
  for (const auto& term : p.terms()) {
    sum += term.coefficient * survival_weighted_integral(k, a, b, term.exponent);
  }
  return sum;
}

}  // namespace aoi
