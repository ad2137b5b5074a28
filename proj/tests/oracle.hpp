#pragma once

// Reference computations that share no code with the library: adaptive
// Gauss-Kronrod quadrature, Erlang tails from the Poisson sum, the piecewise
// survival of the inter-update time written out from its definition, and the
// stationary law by power iteration.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace oracle {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

namespace detail {

// 15-point Kronrod rule with its embedded 7-point Gauss rule.
inline constexpr std::array<double, 8> kXk{0.991455371120812639, 0.949107912342758525, 0.864864423359769073,
                                           0.741531185599394440, 0.586087235467691130, 0.405845151377397167,
                                           0.207784955007898468, 0.000000000000000000};
inline constexpr std::array<double, 8> kWk{0.022935322010529225, 0.063092092629978553, 0.104790010322250184,
                                           0.140653259715525919, 0.169004726639267903, 0.190350578064785410,
                                           0.204432940075298892, 0.209482141084727828};
inline constexpr std::array<double, 4> kWg{0.129484966168869693, 0.279705391489276668, 0.381830050505118945,
                                           0.417959183673469388};

struct Estimate {
  double kronrod;
  double error;
};

inline Estimate gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double k = kWk[7] * fc;
  double g = kWg[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double dx = h * kXk[static_cast<std::size_t>(i)];
    const double s = f(c - dx) + f(c + dx);
    k += kWk[static_cast<std::size_t>(i)] * s;
    if (i % 2 == 1) g += kWg[static_cast<std::size_t>(i / 2)] * s;
  }
  return {k * h, std::abs((k - g) * h)};
}

inline double adapt(const std::function<double(double)>& f, double a, double b, double tol, int depth) {
  const Estimate whole = gk15(f, a, b);
  // Below a few hundred ulps of the panel value the error estimate is roundoff.
  const double floor = 256.0 * std::numeric_limits<double>::epsilon() * std::abs(whole.kronrod);
  if (whole.error <= std::max(tol, floor) || depth >= 50 || b - a < 1e-14) return whole.kronrod;
  const double m = 0.5 * (a + b);
  return adapt(f, a, m, 0.5 * tol, depth + 1) + adapt(f, m, b, 0.5 * tol, depth + 1);
}

}  // namespace detail

// Adaptive quadrature on [a, b]; b may be infinite (mapped by x = a + t/(1-t)).
inline double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-13) {
  if (a == b) return 0.0;
  if (std::isinf(b)) {
    auto g = [&](double t) {
      const double one_minus = 1.0 - t;
      if (one_minus <= 0.0) return 0.0;
      const double x = a + t / one_minus;
      return f(x) / (one_minus * one_minus);
    };
    double sum = 0.0;
    const std::array<double, 6> cuts{0.0, 0.5, 0.8, 0.9, 0.97, 1.0};
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) sum += detail::adapt(g, cuts[i], cuts[i + 1], tol, 0);
    return sum;
  }
  return detail::adapt(f, a, b, tol, 0);
}

// Pr(Y_n > x) for Y_n ~ Erlang(n, mu): sum_{k<n} e^{-mu x}(mu x)^k / k!.
inline double erlang_tail(double mu, int n, double x) {
  if (n <= 0) return 0.0;
  if (x <= 0.0) return 1.0;
  const double y = mu * x;
  double s = 0.0;
  for (int k = 0; k < n; ++k) s += std::exp(-y + k * std::log(y) - std::lgamma(k + 1.0));
  return std::min(1.0, s);
}

inline double erlang_density(double mu, int n, double x) {
  if (x <= 0.0) return n == 1 ? mu : 0.0;
  return std::exp(n * std::log(mu) + (n - 1) * std::log(x) - mu * x - std::lgamma(static_cast<double>(n)));
}

// tau holds tau_1 >= ... >= tau_B. Survival of the inter-update time from
// post-update level j: the update fires once the age passes the threshold of
// the level reached, and level m is reached by age x iff m - j arrivals came.
inline double survival(double mu, const std::vector<double>& tau, int j, double x) {
  const int b = static_cast<int>(tau.size());
  if (x < tau[static_cast<std::size_t>(b - 1)]) return 1.0;
  // Smallest m with tau_m <= x: by age x the update has fired iff level m
  // was reached, i.e. at least m - j arrivals came.
  int m = b;
  while (m > 1 && tau[static_cast<std::size_t>(m - 2)] <= x) --m;
  return erlang_tail(mu, m - j, x);
}

struct Moments {
  double ex;
  double ex2;
  double epx;
};

// Integrates S, 2x S and p S with breakpoints at every threshold.
inline Moments moments(double mu, const std::vector<double>& tau, int j, const std::function<double(double)>& p) {
  std::vector<double> cuts{0.0};
  for (auto it = tau.rbegin(); it != tau.rend(); ++it) {
    if (*it > cuts.back()) cuts.push_back(*it);
  }
  Moments m{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    const double a = cuts[i];
    const double b = i + 1 < cuts.size() ? cuts[i + 1] : kInf;
    // Evaluate strictly inside so the piece's own survival branch applies.
    auto s = [&](double x) { return survival(mu, tau, j, std::min(std::max(x, a), std::nextafter(b, a))); };
    m.ex += integrate([&](double x) { return s(x); }, a, b);
    m.ex2 += integrate([&](double x) { return 2.0 * x * s(x); }, a, b);
    m.epx += integrate([&](double x) { return p(x) * s(x); }, a, b);
  }
  return m;
}

// Transition probabilities from the arrival counts: from post-update level j,
// the next update leaves level i exactly when the level reached before firing
// is i + 1.
inline std::vector<std::vector<double>> transitions(double mu, const std::vector<double>& tau) {
  const int b = static_cast<int>(tau.size());
  auto cdf = [&](int n, double x) { return 1.0 - erlang_tail(mu, n, x); };
  auto t_of = [&](int level) { return level == 0 ? kInf : tau[static_cast<std::size_t>(level - 1)]; };
  std::vector<std::vector<double>> t(static_cast<std::size_t>(b), std::vector<double>(static_cast<std::size_t>(b)));
  for (int j = 0; j < b; ++j) {
    for (int i = 0; i < b; ++i) {
      // The update fires at level >= i+1 iff i+1-j arrivals come before age tau_i.
      const double reach_i1 = i + 1 - j <= 0 ? 1.0 : (std::isinf(t_of(i)) ? 1.0 : cdf(i + 1 - j, t_of(i)));
      const double reach_i2 = i + 1 >= b ? 0.0 : (i + 2 - j <= 0 ? 1.0 : cdf(i + 2 - j, t_of(i + 1)));
      t[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = reach_i1 - reach_i2;
    }
  }
  return t;
}

inline std::vector<double> power_iteration(const std::vector<std::vector<double>>& t, int iterations = 200000) {
  const std::size_t n = t.size();
  std::vector<double> pi(n, 1.0 / static_cast<double>(n)), next(n);
  for (int it = 0; it < iterations; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < n; ++i) next[i] += pi[j] * t[j][i];
    }
    // Lazy chain (I + T)/2 has the same fixed point and never oscillates.
    double diff = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = 0.5 * (pi[i] + next[i]);
      diff = std::max(diff, std::abs(v - pi[i]));
      pi[i] = v;
    }
    if (diff < 1e-16) break;
  }
  double s = 0.0;
  for (double v : pi) s += v;
  for (double& v : pi) v /= s;
  return pi;
}

// Average penalty from the oracle pieces above.
inline double average_penalty(double mu, const std::vector<double>& tau, const std::function<double(double)>& p) {
  const auto pi = power_iteration(transitions(mu, tau));
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < pi.size(); ++j) {
    const Moments m = moments(mu, tau, static_cast<int>(j), p);
    num += pi[j] * m.epx;
    den += pi[j] * m.ex;
  }
  return num / den;
}

inline double average_age(double mu, const std::vector<double>& tau) {
  return average_penalty(mu, tau, [](double x) { return x; });
}

}  // namespace oracle
