#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "aoi/erlang.hpp"
#include "aoi/error.hpp"
#include "aoi/model.hpp"

namespace aoi {

// Row j is the battery level just after an update, column i the level just
// after the next one. Dense row-major storage; B is small.
class TransitionMatrix {
 public:
  explicit TransitionMatrix(int size) : n_(size), p_(static_cast<std::size_t>(size) * size, 0.0) {}

  int size() const noexcept { return n_; }

  double& operator()(int row, int col) { return p_[index(row, col)]; }
  double operator()(int row, int col) const { return p_[index(row, col)]; }

  std::span<const double> row(int r) const {
    return std::span<const double>(p_).subspan(static_cast<std::size_t>(r) * n_, n_);
  }

  friend bool operator==(const TransitionMatrix&, const TransitionMatrix&) = default;

 private:
  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * n_ + static_cast<std::size_t>(col);
  }

  int n_;
  std::vector<double> p_;
};

struct StationaryDistribution {
  std::vector<double> pi;

  friend bool operator==(const StationaryDistribution&, const StationaryDistribution&) = default;
};

// Post-update battery chain. Level i follows level j iff the next update fires
// at battery level i+1, giving
//   T(j, B-1) = Pr(Y_{B-j} <= tau_{B-1})
//   T(j, i)   = Pr(Y_{1+i-j} <= tau_i) - Pr(Y_{2+i-j} <= tau_{i+1}),  i < B-1,
// with tau_0 = +inf. tau_B never enters.
inline TransitionMatrix transition_matrix(const SystemParams& params, const Policy& policy) {
  const int b = params.battery();
  if (policy.battery() != b) throw Error(ErrorCode::kDimensionMismatch, "policy size differs from battery");
  TransitionMatrix t(b);
  if (b == 1) {
    t(0, 0) = 1.0;
    return t;
  }
  const double mu = params.mu_h();
  auto reach_by = [&](int arrivals, double horizon) {
    if (arrivals <= 0 || std::isinf(horizon)) return 1.0;
    return erlang_cdf(ErlangKernel(mu, arrivals), horizon);
  };
  for (int j = 0; j < b; ++j) {
    for (int i = 0; i < b - 1; ++i) {
      const double v = reach_by(1 + i - j, policy.threshold_or_inf(i)) -
                       reach_by(2 + i - j, policy.threshold(i + 1));
      t(j, i) = std::max(v, 0.0);
    }
    t(j, b - 1) = reach_by(b - j, policy.threshold(b - 1));
  }
  return t;
}

// Solves pi (T - I) = 0 with sum(pi) = 1 by Gaussian elimination with partial
// pivoting; the last balance equation is replaced by the normalization row.
inline StationaryDistribution stationary(const TransitionMatrix& t) {
  const int n = t.size();
  // a is the n x (n+1) augmented system, row-major.
  std::vector<double> a(static_cast<std::size_t>(n) * (n + 1), 0.0);
  auto at = [&](int r, int c) -> double& { return a[static_cast<std::size_t>(r) * (n + 1) + c]; };
  for (int r = 0; r < n - 1; ++r) {
    for (int c = 0; c < n; ++c) at(r, c) = t(c, r) - (r == c ? 1.0 : 0.0);
  }
  for (int c = 0; c < n; ++c) at(n - 1, c) = 1.0;
  at(n - 1, n) = 1.0;

  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r) {
      if (std::abs(at(r, col)) > std::abs(at(pivot, col))) pivot = r;
    }
    if (std::abs(at(pivot, col)) < 1e-13) {
      throw Error(ErrorCode::kSingularSystem, "balance equations are singular (chain not ergodic)");
    }
    if (pivot != col) {
      for (int c = col; c <= n; ++c) std::swap(at(pivot, c), at(col, c));
    }
    for (int r = col + 1; r < n; ++r) {
      const double f = at(r, col) / at(col, col);
      if (f == 0.0) continue;
      for (int c = col; c <= n; ++c) at(r, c) -= f * at(col, c);
    }
  }
  std::vector<double> pi(static_cast<std::size_t>(n));
  for (int r = n - 1; r >= 0; --r) {
    double s = at(r, n);
    for (int c = r + 1; c < n; ++c) s -= at(r, c) * pi[static_cast<std::size_t>(c)];
    pi[static_cast<std::size_t>(r)] = s / at(r, r);
  }
  double total = 0.0;
  for (double& p : pi) {
    if (p < 0.0 && p > -1e-14) p = 0.0;
    total += p;
  }
  for (double& p : pi) p /= total;
  return {std::move(pi)};
}

inline StationaryDistribution stationary(const SystemParams& params, const Policy& policy) {
  return stationary(transition_matrix(params, policy));
}

// max_i |(pi T)_i - pi_i|
inline double balance_residual(const TransitionMatrix& t, const StationaryDistribution& s) {
  double worst = 0.0;
  for (int i = 0; i < t.size(); ++i) {
    double v = 0.0;
    for (int j = 0; j < t.size(); ++j) v += s.pi[static_cast<std::size_t>(j)] * t(j, i);
    worst = std::max(worst, std::abs(v - s.pi[static_cast<std::size_t>(i)]));
  }
  return worst;
}

}  // namespace aoi
