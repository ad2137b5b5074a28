#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "aoi/chain.hpp"
#include "aoi/erlang.hpp"
#include "aoi/error.hpp"
#include "aoi/model.hpp"

namespace aoi {

// One piece [lo, hi) of the conditional inter-update distribution. Inside it
// the survival Pr(X > x | E=j) equals Pr(Y_order > x); no order means the
// survival is 1 (the stretch below tau_B where no update can fire).
struct SurvivalPiece {
  double lo;
  double hi;
  std::optional<int> order;
};

// Pieces of Pr(X > x | E = j), ordered by x:
//   [0, tau_B)              survival 1
//   [tau_m, tau_{m-1})      Pr(Y_{m-j} > x), m = B..2
//   [tau_1, inf)            Pr(Y_{1-j} > x)
// Zero-width pieces from tied thresholds are dropped.
inline std::vector<SurvivalPiece> survival_pieces(const Policy& policy, int j) {
  const int b = policy.battery();
  std::vector<SurvivalPiece> pieces;
  pieces.reserve(static_cast<std::size_t>(b) + 1);
  if (policy.smallest() > 0.0) pieces.push_back({0.0, policy.smallest(), std::nullopt});
  for (int m = b; m >= 1; --m) {
    const double lo = policy.threshold(m);
    const double hi = policy.threshold_or_inf(m - 1);
    if (lo < hi) pieces.push_back({lo, hi, m - j});
  }
  return pieces;
}

inline void check_state(const SystemParams& params, int j) {
  if (j < 0 || j >= params.battery()) {
    throw Error(ErrorCode::kBadState, "post-update battery state must lie in [0, B-1]");
  }
}

// Pr(X <= x | E = j): 0 below tau_B, Pr(Y_{m-j} <= x) on [tau_m, tau_{m-1}),
// Pr(Y_{1-j} <= x) from tau_1 on. Right-continuous with atoms at thresholds.
inline double interupdate_cdf(const SystemParams& params, const Policy& policy, int j, double x) {
  check_state(params, j);
  if (!(x >= 0.0)) throw Error(ErrorCode::kNegativeArgument, "x must be non-negative");
  const int b = params.battery();
  if (x < policy.smallest()) return 0.0;
  int m = 1;
  while (m < b && x < policy.threshold(m)) ++m;
  const int order = m - j;
  if (order <= 0) return 1.0;
  return erlang_cdf(ErlangKernel(params.mu_h(), order), x);
}

struct ConditionalMoments {
  std::vector<StateMoments> per_state;
};

// E[X|j] = int S_j, E[X^2|j] = int 2x S_j, E[P(X)|j] = int p S_j, where S_j is
// the piecewise survival above. Summation order is shared between ex2 and epx
// so that the identity penalty gives epx == ex2 / 2 exactly.
inline ConditionalMoments conditional_moments(const SystemParams& params, const Policy& policy,
                                              const PenaltySpec& penalty) {
  if (policy.battery() != params.battery()) {
    throw Error(ErrorCode::kDimensionMismatch, "policy size differs from battery");
  }
  const double mu = params.mu_h();
  ConditionalMoments out;
  out.per_state.resize(static_cast<std::size_t>(params.battery()));
  for (int j = 0; j < params.battery(); ++j) {
    double ex = 0.0;
    double half_ex2 = 0.0;
    double epx = 0.0;
    for (const auto& piece : survival_pieces(policy, j)) {
      if (!piece.order) {
        ex += piece.hi - piece.lo;
        half_ex2 += (piece.hi * piece.hi - piece.lo * piece.lo) / 2.0;
        epx += penalty.antiderivative(piece.hi) - penalty.antiderivative(piece.lo);
        continue;
      }
      const ErlangKernel k(mu, *piece.order);
      ex += survival_weighted_integral(k, piece.lo, piece.hi, 0);
      half_ex2 += survival_weighted_integral(k, piece.lo, piece.hi, 1);
      epx += penalty_weighted_integral(k, piece.lo, piece.hi, penalty);
    }
    out.per_state[static_cast<std::size_t>(j)] = {ex, 2.0 * half_ex2, epx};
  }
  return out;
}

inline PolicyMetrics policy_metrics(const SystemParams& params, const Policy& policy,
                                    const PenaltySpec& penalty) {
  PolicyMetrics m;
  m.stationary = stationary(params, policy).pi;
  m.per_state = conditional_moments(params, policy, penalty).per_state;
  double reward = 0.0;
  for (std::size_t j = 0; j < m.per_state.size(); ++j) {
    m.m1 += m.stationary[j] * m.per_state[j].ex;
    m.m2 += m.stationary[j] * m.per_state[j].ex2;
    reward += m.stationary[j] * m.per_state[j].epx;
  }
  m.avg_age = m.m2 / (2.0 * m.m1);
  m.avg_penalty = reward / m.m1;
  return m;
}

// Per-state check of d E[X^2|j] / d tau_i = 2 tau_i d E[X|j] / d tau_i using
// central differences with step h. Returns the residual for each j.
inline std::vector<double> moment_derivative_residuals(const SystemParams& params, const Policy& policy,
                                                       int level, double h) {
  const int b = params.battery();
  if (level < 1 || level > b) throw Error(ErrorCode::kInvalidArgument, "threshold index must lie in [1, B]");
  if (!(h > 0.0)) throw Error(ErrorCode::kInvalidArgument, "step must be positive");
  const double tau = policy.threshold(level);
  const bool fits_above = level == 1 || tau + h <= policy.threshold(level - 1);
  const bool fits_below = tau - h >= (level == b ? 0.0 : policy.threshold(level + 1));
  if (!fits_above || !fits_below) {
    throw Error(ErrorCode::kStepBreaksMonotonicity, "central stencil leaves the monotone region");
  }
  auto shifted = [&](double delta) {
    std::vector<double> t(policy.thresholds().begin(), policy.thresholds().end());
    t[static_cast<std::size_t>(level - 1)] = tau + delta;
    return conditional_moments(params, validate_policy(params, std::move(t)), PenaltySpec::identity());
  };
  const auto up = shifted(h);
  const auto down = shifted(-h);
  std::vector<double> residual(static_cast<std::size_t>(b));
  for (std::size_t j = 0; j < residual.size(); ++j) {
    const double d1 = (up.per_state[j].ex - down.per_state[j].ex) / (2.0 * h);
    const double d2 = (up.per_state[j].ex2 - down.per_state[j].ex2) / (2.0 * h);
    residual[j] = std::abs(d2 - 2.0 * tau * d1);
  }
  return residual;
}

inline double moment_derivative_check(const SystemParams& params, const Policy& policy, int level, double h) {
  const auto r = moment_derivative_residuals(params, policy, level, h);
  return *std::max_element(r.begin(), r.end());
}

}  // namespace aoi
