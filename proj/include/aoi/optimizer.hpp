#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <future>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "aoi/error.hpp"
#include "aoi/model.hpp"
#include "aoi/nelder_mead.hpp"
#include "aoi/renewal.hpp"

namespace aoi {

// Searches run in normalized coordinates u = mu_h * tau, so a problem at rate
// c * mu visits exactly the same points as the one at mu; all tolerances and
// ranges below are in those units unless stated otherwise.
struct OptimizerConfig {
  int q = 10;                     // bisection steps; certified gap 1 / (2^{q+1} mu_h)
  int grid_points = 41;           // per-dimension points of the grid oracle
  double grid_resolution = 0.0;   // > 0: zoom the oracle grid until its step is below this (time units)
  double upper_cap_factor = 10.0; // gaps between thresholds searched in [0, C / mu_h]
  double refine_tol = 1e-6;       // simplex vertex spread at convergence
  int inner_grid_points = 15;     // seed grid of the inner and joint minimizers
  double grid_budget = 1e8;       // max points of any single grid
  unsigned threads = 0;           // 0: hardware concurrency
  PenaltySpec penalty = PenaltySpec::identity();

  void validate() const {
    if (q < 1) throw Error(ErrorCode::kInvalidArgument, "q must be >= 1");
    if (grid_points < 2 || inner_grid_points < 2) throw Error(ErrorCode::kInvalidArgument, "grid points must be >= 2");
    if (!(upper_cap_factor > 0.0)) throw Error(ErrorCode::kInvalidArgument, "cap factor must be positive");
    if (!(refine_tol > 0.0)) throw Error(ErrorCode::kInvalidArgument, "refine_tol must be positive");
    if (!(grid_resolution >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "grid resolution must be >= 0");
    if (grid_resolution > 0.0 && grid_points < 6) {
      throw Error(ErrorCode::kInvalidArgument, "grid refinement needs at least 6 points per axis");
    }
  }
};

// One bisection step: the probe and the bracket after it was classified.
struct BracketStep {
  double probe;
  bool feasible;
  double lower;
  double upper;
};

struct OptimizationResult {
  Policy policy;
  double objective;
  std::optional<double> gap_bound;
  std::vector<BracketStep> trace;
  double fixed_point_residual;  // |p(tau_B) - objective|
  bool certified;
  bool cap_warning;
  std::string method;
  std::int64_t evaluations;
};

struct InnerResult {
  std::vector<double> upper;  // tau_1 .. tau_{B-1}
  double objective;
  bool cap_warning;
  std::int64_t evaluations;
};

namespace detail {

// Thresholds tau_1..tau_B from normalized (u_B, g_{B-1}, ..., g_1), where
// g_i = mu (tau_i - tau_{i+1}).
inline std::vector<double> thresholds_from(double mu, std::span<const double> z) {
  const std::size_t b = z.size();
  std::vector<double> tau(b);
  double level = 0.0;
  for (std::size_t k = 0; k < b; ++k) {
    level += z[k];
    tau[b - 1 - k] = level / mu;
  }
  return tau;
}

struct Candidate {
  std::vector<double> z;
  std::vector<double> tau;
  double objective;
};

// Lower objective wins; ties go to the lexicographically smallest threshold vector.
inline bool better(const Candidate& a, const Candidate& b) {
  if (a.objective != b.objective) return a.objective < b.objective;
  return std::lexicographical_compare(a.tau.begin(), a.tau.end(), b.tau.begin(), b.tau.end());
}

inline std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  v.back() = hi;
  return v;
}

inline double grid_size(const std::vector<std::vector<double>>& axes) {
  double total = 1.0;
  for (const auto& a : axes) total *= static_cast<double>(a.size());
  return total;
}

inline void insert_top(std::vector<Candidate>& top, Candidate c, std::size_t keep) {
  if (top.size() == keep && !better(c, top.back())) return;
  auto pos = std::upper_bound(top.begin(), top.end(), c, better);
  top.insert(pos, std::move(c));
  if (top.size() > keep) top.pop_back();
}

// Evaluates every point of the tensor grid and returns the `keep` best. Work
// is split into contiguous index ranges; the merge uses the total order of
// better(), so the answer does not depend on the thread count.
template <class Objective>
std::vector<Candidate> scan_grid(const std::vector<std::vector<double>>& axes, double mu, Objective&& objective,
                                 std::size_t keep, unsigned threads, std::int64_t& evaluations) {
  std::int64_t total = 1;
  for (const auto& a : axes) total *= static_cast<std::int64_t>(a.size());
  auto run = [&](std::int64_t begin, std::int64_t end) {
    std::vector<Candidate> top;
    std::vector<double> z(axes.size());
    for (std::int64_t idx = begin; idx < end; ++idx) {
      std::int64_t rest = idx;
      for (std::size_t d = axes.size(); d-- > 0;) {
        const auto n = static_cast<std::int64_t>(axes[d].size());
        z[d] = axes[d][static_cast<std::size_t>(rest % n)];
        rest /= n;
      }
      auto tau = thresholds_from(mu, z);
      const double obj = objective(tau);
      insert_top(top, Candidate{z, std::move(tau), obj}, keep);
    }
    return top;
  };
  unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  workers = static_cast<unsigned>(std::min<std::int64_t>(workers, std::max<std::int64_t>(1, total / 256)));
  std::vector<Candidate> merged;
  if (workers <= 1) {
    merged = run(0, total);
  } else {
    std::vector<std::future<std::vector<Candidate>>> parts;
    for (unsigned w = 0; w < workers; ++w) {
      const std::int64_t begin = total * w / workers;
      const std::int64_t end = total * (w + 1) / workers;
      parts.push_back(std::async(std::launch::async, run, begin, end));
    }
    for (auto& part : parts) {
      for (auto& c : part.get()) insert_top(merged, std::move(c), keep);
    }
  }
  evaluations += total;
  return merged;
}

inline void check_budget(const std::vector<std::vector<double>>& axes, const OptimizerConfig& config) {
  if (grid_size(axes) > config.grid_budget) {
    throw Error(ErrorCode::kBudgetExceeded,
                "grid of " + std::to_string(grid_size(axes)) + " points exceeds budget " +
                    std::to_string(config.grid_budget));
  }
}

inline double evaluate(const SystemParams& params, const PenaltySpec& penalty, std::span<const double> tau) {
  return policy_metrics(params, validate_policy(params, tau), penalty).avg_penalty;
}

// Clamps z into the box and returns the clamped point and its distance outside.
inline double clamp_into(std::vector<double>& z, const std::vector<double>& lo, const std::vector<double>& hi) {
  double outside = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) {
    const double c = std::clamp(z[k], lo[k], hi[k]);
    outside += std::abs(z[k] - c);
    z[k] = c;
  }
  return outside;
}

inline bool touches_cap(std::span<const double> gaps, double cap) {
  return std::any_of(gaps.begin(), gaps.end(), [&](double g) { return g >= cap * (1.0 - 1e-9); });
}

inline OptimizationResult finish(const SystemParams& params, const PenaltySpec& penalty, std::vector<double> tau,
                                 std::string method, std::int64_t evaluations) {
  Policy policy = validate_policy(params, std::move(tau));
  const double obj = policy_metrics(params, policy, penalty).avg_penalty;
  const double residual = std::abs(penalty(policy.smallest()) - obj);
  return OptimizationResult{std::move(policy), obj, std::nullopt, {}, residual, false, false, std::move(method),
                            evaluations};
}

}  // namespace detail

// Exhaustive oracle over tau_B in [1/(2 mu), 1/mu] and gaps in [0, C/mu].
// With grid_resolution > 0 the grid is re-laid around the incumbent (half
// width two steps per axis) until every axis step is at most the resolution.
inline OptimizationResult grid_search(const SystemParams& params, const OptimizerConfig& config) {
  config.validate();
  const int b = params.battery();
  const double mu = params.mu_h();
  const double cap = config.upper_cap_factor;
  std::vector<double> lo(static_cast<std::size_t>(b), 0.0), hi(static_cast<std::size_t>(b), cap);
  lo[0] = 0.5;
  hi[0] = 1.0;
  std::vector<std::vector<double>> axes;
  for (int d = 0; d < b; ++d) axes.push_back(detail::linspace(lo[d], hi[d], config.grid_points));
  detail::check_budget(axes, config);

  auto objective = [&](std::span<const double> tau) { return detail::evaluate(params, config.penalty, tau); };
  std::int64_t evaluations = 0;
  detail::Candidate best = detail::scan_grid(axes, mu, objective, 1, config.threads, evaluations).front();

  if (config.grid_resolution > 0.0) {
    const double target = config.grid_resolution * mu;
    std::vector<double> step(static_cast<std::size_t>(b));
    for (int d = 0; d < b; ++d) step[d] = (hi[d] - lo[d]) / (config.grid_points - 1);
    while (*std::max_element(step.begin(), step.end()) > target) {
      for (int d = 0; d < b; ++d) {
        const double from = std::max(lo[d], best.z[d] - 2.0 * step[d]);
        const double to = std::min(hi[d], best.z[d] + 2.0 * step[d]);
        axes[d] = detail::linspace(from, to, config.grid_points);
        step[d] = (to - from) / (config.grid_points - 1);
      }
      auto level = detail::scan_grid(axes, mu, objective, 1, config.threads, evaluations).front();
      if (detail::better(level, best)) best = std::move(level);
    }
  }
  return detail::finish(params, config.penalty, best.tau, "grid", evaluations);
}

// Minimizes the objective over tau_1 >= ... >= tau_{B-1} >= tau_b with tau_B = tau_b fixed.
inline InnerResult inner_minimize(const SystemParams& params, const OptimizerConfig& config, double tau_b) {
  config.validate();
  if (!(tau_b > 0.0) || !std::isfinite(tau_b)) throw Error(ErrorCode::kInvalidArgument, "tau_b must be positive");
  const int b = params.battery();
  const double mu = params.mu_h();
  const double ub = mu * tau_b;
  auto objective = [&](std::span<const double> tau) { return detail::evaluate(params, config.penalty, tau); };
  if (b == 1) {
    const std::vector<double> tau{tau_b};
    return {{}, objective(tau), false, 1};
  }

  std::int64_t evaluations = 0;
  double cap = config.upper_cap_factor;
  bool warned = false;
  for (int attempt = 0;; ++attempt) {
    std::vector<std::vector<double>> axes{{ub}};
    for (int d = 1; d < b; ++d) axes.push_back(detail::linspace(0.0, cap, config.inner_grid_points));
    detail::check_budget(axes, config);
    const detail::Candidate seed =
        detail::scan_grid(axes, mu, objective, 1, config.threads, evaluations).front();

    const std::vector<double> lo(static_cast<std::size_t>(b - 1), 0.0);
    const std::vector<double> hi(static_cast<std::size_t>(b - 1), cap);
    auto f = [&](const std::vector<double>& gaps) {
      std::vector<double> z(gaps);
      const double outside = detail::clamp_into(z, lo, hi);
      z.insert(z.begin(), ub);
      return objective(detail::thresholds_from(mu, z)) + outside;
    };
    std::vector<double> start(seed.z.begin() + 1, seed.z.end());
    const std::vector<double> steps(start.size(), cap / (config.inner_grid_points - 1));
    SimplexOptions opt;
    opt.x_tol = config.refine_tol;
    auto found = nelder_mead(f, start, steps, opt);
    evaluations += found.evaluations;
    std::vector<double> gaps = found.fx < seed.objective ? found.x : start;
    detail::clamp_into(gaps, lo, hi);

    if (detail::touches_cap(gaps, cap) && attempt == 0) {
      warned = true;
      cap *= 2.0;
      continue;
    }
    std::vector<double> z(gaps);
    z.insert(z.begin(), ub);
    auto tau = detail::thresholds_from(mu, z);
    const double obj = objective(tau);
    tau.pop_back();
    return {std::move(tau), obj, warned || detail::touches_cap(gaps, cap), evaluations};
  }
}

// Whether 2 tau_b m1 - m2 = 0 has a monotone solution with smallest threshold
// tau_b. Since that expression equals 2 m1 (tau_b - avg_age) and avg_age grows
// without bound in the upper thresholds, a root exists iff the least average
// age reachable with tau_B = tau_b is at most tau_b.
inline bool feasible(const SystemParams& params, const OptimizerConfig& config, double tau_b) {
  if (!config.penalty.is_identity()) {
    throw Error(ErrorCode::kInvalidArgument, "feasibility test is defined for the identity penalty");
  }
  return inner_minimize(params, config, tau_b).objective <= tau_b;
}

// Bisection on the full-battery threshold over [1/(2 mu), 1/mu]. After q steps
// the feasible end of the bracket is within 1/(2^{q+1} mu) of the optimal
// average age, and the inner minimizer at that end attains no more than it.
inline OptimizationResult algorithm1(const SystemParams& params, const OptimizerConfig& config) {
  config.validate();
  if (!config.penalty.is_identity()) {
    throw Error(ErrorCode::kInvalidArgument, "bisection certificate requires the identity penalty");
  }
  const double mu = params.mu_h();
  double lower = 0.5 / mu;
  double upper = 1.0 / mu;
  InnerResult at_upper = inner_minimize(params, config, upper);
  std::int64_t evaluations = at_upper.evaluations;
  if (!(at_upper.objective <= upper)) {
    throw Error(ErrorCode::kBracketInvalid, "upper end 1/mu is not feasible");
  }
  bool warned = at_upper.cap_warning;
  std::vector<BracketStep> trace;
  for (int i = 0; i < config.q; ++i) {
    const double probe = 0.5 * (lower + upper);
    InnerResult r = inner_minimize(params, config, probe);
    evaluations += r.evaluations;
    warned = warned || r.cap_warning;
    const bool ok = r.objective <= probe;
    if (ok) {
      upper = probe;
      at_upper = std::move(r);
    } else {
      lower = probe;
    }
    trace.push_back({probe, ok, lower, upper});
  }
  std::vector<double> tau = at_upper.upper;
  tau.push_back(upper);
  OptimizationResult out = detail::finish(params, config.penalty, std::move(tau), "algorithm1", evaluations);
  out.gap_bound = 1.0 / (std::ldexp(1.0, config.q + 1) * mu);
  out.trace = std::move(trace);
  out.certified = true;
  out.cap_warning = warned;
  return out;
}

// Joint minimization of the average penalty for any supported penalty. The
// full-battery threshold of an optimum satisfies p(tau_B) = optimal average
// penalty <= average penalty of any reference policy, so tau_B is searched in
// [0, p^{-1}(reference)] with every threshold at 1/mu as the reference.
// Grid seed, then simplex descent from the five best grid points.
inline OptimizationResult optimize_penalty(const SystemParams& params, const OptimizerConfig& config) {
  config.validate();
  const int b = params.battery();
  const double mu = params.mu_h();
  const PenaltySpec& penalty = config.penalty;
  auto objective = [&](std::span<const double> tau) { return detail::evaluate(params, penalty, tau); };

  const std::vector<double> reference(static_cast<std::size_t>(b), 1.0 / mu);
  const double u_max = mu * penalty.inverse(objective(reference));

  std::int64_t evaluations = 1;
  double cap = config.upper_cap_factor;
  bool warned = false;
  for (int attempt = 0;; ++attempt) {
    std::vector<std::vector<double>> axes{detail::linspace(0.0, u_max, config.inner_grid_points)};
    for (int d = 1; d < b; ++d) axes.push_back(detail::linspace(0.0, cap, config.inner_grid_points));
    detail::check_budget(axes, config);
    const auto seeds = detail::scan_grid(axes, mu, objective, 5, config.threads, evaluations);

    std::vector<double> lo(static_cast<std::size_t>(b), 0.0), hi(static_cast<std::size_t>(b), cap);
    hi[0] = u_max;
    auto f = [&](const std::vector<double>& z0) {
      std::vector<double> z(z0);
      const double outside = detail::clamp_into(z, lo, hi);
      return objective(detail::thresholds_from(mu, z)) + outside;
    };
    std::vector<double> steps(static_cast<std::size_t>(b), cap / (config.inner_grid_points - 1));
    steps[0] = u_max / (config.inner_grid_points - 1);
    SimplexOptions opt;
    opt.x_tol = config.refine_tol;

    std::optional<detail::Candidate> best;
    for (const auto& seed : seeds) {
      auto found = nelder_mead(f, seed.z, steps, opt);
      evaluations += found.evaluations;
      std::vector<double> z = found.fx < seed.objective ? found.x : seed.z;
      detail::clamp_into(z, lo, hi);
      auto tau = detail::thresholds_from(mu, z);
      detail::Candidate c{z, tau, objective(tau)};
      if (!best || detail::better(c, *best)) best = std::move(c);
    }
    const std::span<const double> gaps(best->z.begin() + 1, best->z.end());
    if (detail::touches_cap(gaps, cap) && attempt == 0) {
      warned = true;
      cap *= 2.0;
      continue;
    }
    OptimizationResult out = detail::finish(params, penalty, best->tau, "penalty", evaluations);
    out.certified = out.fixed_point_residual <= 10.0 * config.refine_tol;
    out.cap_warning = warned || detail::touches_cap(gaps, cap);
    return out;
  }
}

}  // namespace aoi
