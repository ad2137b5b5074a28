#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "aoi/error.hpp"
#include "aoi/model.hpp"

namespace aoi {

// Identifier recorded in every report. std::mt19937_64 is fully specified by
// the standard, and variates are drawn by inverse transform from its raw
// output, so a seed reproduces the same sample path on any platform.
inline constexpr const char* kGeneratorId = "mt19937_64/inverse-exponential";

struct SimConfig {
  std::uint64_t seed = 42;
  std::int64_t renewals = 1'000'000;  // update cycles simulated, warmup included
  std::int64_t warmup = 1'000;
  int initial_state = 0;
  int batches = 100;

  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

struct SimReport {
  double avg_penalty = 0.0;
  double avg_age = 0.0;
  double mean_x = 0.0;
  double mean_x2 = 0.0;
  std::vector<double> state_freq;
  double stderr_penalty = 0.0;  // batch-means standard error of avg_penalty
  double stderr_age = 0.0;      // same for avg_age
  double elapsed_sim_time = 0.0;
  std::int64_t measured_cycles = 0;
  std::int64_t updates = 0;           // all cycles, warmup included
  std::int64_t harvested_units = 0;   // energy arrivals, stored or not
  std::int64_t overflow_units = 0;    // arrivals lost to a full battery
  SimConfig config;
  std::string generator = kGeneratorId;

  friend bool operator==(const SimReport&, const SimReport&) = default;
};

// splitmix64 finalizer; derives independent child seeds from (seed, stream).
constexpr std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace detail {

// Event-driven sample path of battery level and age between updates.
// Arrivals are carried across cycles, so the path is the exact system: an
// update fires at the first instant the age reaches the threshold of the
// current level, which within a stretch of constant level l >= 1 is
// max(stretch start, tau_l).
class PathSampler {
 public:
  PathSampler(const SystemParams& params, const Policy& policy, std::uint64_t seed, int level)
      : mu_(params.mu_h()), cap_(params.battery()), policy_(policy), rng_(seed), level_(level), granted_(level) {
    next_arrival_ = draw();
  }

  // Runs one cycle from the current post-update level; returns its length.
  double cycle() {
    double now = 0.0;
    while (true) {
      if (level_ >= 1) {
        const double fire = std::max(now, policy_.threshold(level_));
        if (fire < next_arrival_) {
          --level_;
          ++updates_;
          if (updates_ > harvested_ + granted_) throw std::logic_error("more updates than available energy");
          next_arrival_ -= fire;
          return fire;
        }
      }
      now = next_arrival_;
      ++harvested_;
      if (level_ < cap_) {
        ++level_;
      } else {
        ++overflow_;
      }
      next_arrival_ = now + draw();
    }
  }

  int level() const noexcept { return level_; }
  // Overrides the stored energy; added units count toward the conservation check.
  void set_level(int level) noexcept {
    granted_ += std::max(0, level - level_);
    level_ = level;
  }
  void reset_arrival() { next_arrival_ = draw(); }
  std::int64_t updates() const noexcept { return updates_; }
  std::int64_t harvested() const noexcept { return harvested_; }
  std::int64_t overflow() const noexcept { return overflow_; }

 private:
  double draw() {
    const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    return -std::log1p(-u) / mu_;
  }

  double mu_;
  int cap_;
  const Policy& policy_;
  std::mt19937_64 rng_;
  int level_;
  std::int64_t granted_;
  double next_arrival_;
  std::int64_t updates_ = 0;
  std::int64_t harvested_ = 0;
  std::int64_t overflow_ = 0;
};

}  // namespace detail

// Monte Carlo estimate of the long-run metrics of a threshold policy. Per
// cycle the penalty integral is P(X_k) in closed form; estimates are ratios of
// per-cycle sums over the post-warmup cycles and uncertainty comes from batch
// means of those ratios.
inline SimReport simulate(const SystemParams& params, const Policy& policy, const PenaltySpec& penalty,
                          const SimConfig& cfg) {
  if (policy.battery() != params.battery()) throw Error(ErrorCode::kDimensionMismatch, "policy size differs from battery");
  if (cfg.renewals < 1 || cfg.warmup < 0) throw Error(ErrorCode::kInvalidArgument, "need renewals >= 1 and warmup >= 0");
  if (cfg.renewals <= cfg.warmup) throw Error(ErrorCode::kZeroMeasurementWindow, "renewals must exceed warmup");
  if (cfg.initial_state < 0 || cfg.initial_state > params.battery()) {
    throw Error(ErrorCode::kInvalidArgument, "initial battery level must lie in [0, B]");
  }
  if (cfg.batches < 1) throw Error(ErrorCode::kInvalidArgument, "need at least one batch");

  const std::int64_t n = cfg.renewals - cfg.warmup;
  const std::int64_t nb = std::min<std::int64_t>(cfg.batches, n);
  std::vector<double> bx(static_cast<std::size_t>(nb)), bx2(bx.size()), bp(bx.size());
  std::vector<std::int64_t> states(static_cast<std::size_t>(params.battery()), 0);

  detail::PathSampler path(params, policy, cfg.seed, cfg.initial_state);
  double total_time = 0.0;
  for (std::int64_t k = 0; k < cfg.warmup; ++k) total_time += path.cycle();
  for (std::int64_t k = 0; k < n; ++k) {
    const double x = path.cycle();
    total_time += x;
    const auto b = static_cast<std::size_t>(k * nb / n);
    bx[b] += x;
    bx2[b] += x * x;
    bp[b] += penalty.antiderivative(x);
    ++states[static_cast<std::size_t>(path.level())];
  }

  double sx = 0.0, sx2 = 0.0, sp = 0.0;
  for (std::size_t b = 0; b < bx.size(); ++b) {
    sx += bx[b];
    sx2 += bx2[b];
    sp += bp[b];
  }
  auto batch_stderr = [&](auto ratio) {
    if (nb < 2) return 0.0;
    double mean = 0.0;
    for (std::size_t b = 0; b < bx.size(); ++b) mean += ratio(b);
    mean /= static_cast<double>(nb);
    double ss = 0.0;
    for (std::size_t b = 0; b < bx.size(); ++b) ss += (ratio(b) - mean) * (ratio(b) - mean);
    return std::sqrt(ss / (static_cast<double>(nb) * static_cast<double>(nb - 1)));
  };

  SimReport r;
  r.avg_penalty = sp / sx;
  r.avg_age = sx2 / (2.0 * sx);
  r.mean_x = sx / static_cast<double>(n);
  r.mean_x2 = sx2 / static_cast<double>(n);
  r.stderr_penalty = batch_stderr([&](std::size_t b) { return bp[b] / bx[b]; });
  r.stderr_age = batch_stderr([&](std::size_t b) { return bx2[b] / (2.0 * bx[b]); });
  r.state_freq.resize(states.size());
  for (std::size_t j = 0; j < states.size(); ++j) r.state_freq[j] = static_cast<double>(states[j]) / static_cast<double>(n);
  r.elapsed_sim_time = total_time;
  r.measured_cycles = n;
  r.updates = path.updates();
  r.harvested_units = path.harvested();
  r.overflow_units = path.overflow();
  r.config = cfg;
  return r;
}

// Baseline that sends whenever stored energy allows: every threshold is zero,
// so an update fires at each harvest instant.
inline SimReport simulate_greedy(const SystemParams& params, const PenaltySpec& penalty, const SimConfig& cfg) {
  const Policy zero = validate_policy(params, std::vector<double>(static_cast<std::size_t>(params.battery()), 0.0));
  return simulate(params, zero, penalty, cfg);
}

// `count` independent inter-update durations, each from a fresh cycle that
// starts at post-update level `start_state`. By memorylessness of the
// arrivals these are i.i.d. draws of X given E = start_state.
inline std::vector<double> sample_interupdate(const SystemParams& params, const Policy& policy, int start_state,
                                              std::size_t count, std::uint64_t seed) {
  if (start_state < 0 || start_state >= params.battery()) {
    throw Error(ErrorCode::kBadState, "post-update battery state must lie in [0, B-1]");
  }
  std::vector<double> xs;
  xs.reserve(count);
  detail::PathSampler path(params, policy, seed, start_state);
  for (std::size_t i = 0; i < count; ++i) {
    path.set_level(start_state);
    path.reset_arrival();
    xs.push_back(path.cycle());
  }
  return xs;
}

}  // namespace aoi
