#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "aoi/closedform.hpp"
#include "aoi/renewal.hpp"
#include "aoi/simulator.hpp"
#include "ks.hpp"

using namespace aoi;

namespace {

const SystemParams kB2(1.0, 2);
const Policy kRef2 = validate_policy(kB2, std::vector<double>{1.5, 0.72});

double analytic_age(const SystemParams& p, const Policy& pol) {
  return policy_metrics(p, pol, PenaltySpec::identity()).avg_age;
}

}  // namespace

TEST(Simulate, UnitBatteryOptimum) {
  const SystemParams p(1.0, 1);
  const Policy pol = validate_policy(p, std::vector<double>{b1_optimal(1.0).tau1});
  SimConfig c;
  const auto r = simulate(p, pol, PenaltySpec::identity(), c);
  EXPECT_LE(std::abs(r.avg_age - analytic_age(p, pol)), 3.0 * r.stderr_age);
  EXPECT_EQ(r.generator, kGeneratorId);
  EXPECT_EQ(r.config, c);
  EXPECT_EQ(r.measured_cycles, c.renewals - c.warmup);
}

TEST(Simulate, TwoLevelReference) {
  SimConfig c;
  const auto r = simulate(kB2, kRef2, PenaltySpec::identity(), c);
  EXPECT_LE(std::abs(r.avg_age - 0.7198038206519034), 3.0 * r.stderr_age);
  const auto pi = stationary(kB2, kRef2).pi;
  const double n = static_cast<double>(r.measured_cycles);
  for (std::size_t j = 0; j < 2; ++j) {
    EXPECT_LE(std::abs(r.state_freq[j] - pi[j]), 3.0 * std::sqrt(pi[j] * (1 - pi[j]) / n));
  }
}

TEST(Simulate, ZeroThresholdsGiveMeanInterarrival) {
  const SystemParams p(1.0, 1);
  SimConfig c;
  c.renewals = 300'000;
  const auto r = simulate(p, validate_policy(p, std::vector<double>{0.0}), PenaltySpec::identity(), c);
  EXPECT_LE(std::abs(r.avg_age - 1.0), 4.0 * r.stderr_age);
}

TEST(Simulate, Deterministic) {
  SimConfig c;
  c.renewals = 50'000;
  const auto a = simulate(kB2, kRef2, PenaltySpec::power(2), c);
  const auto b = simulate(kB2, kRef2, PenaltySpec::power(2), c);
  EXPECT_TRUE(a == b);
  c.seed = 43;
  EXPECT_FALSE(a == simulate(kB2, kRef2, PenaltySpec::power(2), c));
}

TEST(Simulate, Errors) {
  SimConfig c;
  c.renewals = 10;
  c.warmup = 10;
  try {
    simulate(kB2, kRef2, PenaltySpec::identity(), c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kZeroMeasurementWindow);
  }
  auto bad = [&](auto mutate) {
    SimConfig c;
    c.renewals = 100;
    c.warmup = 10;
    mutate(c);
    EXPECT_THROW(simulate(kB2, kRef2, PenaltySpec::identity(), c), Error);
  };
  bad([](SimConfig& c) { c.renewals = 0; });
  bad([](SimConfig& c) { c.warmup = -1; });
  bad([](SimConfig& c) { c.initial_state = 3; });
  bad([](SimConfig& c) { c.initial_state = -1; });
  bad([](SimConfig& c) { c.batches = 0; });
  EXPECT_THROW(simulate(SystemParams(1.0, 3), kRef2, PenaltySpec::identity(), SimConfig{}), Error);
}

TEST(SimulateGreedy, MatchesZeroThresholds) {
  SimConfig c;
  c.renewals = 200'000;
  for (int b : {1, 8}) {
    const SystemParams p(1.0, b);
    const auto g = simulate_greedy(p, PenaltySpec::identity(), c);
    const auto z = simulate(p, validate_policy(p, std::vector<double>(static_cast<std::size_t>(b), 0.0)),
                            PenaltySpec::identity(), c);
    EXPECT_TRUE(g == z);
    // Updating at every harvest makes every cycle one exponential gap.
    EXPECT_LE(std::abs(g.avg_age - 1.0), 4.0 * g.stderr_age) << b;
  }
}

TEST(SimulatorProperty, RatioEstimatorConsistency) {
  SimConfig c;
  c.renewals = 100'000;
  const auto r = simulate(kB2, kRef2, PenaltySpec::identity(), c);
  EXPECT_NEAR(r.avg_age, r.mean_x2 / (2.0 * r.mean_x), 1e-12 * r.avg_age);
  EXPECT_NEAR(r.avg_age, r.avg_penalty, 1e-12 * r.avg_age);
  EXPECT_NEAR(std::accumulate(r.state_freq.begin(), r.state_freq.end(), 0.0), 1.0, 1e-12);
  EXPECT_GE(r.stderr_penalty, 0.0);
  EXPECT_GT(r.elapsed_sim_time, 0.0);
}

TEST(SimulatorProperty, EnergyConservation) {
  for (int b : {1, 2, 4}) {
    const SystemParams p(0.7, b);
    std::vector<double> tau(static_cast<std::size_t>(b));
    for (int i = 0; i < b; ++i) tau[static_cast<std::size_t>(i)] = 2.0 - 0.4 * i;
    SimConfig c;
    c.renewals = 50'000;
    c.initial_state = b;
    const auto r = simulate(p, validate_policy(p, tau), PenaltySpec::identity(), c);
    EXPECT_LE(r.updates, r.harvested_units + b);
    const std::int64_t left = b + r.harvested_units - r.overflow_units - r.updates;
    EXPECT_GE(left, 0);
    EXPECT_LE(left, b);
  }
}

TEST(SimulatorProperty, StateFrequenciesMatchStationary) {
  const std::vector<std::vector<double>> policies{{1.0, 1.0, 1.0}, {2.0, 1.1, 0.6}, {0.9, 0.9, 0.2, 0.1}};
  for (const auto& tau : policies) {
    const SystemParams p(1.0, static_cast<int>(tau.size()));
    const Policy pol = validate_policy(p, tau);
    SimConfig c;
    c.renewals = 400'000;
    c.seed = 5;
    const auto r = simulate(p, pol, PenaltySpec::identity(), c);
    const auto pi = stationary(p, pol).pi;
    const double n = static_cast<double>(r.measured_cycles);
    for (std::size_t j = 0; j < pi.size(); ++j) {
      // Cycles are Markov dependent; allow 4 binomial sigmas.
      EXPECT_LE(std::abs(r.state_freq[j] - pi[j]), 4.0 * std::sqrt(pi[j] * (1 - pi[j]) / n) + 1e-12);
    }
  }
}

TEST(SimulatorProperty, ConditionalSamplesPassKolmogorovSmirnov) {
  const std::vector<std::vector<double>> policies{{1.5, 0.72}, {2.0, 1.2, 0.5}};
  for (const auto& tau : policies) {
    const SystemParams p(1.0, static_cast<int>(tau.size()));
    const Policy pol = validate_policy(p, tau);
    for (int j = 0; j < p.battery(); ++j) {
      const auto xs = sample_interupdate(p, pol, j, 100'000, split_seed(99, static_cast<std::uint64_t>(j)));
      const double d = ks::statistic(xs, [&](double x) { return interupdate_cdf(p, pol, j, x); });
      EXPECT_LE(d, ks::critical_001(xs.size())) << "j=" << j;
    }
  }
}

TEST(SimulatorProperty, ConditionalMomentsMatch) {
  const auto m = conditional_moments(kB2, kRef2, PenaltySpec::identity());
  for (int j = 0; j < 2; ++j) {
    const auto xs = sample_interupdate(kB2, kRef2, j, 200'000, 1234 + j);
    double s = 0.0, s2 = 0.0;
    for (double x : xs) {
      s += x;
      s2 += x * x;
    }
    const double n = static_cast<double>(xs.size());
    const double mean = s / n;
    const double var = s2 / n - mean * mean;
    EXPECT_LE(std::abs(mean - m.per_state[static_cast<std::size_t>(j)].ex), 4.0 * std::sqrt(var / n));
  }
}

TEST(SampleInterupdate, Errors) {
  EXPECT_THROW(sample_interupdate(kB2, kRef2, 2, 10, 1), Error);
  EXPECT_THROW(sample_interupdate(kB2, kRef2, -1, 10, 1), Error);
}

TEST(SplitSeed, DistinctStreams) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 4; ++s)
    for (std::uint64_t k = 0; k < 64; ++k) seen.insert(split_seed(s, k));
  EXPECT_EQ(seen.size(), 256u);
  EXPECT_EQ(split_seed(1, 2), split_seed(1, 2));
}
