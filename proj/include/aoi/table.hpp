#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "aoi/model.hpp"
#include "aoi/optimizer.hpp"

namespace aoi {

// Published optimal thresholds at mu_h = 1 (two-decimal precision except the
// B = 4 row), tau_1 first.
struct ReferenceRow {
  int battery;
  std::vector<double> thresholds;
  double avg_age;
};

inline const std::vector<ReferenceRow>& reference_table() {
  static const std::vector<ReferenceRow> rows{
      {1, {0.90}, 0.90},
      {2, {1.5, 0.72}, 0.72},
      {3, {1.5, 1.2, 0.64}, 0.64},
      {4, {1.5, 1.2, 0.86, 0.604}, 0.604},
  };
  return rows;
}

struct TableRow {
  ReferenceRow reference;
  OptimizationResult result;
  double age_deviation;       // |avg age - reference|
  double tau_b_deviation;     // |tau_B - reference tau_B|
  double upper_deviation;     // max_i<B |tau_i - reference tau_i|, 0 for B = 1
  double fixed_point_gap;     // |tau_B - avg age|
};

// Runs the bisection optimizer for each reference battery size at mu_h = 1.
inline std::vector<TableRow> optimal_threshold_table(const OptimizerConfig& config) {
  std::vector<TableRow> rows;
  for (const auto& ref : reference_table()) {
    const SystemParams params(1.0, ref.battery);
    OptimizationResult r = algorithm1(params, config);
    const auto tau = r.policy.thresholds();
    double upper = 0.0;
    for (std::size_t i = 0; i + 1 < tau.size(); ++i) upper = std::max(upper, std::abs(tau[i] - ref.thresholds[i]));
    const double age_dev = std::abs(r.objective - ref.avg_age);
    const double tau_dev = std::abs(tau.back() - ref.thresholds.back());
    const double fp = std::abs(tau.back() - r.objective);
    rows.push_back({ref, std::move(r), age_dev, tau_dev, upper, fp});
  }
  return rows;
}

}  // namespace aoi
