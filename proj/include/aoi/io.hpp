#pragma once

#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "aoi/error.hpp"
#include "aoi/model.hpp"
#include "aoi/optimizer.hpp"
#include "aoi/simulator.hpp"

namespace aoi {

using json = nlohmann::json;

// {"mu_h": number, "battery": int, "thresholds": [tau_1, ..., tau_B]}
inline json policy_to_json(const SystemParams& params, const Policy& policy) {
  return json{{"mu_h", params.mu_h()},
              {"battery", params.battery()},
              {"thresholds", std::vector<double>(policy.thresholds().begin(), policy.thresholds().end())}};
}

inline std::pair<SystemParams, Policy> policy_from_json(const json& j) {
  try {
    const SystemParams params(j.at("mu_h").get<double>(), j.at("battery").get<int>());
    return {params, validate_policy(params, j.at("thresholds").get<std::vector<double>>())};
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("malformed policy JSON: ") + e.what());
  }
}

inline json metrics_to_json(const PolicyMetrics& m) {
  json states = json::array();
  for (std::size_t j = 0; j < m.per_state.size(); ++j) {
    states.push_back({{"state", j},
                      {"ex", m.per_state[j].ex},
                      {"ex2", m.per_state[j].ex2},
                      {"epx", m.per_state[j].epx}});
  }
  return json{{"m1", m.m1},
              {"m2", m.m2},
              {"avg_age", m.avg_age},
              {"avg_penalty", m.avg_penalty},
              {"stationary", m.stationary},
              {"per_state", std::move(states)}};
}

inline json optimization_to_json(const SystemParams& params, const OptimizationResult& r) {
  json trace = json::array();
  for (const auto& s : r.trace) {
    trace.push_back({{"probe", s.probe}, {"feasible", s.feasible}, {"lower", s.lower}, {"upper", s.upper}});
  }
  return json{{"method", r.method},
              {"policy", policy_to_json(params, r.policy)},
              {"objective", r.objective},
              {"gap_bound", r.gap_bound ? json(*r.gap_bound) : json(nullptr)},
              {"fixed_point_residual", r.fixed_point_residual},
              {"certified", r.certified},
              {"cap_warning", r.cap_warning},
              {"evaluations", r.evaluations},
              {"trace", std::move(trace)}};
}

inline json sim_report_to_json(const SimReport& r) {
  return json{{"avg_penalty", r.avg_penalty},
              {"avg_age", r.avg_age},
              {"mean_x", r.mean_x},
              {"mean_x2", r.mean_x2},
              {"state_freq", r.state_freq},
              {"stderr", r.stderr_penalty},
              {"stderr_age", r.stderr_age},
              {"elapsed_sim_time", r.elapsed_sim_time},
              {"measured_cycles", r.measured_cycles},
              {"updates", r.updates},
              {"harvested_units", r.harvested_units},
              {"overflow_units", r.overflow_units},
              {"config",
               {{"seed", r.config.seed},
                {"renewals", r.config.renewals},
                {"warmup", r.config.warmup},
                {"initial_state", r.config.initial_state},
                {"batches", r.config.batches},
                {"generator", r.generator}}}};
}

// CSV cells carry 9 significant digits.
inline std::string csv_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace aoi
