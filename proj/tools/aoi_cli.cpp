// aoi: evaluate, optimize, sweep and simulate threshold policies for an
// energy-harvesting status-update source.
//
// Exit codes: 0 success, 1 internal failure, 2 invalid input, 3 grid budget
// exceeded, 4 simulation disagrees with the analytic value (--check).

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aoi/aoi.hpp"
#include "aoi/io.hpp"

namespace {

using aoi::json;

constexpr int kExitInternal = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitBudget = 3;
constexpr int kExitVerification = 4;

struct Common {
  std::string format = "json";
  std::string output;
};

struct OptimizerFlags {
  int q = 10;
  int grid_points = 41;
  double grid_resolution = 1e-3;
  double cap = 10.0;
  double refine_tol = 1e-6;
  int inner_grid_points = 15;
  unsigned threads = 0;
};

void add_common(CLI::App* cmd, Common& c, const std::vector<std::string>& formats) {
  cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember(formats));
  cmd->add_option("--output,-o", c.output, "Write to this file instead of standard output");
}

void add_optimizer(CLI::App* cmd, OptimizerFlags& f) {
  cmd->add_option("--q", f.q, "Bisection steps (certified gap 1/(2^(q+1) mu))");
  cmd->add_option("--grid-points", f.grid_points, "Points per axis of the grid oracle");
  cmd->add_option("--grid-resolution", f.grid_resolution, "Zoom the grid until its step is below this (0: no zoom)");
  cmd->add_option("--cap", f.cap, "Gaps between thresholds searched in [0, cap/mu]");
  cmd->add_option("--refine-tol", f.refine_tol, "Simplex tolerance in mu*tau units");
  cmd->add_option("--inner-grid-points", f.inner_grid_points, "Seed grid points per axis of the simplex search");
  cmd->add_option("--threads", f.threads, "Worker threads for grid scans (0: all cores)");
}

aoi::OptimizerConfig make_config(const OptimizerFlags& f, const aoi::PenaltySpec& penalty) {
  aoi::OptimizerConfig c;
  c.q = f.q;
  c.grid_points = f.grid_points;
  c.grid_resolution = f.grid_resolution;
  c.upper_cap_factor = f.cap;
  c.refine_tol = f.refine_tol;
  c.inner_grid_points = f.inner_grid_points;
  c.threads = f.threads;
  c.penalty = penalty;
  if (const char* env = std::getenv("AOI_GRID_BUDGET")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(v >= 1.0)) {
      throw aoi::Error(aoi::ErrorCode::kInvalidArgument, "AOI_GRID_BUDGET must be a number >= 1");
    }
    c.grid_budget = v;
  }
  c.validate();
  return c;
}

std::string resolve_mode(const std::string& mode, const aoi::PenaltySpec& penalty) {
  if (!mode.empty()) return mode;
  return penalty.is_identity() ? "algorithm1" : "penalty";
}

aoi::OptimizationResult run_optimizer(const std::string& mode, const aoi::SystemParams& params,
                                      const aoi::OptimizerConfig& config) {
  if (mode == "grid") return aoi::grid_search(params, config);
  if (mode == "algorithm1") return aoi::algorithm1(params, config);
  return aoi::optimize_penalty(params, config);
}

void emit(const Common& c, const std::string& text) {
  if (c.output.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(c.output, std::ios::binary);
  if (!out) throw aoi::Error(aoi::ErrorCode::kInvalidArgument, "cannot open output file " + c.output);
  out << text;
}

std::string join(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += cells[i];
  }
  return line + '\n';
}

std::vector<std::string> tau_header(int count, const std::string& prefix = "tau_") {
  std::vector<std::string> h;
  for (int i = 1; i <= count; ++i) h.push_back(prefix + std::to_string(i));
  return h;
}

// Threshold cells padded with empty cells up to `width`.
void append_taus(std::vector<std::string>& row, std::span<const double> tau, int width) {
  for (int i = 0; i < width; ++i) {
    row.push_back(i < static_cast<int>(tau.size()) ? aoi::csv_number(tau[static_cast<std::size_t>(i)]) : "");
  }
}

// lo:hi:n inclusive range.
std::vector<double> parse_range(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() != 3) throw aoi::Error(aoi::ErrorCode::kInvalidArgument, "range must be lo:hi:n");
  double lo = 0.0, hi = 0.0;
  int n = 0;
  try {
    std::size_t used = 0;
    lo = std::stod(parts[0], &used);
    if (used != parts[0].size()) throw std::invalid_argument("lo");
    hi = std::stod(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument("hi");
    n = std::stoi(parts[2], &used);
    if (used != parts[2].size()) throw std::invalid_argument("n");
  } catch (const std::exception&) {
    throw aoi::Error(aoi::ErrorCode::kInvalidArgument, "malformed range " + text);
  }
  if (!std::isfinite(lo) || !std::isfinite(hi) || lo < 0.0 || hi < lo || n < 1) {
    throw aoi::Error(aoi::ErrorCode::kInvalidArgument, "range needs 0 <= lo <= hi and n >= 1");
  }
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  return v;
}

void require_nonempty(const std::vector<double>& v, const char* what) {
  if (v.empty()) throw aoi::Error(aoi::ErrorCode::kInvalidArgument, std::string(what) + " list is empty");
}

// ---------------------------------------------------------------- evaluate

struct EvaluateArgs {
  Common common;
  double mu = 1.0;
  int battery = 1;
  std::vector<double> thresholds;
  std::string penalty = "identity";
};

int cmd_evaluate(const EvaluateArgs& a) {
  const aoi::SystemParams params(a.mu, a.battery);
  const aoi::Policy policy = aoi::validate_policy(params, a.thresholds);
  const aoi::PenaltySpec penalty = aoi::parse_penalty(a.penalty);
  const aoi::PolicyMetrics m = aoi::policy_metrics(params, policy, penalty);
  if (a.common.format == "csv") {
    std::vector<std::string> header{"mu", "battery"};
    for (auto& h : tau_header(a.battery)) header.push_back(h);
    for (const char* h : {"m1", "m2", "avg_age", "avg_penalty"}) header.push_back(h);
    std::vector<std::string> row{aoi::csv_number(a.mu), std::to_string(a.battery)};
    append_taus(row, policy.thresholds(), a.battery);
    for (double v : {m.m1, m.m2, m.avg_age, m.avg_penalty}) row.push_back(aoi::csv_number(v));
    emit(a.common, join(header) + join(row));
    return 0;
  }
  json out = aoi::metrics_to_json(m);
  out["policy"] = aoi::policy_to_json(params, policy);
  out["penalty"] = penalty.to_string();
  emit(a.common, out.dump(2) + "\n");
  return 0;
}

// ---------------------------------------------------------------- optimize

struct OptimizeArgs {
  Common common;
  double mu = 1.0;
  int battery = 1;
  std::string mode;
  std::string penalty = "identity";
  OptimizerFlags opt;
};

int cmd_optimize(const OptimizeArgs& a) {
  const aoi::SystemParams params(a.mu, a.battery);
  const aoi::PenaltySpec penalty = aoi::parse_penalty(a.penalty);
  const aoi::OptimizerConfig config = make_config(a.opt, penalty);
  const std::string mode = resolve_mode(a.mode, penalty);
  const aoi::OptimizationResult r = run_optimizer(mode, params, config);
  if (r.cap_warning) std::cerr << "warning: an optimal gap reached the search cap; raise --cap\n";
  if (a.common.format == "csv") {
    std::vector<std::string> header{"mu", "battery"};
    for (auto& h : tau_header(a.battery)) header.push_back(h);
    for (const char* h : {"objective", "gap_bound", "fixed_point_residual", "certified"}) header.push_back(h);
    std::vector<std::string> row{aoi::csv_number(a.mu), std::to_string(a.battery)};
    append_taus(row, r.policy.thresholds(), a.battery);
    row.push_back(aoi::csv_number(r.objective));
    row.push_back(r.gap_bound ? aoi::csv_number(*r.gap_bound) : "");
    row.push_back(aoi::csv_number(r.fixed_point_residual));
    row.push_back(r.certified ? "true" : "false");
    emit(a.common, join(header) + join(row));
    return 0;
  }
  json out = aoi::optimization_to_json(params, r);
  out["penalty"] = penalty.to_string();
  emit(a.common, out.dump(2) + "\n");
  return 0;
}

// ---------------------------------------------------------------- sweep

struct SweepArgs {
  Common common;
  std::vector<double> mu{1.0};
  std::vector<int> battery{1, 2, 3, 4};
  std::string mode;
  std::string penalty = "identity";
  int fig = 0;
  std::vector<double> tau1;
  std::vector<double> tau2;
  std::string tau1_range = "0:3:61";
  std::string tau2_range = "0:3:61";
  OptimizerFlags opt;
};

// Columns: mu,battery,tau_1..tau_W,avg_age,avg_penalty with W the largest
// battery in the sweep; thresholds beyond a row's battery are empty.
int sweep_optimizer(const SweepArgs& a) {
  require_nonempty(a.mu, "mu");
  if (a.battery.empty()) throw aoi::Error(aoi::ErrorCode::kInvalidArgument, "battery list is empty");
  const aoi::PenaltySpec penalty = aoi::parse_penalty(a.penalty);
  aoi::OptimizerConfig config = make_config(a.opt, penalty);
  config.threads = 1;  // rows already run in parallel
  const std::string mode = resolve_mode(a.mode, penalty);
  std::vector<aoi::SystemParams> cases;
  for (double mu : a.mu) {
    for (int b : a.battery) cases.emplace_back(mu, b);
  }
  std::vector<std::future<aoi::OptimizationResult>> jobs;
  for (const auto& params : cases) {
    jobs.push_back(std::async(std::launch::async, [&, params] { return run_optimizer(mode, params, config); }));
  }
  std::vector<aoi::OptimizationResult> results;
  for (auto& j : jobs) results.push_back(j.get());

  int width = 0;
  for (int b : a.battery) width = std::max(width, b);
  if (a.common.format == "csv") {
    std::vector<std::string> header{"mu", "battery"};
    for (auto& h : tau_header(width)) header.push_back(h);
    header.push_back("avg_age");
    header.push_back("avg_penalty");
    std::string text = join(header);
    for (std::size_t i = 0; i < cases.size(); ++i) {
      const auto m = aoi::policy_metrics(cases[i], results[i].policy, penalty);
      std::vector<std::string> row{aoi::csv_number(cases[i].mu_h()), std::to_string(cases[i].battery())};
      append_taus(row, results[i].policy.thresholds(), width);
      row.push_back(aoi::csv_number(m.avg_age));
      row.push_back(aoi::csv_number(m.avg_penalty));
      text += join(row);
    }
    emit(a.common, text);
    return 0;
  }
  json rows = json::array();
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto m = aoi::policy_metrics(cases[i], results[i].policy, penalty);
    json row = aoi::policy_to_json(cases[i], results[i].policy);
    row["avg_age"] = m.avg_age;
    row["avg_penalty"] = m.avg_penalty;
    rows.push_back(std::move(row));
  }
  emit(a.common, json{{"mode", mode}, {"penalty", penalty.to_string()}, {"rows", std::move(rows)}}.dump(2) + "\n");
  return 0;
}

// Average-age surface of two-level policies. Figure 5 varies tau_1 along the
// x axis for each listed tau_2; figure 6 swaps the roles. Pairs with
// tau_1 < tau_2 are not monotone and are skipped.
int sweep_surface(const SweepArgs& a) {
  if (a.fig != 5 && a.fig != 6) throw aoi::Error(aoi::ErrorCode::kInvalidArgument, "--fig must be 5 or 6");
  if (a.mu.size() != 1) throw aoi::Error(aoi::ErrorCode::kInvalidArgument, "surface sweeps take a single mu");
  if (a.battery.size() != 1 || a.battery[0] != 2) {
    throw aoi::Error(aoi::ErrorCode::kInvalidArgument, "surface sweeps need --battery 2");
  }
  const aoi::SystemParams params(a.mu[0], 2);
  const aoi::PenaltySpec penalty = aoi::parse_penalty(a.penalty);
  const bool by_tau1 = a.fig == 5;
  const std::vector<double> curves = by_tau1 ? a.tau2 : a.tau1;
  require_nonempty(curves, by_tau1 ? "tau2" : "tau1");
  const std::vector<double> axis = parse_range(by_tau1 ? a.tau1_range : a.tau2_range);
  for (double c : curves) {
    if (!std::isfinite(c) || c < 0.0) throw aoi::Error(aoi::ErrorCode::kInvalidArgument, "curve values must be >= 0");
  }

  std::string text = a.common.format == "csv" ? join({"tau1", "tau2", "avg_age", "avg_penalty"}) : "";
  json rows = json::array();
  for (double c : curves) {
    for (double x : axis) {
      const double t1 = by_tau1 ? x : c;
      const double t2 = by_tau1 ? c : x;
      if (t1 < t2) continue;
      const auto m = aoi::policy_metrics(params, aoi::validate_policy(params, std::vector<double>{t1, t2}), penalty);
      if (a.common.format == "csv") {
        text += join({aoi::csv_number(t1), aoi::csv_number(t2), aoi::csv_number(m.avg_age),
                      aoi::csv_number(m.avg_penalty)});
      } else {
        rows.push_back({{"tau1", t1}, {"tau2", t2}, {"avg_age", m.avg_age}, {"avg_penalty", m.avg_penalty}});
      }
    }
  }
  if (a.common.format == "csv") {
    emit(a.common, text);
  } else {
    emit(a.common, json{{"fig", a.fig}, {"mu_h", a.mu[0]}, {"rows", std::move(rows)}}.dump(2) + "\n");
  }
  return 0;
}

int cmd_sweep(const SweepArgs& a) { return a.fig == 0 ? sweep_optimizer(a) : sweep_surface(a); }

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  Common common;
  double mu = 1.0;
  int battery = 1;
  std::vector<double> thresholds;
  bool optimal = false;
  bool greedy = false;
  bool check = false;
  std::string penalty = "identity";
  aoi::SimConfig sim;
  OptimizerFlags opt;
};

int cmd_simulate(const SimulateArgs& a) {
  const aoi::SystemParams params(a.mu, a.battery);
  const aoi::PenaltySpec penalty = aoi::parse_penalty(a.penalty);
  const int sources = static_cast<int>(!a.thresholds.empty()) + static_cast<int>(a.optimal) + static_cast<int>(a.greedy);
  if (sources != 1) {
    throw aoi::Error(aoi::ErrorCode::kInvalidArgument, "give exactly one of --thresholds, --optimal, --greedy");
  }
  if (a.sim.renewals <= a.sim.warmup) {
    throw aoi::Error(aoi::ErrorCode::kZeroMeasurementWindow, "renewals must exceed warmup");
  }
  std::optional<aoi::Policy> policy;
  if (!a.thresholds.empty()) policy = aoi::validate_policy(params, a.thresholds);
  const aoi::OptimizerConfig config = make_config(a.opt, penalty);
  if (a.optimal) policy = run_optimizer(resolve_mode("", penalty), params, config).policy;
  if (a.greedy) policy = aoi::validate_policy(params, std::vector<double>(static_cast<std::size_t>(a.battery), 0.0));

  const aoi::SimReport report = aoi::simulate(params, *policy, penalty, a.sim);
  json out = aoi::sim_report_to_json(report);
  out["policy"] = aoi::policy_to_json(params, *policy);
  out["penalty"] = penalty.to_string();
  int code = 0;
  std::optional<double> z;
  std::optional<aoi::PolicyMetrics> analytic;
  if (a.check) {
    analytic = aoi::policy_metrics(params, *policy, penalty);
    const double diff = std::abs(report.avg_penalty - analytic->avg_penalty);
    z = report.stderr_penalty > 0.0 ? diff / report.stderr_penalty : (diff == 0.0 ? 0.0 : aoi::kInfinity);
    out["check"] = {{"analytic", aoi::metrics_to_json(*analytic)}, {"z_score", *z}};
    if (*z > 4.0) {
      std::cerr << "verification failed: z-score " << *z << " exceeds 4\n";
      code = kExitVerification;
    }
  }
  if (a.common.format == "csv") {
    std::vector<std::string> header{"mu", "battery"};
    for (auto& h : tau_header(a.battery)) header.push_back(h);
    for (const char* h : {"avg_penalty", "avg_age", "stderr", "mean_x", "mean_x2", "elapsed_sim_time", "seed",
                          "renewals", "warmup", "analytic_avg_penalty", "z_score"}) {
      header.push_back(h);
    }
    std::vector<std::string> row{aoi::csv_number(a.mu), std::to_string(a.battery)};
    append_taus(row, policy->thresholds(), a.battery);
    for (double v : {report.avg_penalty, report.avg_age, report.stderr_penalty, report.mean_x, report.mean_x2,
                     report.elapsed_sim_time}) {
      row.push_back(aoi::csv_number(v));
    }
    row.push_back(std::to_string(a.sim.seed));
    row.push_back(std::to_string(a.sim.renewals));
    row.push_back(std::to_string(a.sim.warmup));
    row.push_back(analytic ? aoi::csv_number(analytic->avg_penalty) : "");
    row.push_back(z ? aoi::csv_number(*z) : "");
    emit(a.common, join(header) + join(row));
  } else {
    emit(a.common, out.dump(2) + "\n");
  }
  return code;
}

// ---------------------------------------------------------------- table1

struct TableArgs {
  Common common{"text", ""};
  OptimizerFlags opt;
};

int cmd_table1(const TableArgs& a) {
  OptimizerFlags flags = a.opt;
  const aoi::OptimizerConfig config = make_config(flags, aoi::PenaltySpec::identity());
  const auto rows = aoi::optimal_threshold_table(config);
  if (a.common.format == "json") {
    json out = json::array();
    for (const auto& r : rows) {
      out.push_back({{"battery", r.reference.battery},
                     {"thresholds", std::vector<double>(r.result.policy.thresholds().begin(),
                                                        r.result.policy.thresholds().end())},
                     {"avg_age", r.result.objective},
                     {"reference_thresholds", r.reference.thresholds},
                     {"reference_avg_age", r.reference.avg_age},
                     {"age_deviation", r.age_deviation},
                     {"tau_b_deviation", r.tau_b_deviation},
                     {"upper_deviation", r.upper_deviation},
                     {"fixed_point_gap", r.fixed_point_gap},
                     {"gap_bound", r.result.gap_bound ? json(*r.result.gap_bound) : json(nullptr)}});
    }
    emit(a.common, out.dump(2) + "\n");
    return 0;
  }
  if (a.common.format == "csv") {
    std::vector<std::string> header{"battery"};
    for (auto& h : tau_header(4)) header.push_back(h);
    for (auto& h : tau_header(4, "ref_tau_")) header.push_back(h);
    for (const char* h : {"avg_age", "ref_avg_age", "age_deviation", "tau_b_deviation", "upper_deviation",
                          "fixed_point_gap"}) {
      header.push_back(h);
    }
    std::string text = join(header);
    for (const auto& r : rows) {
      std::vector<std::string> row{std::to_string(r.reference.battery)};
      append_taus(row, r.result.policy.thresholds(), 4);
      append_taus(row, r.reference.thresholds, 4);
      for (double v : {r.result.objective, r.reference.avg_age, r.age_deviation, r.tau_b_deviation,
                       r.upper_deviation, r.fixed_point_gap}) {
        row.push_back(aoi::csv_number(v));
      }
      text += join(row);
    }
    emit(a.common, text);
    return 0;
  }
  std::string text;
  char line[256];
  std::snprintf(line, sizeof line, "%-3s %-36s %-9s | %-28s %-7s | %-8s %-8s %-8s\n", "B", "thresholds", "avg_age",
                "reference thresholds", "ref age", "d_age", "d_tauB", "d_upper");
  text += line;
  for (const auto& r : rows) {
    std::string taus, refs;
    char cell[32];
    for (double t : r.result.policy.thresholds()) {
      std::snprintf(cell, sizeof cell, "%s%.4f", taus.empty() ? "" : " ", t);
      taus += cell;
    }
    for (double t : r.reference.thresholds) {
      std::snprintf(cell, sizeof cell, "%s%g", refs.empty() ? "" : " ", t);
      refs += cell;
    }
    std::snprintf(line, sizeof line, "%-3d %-36s %-9.6f | %-28s %-7g | %-8.4f %-8.4f %-8.4f\n", r.reference.battery,
                  taus.c_str(), r.result.objective, refs.c_str(), r.reference.avg_age, r.age_deviation,
                  r.tau_b_deviation, r.upper_deviation);
    text += line;
  }
  // Infinite-battery limit at mu = 1 is 0.5.
  const double opt1 = rows.front().result.objective;
  const double opt2 = rows[1].result.objective;
  const double opt4 = rows.back().result.objective;
  std::snprintf(line, sizeof line,
                "B=4 is %.1f%% above the infinite-battery limit; B=1->2 removes %.1f%% of the possible reduction\n",
                100.0 * (opt4 - 0.5) / 0.5, 100.0 * (opt1 - opt2) / (opt1 - 0.5));
  text += line;
  emit(a.common, text);
  return 0;
}

int exit_code_for(aoi::ErrorCode code) {
  switch (code) {
    case aoi::ErrorCode::kBudgetExceeded: return kExitBudget;
    case aoi::ErrorCode::kSingularSystem:
    case aoi::ErrorCode::kNonConvergence:
    case aoi::ErrorCode::kBracketInvalid: return kExitInternal;
    default: return kExitInvalid;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Age-of-information threshold policies for an energy-harvesting source"};
  app.require_subcommand(1, 1);

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Analytic metrics of a threshold policy");
  evaluate->add_option("--mu", ev.mu, "Harvest rate")->required();
  evaluate->add_option("--battery", ev.battery, "Battery capacity B")->required();
  evaluate->add_option("--thresholds", ev.thresholds, "tau_1,...,tau_B")->required()->delimiter(',');
  evaluate->add_option("--penalty", ev.penalty, "identity | power:K[:C] | poly:C:K,C:K...");
  add_common(evaluate, ev.common, {"json", "csv"});

  OptimizeArgs op;
  auto* optimize = app.add_subcommand("optimize", "Optimal threshold policy");
  optimize->add_option("--mu", op.mu, "Harvest rate")->required();
  optimize->add_option("--battery", op.battery, "Battery capacity B")->required();
  optimize->add_option("--mode", op.mode, "grid | algorithm1 | penalty (default by penalty)")
      ->check(CLI::IsMember({"grid", "algorithm1", "penalty"}));
  optimize->add_option("--penalty", op.penalty, "identity | power:K[:C] | poly:C:K,C:K...");
  add_optimizer(optimize, op.opt);
  add_common(optimize, op.common, {"json", "csv"});

  SweepArgs sw;
  sw.common.format = "csv";
  auto* sweep = app.add_subcommand("sweep", "Optimizer sweeps over mu and B, or two-threshold age surfaces");
  sweep->add_option("--mu", sw.mu, "Harvest rates")->delimiter(',');
  sweep->add_option("--battery", sw.battery, "Battery capacities")->delimiter(',');
  sweep->add_option("--mode", sw.mode, "grid | algorithm1 | penalty")
      ->check(CLI::IsMember({"grid", "algorithm1", "penalty"}));
  sweep->add_option("--penalty", sw.penalty, "Penalty function");
  sweep->add_option("--fig", sw.fig, "5: age vs tau1 per tau2; 6: age vs tau2 per tau1");
  sweep->add_option("--tau1", sw.tau1, "tau_1 curve values (fig 6)")->delimiter(',');
  sweep->add_option("--tau2", sw.tau2, "tau_2 curve values (fig 5)")->delimiter(',');
  sweep->add_option("--tau1-range", sw.tau1_range, "lo:hi:n x axis of fig 5");
  sweep->add_option("--tau2-range", sw.tau2_range, "lo:hi:n x axis of fig 6");
  add_optimizer(sweep, sw.opt);
  add_common(sweep, sw.common, {"json", "csv"});

  SimulateArgs si;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo run of a threshold policy");
  simulate->add_option("--mu", si.mu, "Harvest rate")->required();
  simulate->add_option("--battery", si.battery, "Battery capacity B")->required();
  simulate->add_option("--thresholds", si.thresholds, "tau_1,...,tau_B")->delimiter(',');
  simulate->add_flag("--optimal", si.optimal, "Simulate the optimized policy");
  simulate->add_flag("--greedy", si.greedy, "Simulate all-zero thresholds");
  simulate->add_flag("--check", si.check, "Compare with the analytic value; exit 4 if z > 4");
  simulate->add_option("--penalty", si.penalty, "Penalty function");
  simulate->add_option("--seed", si.sim.seed, "Generator seed");
  simulate->add_option("--renewals", si.sim.renewals, "Update cycles, warmup included");
  simulate->add_option("--warmup", si.sim.warmup, "Cycles discarded before measuring");
  simulate->add_option("--initial-state", si.sim.initial_state, "Battery level at time 0");
  simulate->add_option("--batches", si.sim.batches, "Batches for the standard error");
  add_optimizer(simulate, si.opt);
  add_common(simulate, si.common, {"json", "csv"});

  TableArgs tb;
  tb.opt.q = 12;
  auto* table = app.add_subcommand("table1", "Optimal thresholds for B = 1..4 at mu = 1 next to reference values");
  add_optimizer(table, tb.opt);
  add_common(table, tb.common, {"text", "json", "csv"});

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  }

  try {
    if (*evaluate) return cmd_evaluate(ev);
    if (*optimize) return cmd_optimize(op);
    if (*sweep) return cmd_sweep(sw);
    if (*simulate) return cmd_simulate(si);
    return cmd_table1(tb);
  } catch (const aoi::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInternal;
  }
}
