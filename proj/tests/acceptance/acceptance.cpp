// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "aoi/aoi.hpp"
#include "ks.hpp"

using namespace aoi;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail) {
  std::printf("[%s] %2d %s: %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double age_of(double mu, std::vector<double> tau) {
  const SystemParams p(mu, static_cast<int>(tau.size()));
  return policy_metrics(p, validate_policy(p, std::move(tau)), PenaltySpec::identity()).avg_age;
}

// Optimal average age, tau_B, and the worst upper-threshold deviation from
// the reference table at mu = 1, for B = 1..4.
void table_reproduction() {
  const auto t0 = Clock::now();
  OptimizerConfig config;
  config.q = 12;
  const auto rows = optimal_threshold_table(config);
  const double elapsed = seconds_since(t0);
  bool ok = elapsed <= 300.0;
  std::string detail;
  for (const auto& r : rows) {
    const bool row_ok = r.age_deviation <= 0.01 && r.tau_b_deviation <= 0.02 && r.upper_deviation <= 0.1;
    ok = ok && row_ok;
    detail += fmt("B=%d age %.5f (ref %.3g, d %.4f) tau_B %.5f (d %.4f) upper d %.4f%s; ", r.reference.battery,
                  r.result.objective, r.reference.avg_age, r.age_deviation, r.result.policy.smallest(),
                  r.tau_b_deviation, r.upper_deviation, row_ok ? "" : " <- out of tolerance");
  }
  detail += fmt("runtime %.1fs", elapsed);
  report(1, "reference table", ok, detail);
}

void lambert_optimum() {
  const double t = b1_optimal(1.0).tau1;
  const double residual = std::abs(t * t - 2.0 * std::exp(-t));
  OptimizerConfig config;
  config.grid_points = 2001;
  const double grid = grid_search(SystemParams(1.0, 1), config).policy.threshold(1);
  const bool ok = residual <= 1e-10 && std::abs(grid - t) <= 2e-4;
  report(2, "unit-battery optimum", ok,
         fmt("tau1* %.10f, |tau^2 - 2e^-tau| %.2e, grid %.6f (d %.2e)", t, residual, grid, std::abs(grid - t)));
}

void closed_form_equivalence() {
  double worst1 = 0.0, worst2 = 0.0;
  int pairs = 0;
  for (double mu : {0.5, 1.0, 2.0}) {
    for (int a = 0; a < 20; ++a) {
      const double t1 = 0.1 + 0.2 * a;
      const double g1 = age_of(mu, {t1});
      worst1 = std::max(worst1, std::abs(b1_average_age(mu, t1) - g1) / g1);
      for (int c = 0; c < 20; ++c) {
        const double t2 = 0.1 + 0.2 * c;
        if (t2 > t1) continue;
        const double g2 = age_of(mu, {t1, t2});
        worst2 = std::max(worst2, std::abs(b2_average_age(mu, t1, t2) - g2) / g2);
        ++pairs;
      }
    }
  }
  report(3, "closed forms vs general evaluator", worst1 <= 1e-9 && worst2 <= 1e-9,
         fmt("max rel err B=1 %.2e, B=2 %.2e over %d monotone pairs", worst1, worst2, pairs));
}

void fixed_point() {
  double worst = 0.0;
  std::string detail;
  for (const PenaltySpec& pen : {PenaltySpec::identity(), PenaltySpec::power(2)}) {
    for (int b = 1; b <= 3; ++b) {
      OptimizerConfig config;
      config.penalty = pen;
      const auto r = optimize_penalty(SystemParams(1.0, b), config);
      worst = std::max(worst, r.fixed_point_residual);
      detail += fmt("%s B=%d %.1e; ", pen.to_string().c_str(), b, r.fixed_point_residual);
    }
  }
  report(4, "fixed point p(tau_B) = optimum", worst <= 2e-3, detail + fmt("max %.2e", worst));
}

void moment_identity() {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> u(0.2, 3.0);
  double worst = 0.0;
  int checks = 0;
  for (int k = 0; k < 3; ++k) {
    const int b = 3 + k;
    std::vector<double> tau(static_cast<std::size_t>(b));
    for (double& t : tau) t = u(rng);
    std::sort(tau.begin(), tau.end(), std::greater<>());
    for (std::size_t i = 1; i < tau.size(); ++i) tau[i] = std::min(tau[i], tau[i - 1] - 0.05);
    const SystemParams p(1.0, b);
    const Policy pol = validate_policy(p, tau);
    for (int level = 1; level <= b; ++level) {
      for (double r : moment_derivative_residuals(p, pol, level, 1e-5)) {
        worst = std::max(worst, r);
        ++checks;
      }
    }
  }
  report(5, "moment derivative identity", worst <= 1e-4, fmt("max residual %.2e over %d (i, j) pairs", worst, checks));
}

void gap_certificate() {
  const double bound = 1.0 / 2048.0;
  const double slack = 1e-4;
  bool ok = true;
  std::string detail;
  for (int b : {2, 3}) {
    OptimizerConfig a;
    a.q = 10;
    OptimizerConfig g;
    g.grid_resolution = 1e-4;
    const SystemParams p(1.0, b);
    const auto alg = algorithm1(p, a);
    const auto grid = grid_search(p, g);
    const double diff = alg.objective - grid.objective;
    ok = ok && diff <= bound + slack;
    detail += fmt("B=%d algorithm %.8f grid %.8f diff %+.2e; ", b, alg.objective, grid.objective, diff);
  }
  report(6, "bisection gap certificate", ok, detail + fmt("bound %.4e + slack %.0e", bound, slack));
}

void monte_carlo() {
  const auto t0 = Clock::now();
  const SystemParams p(1.0, 2);
  const Policy pol = validate_policy(p, std::vector<double>{1.5, 0.72});
  SimConfig config;
  config.seed = 42;
  config.renewals = 1'000'000;
  const SimReport r = simulate(p, pol, PenaltySpec::identity(), config);
  const double elapsed = seconds_since(t0);
  const double target = 0.7198;
  const double z = std::abs(r.avg_age - target) / r.stderr_age;
  const double pi[2] = {0.3354, 0.6646};
  const double n = static_cast<double>(r.measured_cycles);
  double zf = 0.0;
  for (int j = 0; j < 2; ++j) zf = std::max(zf, std::abs(r.state_freq[j] - pi[j]) / std::sqrt(pi[j] * (1 - pi[j]) / n));
  const bool ok = z <= 3.0 && zf <= 3.0 && elapsed <= 30.0;
  report(7, "Monte Carlo agreement", ok,
         fmt("age %.5f +- %.5f (z %.2f), freq (%.5f, %.5f) (max z %.2f), %.2fs", r.avg_age, r.stderr_age, z,
             r.state_freq[0], r.state_freq[1], zf, elapsed));
}

void structure() {
  std::vector<double> best;
  for (int b = 1; b <= 4; ++b) best.push_back(optimize_penalty(SystemParams(1.0, b), OptimizerConfig{}).objective);
  bool decreasing = true;
  for (std::size_t i = 1; i < best.size(); ++i) decreasing = decreasing && best[i] < best[i - 1];
  const bool above = best.back() > 0.5;
  double spread = 0.0;
  for (int b = 1; b <= 4; ++b) {
    double lo = 1e9, hi = -1e9;
    for (double mu : {0.5, 1.0, 2.0}) {
      const double v = mu * optimize_penalty(SystemParams(mu, b), OptimizerConfig{}).objective;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    spread = std::max(spread, hi - lo);
  }
  report(8, "structural monotonicity", decreasing && above && spread <= 1e-3,
         fmt("optimum B=1..4: %.5f %.5f %.5f %.5f; > 1/(2mu): %s; max spread of mu*opt %.1e", best[0], best[1],
             best[2], best[3], above ? "yes" : "no", spread));
}

void distributional() {
  const SystemParams p(1.0, 2);
  const Policy pol = validate_policy(p, std::vector<double>{1.5, 0.72});
  const std::size_t n = 100'000;
  bool ok = true;
  std::string detail;
  for (int j = 0; j < 2; ++j) {
    const auto xs = sample_interupdate(p, pol, j, n, split_seed(42, static_cast<std::uint64_t>(j)));
    const double d = ks::statistic(xs, [&](double x) { return interupdate_cdf(p, pol, j, x); });
    ok = ok && d <= ks::critical_001(n);
    detail += fmt("j=%d D %.5f; ", j, d);
  }
  report(9, "Kolmogorov-Smirnov vs conditional CDF", ok, detail + fmt("critical %.5f", ks::critical_001(n)));
}

void tau_b_invariance() {
  bool ok = true;
  int perturbations = 0;
  for (const auto& base : std::vector<std::vector<double>>{{1.5, 0.72}, {1.5, 1.2, 0.64}, {1.5, 1.2, 0.86, 0.604}}) {
    const SystemParams p(1.0, static_cast<int>(base.size()));
    const auto t0 = transition_matrix(p, validate_policy(p, base));
    const auto s0 = stationary(t0);
    const double ceiling = base[base.size() - 2];
    for (double f : {0.0, 0.25, 0.5, 0.9, 1.0}) {
      auto tau = base;
      tau.back() = f * ceiling;
      const auto t1 = transition_matrix(p, validate_policy(p, tau));
      ok = ok && t1 == t0 && stationary(t1) == s0;
      ++perturbations;
    }
  }
  report(10, "chain independent of tau_B", ok, fmt("%d perturbations, bitwise comparison", perturbations));
}

}  // namespace

int main() {
  table_reproduction();
  lambert_optimum();
  closed_form_equivalence();
  fixed_point();
  moment_identity();
  gap_certificate();
  monte_carlo();
  structure();
  distributional();
  tau_b_invariance();
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
