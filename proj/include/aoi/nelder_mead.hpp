#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <utility>
#include <vector>

namespace aoi {

struct SimplexOptions {
  double x_tol = 1e-6;  // stop once every vertex is within x_tol (inf-norm) of the best
  int max_evaluations = 20000;
  int restarts = 1;  // fresh simplexes built around the converged point
};

struct SimplexResult {
  std::vector<double> x;
  double fx = 0.0;
  int evaluations = 0;
  bool converged = false;
};

namespace detail {

template <class F>
SimplexResult simplex_descent(F& f, const std::vector<double>& x0, const std::vector<double>& steps,
                              const SimplexOptions& opt, int budget) {
  const std::size_t n = x0.size();
  const double dn = static_cast<double>(n);
  // Dimension-adaptive coefficients (reflection, expansion, contraction, shrink).
  const double alpha = 1.0;
  const double gamma = 1.0 + 2.0 / dn;
  const double rho = 0.75 - 1.0 / (2.0 * dn);
  const double sigma = 1.0 - 1.0 / dn;

  std::vector<std::vector<double>> v(n + 1, x0);
  for (std::size_t i = 0; i < n; ++i) v[i + 1][i] += steps[i];
  std::vector<double> fv(n + 1);
  int evals = 0;
  for (std::size_t i = 0; i <= n; ++i) {
    fv[i] = f(v[i]);
    ++evals;
  }
  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), trial(n), trial2(n);
  bool converged = false;

  auto point = [&](double t, const std::vector<double>& from, std::vector<double>& out) {
    for (std::size_t k = 0; k < n; ++k) out[k] = centroid[k] + t * (from[k] - centroid[k]);
  };

  while (true) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second_worst = order[n - 1];

    double spread = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      for (std::size_t k = 0; k < n; ++k) spread = std::max(spread, std::abs(v[i][k] - v[best][k]));
    }
    if (spread <= opt.x_tol) {
      converged = true;
      break;
    }
    if (evals >= budget) break;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t k = 0; k < n; ++k) centroid[k] += v[i][k] / dn;
    }

    point(-alpha, v[worst], trial);
    const double fr = f(trial);
    ++evals;
    if (fr < fv[best]) {
      point(-alpha * gamma, v[worst], trial2);
      const double fe = f(trial2);
      ++evals;
      if (fe < fr) {
        v[worst] = trial2;
        fv[worst] = fe;
      } else {
        v[worst] = trial;
        fv[worst] = fr;
      }
      continue;
    }
    if (fr < fv[second_worst]) {
      v[worst] = trial;
      fv[worst] = fr;
      continue;
    }
    // Outside contraction when the reflection beat the worst vertex, inside otherwise.
    const bool outside = fr < fv[worst];
    point(outside ? -alpha * rho : rho, v[worst], trial2);
    const double fc = f(trial2);
    ++evals;
    if (fc < (outside ? fr : fv[worst])) {
      v[worst] = trial2;
      fv[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      for (std::size_t k = 0; k < n; ++k) v[i][k] = v[best][k] + sigma * (v[i][k] - v[best][k]);
      fv[i] = f(v[i]);
      ++evals;
    }
  }
  const auto it = std::min_element(fv.begin(), fv.end());
  const auto idx = static_cast<std::size_t>(it - fv.begin());
  return {v[idx], *it, evals, converged};
}

}  // namespace detail

// Derivative-free simplex minimization. steps[k] sets the initial edge along
// coordinate k. Ties between vertices keep their previous order, so runs are
// deterministic.
template <class F>
SimplexResult nelder_mead(F&& f, std::vector<double> x0, std::vector<double> steps, const SimplexOptions& opt = {}) {
  if (x0.empty()) {
    return {x0, f(x0), 1, true};
  }
  int budget = opt.max_evaluations;
  SimplexResult r = detail::simplex_descent(f, x0, steps, opt, budget);
  int used = r.evaluations;
  for (int k = 0; k < opt.restarts && used < opt.max_evaluations; ++k) {
    for (double& s : steps) s = std::max(std::abs(s) * 0.05, 50.0 * opt.x_tol);
    SimplexResult again = detail::simplex_descent(f, r.x, steps, opt, opt.max_evaluations - used);
    used += again.evaluations;
    if (again.fx <= r.fx) r = std::move(again);
  }
  r.evaluations = used;
  return r;
}

}  // namespace aoi
