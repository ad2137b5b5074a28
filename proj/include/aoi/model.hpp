#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "aoi/error.hpp"

namespace aoi {

// x^n for small non-negative n by repeated multiplication, so that results are
// reproducible bit for bit (std::pow makes no such promise).
constexpr double ipow(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

// Harvest rate mu_h (energy units per unit time, Poisson) and battery capacity B.
class SystemParams {
 public:
  SystemParams(double mu_h, int battery) : mu_h_(mu_h), battery_(battery) {
    if (!std::isfinite(mu_h) || mu_h <= 0.0) {
      throw Error(ErrorCode::kInvalidArgument, "harvest rate must be positive and finite");
    }
    if (battery < 1) throw Error(ErrorCode::kInvalidArgument, "battery capacity must be >= 1");
  }

  double mu_h() const noexcept { return mu_h_; }
  int battery() const noexcept { return battery_; }

 private:
  double mu_h_;
  int battery_;
};

// Monotone threshold policy. Thresholds are stored in level order:
// index 0 holds tau_1 (one unit stored), index B-1 holds tau_B (full battery).
class Policy {
 public:
  int battery() const noexcept { return static_cast<int>(tau_.size()); }

  // 1-based battery level, 1 <= level <= B.
  double threshold(int level) const { return tau_.at(static_cast<std::size_t>(level - 1)); }

  // tau_0 is +inf by convention; it bounds the top survival piece.
  double threshold_or_inf(int level) const {
    return level == 0 ? std::numeric_limits<double>::infinity() : threshold(level);
  }

  double smallest() const noexcept { return tau_.back(); }

  std::span<const double> thresholds() const noexcept { return tau_; }

  friend Policy validate_policy(const SystemParams& params, std::vector<double> thresholds);

  friend bool operator==(const Policy&, const Policy&) = default;

 private:
  explicit Policy(std::vector<double> tau) : tau_(std::move(tau)) {}

  std::vector<double> tau_;
};

inline Policy validate_policy(const SystemParams& params, std::vector<double> thresholds) {
  if (static_cast<int>(thresholds.size()) != params.battery()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "expected " + std::to_string(params.battery()) + " thresholds, got " +
                    std::to_string(thresholds.size()));
  }
  for (double t : thresholds) {
    if (!std::isfinite(t)) throw Error(ErrorCode::kNonFinite, "thresholds must be finite");
  }
  for (std::size_t i = 0; i + 1 < thresholds.size(); ++i) {
    if (thresholds[i] < thresholds[i + 1]) {
      throw Error(ErrorCode::kNotMonotone, "tau_" + std::to_string(i + 1) + " < tau_" +
                                               std::to_string(i + 2));
    }
  }
  if (thresholds.back() < 0.0) {
    throw Error(ErrorCode::kNotMonotone, "tau_B must be non-negative");
  }
  return Policy(std::move(thresholds));
}

inline Policy validate_policy(const SystemParams& params, std::span<const double> thresholds) {
  return validate_policy(params, std::vector<double>(thresholds.begin(), thresholds.end()));
}

// One term c * age^k of a penalty polynomial.
struct PenaltyTerm {
  double coefficient;
  int exponent;

  friend bool operator==(const PenaltyTerm&, const PenaltyTerm&) = default;
};

// Age-penalty function p(age) = sum_k c_k age^k with c_k > 0 and integer k >= 0.
// At least one term must have k >= 1 so that p is unbounded; a k = 0 term
// gives p(0) > 0. Every member of the family is non-decreasing with
// polynomial growth, and its antiderivative P(x) = int_0^x p is exact.
class PenaltySpec {
 public:
  static PenaltySpec identity() { return PenaltySpec({{1.0, 1}}); }

  static PenaltySpec power(int exponent, double coefficient = 1.0) {
    if (exponent < 1) throw Error(ErrorCode::kInvalidArgument, "power exponent must be >= 1");
    return PenaltySpec({{coefficient, exponent}});
  }

  static PenaltySpec combination(std::vector<PenaltyTerm> terms) {
    return PenaltySpec(std::move(terms));
  }

  std::span<const PenaltyTerm> terms() const noexcept { return terms_; }

  bool is_identity() const noexcept {
    return terms_.size() == 1 && terms_[0].coefficient == 1.0 && terms_[0].exponent == 1;
  }

  int max_exponent() const noexcept {
    int k = 0;
    for (const auto& t : terms_) k = std::max(k, t.exponent);
    return k;
  }

  double operator()(double age) const { return eval(age); }

  double eval(double age) const {
    if (!(age >= 0.0)) throw Error(ErrorCode::kNegativeAge, "age must be non-negative");
    double v = 0.0;
    for (const auto& t : terms_) v += t.coefficient * ipow(age, t.exponent);
    return v;
  }

  double antiderivative(double x) const {
    if (!(x >= 0.0)) throw Error(ErrorCode::kNegativeAge, "age must be non-negative");
    double v = 0.0;
    for (const auto& t : terms_) {
      v += t.coefficient * ipow(x, t.exponent + 1) / static_cast<double>(t.exponent + 1);
    }
    return v;
  }

  // Largest t with p(t) <= level (p is continuous and unbounded). Returns 0
  // when p(0) already exceeds level.
  double inverse(double level) const {
    if (eval(0.0) > level) return 0.0;
    double hi = 1.0;
    while (eval(hi) <= level) hi *= 2.0;
    double lo = 0.0;
    for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
      const double mid = 0.5 * (lo + hi);
      (eval(mid) <= level ? lo : hi) = mid;
    }
    return lo;
  }

  // Round-trips through parse_penalty.
  std::string to_string() const {
    if (is_identity()) return "identity";
    std::ostringstream os;
    os.precision(17);
    if (terms_.size() == 1) {
      os << "power:" << terms_[0].exponent << ':' << terms_[0].coefficient;
      return os.str();
    }
    os << "poly:";
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      if (i) os << ',';
      os << terms_[i].coefficient << ':' << terms_[i].exponent;
    }
    return os.str();
  }

  friend bool operator==(const PenaltySpec&, const PenaltySpec&) = default;

 private:
  explicit PenaltySpec(std::vector<PenaltyTerm> terms) : terms_(std::move(terms)) {
    if (terms_.empty()) throw Error(ErrorCode::kInvalidArgument, "penalty needs at least one term");
    bool unbounded = false;
    for (const auto& t : terms_) {
      if (!std::isfinite(t.coefficient) || t.coefficient <= 0.0) {
        throw Error(ErrorCode::kInvalidArgument, "penalty coefficients must be positive and finite");
      }
      if (t.exponent < 0 || t.exponent > 16) {
        throw Error(ErrorCode::kInvalidArgument, "penalty exponents must lie in [0, 16]");
      }
      unbounded = unbounded || t.exponent >= 1;
    }
    if (!unbounded) {
      throw Error(ErrorCode::kInvalidArgument, "penalty must grow without bound (need a term with exponent >= 1)");
    }
  }

  std::vector<PenaltyTerm> terms_;
};

// Accepts "identity", "power:K[:C]" (C * age^K) and "poly:C1:K1,C2:K2,...".
inline PenaltySpec parse_penalty(std::string_view text) {
  auto to_double = [&](std::string_view s) {
    std::string buf(s);
    char* end = nullptr;
    const double v = std::strtod(buf.c_str(), &end);
    if (buf.empty() || end != buf.c_str() + buf.size()) {
      throw Error(ErrorCode::kInvalidArgument, "bad number '" + buf + "' in penalty");
    }
    return v;
  };
  auto to_int = [&](std::string_view s) {
    const double v = to_double(s);
    if (v != std::floor(v)) throw Error(ErrorCode::kInvalidArgument, "penalty exponents must be integers");
    return static_cast<int>(v);
  };
  auto split = [](std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
      const auto pos = s.find(sep, start);
      out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
      if (pos == std::string_view::npos) break;
      start = pos + 1;
    }
    return out;
  };

  if (text == "identity") return PenaltySpec::identity();
  if (text.starts_with("power:")) {
    const auto parts = split(text.substr(6), ':');
    if (parts.size() > 2) throw Error(ErrorCode::kInvalidArgument, "expected power:K[:C]");
    const int k = to_int(parts[0]);
    const double c = parts.size() == 2 ? to_double(parts[1]) : 1.0;
    return PenaltySpec::power(k, c);
  }
  if (text.starts_with("poly:")) {
    std::vector<PenaltyTerm> terms;
    for (auto term : split(text.substr(5), ',')) {
      const auto parts = split(term, ':');
      if (parts.size() != 2) throw Error(ErrorCode::kInvalidArgument, "expected poly:C:K[,C:K...]");
      terms.push_back({to_double(parts[0]), to_int(parts[1])});
    }
    return PenaltySpec::combination(std::move(terms));
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown penalty '" + std::string(text) + "'");
}

// E[X | E=j], E[X^2 | E=j] and E[P(X) | E=j] for one post-update battery state.
struct StateMoments {
  double ex = 0.0;
  double ex2 = 0.0;
  double epx = 0.0;
};

struct PolicyMetrics {
  double m1 = 0.0;
  double m2 = 0.0;
  double avg_age = 0.0;
  double avg_penalty = 0.0;
  std::vector<StateMoments> per_state;
  std::vector<double> stationary;
};

}  // namespace aoi
