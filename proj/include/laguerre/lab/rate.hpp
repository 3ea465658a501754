#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string_view>

#include "laguerre/decimal.hpp"
#include "laguerre/errors.hpp"
#include "laguerre/model.hpp"

namespace laguerre::lab {

/// Rate branches of the upper bound on E W2(mu_n, mu^alpha)^2, keyed by alpha_* + N.
enum class Regime {
  power = 1,        // alpha_* + N > 1:        log n / n^{1/(alpha_* + N)}
  log_squared = 2,  // alpha_* + N = 1:        (log n)^2 / n
  log_power = 3,    // alpha_* + N in (1/2,1): (log n)^{2(alpha_* + N) - 1} / n
  log_log = 4,      // alpha_* + N = 1/2:      log log n / n
};

inline std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::power:
      return "power";
    case Regime::log_squared:
      return "log-squared";
    case Regime::log_power:
      return "log-power";
    case Regime::log_log:
      return "log-log";
  }
  return "unknown";
}

inline Regime regime_from_string(std::string_view s) {
  for (Regime r : {Regime::power, Regime::log_squared, Regime::log_power, Regime::log_log})
    if (to_string(r) == s) return r;
  throw std::invalid_argument("unknown regime: " + std::string(s));
}

/// Decided on the exact decimal alpha entries: the sign of alpha_* + N - 1 and of alpha_* + N - 1/2.
inline Regime classify_regime(const ModelParams& params) {
  if (!params.theorem_regime_ok()) throw UnsupportedError("classify_regime: every alpha_i must be >= -1/2");
  const auto& a = params.alpha_exact();
  const auto n = static_cast<std::int64_t>(params.dim());
  const int vs_one = Decimal::sign_of_sum(a, n - 1, 1);
  if (vs_one > 0) return Regime::power;
  if (vs_one == 0) return Regime::log_squared;
  const int vs_half = Decimal::sign_of_sum(a, 2 * n - 1, 2);
  if (vs_half > 0) return Regime::log_power;
  return Regime::log_log;
}

struct PredictedRate {
  Regime regime = Regime::power;
  double value = 0.0;
};

/// Constant-free rate of the upper bound at sample size n >= 3.
inline PredictedRate predicted_rate(const ModelParams& params, double n) {
  if (!(n >= 3.0)) throw std::domain_error("predicted_rate: n must be >= 3");
  const Regime r = classify_regime(params);
  const double k = params.alpha_star() + static_cast<double>(params.dim());
  const double ln = std::log(n);
  switch (r) {
    case Regime::power:
      return {r, ln / std::pow(n, 1.0 / k)};
    case Regime::log_squared:
      return {r, ln * ln / n};
    case Regime::log_power:
      return {r, std::pow(ln, 2.0 * k - 1.0) / n};
    case Regime::log_log:
      return {r, std::log(ln) / n};
  }
  return {r, 0.0};
}

/// Constant-free t-dependent combination t + (1/n)[...] that is optimized in t; the n^{-c}
/// truncation contribution is left out.
inline double tradeoff_bound(const ModelParams& params, double n, double R, double t) {
  if (!(t > 0.0)) throw std::domain_error("tradeoff_bound: t must be > 0");
  const double k = params.alpha_star() + static_cast<double>(params.dim());
  const double r2 = R * R;
  double bracket = 0.0;
  switch (classify_regime(params)) {
    case Regime::power:
      bracket = std::pow(r2, k) / std::pow(t, k - 1.0) + std::pow(r2, 2.0 * k - 1.0);
      break;
    case Regime::log_squared:
      bracket = r2 * std::log(1.0 / t) + r2;
      break;
    case Regime::log_power:
      bracket = std::pow(r2, 2.0 * k - 1.0);
      break;
    case Regime::log_log:
      bracket = 1.0 + std::log(r2);
      break;
  }
  return t + bracket / n;
}

}  // namespace laguerre::lab
