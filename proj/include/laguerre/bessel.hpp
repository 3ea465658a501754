#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "laguerre/config.hpp"

namespace laguerre {

namespace detail {

// log of I_lambda(x) (x/2)^-lambda = log sum_j (x/2)^{2j} / (j! Gamma(lambda + j + 1)).
// All terms are positive for lambda > -1; the sum is accumulated outward
// from its largest term so no scaling issues arise for any x.
inline double log_bessel_i_reduced_series(double lambda, double x) {
  const double y2 = 0.25 * x * x;
  const double m = 0.5 * (-lambda + std::sqrt(lambda * lambda + x * x));
  const double peak = std::max(0.0, std::ceil(m) - 1.0);
  const double log_peak = (peak > 0.0 ? peak * std::log(y2) : 0.0) - std::lgamma(peak + 1.0) -
                          std::lgamma(lambda + peak + 1.0);
  constexpr double eps = 1e-17;
  double sum = 1.0;
  double r = 1.0;
  for (double j = peak;; j += 1.0) {
    r *= y2 / ((j + 1.0) * (lambda + j + 1.0));
    sum += r;
    if (r < eps * sum) break;
  }
  r = 1.0;
  for (double j = peak; j >= 1.0; j -= 1.0) {
    r *= j * (lambda + j) / y2;
    sum += r;
    if (r < eps * sum) break;
  }
  return log_peak + std::log(sum);
}

// Hankel expansion of e^-x I_lambda(x). Returns NaN when the divergent tail
// is reached before the terms drop below double precision.
inline double bessel_i_scaled_hankel(double lambda, double x) {
  const double mu = 4.0 * lambda * lambda;
  double term = 1.0;
  double sum = 1.0;
  double prev = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= -(mu - odd * odd) / (8.0 * k * x);
    if (term == 0.0) break;
    const double mag = std::abs(term);
    if (mag > prev) return std::numeric_limits<double>::quiet_NaN();
    sum += term;
    if (mag < 1e-17 * std::abs(sum)) break;
    prev = mag;
  }
  return sum / std::sqrt(2.0 * std::numbers::pi * x);
}

inline double log_bessel_i_scaled_series(double lambda, double x) {
  return log_bessel_i_reduced_series(lambda, x) + lambda * std::log(0.5 * x) - x;
}

}  // namespace detail

/// log(e^-x I_lambda(x)) for lambda > -1, x >= 0.
inline double log_bessel_i_scaled(double lambda, double x, double switchover = default_policy().bessel_switchover) {
  if (!(lambda > -1.0)) throw std::domain_error("bessel_I: order must exceed -1");
  if (x < 0.0) throw std::domain_error("bessel_I: argument must be >= 0");
  if (x == 0.0) {
    if (lambda == 0.0) return 0.0;
    return lambda > 0.0 ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
  }
  if (x > switchover) {
    const double h = detail::bessel_i_scaled_hankel(lambda, x);
    if (h > 0.0) return std::log(h);
  }
  return detail::log_bessel_i_scaled_series(lambda, x);
}

/// e^-x I_lambda(x), the exponentially scaled modified Bessel function of the first kind.
inline double bessel_I_scaled(double lambda, double x, double switchover = default_policy().bessel_switchover) {
  return std::exp(log_bessel_i_scaled(lambda, x, switchover));
}

/// log(I_lambda(x) (x/2)^-lambda); finite at x = 0 where it equals -lgamma(lambda + 1).
inline double log_bessel_i_reduced(double lambda, double x, double switchover = default_policy().bessel_switchover) {
  if (!(lambda > -1.0)) throw std::domain_error("bessel_I: order must exceed -1");
  if (x < 0.0) throw std::domain_error("bessel_I: argument must be >= 0");
  if (x > switchover) {
    const double h = detail::bessel_i_scaled_hankel(lambda, x);
    if (h > 0.0) return std::log(h) + x - lambda * std::log(0.5 * x);
  }
  return detail::log_bessel_i_reduced_series(lambda, x);
}

}  // namespace laguerre
