#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace laguerre {

namespace detail {

inline constexpr int kGammaMaxIter = 200000;
inline constexpr double kGammaEps = 1e-16;

// log(x^a e^-x / Gamma(a)).
inline double log_gamma_prefactor(double a, double x) { return a * std::log(x) - x - std::lgamma(a); }

// Lower regularized P(a, x) by its power series; accurate for x < a + 1.
inline double gamma_p_series(double a, double x) {
  double ap = a;
  double del = 1.0 / a;
  double sum = del;
  for (int n = 0; n < kGammaMaxIter; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * kGammaEps) break;
  }
  return sum * std::exp(log_gamma_prefactor(a, x));
}

// Upper regularized Q(a, x) by Lentz's continued fraction; accurate for x >= a + 1.
inline double gamma_q_fraction(double a, double x) {
  constexpr double tiny = std::numeric_limits<double>::min() / kGammaEps;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kGammaMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kGammaEps) break;
  }
  return std::exp(log_gamma_prefactor(a, x)) * h;
}

}  // namespace detail

/// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a).
inline double gamma_p(double a, double x) {
  if (!(a > 0.0)) throw std::domain_error("gamma_p: shape must be > 0");
  if (x < 0.0) throw std::domain_error("gamma_p: x must be >= 0");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return x < a + 1.0 ? detail::gamma_p_series(a, x) : 1.0 - detail::gamma_q_fraction(a, x);
}

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
inline double gamma_q(double a, double x) {
  if (!(a > 0.0)) throw std::domain_error("gamma_q: shape must be > 0");
  if (x < 0.0) throw std::domain_error("gamma_q: x must be >= 0");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return x < a + 1.0 ? 1.0 - detail::gamma_p_series(a, x) : detail::gamma_q_fraction(a, x);
}

/// Density of Gamma(shape, 1) at x > 0.
inline double gamma_pdf(double shape, double x) {
  if (x <= 0.0) return 0.0;
  return std::exp((shape - 1.0) * std::log(x) - x - std::lgamma(shape));
}

namespace detail {

// Solves P(a, x) = p (upper == false) or Q(a, x) = p (upper == true) by
// Halley steps kept inside a shrinking bracket.
inline double gamma_inverse(double p, double a, bool upper) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("gamma_quantile: probability must lie in (0, 1)");
  if (!(a > 0.0)) throw std::domain_error("gamma_quantile: shape must be > 0");
  // Solve against the smaller tail, where the residual keeps full relative precision.
  if (p > 0.5) {
    p = 1.0 - p;
    upper = !upper;
  }
  const double lower_p = upper ? 1.0 - p : p;

  // Initial guess (Wilson-Hilferty for a > 1, power/exponential tails otherwise).
  double x;
  if (a > 1.0) {
    const bool lower_half = lower_p < 0.5;
    // Smaller of the two tail masses, taken from the caller's value to keep precision.
    const double tail = lower_half ? (upper ? 1.0 - p : p) : (upper ? p : 1.0 - p);
    const double t = std::sqrt(-2.0 * std::log(tail));
    double z = (2.30753 + t * 0.27061) / (1.0 + t * (0.99229 + t * 0.04481)) - t;
    if (lower_half) z = -z;
    x = std::max(1e-3, a * std::pow(1.0 - 1.0 / (9.0 * a) - z / (3.0 * std::sqrt(a)), 3));
  } else {
    const double t = 1.0 - a * (0.253 + a * 0.12);
    if (!upper && p < t) {
      x = std::pow(p / t, 1.0 / a);
    } else if (upper && p > 1.0 - t) {
      x = std::pow((1.0 - p) / t, 1.0 / a);
    } else {
      const double tail = upper ? p : 1.0 - p;
      x = 1.0 - std::log(tail / (1.0 - t));
    }
  }
  if (!(x > 0.0) || !std::isfinite(x)) x = a;

  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  const double lga = std::lgamma(a);
  for (int iter = 0; iter < 200; ++iter) {
    // err > 0 means x is beyond the root.
    const double err = upper ? p - gamma_q(a, x) : gamma_p(a, x) - p;
    if (err > 0.0) {
      hi = x;
    } else if (err < 0.0) {
      lo = x;
    } else {
      return x;
    }
    const double dens = std::exp((a - 1.0) * std::log(x) - x - lga);
    double step;
    if (dens > 0.0 && std::isfinite(dens)) {
      const double newton = err / dens;
      const double curv = (a - 1.0) / x - 1.0;
      step = newton / (1.0 - 0.5 * std::clamp(newton * curv, -1.0, 1.0));
    } else {
      step = std::numeric_limits<double>::quiet_NaN();
    }
    double next = x - step;
    if (!(next > lo && next < hi) || !std::isfinite(next)) {
      next = std::isinf(hi) ? 2.0 * x + 1.0 : 0.5 * (lo + hi);
    }
    if (std::abs(next - x) <= 1e-15 * x) return next;
    if (std::isfinite(hi) && (hi - lo) <= 1e-15 * hi) return 0.5 * (lo + hi);
    x = next;
  }
  return x;
}

}  // namespace detail

/// Quantile of Gamma(shape, 1): x with P(shape, x) = p.
inline double gamma_quantile(double p, double shape) { return detail::gamma_inverse(p, shape, false); }

/// Upper-tail quantile of Gamma(shape, 1): x with Q(shape, x) = q.
inline double gamma_quantile_upper(double q, double shape) { return detail::gamma_inverse(q, shape, true); }

/// log(Gamma(a + p) / Gamma(a)); the asymptotic expansion in 1/a avoids the
/// cancellation of two large lgamma values.
inline double log_gamma_ratio(double a, double p) {
  if (a >= 1e3 && std::abs(p) <= 2.0) {
    const double c = p * (p - 1.0);
    return p * std::log(a) + c / (2.0 * a) - c * (2.0 * p - 1.0) / (12.0 * a * a) + c * c / (12.0 * a * a * a);
  }
  return std::lgamma(a + p) - std::lgamma(a);
}

}  // namespace laguerre
