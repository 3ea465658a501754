#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "laguerre/bessel.hpp"
#include "laguerre/config.hpp"
#include "laguerre/errors.hpp"
#include "laguerre/model.hpp"
#include "laguerre/polynomial.hpp"

namespace laguerre {

/// log p_t^alpha(x, y) in one coordinate, from the Bessel closed form
///   Gamma(1+a) exp(-q(x+y)/s) / (s (q x y)^{a/2}) I_a(2 sqrt(q x y) / s),
/// q = e^-t, s = 1 - e^-t. The (qxy)^{a/2} factor is folded into the
/// reduced Bessel function so the expression stays finite as xy -> 0.
inline double log_kernel_1d(double alpha, double t, double x, double y) {
  const double q = std::exp(-t);
  const double s = -std::expm1(-t);
  const double xy = x * y;
  const double z = 2.0 * std::sqrt(q * xy) / s;
  const double base = std::lgamma(1.0 + alpha) - (alpha + 1.0) * std::log(s);
  if (z > default_policy().bessel_switchover) {
    // -q(x+y)/s + z = -q (sqrt(x) - sqrt(y))^2 / s + 2 sqrt(qxy) / (1 + sqrt(q)), symmetric
    // and free of cancellation for small t.
    const double d = std::sqrt(x) - std::sqrt(y);
    const double rq = std::exp(-0.5 * t);
    return base - q * d * d / s + 2.0 * rq * std::sqrt(xy) / (1.0 + rq) - alpha * std::log(0.5 * z) +
           log_bessel_i_scaled(alpha, z);
  }
  return base - q * (x + y) / s + log_bessel_i_reduced(alpha, z);
}

inline double kernel_1d(double alpha, double t, double x, double y) { return std::exp(log_kernel_1d(alpha, t, x, y)); }

/// Heat-kernel evaluator for p_t^alpha.
class KernelEvaluator {
 public:
  explicit KernelEvaluator(ModelParams params, int spectral_cutoff = default_policy().spectral_cutoff,
                           bool log_domain = true, double t_min = default_policy().spectral_t_min)
      : params_(std::move(params)), cutoff_(spectral_cutoff), log_domain_(log_domain), t_min_(t_min) {
    if (spectral_cutoff < 0) throw std::invalid_argument("KernelEvaluator: spectral_cutoff must be >= 0");
  }

  [[nodiscard]] const ModelParams& params() const { return params_; }
  [[nodiscard]] int spectral_cutoff() const { return cutoff_; }
  [[nodiscard]] bool log_domain() const { return log_domain_; }
  [[nodiscard]] double t_min() const { return t_min_; }

  /// log p_t^alpha(x, y) as a sum of one-dimensional log kernels.
  [[nodiscard]] double log_closed(double t, std::span<const double> x, std::span<const double> y) const {
    check_args(t, x, y);
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) s += log_kernel_1d(params_.alpha(k), t, x[k], y[k]);
    return s;
  }

  /// Closed-form p_t^alpha(x, y). The product is formed in log space unless
  /// log_domain is off, in which case the one-dimensional factors are multiplied.
  [[nodiscard]] double closed(double t, std::span<const double> x, std::span<const double> y) const {
    if (log_domain_) return std::exp(log_closed(t, x, y));
    check_args(t, x, y);
    double v = 1.0;
    for (std::size_t k = 0; k < x.size(); ++k) v *= kernel_1d(params_.alpha(k), t, x[k], y[k]);
    return v;
  }

  /// Truncated spectral sum over multi-indices with |k| <= spectral_cutoff.
  [[nodiscard]] double spectral(double t, std::span<const double> x, std::span<const double> y) const {
    check_args(t, x, y);
    if (t < t_min_) throw PrecisionError("kernel_spectral: t below the trusted minimum");
    const auto cutoff = static_cast<unsigned>(cutoff_);
    // poly[d] = sum over indices of the first coordinates with |k| = d.
    std::vector<double> poly(cutoff + 1, 0.0);
    poly[0] = 1.0;
    std::vector<double> next(cutoff + 1);
    for (std::size_t dim = 0; dim < x.size(); ++dim) {
      const double a = params_.alpha(dim);
      const auto lx = laguerre_l_sequence(cutoff, a, x[dim]);
      const auto ly = laguerre_l_sequence(cutoff, a, y[dim]);
      std::vector<double> factor(cutoff + 1);
      for (unsigned k = 0; k <= cutoff; ++k) factor[k] = lx[k] * ly[k] * std::exp(-static_cast<double>(k) * t);
      std::fill(next.begin(), next.end(), 0.0);
      for (unsigned i = 0; i <= cutoff; ++i) {
        if (poly[i] == 0.0) continue;
        for (unsigned k = 0; i + k <= cutoff; ++k) next[i + k] += poly[i] * factor[k];
      }
      poly.swap(next);
    }
    double total = 0.0;
    for (unsigned d = 0; d <= cutoff; ++d) total += poly[d];
    return total;
  }

 private:
  void check_args(double t, std::span<const double> x, std::span<const double> y) const {
    if (!(t > 0.0)) throw std::domain_error("kernel: t must be > 0");
    if (x.size() != params_.dim() || y.size() != params_.dim())
      throw std::invalid_argument("kernel: dimension mismatch");
    for (std::size_t k = 0; k < x.size(); ++k)
      if (!(x[k] > 0.0) || !(y[k] > 0.0)) throw std::domain_error("kernel: points must be strictly positive");
  }

  ModelParams params_;
  int cutoff_;
  bool log_domain_;
  double t_min_;
};

inline double kernel_closed(const KernelEvaluator& ev, double t, std::span<const double> x, std::span<const double> y) {
  return ev.closed(t, x, y);
}

inline double kernel_spectral(const KernelEvaluator& ev, double t, std::span<const double> x,
                              std::span<const double> y) {
  return ev.spectral(t, x, y);
}

/// Threshold (1 - e^-t)^2 / (4 e^-t) on xy separating the two regimes of the comparison function.
inline double phi_threshold(double t) {
  const double s = -std::expm1(-t);
  return s * s / (4.0 * std::exp(-t));
}

/// Two-regime comparison function phi_t(x, y) that sandwiches p_t^alpha up to constants.
inline double phi_comparison(double alpha, double t, double x, double y) {
  if (!(t > 0.0) || !(x > 0.0) || !(y > 0.0)) throw std::domain_error("phi_comparison: arguments must be > 0");
  const double q = std::exp(-t);
  const double s = -std::expm1(-t);
  const double xy = x * y;
  if (xy < phi_threshold(t)) return std::exp(-(alpha + 1.0) * std::log(s) - q * (x + y) / s);
  const double log_v = (-alpha / 2.0 - 0.25) * std::log(4.0 * q * xy) - 1.0 - 0.5 * std::log(s) -
                       (q * (x + y) - 2.0 * std::sqrt(q * xy)) / s;
  return std::exp(log_v);
}

}  // namespace laguerre
