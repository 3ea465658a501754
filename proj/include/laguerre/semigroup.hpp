#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "laguerre/kernel.hpp"
#include "laguerre/quadrature.hpp"

namespace laguerre {

/// Integration window in the flat coordinate for the law p_t(x, .) mu^alpha(d.).
struct FlatWindow {
  double lo = 0.0;
  double hi = 0.0;
};

inline FlatWindow transition_window(double alpha, double t, double x, double width = 14.0) {
  const double q = std::exp(-t);
  const double s = -std::expm1(-t);
  const double center = 2.0 * std::sqrt(x * q + std::max(alpha + 1.0, 0.0) * s);
  const double half = width * std::sqrt(2.0 * s) + 2.0 * std::sqrt(std::max(alpha + 1.0, 0.0) * s);
  return {std::max(0.0, center - half), center + half};
}

/// One-dimensional P_t^alpha f(x) = int p_t(x, y) f(y) mu^alpha(dy) by quadrature of the
/// closed-form kernel, optionally restricted to y in [y_lo, y_hi].
template <class F>
QuadResult semigroup_apply(double alpha, double t, F&& f, double x, QuadOptions opt = {}, double y_lo = 0.0,
                           double y_hi = std::numeric_limits<double>::infinity()) {
  if (!(t > 0.0)) throw std::domain_error("semigroup_apply: t must be > 0");
  if (!(x > 0.0)) throw std::domain_error("semigroup_apply: x must be > 0");
  const FlatWindow w = transition_window(alpha, t, x);
  const double lo = std::max(w.lo, 2.0 * std::sqrt(std::max(0.0, y_lo)));
  const double hi = std::isinf(y_hi) ? w.hi : std::min(w.hi, 2.0 * std::sqrt(y_hi));
  if (!(hi > lo)) return QuadResult{0.0, 0.0, true, 0};
  opt.left_power = 2.0 * alpha + 1.0;
  auto g = [&](double v) {
    if (v <= 0.0) return 0.0;
    const double y = 0.25 * v * v;
    return f(y) * std::exp(log_kernel_1d(alpha, t, x, y) + log_flat_density(alpha, v));
  };
  return integrate_interval(g, lo, hi, lo == 0.0, opt);
}

}  // namespace laguerre
