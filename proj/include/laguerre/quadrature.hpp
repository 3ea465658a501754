#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "laguerre/config.hpp"
#include "laguerre/sampling.hpp"
#include "laguerre/special.hpp"

namespace laguerre {

/// Fixed Gauss-Legendre rule on [-1, 1].
template <int Order>
struct GaussLegendre {
  std::array<double, Order> nodes{};
  std::array<double, Order> weights{};

  GaussLegendre() {
    for (int i = 0; i < (Order + 1) / 2; ++i) {
      double z = std::cos(std::numbers::pi * (i + 0.75) / (Order + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p1 = 1.0, p2 = 0.0;
        for (int j = 1; j <= Order; ++j) {
          const double p3 = p2;
          p2 = p1;
          p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
        }
        dp = Order * (z * p1 - p2) / (z * z - 1.0);
        const double dz = p1 / dp;
        z -= dz;
        if (std::abs(dz) < 1e-16) break;
      }
      nodes[i] = -z;
      nodes[Order - 1 - i] = z;
      weights[i] = weights[Order - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
  }

  static const GaussLegendre& instance() {
    static const GaussLegendre rule;
    return rule;
  }

  template <class F>
  double integrate(F&& f, double a, double b) const {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double s = 0.0;
    for (int i = 0; i < Order; ++i) s += weights[i] * f(mid + half * nodes[i]);
    return s * half;
  }
};

using GL20 = GaussLegendre<20>;

struct QuadOptions {
  double rel_tol = default_policy().quad_tol;
  double abs_tol = default_policy().quad_tol;
  int initial_panels = default_policy().quad_initial_panels;
  int max_doublings = default_policy().quad_max_doublings;
  /// Exponent beta of the leading u^beta behaviour at a left end at 0;
  /// controls how deep the geometric grading goes.
  double left_power = 0.0;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  bool converged = false;
  int panels = 0;
};

namespace detail {

// Uniform panels over [a, b]; when `grade_left`, the first panel is split
// geometrically towards a (used when a = 0 carries an algebraic endpoint).
template <class G>
double composite(G&& g, double a, double b, int panels, bool grade_left, double left_power) {
  const auto& rule = GL20::instance();
  const double h = (b - a) / panels;
  double s = 0.0;
  int first = 0;
  if (grade_left) {
    constexpr double ratio = 0.2;
    const double expo = std::max(left_power + 1.0, 0.05);
    const int levels = std::clamp(static_cast<int>(std::ceil(16.0 / (expo * std::log10(1.0 / ratio)))), 1, 200);
    double right = a + h;
    for (int k = 0; k < levels; ++k) {
      const double left = a + (right - a) * ratio;
      s += rule.integrate(g, left, right);
      right = left;
    }
    s += rule.integrate(g, a, right);
    first = 1;
  }
  for (int p = first; p < panels; ++p) s += rule.integrate(g, a + p * h, a + (p + 1) * h);
  return s;
}

}  // namespace detail

/// Integral of g over [a, b] by composite Gauss-Legendre, doubling the panel
/// count until two successive results agree.
template <class G>
QuadResult integrate_interval(G&& g, double a, double b, bool grade_left, const QuadOptions& opt = {}) {
  QuadResult r;
  if (!(b > a)) return r;
  int panels = std::max(1, opt.initial_panels);
  double prev = detail::composite(g, a, b, panels, grade_left, opt.left_power);
  for (int d = 0; d < opt.max_doublings; ++d) {
    panels *= 2;
    const double cur = detail::composite(g, a, b, panels, grade_left, opt.left_power);
    const double diff = std::abs(cur - prev);
    prev = cur;
    if (diff <= opt.abs_tol + opt.rel_tol * std::abs(cur)) {
      r.value = cur;
      r.error = diff;
      r.converged = true;
      r.panels = panels;
      return r;
    }
    r.error = diff;
  }
  r.value = prev;
  r.panels = panels;
  return r;
}

/// Upper end of the flat coordinate beyond which mu^alpha has mass below `tail_mass`.
inline double flat_upper_limit(double alpha, double tail_mass = default_policy().quad_tail_mass) {
  return 2.0 * std::sqrt(gamma_quantile_upper(tail_mass, alpha + 1.0));
}

/// log of the mu^alpha density expressed in u = 2 sqrt(x), including the Jacobian u/2.
inline double log_flat_density(double alpha, double u) {
  const double x = 0.25 * u * u;
  return log_density_mu_1d(alpha, x) + std::log(0.5 * u);
}

/// int f(x) mu^alpha(dx) over x in [x_lo, x_hi] (one dimension), integrated in
/// u = 2 sqrt(x). x_hi = inf uses the tail cutoff of the policy.
template <class F>
QuadResult integrate_mu_1d(double alpha, F&& f, QuadOptions opt = {}, double x_lo = 0.0,
                           double x_hi = std::numeric_limits<double>::infinity()) {
  const double u_lo = 2.0 * std::sqrt(std::max(0.0, x_lo));
  const double u_hi = std::isinf(x_hi) ? std::max(flat_upper_limit(alpha), u_lo + 1.0) : 2.0 * std::sqrt(x_hi);
  opt.left_power = 2.0 * alpha + 1.0;
  auto g = [&](double u) {
    if (u <= 0.0) return 0.0;
    return f(0.25 * u * u) * std::exp(log_flat_density(alpha, u));
  };
  return integrate_interval(g, u_lo, u_hi, u_lo == 0.0, opt);
}

}  // namespace laguerre
