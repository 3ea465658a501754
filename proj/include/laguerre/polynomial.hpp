#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "laguerre/config.hpp"
#include "laguerre/model.hpp"

namespace laguerre {

/// Generalized Laguerre polynomial L_k^alpha(x) by the three-term recurrence
/// (k+1) L_{k+1} = (2k + 1 + alpha - x) L_k - (k + alpha) L_{k-1}.
inline double laguerre_L(unsigned k, double alpha, double x) {
  double prev = 1.0;
  if (k == 0) return prev;
  double cur = 1.0 + alpha - x;
  for (unsigned j = 1; j < k; ++j) {
    const double next = ((2.0 * j + 1.0 + alpha - x) * cur - (j + alpha) * prev) / (j + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

/// Constant c with c^2 * int (L_k^alpha)^2 dmu^alpha = 1,
/// i.e. c = sqrt(k! Gamma(alpha + 1) / Gamma(k + alpha + 1)).
inline double laguerre_norm_constant(unsigned k, double alpha) {
  return std::exp(0.5 * (std::lgamma(k + 1.0) + std::lgamma(alpha + 1.0) - std::lgamma(k + alpha + 1.0)));
}

/// Orthonormal one-dimensional values l_0^alpha(x), ..., l_K^alpha(x).
inline std::vector<double> laguerre_l_sequence(unsigned max_degree, double alpha, double x) {
  std::vector<double> out(max_degree + 1);
  double prev = 1.0;
  out[0] = 1.0;
  if (max_degree == 0) return out;
  double cur = 1.0 + alpha - x;
  out[1] = cur;
  for (unsigned j = 1; j < max_degree; ++j) {
    const double next = ((2.0 * j + 1.0 + alpha - x) * cur - (j + alpha) * prev) / (j + 1.0);
    prev = cur;
    cur = next;
    out[j + 1] = cur;
  }
  for (unsigned k = 0; k <= max_degree; ++k) out[k] *= laguerre_norm_constant(k, alpha);
  return out;
}

/// Normalized multivariate Laguerre polynomial l_n^alpha(x) = prod_i c_{n_i} L_{n_i}^{alpha_i}(x_i).
inline double laguerre_l_normalized(const MultiIndex& n, const ModelParams& params, std::span<const double> x) {
  if (n.dim() != params.dim() || x.size() != params.dim())
    throw std::invalid_argument("laguerre_l_normalized: dimension mismatch");
  double v = 1.0;
  for (std::size_t i = 0; i < n.dim(); ++i)
    v *= laguerre_norm_constant(n.n[i], params.alpha(i)) * laguerre_L(n.n[i], params.alpha(i), x[i]);
  return v;
}

using ScalarFunction = std::function<double(double)>;

/// Central-difference step at x: h = max(min_step, rel_step * x), shrunk so x - 2h > 0.
inline double fd_step(double x, const NumericPolicy& policy = default_policy()) {
  double h = std::max(policy.fd_min_step, policy.fd_rel_step * x);
  if (x - 2.0 * h <= 0.0) h = x / 3.0;
  return h;
}

/// Central-difference approximation of L^alpha f(x) = x f''(x) + (alpha + 1 - x) f'(x).
/// A non-positive h selects the default step policy.
inline double generator_apply(const ScalarFunction& f, double alpha, double x, double h = 0.0) {
  if (!(x > 0.0)) throw std::domain_error("generator_apply: x must be > 0");
  if (!(h > 0.0)) h = fd_step(x);
  if (x - 2.0 * h <= 0.0) h = x / 3.0;
  const double fp = f(x + h);
  const double f0 = f(x);
  const double fm = f(x - h);
  const double d1 = (fp - fm) / (2.0 * h);
  const double d2 = (fp - 2.0 * f0 + fm) / (h * h);
  return x * d2 + (alpha + 1.0 - x) * d1;
}

/// Carre du champ x f'(x)^2 with a central-difference derivative.
inline double carre_du_champ(const ScalarFunction& f, double /*alpha*/, double x, double h = 0.0) {
  if (!(x > 0.0)) throw std::domain_error("carre_du_champ: x must be > 0");
  if (!(h > 0.0)) h = fd_step(x);
  if (x - 2.0 * h <= 0.0) h = x / 3.0;
  const double d1 = (f(x + h) - f(x - h)) / (2.0 * h);
  return x * d1 * d1;
}

/// N-dimensional generator: sum over coordinates of the one-dimensional operator.
inline double generator_apply_nd(const std::function<double(std::span<const double>)>& f, const ModelParams& params,
                                 std::span<const double> x) {
  if (x.size() != params.dim()) throw std::invalid_argument("generator_apply_nd: dimension mismatch");
  std::vector<double> y(x.begin(), x.end());
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    auto slice = [&](double xi) {
      y[i] = xi;
      const double v = f(y);
      y[i] = x[i];
      return v;
    };
    total += generator_apply(slice, params.alpha(i), x[i]);
  }
  return total;
}

}  // namespace laguerre
