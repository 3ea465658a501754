#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include "laguerre/errors.hpp"
#include "laguerre/model.hpp"
#include "laguerre/quadrature.hpp"
#include "laguerre/special.hpp"
#include "laguerre/transport/measure.hpp"

namespace laguerre::transport {

/// Per-cell moments of the model quantile function in the flat coordinate:
/// for cell k = [k/n, (k+1)/n], first[k] = int 2 sqrt(Q(v)) dv.
/// Depends only on (n, alpha), so it is shared between repetitions.
struct QuantileTable {
  std::size_t n = 0;
  double alpha = 0.0;
  std::vector<double> first;
  double second_total = 0.0;  // int_0^1 4 Q(v) dv = 4 (alpha + 1)
};

namespace detail {

inline QuantileTable build_quantile_table(std::size_t n, double alpha) {
  const double a = alpha + 1.0;
  const double b = a + 0.5;
  const double ratio = std::exp(std::lgamma(b) - std::lgamma(a));
  // Boundary quantiles x_k = Q(k / n); lower[k] = P(b, x_k), upper[k] = Q(b, x_k).
  std::vector<double> lower(n + 1), upper(n + 1);
  lower[0] = 0.0;
  upper[0] = 1.0;
  lower[n] = 1.0;
  upper[n] = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    const double p = static_cast<double>(k) / static_cast<double>(n);
    const double x = p <= 0.5 ? gamma_quantile(p, a) : gamma_quantile_upper(static_cast<double>(n - k) / n, a);
    lower[k] = gamma_p(b, x);
    upper[k] = gamma_q(b, x);
  }
  QuantileTable t;
  t.n = n;
  t.alpha = alpha;
  t.first.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    // Difference taken on the side where it keeps relative precision.
    const double mass = lower[k + 1] <= 0.5 ? lower[k + 1] - lower[k] : upper[k] - upper[k + 1];
    t.first[k] = 2.0 * ratio * mass;
  }
  t.second_total = 4.0 * a;
  return t;
}

}  // namespace detail

/// Cached quantile table for (n, alpha); thread safe.
inline std::shared_ptr<const QuantileTable> quantile_table(std::size_t n, double alpha) {
  static std::mutex mutex;
  static std::map<std::pair<std::size_t, std::uint64_t>, std::shared_ptr<const QuantileTable>> cache;
  const auto key = std::make_pair(n, std::bit_cast<std::uint64_t>(alpha));
  {
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  auto table = std::make_shared<const QuantileTable>(detail::build_quantile_table(n, alpha));
  std::lock_guard<std::mutex> lock(mutex);
  return cache.emplace(key, std::move(table)).first->second;
}

enum class QuantileIntegration { closed_form, quadrature };

/// W_2^2(mu_n, mu^alpha) in one dimension by the quantile coupling
///   int_0^1 (2 sqrt(X_(ceil(vn))) - 2 sqrt(Q(v)))^2 dv.
/// The default evaluates each cell from incomplete-gamma moments of the model
/// law; `quadrature` integrates each cell numerically to absolute tolerance tol.
inline W2Result w2_exact_1d_model(const SampleSet& samples, const ModelParams& params, double tol = 1e-10,
                                  QuantileIntegration how = QuantileIntegration::closed_form) {
  if (samples.dim() != 1 || params.dim() != 1) throw UnsupportedError("w2_exact_1d_model: requires N = 1");
  const std::size_t n = samples.size();
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = 2.0 * std::sqrt(samples.data()[i]);
  std::sort(u.begin(), u.end());
  const double alpha = params.alpha(0);

  if (how == QuantileIntegration::closed_form) {
    const auto table = quantile_table(n, alpha);
    double sq = 0.0, cross = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      sq += u[k] * u[k];
      cross += u[k] * table->first[k];
    }
    const double w2sq = sq / static_cast<double>(n) - 2.0 * cross + table->second_total;
    return make_result(w2sq, W2Method::quantile_1d);
  }

  // Quadrature per cell, in the flat coordinate of the model law.
  const double a = alpha + 1.0;
  QuadOptions opt;
  opt.abs_tol = tol / static_cast<double>(n);
  opt.rel_tol = 0.0;
  double total = 0.0;
  W2Diagnostics diag;
  double lo = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double hi;
    if (k + 1 == n) {
      hi = std::numeric_limits<double>::infinity();
    } else {
      const double p = static_cast<double>(k + 1) / static_cast<double>(n);
      hi = p <= 0.5 ? gamma_quantile(p, a) : gamma_quantile_upper(static_cast<double>(n - k - 1) / n, a);
    }
    const double uk = u[k];
    auto r = integrate_mu_1d(
        alpha,
        [uk](double x) {
          const double d = uk - 2.0 * std::sqrt(x);
          return d * d;
        },
        opt, lo, hi);
    diag.converged = diag.converged && r.converged;
    diag.iterations += static_cast<std::size_t>(r.panels);
    total += r.value;
    lo = hi;
  }
  return make_result(total, W2Method::quantile_1d, diag);
}

}  // namespace laguerre::transport
