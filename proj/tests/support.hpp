#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace testsupport {

/// One-sample Kolmogorov-Smirnov statistic of `xs` against `cdf`.
inline double ks_statistic(std::vector<double> xs, const std::function<double(double)>& cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

/// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  return d;
}

/// Asymptotic 1% critical values.
inline double ks_critical_1pct(std::size_t n) { return 1.6276 / std::sqrt(static_cast<double>(n)); }
inline double ks_critical_1pct(std::size_t n, std::size_t m) {
  return 1.6276 * std::sqrt(static_cast<double>(n + m) / (static_cast<double>(n) * m));
}

/// L_k^alpha(x) from the explicit expansion of the Rodrigues formula,
/// sum_i (-1)^i binom(k + alpha, k - i) x^i / i!.
inline double laguerre_explicit(unsigned k, double alpha, double x) {
  double s = 0.0;
  for (unsigned i = 0; i <= k; ++i) {
    const double binom = std::exp(std::lgamma(k + alpha + 1.0) - std::lgamma(k - i + 1.0) - std::lgamma(alpha + i + 1.0));
    s += ((i % 2) ? -1.0 : 1.0) * binom * std::pow(x, i) / std::tgamma(i + 1.0);
  }
  return s;
}

}  // namespace testsupport
