#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "laguerre/model.hpp"
#include "laguerre/random.hpp"
#include "laguerre/special.hpp"

namespace laguerre::proof {

/// Poisson rate of the mixing variable for the law p_t(x, .) mu^alpha.
inline double transition_poisson_rate(double t, double x) { return x * std::exp(-t) / -std::expm1(-t); }

/// Calls visit(k, weight) for the Poisson(lambda) weights, walking outwards from the
/// mode until the remaining terms are negligible. Returns the sum of the visited
/// weights; callers divide by it, which cancels the rounding in the mode weight.
template <class V>
double for_each_poisson_weight(double lambda, V&& visit, double cut = 1e-18) {
  if (lambda <= 0.0) {
    visit(0u, 1.0);
    return 1.0;
  }
  const auto mode = static_cast<unsigned>(std::floor(lambda));
  auto log_w = [&](unsigned k) { return -lambda + k * std::log(lambda) - std::lgamma(k + 1.0); };
  const double w_mode = std::exp(log_w(mode));
  visit(mode, w_mode);
  double sum = w_mode;
  double w = w_mode;
  for (unsigned k = mode + 1;; ++k) {
    w *= lambda / k;
    visit(k, w);
    sum += w;
    if (w < cut * w_mode && k > lambda + 10.0) break;
  }
  w = w_mode;
  for (unsigned k = mode; k > 0; --k) {
    w *= k / lambda;
    visit(k - 1, w);
    sum += w;
    if (w < cut * w_mode) break;
  }
  return sum;
}

/// Lebesgue density in y of the Poisson-Gamma mixture: K ~ Poisson(x e^-t / s),
/// y | K ~ s * Gamma(alpha + 1 + K), s = 1 - e^-t.
inline double mixture_density(double alpha, double t, double x, double y) {
  const double s = -std::expm1(-t);
  double total = 0.0;
  const double norm = for_each_poisson_weight(
      transition_poisson_rate(t, x), [&](unsigned k, double w) { total += w * gamma_pdf(alpha + 1.0 + k, y / s) / s; });
  return total / norm;
}

/// P(Y <= y) for the same mixture, i.e. P_t 1_{(0, y]}(x).
inline double mixture_cdf(double alpha, double t, double x, double y) {
  if (y <= 0.0) return 0.0;
  const double s = -std::expm1(-t);
  double total = 0.0;
  const double norm = for_each_poisson_weight(
      transition_poisson_rate(t, x), [&](unsigned k, double w) { total += w * gamma_p(alpha + 1.0 + k, y / s); });
  return std::min(total / norm, 1.0);
}

/// E[Y^p] for the mixture (p > -(alpha + 1)); with p = 1/2 this is P_t sqrt(.)(x).
inline double mixture_moment(double alpha, double t, double x, double p) {
  const double s = -std::expm1(-t);
  double total = 0.0;
  const double norm = for_each_poisson_weight(transition_poisson_rate(t, x), [&](unsigned k, double w) {
    const double a = alpha + 1.0 + k;
    total += w * std::exp(log_gamma_ratio(a, p));
  });
  return std::pow(s, p) * total / norm;
}

/// One coordinate of a draw from p_t(x, .) mu^alpha.
inline double transition_draw_1d(double alpha, double t, double x, Rng& rng) {
  const double s = -std::expm1(-t);
  const auto k = rng.poisson(transition_poisson_rate(t, x));
  const double y = s * rng.gamma(alpha + 1.0 + static_cast<double>(k));
  return y > 0.0 ? y : std::numeric_limits<double>::denorm_min();
}

/// Draws y ~ p_t(x, .) mu^alpha coordinatewise from `rng`.
inline void transition_draw(const ModelParams& params, double t, std::span<const double> x, Rng& rng,
                            std::span<double> out) {
  for (std::size_t i = 0; i < params.dim(); ++i) out[i] = transition_draw_1d(params.alpha(i), t, x[i], rng);
}

/// One draw from the law p_t^alpha(x, .) mu^alpha, a pure function of its arguments.
inline Point transition_sample(const Point& x, double t, const ModelParams& params, std::uint64_t seed) {
  if (!(t > 0.0)) throw std::domain_error("transition_sample: t must be > 0");
  if (x.dim() != params.dim()) throw std::invalid_argument("transition_sample: dimension mismatch");
  Rng rng(seed);
  std::vector<double> y(params.dim());
  transition_draw(params, t, x.coords(), rng, y);
  return Point(std::move(y));
}

}  // namespace laguerre::proof
