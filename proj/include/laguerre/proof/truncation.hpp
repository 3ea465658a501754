#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "laguerre/errors.hpp"
#include "laguerre/model.hpp"
#include "laguerre/random.hpp"
#include "laguerre/sampling.hpp"
#include "laguerre/special.hpp"

namespace laguerre::proof {

/// Product ball B_R = {y : y_i < R^2 / 4 for every i} in the intrinsic metric.
struct TruncationConfig {
  double R = 0.0;
  double cutoff = 0.0;
  double C_log = 0.0;

  explicit TruncationConfig(double radius, double c_log = 0.0) : R(radius), cutoff(radius * radius / 4.0), C_log(c_log) {
    if (!(R > 0.0) || !std::isfinite(R)) throw std::domain_error("TruncationConfig: R must be finite and > 0");
  }

  /// R = 2 (C log n)^(1/2).
  static TruncationConfig from_log(double C, std::size_t n) {
    if (!(C > 0.0)) throw std::domain_error("TruncationConfig: C must be > 0");
    if (n < 2) throw std::domain_error("TruncationConfig: n must be >= 2");
    return TruncationConfig(2.0 * std::sqrt(C * std::log(static_cast<double>(n))), C);
  }

  [[nodiscard]] bool contains(std::span<const double> y) const {
    for (double v : y)
      if (!(v < cutoff)) return false;
    return true;
  }
};

/// mu^alpha(B_R) = prod_i P(alpha_i + 1, R^2 / 4).
inline double mu_ball_mass(const ModelParams& params, double R) {
  if (!(R > 0.0)) throw std::domain_error("mu_ball_mass: R must be > 0");
  const double c = R * R / 4.0;
  double log_mass = 0.0;
  for (double a : params.alpha()) log_mass += std::log(gamma_p(a + 1.0, c));
  return std::exp(log_mass);
}

/// 1 - mu^alpha(B_R), without cancellation when the ball carries almost all the mass.
inline double mu_ball_complement(const ModelParams& params, double R) {
  if (!(R > 0.0)) throw std::domain_error("mu_ball_complement: R must be > 0");
  const double c = R * R / 4.0;
  double log_inside = 0.0;
  for (double a : params.alpha()) log_inside += std::log1p(-gamma_q(a + 1.0, c));
  return -std::expm1(log_inside);
}

/// f(R) = 16 int_{complement of B_R} (x_1 + ... + x_N) mu^alpha(dx).
/// Uses int x_k 1_{B_R} dmu = (alpha_k + 1) P(alpha_k + 2, c) prod_{i != k} P(alpha_i + 1, c)
/// and takes the complement in log1p form.
inline double tail_second_moment(const ModelParams& params, double R) {
  if (!(R > 0.0)) throw std::domain_error("tail_second_moment: R must be > 0");
  const double c = R * R / 4.0;
  const std::size_t dim = params.dim();
  std::vector<double> log_p(dim);
  for (std::size_t i = 0; i < dim; ++i) log_p[i] = std::log1p(-gamma_q(params.alpha(i) + 1.0, c));
  double total = 0.0;
  for (std::size_t k = 0; k < dim; ++k) {
    const double a = params.alpha(k) + 1.0;
    double log_inside = std::log1p(-gamma_q(a + 1.0, c));
    for (std::size_t i = 0; i < dim; ++i)
      if (i != k) log_inside += log_p[i];
    total += a * -std::expm1(log_inside);
  }
  return 16.0 * total;
}

/// Keeps the points of `samples` inside B_R and replaces every other point by an
/// independent draw from mu^alpha conditioned on B_R (rejection sampling).
/// Replacement j uses the stream derive_seed(seed, {j}).
inline SampleSet truncate_samples(const SampleSet& samples, const TruncationConfig& cfg, std::uint64_t seed) {
  const ModelParams& params = samples.params();
  const double mass = mu_ball_mass(params, cfg.R);
  if (mass < 1e-3) throw PrecisionError("truncate_samples: mu(B_R) < 1e-3, rejection sampling refused");
  const std::size_t dim = samples.dim();
  std::vector<double> out = samples.data();
  for (std::size_t j = 0; j < samples.size(); ++j) {
    std::span<double> y(out.data() + j * dim, dim);
    if (cfg.contains(y)) continue;
    Rng rng(derive_seed(seed, {j}));
    do {
      draw_mu_alpha(params, rng, y);
    } while (!cfg.contains(y));
  }
  return SampleSet(params, std::move(out), samples.seed());
}

}  // namespace laguerre::proof
