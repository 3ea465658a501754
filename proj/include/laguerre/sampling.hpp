#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "laguerre/model.hpp"
#include "laguerre/random.hpp"

namespace laguerre {

/// log of the density of mu^alpha_i at x_i > 0 in one coordinate.
inline double log_density_mu_1d(double alpha, double x) {
  return alpha * std::log(x) - x - std::lgamma(1.0 + alpha);
}

/// Density of mu^alpha: prod_i x_i^alpha_i e^-x_i / Gamma(1 + alpha_i).
inline double density_mu_alpha(const ModelParams& params, std::span<const double> x) {
  if (x.size() != params.dim()) throw std::invalid_argument("density_mu_alpha: dimension mismatch");
  double log_d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0)) throw std::domain_error("density_mu_alpha: coordinates must be > 0");
    log_d += log_density_mu_1d(params.alpha(i), x[i]);
  }
  return std::exp(log_d);
}

/// Points per independent random stream when generating a sample.
inline constexpr std::size_t kSampleBlock = 1024;

/// Draws one point of mu^alpha into `out` (coordinates are independent Gamma(alpha_i + 1)).
inline void draw_mu_alpha(const ModelParams& params, Rng& rng, std::span<double> out) {
  for (std::size_t i = 0; i < params.dim(); ++i) out[i] = rng.gamma(params.alpha(i) + 1.0);
}

/// n i.i.d. draws from mu^alpha. Block b of kSampleBlock points uses the
/// stream derive_seed(seed, {b}), so the output is a pure function of
/// (params, n, seed).
inline SampleSet sample_mu_alpha(const ModelParams& params, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("sample_mu_alpha: n must be >= 1");
  const std::size_t dim = params.dim();
  std::vector<double> pts(n * dim);
  for (std::size_t block = 0; block * kSampleBlock < n; ++block) {
    Rng rng(derive_seed(seed, {block}));
    const std::size_t end = std::min(n, (block + 1) * kSampleBlock);
    for (std::size_t j = block * kSampleBlock; j < end; ++j)
      draw_mu_alpha(params, rng, std::span<double>(pts).subspan(j * dim, dim));
  }
  return SampleSet(params, std::move(pts), seed);
}

}  // namespace laguerre
