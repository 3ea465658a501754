#pragma once

#include <cstdint>
#include <stdexcept>

#include "laguerre/metric.hpp"
#include "laguerre/model.hpp"
#include "laguerre/sampling.hpp"
#include "laguerre/transport/exact.hpp"
#include "laguerre/transport/sinkhorn.hpp"

namespace laguerre::transport {

enum class ProxySolver { exact, sinkhorn };

/// Reference-sample proxy for W_2(mu_n, mu^alpha): the discrete distance from
/// mu_n to an independent sample of ref_factor * n points of mu^alpha.
/// Biased upwards; by the triangle inequality |proxy - target| <= W_2(mu_ref, mu^alpha).
inline W2Result w2_model_proxy_nd(const SampleSet& samples, const ModelParams& params, std::size_t ref_factor,
                                  std::uint64_t seed, ProxySolver solver = ProxySolver::exact,
                                  double sinkhorn_epsilon = 0.01) {
  if (ref_factor < 4) throw std::invalid_argument("w2_model_proxy_nd: ref_factor must be >= 4");
  if (samples.dim() != params.dim()) throw std::invalid_argument("w2_model_proxy_nd: dimension mismatch");
  const std::size_t n = samples.size();
  const SampleSet ref = sample_mu_alpha(params, ref_factor * n, seed);
  W2Result r;
  if (solver == ProxySolver::sinkhorn) {
    r = w2_sinkhorn(DiscreteMeasure::empirical(samples), DiscreteMeasure::empirical(ref), sinkhorn_epsilon);
  } else if (params.dim() == 1) {
    r = make_result(uniform_sorted_cost_1d(flat_transform(samples.data()), flat_transform(ref.data())),
                    W2Method::proxy_nd);
  } else {
    r = uniform_exact_certified(flat_transform(samples.data()), flat_transform(ref.data()), params.dim());
  }
  r.method = W2Method::proxy_nd;
  return r;
}

}  // namespace laguerre::transport
