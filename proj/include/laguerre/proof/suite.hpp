#pragma once

#include <cstdint>
#include <vector>

#include "laguerre/model.hpp"
#include "laguerre/proof/diagnostics.hpp"
#include "laguerre/proof/truncation.hpp"
#include "laguerre/random.hpp"

namespace laguerre::proof {

/// The inequality and identity checks at the standard parameter sets for one alpha:
/// smoothing integral, bias term b, Bakry-Ledoux, diagonal kernel, transition identity,
/// and the coupling bound for N = 1 and N = 2.
inline DiagnosticsReport standard_diagnostics(double alpha, std::uint64_t seed) {
  DiagnosticsReport rep;
  for (double t : {1e-3, 0.1, 1.0}) rep.append(diag_smoothing_I(alpha, t));
  rep.append(diag_bias_b(alpha, 0.2, 1.0, 2.0));
  rep.append(diag_bias_b(alpha, 0.2, 0.0, 2.0));
  rep.append(diag_bias_b(alpha, 1.0, 0.5, 40.0));
  const std::vector<double> xs{0.5, 1.0, 2.0, 4.0, 8.0};
  for (double s : {1e-6, 0.1, 1.0}) rep.append(diag_bakry_ledoux(alpha, s, xs));
  const std::vector<double> diag_xs{0.1, 0.5, 1.0, 2.0, 4.0, 8.0, 10.0, 20.0, 40.0};
  for (double t : {0.2, 1.0, 2.0}) rep.append(diag_kernel_diagonal(alpha, t, diag_xs));
  for (double t : {0.3, 1.0, 3.0}) rep.append(diag_transition_identity(alpha, t));
  constexpr std::size_t n = 4096;
  const double R = TruncationConfig::from_log(3.0, n).R;
  std::uint64_t k = 0;
  for (const auto& params : {ModelParams{alpha}, ModelParams{alpha, alpha}})
    for (double t : {0.01, 0.1, 1.0}) rep.append(diag_coupling_bound(params, t, R, n, derive_seed(seed, {k++})));
  return rep;
}

}  // namespace laguerre::proof
