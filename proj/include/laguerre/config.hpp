#pragma once

#include <cstddef>

namespace laguerre {

/// Numeric policy constants shared by every module.
struct NumericPolicy {
  // Spectral kernel sum: refuse below t_min; default truncation order.
  double spectral_t_min = 0.2;
  int spectral_cutoff = 60;

  // Scaled Bessel I: power series at or below, Hankel expansion above.
  double bessel_switchover = 30.0;

  // Quadrature against mu^alpha in the flat coordinate u = 2 sqrt(x).
  double quad_tail_mass = 1e-24;
  double quad_tol = 1e-9;
  int quad_initial_panels = 8;
  int quad_max_doublings = 14;

  // Central differences: h = max(fd_min_step, fd_rel_step * x).
  double fd_min_step = 1e-4;
  double fd_rel_step = 1e-4;

  // Exact transport caps.
  std::size_t assignment_cap = 2048;
  std::size_t network_flow_cap = 512;

  // Sinkhorn stopping rule.
  double sinkhorn_marginal_tol = 1e-8;

  // Diagnostic tolerances.
  double identity_tol = 1e-8;
  double quadrature_slack = 1e-6;
  double mc_sigmas = 3.0;
};

inline const NumericPolicy& default_policy() {
  static const NumericPolicy policy{};
  return policy;
}

}  // namespace laguerre
