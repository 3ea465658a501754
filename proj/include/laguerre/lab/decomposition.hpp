#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "laguerre/errors.hpp"
#include "laguerre/lab/config.hpp"
#include "laguerre/lab/experiment.hpp"
#include "laguerre/lab/rate.hpp"
#include "laguerre/metric.hpp"
#include "laguerre/proof/diagnostics.hpp"
#include "laguerre/proof/smoothed.hpp"
#include "laguerre/proof/transition.hpp"
#include "laguerre/proof/truncation.hpp"
#include "laguerre/sampling.hpp"
#include "laguerre/stats.hpp"
#include "laguerre/transport/quantile.hpp"

namespace laguerre::lab {

inline const std::vector<double>& default_t_grid() {
  static const std::vector<double> grid{1e-3, 3e-3, 1e-2, 3e-2, 0.1, 0.3, 1.0};
  return grid;
}

struct DecompositionRow {
  double t = 0.0;
  MeanStderr term2;  // E W2(mu_{n,R}, mu_{n,R,t})^2 via the transition coupling (an upper estimate)
  MeanStderr term3;  // E W2(mu_{n,R,t}, mu^alpha)^2 via ref_factor * n draws of the smoothed measure
  double total = 0.0;
  double term2_bound = 0.0;  // 4 N t
  bool term2_ok = false;
  double tradeoff = 0.0;  // constant-free bound optimized in t
};

struct DecompositionReport {
  std::size_t n = 0;
  double C = 0.0;
  double R = 0.0;
  MeanStderr term1;         // E W2(mu_n, mu_{n,R})^2
  double term1_tail = 0.0;  // 16 int_{B_R^c} |x| dmu, the tail order term1 is compared with
  MeanStderr direct;        // E W2(mu_n, mu^alpha)^2 on the same base samples
  std::vector<DecompositionRow> rows;
  std::size_t best = 0;         // row minimizing term1 + term2 + term3
  double best_ratio = 0.0;      // best total / direct
  bool factor_ok = false;       // best_ratio in [1/8, 8]
  bool u_shaped = false;        // interior minimum of the measured total
  bool tradeoff_u_shaped = false;
  bool term2_ok = false;

  [[nodiscard]] bool pass() const { return term2_ok && factor_ok; }
};

namespace detail {

inline bool interior_minimum(std::span<const double> v) {
  if (v.size() < 3) return false;
  const auto it = std::min_element(v.begin(), v.end());
  return it != v.begin() && it != v.end() - 1;
}

}  // namespace detail

/// Monte Carlo estimates of the three terms of the triangle decomposition
///   W2(mu_n, mu) <= W2(mu_n, mu_{n,R}) + W2(mu_{n,R}, mu_{n,R,t}) + W2(mu_{n,R,t}, mu)
/// over a t scan, with R = 2 (C log n)^{1/2}. Every t reuses the same base samples.
inline DecompositionReport decomposition_scan(const ExperimentConfig& cfg, std::size_t n,
                                              std::span<const double> t_grid = default_t_grid()) {
  if (cfg.params.dim() != 1) throw UnsupportedError("decomposition_demo: requires N = 1");
  if (n < 3) throw std::domain_error("decomposition_demo: n must be >= 3");
  if (cfg.reps < 2) throw std::invalid_argument("decomposition_demo: reps must be >= 2");
  if (t_grid.empty()) throw std::invalid_argument("decomposition_demo: empty t grid");
  for (double t : t_grid)
    if (!(t > 0.0)) throw std::domain_error("decomposition_demo: t must be > 0");
  const ModelParams& params = cfg.params;
  const double alpha = params.alpha(0);
  const auto trunc = proof::TruncationConfig::from_log(cfg.truncation_C, n);
  const std::size_t m = std::max<std::size_t>(cfg.ref_factor, 1) * n;

  DecompositionReport out;
  out.n = n;
  out.C = cfg.truncation_C;
  out.R = trunc.R;
  out.term1 = proof::truncation_term_mc(alpha, trunc.R, n, cfg.reps, derive_seed(cfg.master_seed, {0xD1, n}));
  out.term1_tail = proof::tail_second_moment(params, trunc.R);

  const std::size_t T = t_grid.size();
  std::vector<double> direct(cfg.reps), t2(cfg.reps * T), t3(cfg.reps * T);
  detail::parallel_for(cfg.reps, [&](std::size_t r) {
    const std::uint64_t seed = repetition_seed(cfg.master_seed, n, r);
    const SampleSet raw = sample_mu_alpha(params, n, derive_seed(seed, {0}));
    direct[r] = transport::w2_exact_1d_model(raw, params).squared;
    const SampleSet base = proof::truncate_samples(raw, trunc, derive_seed(seed, {2}));
    for (std::size_t k = 0; k < T; ++k) {
      const double t = t_grid[k];
      Rng rng(derive_seed(seed, {3, k}));
      double cost = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double x = base.data()[j];
        const double d = rho(x, proof::transition_draw_1d(alpha, t, x, rng));
        cost += d * d;
      }
      t2[r * T + k] = cost / static_cast<double>(n);
      const proof::SmoothedEmpirical se(base, t, trunc);
      const SampleSet draws = proof::sample_smoothed_set(se, m, derive_seed(seed, {4, k}));
      t3[r * T + k] = transport::w2_exact_1d_model(draws, params).squared;
    }
  });
  out.direct = mean_stderr(direct);

  std::vector<double> totals, curve;
  out.term2_ok = true;
  for (std::size_t k = 0; k < T; ++k) {
    DecompositionRow row;
    row.t = t_grid[k];
    std::vector<double> a(cfg.reps), b(cfg.reps);
    for (std::size_t r = 0; r < cfg.reps; ++r) {
      a[r] = t2[r * T + k];
      b[r] = t3[r * T + k];
    }
    row.term2 = mean_stderr(a);
    row.term3 = mean_stderr(b);
    row.total = out.term1.mean + row.term2.mean + row.term3.mean;
    row.term2_bound = 4.0 * static_cast<double>(params.dim()) * row.t;
    row.term2_ok = row.term2.mean <= row.term2_bound + default_policy().mc_sigmas * row.term2.stderr_;
    row.tradeoff = tradeoff_bound(params, static_cast<double>(n), trunc.R, row.t);
    out.term2_ok = out.term2_ok && row.term2_ok;
    totals.push_back(row.total);
    curve.push_back(row.tradeoff);
    out.rows.push_back(row);
  }
  out.best = static_cast<std::size_t>(std::min_element(totals.begin(), totals.end()) - totals.begin());
  out.best_ratio = totals[out.best] / out.direct.mean;
  out.factor_ok = out.best_ratio >= 1.0 / 8.0 && out.best_ratio <= 8.0;
  out.u_shaped = detail::interior_minimum(totals);
  out.tradeoff_u_shaped = detail::interior_minimum(curve);
  return out;
}

/// The decomposition at a single t.
inline DecompositionReport decomposition_demo(const ExperimentConfig& cfg, std::size_t n, double t) {
  const double grid[] = {t};
  return decomposition_scan(cfg, n, grid);
}

}  // namespace laguerre::lab
