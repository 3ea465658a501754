#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "laguerre/lab/config.hpp"
#include "laguerre/lab/rate.hpp"
#include "laguerre/random.hpp"
#include "laguerre/sampling.hpp"
#include "laguerre/stats.hpp"
#include "laguerre/transport/proxy.hpp"
#include "laguerre/transport/quantile.hpp"

namespace laguerre::lab {

struct RepRecord {
  std::size_t n = 0;
  std::size_t rep = 0;
  double w2sq = 0.0;  // NaN when the repetition failed
  std::uint64_t seed = 0;
  bool ok = true;

  friend bool operator==(const RepRecord& a, const RepRecord& b) {
    const bool same_value = a.ok ? a.w2sq == b.w2sq : std::isnan(b.w2sq);
    return a.n == b.n && a.rep == b.rep && same_value && a.seed == b.seed && a.ok == b.ok;
  }
};

struct RateSummary {
  std::size_t n = 0;
  double mean_w2sq = 0.0;
  double stderr_ = 0.0;
  std::size_t reps = 0;      // completed repetitions
  std::size_t failures = 0;  // excluded repetitions
  double predicted_rate = 0.0;

  friend bool operator==(const RateSummary&, const RateSummary&) = default;
};

struct RateReport {
  ExperimentConfig config;
  std::vector<RepRecord> records;
  std::vector<RateSummary> summary;
  double fitted_slope = std::numeric_limits<double>::quiet_NaN();
  double slope_stderr = std::numeric_limits<double>::quiet_NaN();
  Regime regime = Regime::power;
  double wall_seconds = 0.0;  // kept in memory only; emitted files stay byte-stable
};

namespace detail {

inline bool same_double(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }

/// Runs body(i) for i in [0, count) on the hardware threads; results must be written by index.
template <class F>
void parallel_for(std::size_t count, F&& body) {
  const std::size_t workers = std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) body(i);
    });
  for (auto& th : pool) th.join();
}

}  // namespace detail

inline bool same_config(const ExperimentConfig& a, const ExperimentConfig& b) {
  return a.params == b.params && a.n_grid == b.n_grid && a.reps == b.reps && a.estimator == b.estimator &&
         a.ref_factor == b.ref_factor && a.master_seed == b.master_seed && a.truncation_C == b.truncation_C &&
         a.format == b.format && a.sinkhorn_epsilon == b.sinkhorn_epsilon;
}

/// Field-for-field equality of everything that is emitted (wall time and output path excluded).
inline bool same_report(const RateReport& a, const RateReport& b) {
  return same_config(a.config, b.config) && a.records == b.records && a.summary == b.summary &&
         detail::same_double(a.fitted_slope, b.fitted_slope) && detail::same_double(a.slope_stderr, b.slope_stderr) &&
         a.regime == b.regime;
}

/// Seed of repetition `rep` at sample size n; independent of the rest of the grid.
inline std::uint64_t repetition_seed(std::uint64_t master, std::size_t n, std::size_t rep) {
  return derive_seed(master, {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(rep)});
}

/// One W2^2 estimate of mu_n against mu^alpha; throws when the solver cannot certify its answer.
inline double estimate_w2sq(const ExperimentConfig& cfg, std::size_t n, std::uint64_t seed) {
  const SampleSet samples = sample_mu_alpha(cfg.params, n, derive_seed(seed, {0}));
  transport::W2Result r;
  switch (cfg.estimator) {
    case Estimator::quantile_1d:
      r = transport::w2_exact_1d_model(samples, cfg.params);
      break;
    case Estimator::proxy_nd:
      r = transport::w2_model_proxy_nd(samples, cfg.params, cfg.ref_factor, derive_seed(seed, {1}));
      break;
    case Estimator::sinkhorn_proxy:
      r = transport::w2_model_proxy_nd(samples, cfg.params, cfg.ref_factor, derive_seed(seed, {1}),
                                       transport::ProxySolver::sinkhorn, cfg.sinkhorn_epsilon);
      break;
  }
  if (!r.diagnostics.converged || !std::isfinite(r.squared))
    throw PrecisionError("estimate_w2sq: solver did not converge");
  return r.squared;
}

inline void fit_report_slope(RateReport& rep) {
  std::vector<std::pair<double, double>> pairs;
  for (const auto& s : rep.summary)
    if (s.reps > 0 && s.mean_w2sq > 0.0) pairs.emplace_back(static_cast<double>(s.n), s.mean_w2sq);
  if (pairs.size() < 3) return;
  const auto fit = fit_loglog_slope(pairs);
  rep.fitted_slope = fit.slope;
  rep.slope_stderr = fit.stderr_;
}

/// Estimates E W2(mu_n, mu^alpha)^2 over the n grid with `estimate(n, seed)` per repetition.
/// Repetitions run concurrently and are merged in (n, rep) order; a repetition whose estimate
/// throws is recorded as failed, excluded from the summary and counted.
template <class Estimate>
RateReport run_rate_experiment(const ExperimentConfig& cfg, Estimate&& estimate) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  RateReport rep;
  rep.config = cfg;
  rep.regime = classify_regime(cfg.params);
  const std::size_t jobs = cfg.n_grid.size() * cfg.reps;
  rep.records.resize(jobs);
  detail::parallel_for(jobs, [&](std::size_t job) {
    RepRecord& rec = rep.records[job];
    rec.n = cfg.n_grid[job / cfg.reps];
    rec.rep = job % cfg.reps;
    rec.seed = repetition_seed(cfg.master_seed, rec.n, rec.rep);
    try {
      rec.w2sq = estimate(rec.n, rec.seed);
    } catch (const std::exception&) {
      rec.ok = false;
      rec.w2sq = std::numeric_limits<double>::quiet_NaN();
    }
  });
  for (std::size_t i = 0; i < cfg.n_grid.size(); ++i) {
    RateSummary s;
    s.n = cfg.n_grid[i];
    std::vector<double> values;
    for (std::size_t r = 0; r < cfg.reps; ++r) {
      const auto& rec = rep.records[i * cfg.reps + r];
      if (rec.ok)
        values.push_back(rec.w2sq);
      else
        ++s.failures;
    }
    const auto ms = mean_stderr(values);
    s.mean_w2sq = ms.mean;
    s.stderr_ = ms.stderr_;
    s.reps = values.size();
    s.predicted_rate = predicted_rate(cfg.params, static_cast<double>(s.n)).value;
    rep.summary.push_back(s);
  }
  fit_report_slope(rep);
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

inline RateReport run_rate_experiment(const ExperimentConfig& cfg) {
  return run_rate_experiment(cfg, [&](std::size_t n, std::uint64_t seed) { return estimate_w2sq(cfg, n, seed); });
}

struct EnvelopeCheck {
  double K = 0.0;
  std::vector<double> ratios;  // mean / (K * predicted) per n
  bool pass = false;
};

/// Upper-bound consistency: mean(n) <= K * predicted_rate(n) for every n, with K fixed at the smallest n.
inline EnvelopeCheck envelope_check(const RateReport& rep) {
  EnvelopeCheck out;
  if (rep.summary.empty() || rep.summary.front().reps == 0) return out;
  out.K = rep.summary.front().mean_w2sq / rep.summary.front().predicted_rate;
  out.pass = true;
  for (const auto& s : rep.summary) {
    const double ratio = s.mean_w2sq / (out.K * s.predicted_rate);
    out.ratios.push_back(ratio);
    if (!(ratio <= 1.0 + 1e-12)) out.pass = false;  // the calibration point itself rounds to 1 +- ulp
  }
  return out;
}

/// True if mean(n_{i+1}) <= mean(n_i) + sigmas * sqrt(se_i^2 + se_{i+1}^2) along the grid.
inline bool means_non_increasing(const RateReport& rep, double sigmas = 2.0) {
  for (std::size_t i = 1; i < rep.summary.size(); ++i) {
    const auto& a = rep.summary[i - 1];
    const auto& b = rep.summary[i];
    if (b.mean_w2sq > a.mean_w2sq + sigmas * std::hypot(a.stderr_, b.stderr_)) return false;
  }
  return true;
}

}  // namespace laguerre::lab
