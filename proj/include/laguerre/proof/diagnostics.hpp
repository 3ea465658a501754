#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "laguerre/config.hpp"
#include "laguerre/errors.hpp"
#include "laguerre/kernel.hpp"
#include "laguerre/metric.hpp"
#include "laguerre/polynomial.hpp"
#include "laguerre/proof/transition.hpp"
#include "laguerre/proof/truncation.hpp"
#include "laguerre/quadrature.hpp"
#include "laguerre/sampling.hpp"
#include "laguerre/semigroup.hpp"
#include "laguerre/special.hpp"
#include "laguerre/stats.hpp"
#include "laguerre/transport/exact.hpp"

namespace laguerre::proof {

enum class Relation { at_most, at_least, equals, above, below };

inline const char* to_string(Relation r) {
  switch (r) {
    case Relation::at_most: return "<=";
    case Relation::at_least: return ">=";
    case Relation::equals: return "==";
    case Relation::above: return ">";
    case Relation::below: return "<";
  }
  return "?";
}

/// One checked quantity: value against bound with an additive tolerance.
/// margin >= 0 exactly when the check passes (for the strict relations, margin > 0).
struct DiagnosticsEntry {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  double tolerance = 0.0;
  Relation relation = Relation::at_most;
  double margin = 0.0;
  bool pass = false;
  std::string note;
};

inline DiagnosticsEntry make_entry(std::string name, double value, Relation rel, double bound, double tol,
                                   std::string note = {}) {
  DiagnosticsEntry e{std::move(name), value, bound, tol, rel, 0.0, false, std::move(note)};
  switch (rel) {
    case Relation::at_most: e.margin = bound + tol - value; break;
    case Relation::at_least: e.margin = value - (bound - tol); break;
    case Relation::equals: e.margin = tol - std::abs(value - bound); break;
    case Relation::above: e.margin = value - bound; break;
    case Relation::below: e.margin = bound - value; break;
  }
  const bool strict = rel == Relation::above || rel == Relation::below;
  e.pass = strict ? e.margin > 0.0 : e.margin >= 0.0;
  if (!std::isfinite(value)) e.pass = false;
  return e;
}

struct DiagnosticsReport {
  std::vector<DiagnosticsEntry> entries;

  void add(DiagnosticsEntry e) { entries.push_back(std::move(e)); }
  void append(const DiagnosticsReport& other) {
    entries.insert(entries.end(), other.entries.begin(), other.entries.end());
  }

  [[nodiscard]] bool all_pass() const {
    return std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.pass; });
  }

  /// One line per check: name value relation bound margin PASS/FAIL [note].
  [[nodiscard]] std::string to_text() const {
    std::string out;
    for (const auto& e : entries) {
      out += e.name + ' ' + format_double(e.value) + ' ' + to_string(e.relation) + ' ' + format_double(e.bound) +
             " margin=" + format_double(e.margin) + ' ' + (e.pass ? "PASS" : "FAIL");
      if (!e.note.empty()) out += " # " + e.note;
      out += '\n';
    }
    return out;
  }
};

namespace detail {

inline std::string param_tag(std::initializer_list<std::pair<const char*, double>> kv) {
  std::string s = "(";
  bool first = true;
  for (const auto& [k, v] : kv) {
    if (!first) s += ',';
    first = false;
    s += std::string(k) + '=' + format_double(v);
  }
  return s + ')';
}

inline QuadOptions tight_quad(double tol = 1e-13) {
  QuadOptions o;
  o.rel_tol = tol;
  o.abs_tol = tol;
  return o;
}

inline void require_alpha(double alpha, const char* who) {
  if (!(alpha >= -0.5)) throw std::domain_error(std::string(who) + ": alpha must be >= -1/2");
}

}  // namespace detail

/// I(t) = 2 [int phi^2 dmu - int (P_{t/2} phi)^2 dmu] with phi = sqrt, checked against
/// 0 < I(t) <= 1 - e^{-t/2} (+ slack) <= t/2. Inner semigroup and outer integral by quadrature.
inline DiagnosticsReport diag_smoothing_I(double alpha, double t, const NumericPolicy& policy = default_policy()) {
  detail::require_alpha(alpha, "diag_smoothing_I");
  if (!(t > 0.0)) throw std::domain_error("diag_smoothing_I: t must be > 0");
  bool converged = true;
  const auto inner_opt = detail::tight_quad(1e-12);
  auto inner = [&](double x) {
    const auto r = semigroup_apply(alpha, t / 2.0, [](double y) { return std::sqrt(y); }, x, inner_opt);
    converged = converged && r.converged;
    return r.value;
  };
  const auto outer = integrate_mu_1d(alpha, [&](double x) {
    const double v = inner(x);
    return v * v;
  }, detail::tight_quad(1e-11));
  converged = converged && outer.converged;
  const double value = 2.0 * ((alpha + 1.0) - outer.value);
  const std::string note = converged ? std::string{} : std::string("quadrature did not converge");
  const std::string tag = detail::param_tag({{"alpha", alpha}, {"t", t}});
  DiagnosticsReport rep;
  rep.add(make_entry("smoothing_I_positive" + tag, value, Relation::above, 0.0, 0.0, note));
  rep.add(make_entry("smoothing_I" + tag, value, Relation::at_most, -std::expm1(-t / 2.0), policy.quadrature_slack,
                     note));
  rep.add(make_entry("smoothing_I_linear" + tag, value, Relation::at_most, t / 2.0, policy.quadrature_slack, note));
  if (!converged)
    for (auto& e : rep.entries) e.pass = false;
  return rep;
}

/// b_t(y) = P_t[1_B - m](y) / m with m = mu(B_R), written as (Q - P_t 1_{B^c}(y)) / m so
/// that neither small nor large R loses precision.
inline double bias_b(double alpha, double t, double R, double y, bool* converged = nullptr) {
  const double c = R * R / 4.0;
  const double q = gamma_q(alpha + 1.0, c);
  const double m = 1.0 - q;
  const auto r = semigroup_apply(alpha, t, [](double) { return 1.0; }, y, detail::tight_quad(1e-12), c);
  if (converged) *converged = *converged && r.converged;
  return (q - r.value) / m;
}

/// Mean-zero, variance and Poincare-decay checks for b (one dimension). P_s b is
/// b_{t+s} by the semigroup property.
inline DiagnosticsReport diag_bias_b(double alpha, double t, double s, double R,
                                     const NumericPolicy& policy = default_policy()) {
  if (!(t > 0.0) || !(s >= 0.0) || !(R > 0.0)) throw std::domain_error("diag_bias_b: t, R must be > 0 and s >= 0");
  bool converged = true;
  const double m = mu_ball_mass(ModelParams{alpha}, R);
  const double comp = mu_ball_complement(ModelParams{alpha}, R);
  const auto opt = detail::tight_quad(1e-12);
  auto b_t = [&](double y) { return bias_b(alpha, t, R, y, &converged); };
  auto b_ts = [&](double y) { return bias_b(alpha, t + s, R, y, &converged); };
  const auto mean = integrate_mu_1d(alpha, b_t, opt);
  const auto var = integrate_mu_1d(alpha, [&](double y) {
    const double v = b_t(y);
    return v * v;
  }, opt);
  const auto decayed = integrate_mu_1d(alpha, [&](double y) {
    const double v = b_ts(y);
    return v * v;
  }, opt);
  converged = converged && mean.converged && var.converged && decayed.converged;
  const std::string note = converged ? std::string{} : std::string("quadrature did not converge");
  const std::string tag = detail::param_tag({{"alpha", alpha}, {"t", t}, {"s", s}, {"R", R}});
  const double tol = policy.identity_tol;
  DiagnosticsReport rep;
  rep.add(make_entry("bias_b_mean" + tag, mean.value, Relation::equals, 0.0, tol, note));
  rep.add(make_entry("bias_b_variance" + tag, var.value, Relation::at_most, comp / m, tol, note));
  rep.add(make_entry("bias_b_decay" + tag, decayed.value, Relation::at_most, std::exp(-s) * var.value, tol, note));
  if (!converged)
    for (auto& e : rep.entries) e.pass = false;
  return rep;
}

/// Gamma(P_s phi)(x) <= e^{-s} P_s Gamma(phi)(x) = e^{-s} / 4 for phi = sqrt, with the
/// derivative of P_s phi by central differences of a quadrature.
inline DiagnosticsReport diag_bakry_ledoux(double alpha, double s, std::span<const double> x_grid,
                                           const NumericPolicy& policy = default_policy()) {
  detail::require_alpha(alpha, "diag_bakry_ledoux");
  if (!(s > 0.0)) throw std::domain_error("diag_bakry_ledoux: s must be > 0");
  DiagnosticsReport rep;
  const auto opt = detail::tight_quad(1e-12);
  for (double x : x_grid) {
    bool converged = true;
    auto ps_phi = [&](double z) {
      const auto r = semigroup_apply(alpha, s, [](double y) { return std::sqrt(y); }, z, opt);
      converged = converged && r.converged;
      return r.value;
    };
    const double h = std::min(fd_step(x, policy), 0.5 * x);
    const double d = (ps_phi(x + h) - ps_phi(x - h)) / (2.0 * h);
    const double lhs = x * d * d;
    auto e = make_entry("bakry_ledoux" + detail::param_tag({{"alpha", alpha}, {"s", s}, {"x", x}}), lhs,
                        Relation::at_most, std::exp(-s) / 4.0, policy.quadrature_slack,
                        converged ? std::string{} : std::string("quadrature did not converge"));
    if (!converged) e.pass = false;
    rep.add(std::move(e));
  }
  return rep;
}

/// Range of p_t(x, x) / phi_t(x, x) observed by direct evaluation over x in (0, 8] and
/// t in [0.2, 2], at the tabulated alpha. Entries between table points take the larger
/// neighbour, widened by 5%.
struct DiagonalBand {
  double lower = 0.0;
  double upper = 0.0;
};

inline constexpr double kBandTMin = 0.2;
inline constexpr double kBandTMax = 2.0;
inline constexpr double kBandXMax = 8.0;

inline DiagonalBand calibrated_diagonal_band(double alpha) {
  static constexpr std::array<std::pair<double, double>, 8> table{{{-0.5, 1.5429},
                                                                   {-0.25, 1.3578},
                                                                   {0.0, 1.2660},
                                                                   {0.5, 1.3591},
                                                                   {1.0, 2.1587},
                                                                   {1.3, 3.0872},
                                                                   {2.0, 8.473},
                                                                   {3.0, 49.26}}};
  if (alpha < table.front().first || alpha > table.back().first)
    throw UnsupportedError("calibrated_diagonal_band: alpha outside the calibrated range [-1/2, 3]");
  double upper = 0.0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (table[i].first == alpha) {
      upper = table[i].second;
      break;
    }
    if (i + 1 < table.size() && table[i].first < alpha && alpha < table[i + 1].first) {
      upper = std::max(table[i].second, table[i + 1].second);
      break;
    }
  }
  return {0.95, 1.05 * upper};
}

/// Diagonal kernel p_t(x, x): positivity, the (calibrated) comparison-function band on the
/// calibrated window, and strict growth along x = 10, 20, 40.
inline DiagnosticsReport diag_kernel_diagonal(double alpha, double t, std::span<const double> x_grid) {
  detail::require_alpha(alpha, "diag_kernel_diagonal");
  if (!(t > 0.0)) throw std::domain_error("diag_kernel_diagonal: t must be > 0");
  DiagnosticsReport rep;
  const bool in_window = t >= kBandTMin && t <= kBandTMax;
  const auto band = calibrated_diagonal_band(alpha);
  for (double x : x_grid) {
    const std::string tag = detail::param_tag({{"alpha", alpha}, {"t", t}, {"x", x}});
    const double p = kernel_1d(alpha, t, x, x);
    rep.add(make_entry("kernel_diagonal_positive" + tag, p, Relation::above, 0.0, 0.0));
    if (in_window && x <= kBandXMax) {
      const double ratio = p / phi_comparison(alpha, t, x, x);
      rep.add(make_entry("kernel_diagonal_band_low" + tag, ratio, Relation::at_least, band.lower, 0.0));
      rep.add(make_entry("kernel_diagonal_band_high" + tag, ratio, Relation::at_most, band.upper, 0.0));
    }
  }
  const double g10 = kernel_1d(alpha, t, 10.0, 10.0);
  const double g20 = kernel_1d(alpha, t, 20.0, 20.0);
  const double g40 = kernel_1d(alpha, t, 40.0, 40.0);
  const std::string tag = detail::param_tag({{"alpha", alpha}, {"t", t}});
  rep.add(make_entry("kernel_diagonal_growth_10_20" + tag, g20, Relation::above, g10, 0.0));
  rep.add(make_entry("kernel_diagonal_growth_20_40" + tag, g40, Relation::above, g20, 0.0));
  return rep;
}

/// max |mixture - p_t mu| / (p_t mu) over the product grid (x, y), one dimension.
inline double transition_identity_residual(double alpha, double t, std::span<const double> xs,
                                           std::span<const double> ys) {
  double worst = 0.0;
  for (double x : xs)
    for (double y : ys) {
      const double ref = std::exp(log_kernel_1d(alpha, t, x, y) + log_density_mu_1d(alpha, y));
      if (!(ref > 1e-280)) continue;
      worst = std::max(worst, std::abs(mixture_density(alpha, t, x, y) - ref) / ref);
    }
  return worst;
}

/// Grid of 10 x 100 points used for the transition identity.
inline std::pair<std::vector<double>, std::vector<double>> transition_identity_grid() {
  std::vector<double> xs, ys;
  for (int i = 1; i <= 10; ++i) xs.push_back(0.05 * std::pow(2.0, 0.8 * (i - 1)));
  for (int j = 1; j <= 100; ++j) ys.push_back(0.12 * j);
  return {xs, ys};
}

inline DiagnosticsReport diag_transition_identity(double alpha, double t,
                                                  const NumericPolicy& policy = default_policy()) {
  const auto [xs, ys] = transition_identity_grid();
  DiagnosticsReport rep;
  rep.add(make_entry("transition_identity" + detail::param_tag({{"alpha", alpha}, {"t", t}}),
                     transition_identity_residual(alpha, t, xs, ys), Relation::at_most, 0.0, policy.identity_tol));
  return rep;
}

/// Monte Carlo estimate of (1/n) sum_j rho_N(X_{j,R}, Y_j)^2 with Y_j ~ p_t(X_{j,R}, .) mu^alpha,
/// checked against 4 N t with 3 standard errors of slack.
struct CouplingEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
};

inline CouplingEstimate coupling_cost_mc(const ModelParams& params, double t, const TruncationConfig& cfg,
                                         std::size_t n, std::uint64_t seed) {
  const auto base = truncate_samples(sample_mu_alpha(params, n, derive_seed(seed, {0})), cfg, derive_seed(seed, {1}));
  const std::size_t dim = params.dim();
  std::vector<double> costs(n), y(dim);
  for (std::size_t j = 0; j < n; ++j) {
    Rng rng(derive_seed(seed, {2, j}));
    transition_draw(params, t, base.point(j), rng, y);
    costs[j] = rho_N_squared(base.point(j), y);
  }
  const auto ms = mean_stderr(costs);
  return {ms.mean, ms.stderr_};
}

inline DiagnosticsReport diag_coupling_bound(const ModelParams& params, double t, double R, std::size_t n,
                                             std::uint64_t seed, const NumericPolicy& policy = default_policy()) {
  if (mu_ball_mass(params, R) < 0.5) throw std::domain_error("diag_coupling_bound: requires mu(B_R) >= 1/2");
  const auto est = coupling_cost_mc(params, t, TruncationConfig(R), n, seed);
  const double bound = 4.0 * static_cast<double>(params.dim()) * t;
  DiagnosticsReport rep;
  rep.add(make_entry("coupling_bound" + detail::param_tag({{"N", static_cast<double>(params.dim())}, {"t", t}, {"R", R}}),
                     est.mean, Relation::at_most, bound, policy.mc_sigmas * est.stderr_,
                     "stderr=" + format_double(est.stderr_)));
  return rep;
}

/// E W2(mu_n, mu_{n,R})^2 in one dimension by Monte Carlo stratified on the number K of
/// points outside B_R: sum_k P(K = k) E[W2^2 | K = k]. The K = 0 stratum contributes 0.
/// Strata are kept while P(K = k) exceeds 1e-8 P(K = 1), capped at max_strata. When those strata
/// miss more than 1e-6 of P(K >= 1) (n Q(alpha + 1, R^2/4) not small), plain Monte Carlo is used.
inline MeanStderr truncation_term_mc(double alpha, double R, std::size_t n, std::size_t reps, std::uint64_t seed,
                                     std::size_t max_strata = 8) {
  const double a = alpha + 1.0;
  const double c = R * R / 4.0;
  const double q = gamma_q(a, c);
  const double p = gamma_p(a, c);
  if (!(q > 0.0)) return {};
  const double dn = static_cast<double>(n);
  auto log_binom = [&](std::size_t k) {
    const double dk = static_cast<double>(k);
    return std::lgamma(dn + 1.0) - std::lgamma(dk + 1.0) - std::lgamma(dn - dk + 1.0) + dk * std::log(q) +
           (dn - dk) * std::log1p(-q);
  };
  const double log_w1 = log_binom(1);
  const double any_outside = -std::expm1(dn * std::log1p(-q));
  double covered = 0.0;
  for (std::size_t k = 1; k <= std::min(n, max_strata); ++k) covered += std::exp(log_binom(k));
  if (covered < (1.0 - 1e-6) * any_outside) {
    std::vector<double> vals(reps);
    for (std::size_t r = 0; r < reps; ++r) {
      Rng rng(derive_seed(seed, {0, r}));
      std::vector<double> u(n), v(n);
      for (std::size_t j = 0; j < n; ++j) {
        const double x = rng.gamma(a);
        u[j] = 2.0 * std::sqrt(x);
        v[j] = x < c ? u[j] : 2.0 * std::sqrt(gamma_quantile(rng.uniform() * p, a));
      }
      vals[r] = transport::uniform_sorted_cost_1d(std::move(u), std::move(v));
    }
    return mean_stderr(vals);
  }
  double mean = 0.0, var = 0.0;
  for (std::size_t k = 1; k <= std::min(n, max_strata); ++k) {
    const double w = std::exp(log_binom(k));
    if (k > 1 && w < 1e-8 * std::exp(log_w1)) break;
    std::vector<double> vals(reps);
    for (std::size_t r = 0; r < reps; ++r) {
      Rng rng(derive_seed(seed, {k, r}));
      std::vector<double> u(n), v(n);
      for (std::size_t j = 0; j < n; ++j) {
        double x;
        if (j < k) {
          x = gamma_quantile_upper(rng.uniform() * q, a);
          const double y = gamma_quantile(rng.uniform() * p, a);
          u[j] = 2.0 * std::sqrt(x);
          v[j] = 2.0 * std::sqrt(y);
        } else {
          x = gamma_quantile(rng.uniform() * p, a);
          u[j] = v[j] = 2.0 * std::sqrt(x);
        }
      }
      vals[r] = transport::uniform_sorted_cost_1d(std::move(u), std::move(v));
    }
    const auto ms = mean_stderr(vals);
    mean += w * ms.mean;
    var += w * w * ms.stderr_ * ms.stderr_;
  }
  return {mean, std::sqrt(var)};
}

struct TruncationSlope {
  std::vector<std::size_t> n_grid;
  std::vector<MeanStderr> terms;
  SlopeFit fit;
};

/// Fitted log-log slope of the truncation term with R = 2 (C log n)^{1/2}.
inline TruncationSlope truncation_slope(double alpha, double C, std::span<const std::size_t> n_grid, std::size_t reps,
                                        std::uint64_t seed) {
  TruncationSlope out;
  std::vector<std::pair<double, double>> pairs;
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    const auto cfg = TruncationConfig::from_log(C, n_grid[i]);
    const auto term = truncation_term_mc(alpha, cfg.R, n_grid[i], reps, derive_seed(seed, {i}));
    out.n_grid.push_back(n_grid[i]);
    out.terms.push_back(term);
    pairs.emplace_back(static_cast<double>(n_grid[i]), term.mean);
  }
  out.fit = fit_loglog_slope(pairs);
  return out;
}

inline DiagnosticsReport diag_truncation_slope(double alpha, double C, std::span<const std::size_t> n_grid,
                                               std::size_t reps, std::uint64_t seed) {
  const auto s = truncation_slope(alpha, C, n_grid, reps, seed);
  DiagnosticsReport rep;
  rep.add(make_entry("truncation_slope" + detail::param_tag({{"alpha", alpha}, {"C", C}}), s.fit.slope,
                     Relation::below, -1.0, 0.0, "stderr=" + format_double(s.fit.stderr_)));
  return rep;
}

}  // namespace laguerre::proof
