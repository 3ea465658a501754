#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include "laguerre/config.hpp"
#include "laguerre/errors.hpp"
#include "laguerre/transport/assignment.hpp"
#include "laguerre/transport/cost.hpp"
#include "laguerre/transport/measure.hpp"
#include "laguerre/transport/network_simplex.hpp"

namespace laguerre::transport {

struct ExactResult {
  W2Result result;
  CouplingPlan plan;
};

namespace detail {

inline constexpr double kWeightScale = 1099511627776.0;  // 2^40

// Weights rounded to integers summing to exactly 2^40; the rounding defect
// is absorbed by the largest entry.
inline std::vector<std::int64_t> integer_weights(const std::vector<double>& w) {
  const auto total = static_cast<std::int64_t>(kWeightScale);
  std::vector<std::int64_t> out(w.size());
  std::int64_t sum = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    out[i] = std::llround(w[i] * kWeightScale);
    sum += out[i];
  }
  const auto big = static_cast<std::size_t>(std::max_element(out.begin(), out.end()) - out.begin());
  out[big] += total - sum;
  if (out[big] < 0) throw std::invalid_argument("integer_weights: weights do not sum to 1");
  return out;
}

inline ExactResult exact_by_assignment(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  const Matrix c = cost_matrix(mu, nu);
  const auto match = solve_assignment(c);
  const std::size_t n = mu.size();
  ExactResult r;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += c(i, match[i]);
  const double w = 1.0 / static_cast<double>(n);
  r.plan.entries.reserve(n);
  for (std::size_t i = 0; i < n; ++i) r.plan.entries.push_back({i, match[i], w});
  r.plan.total_cost = total / static_cast<double>(n);
  r.result = make_result(r.plan.total_cost, W2Method::exact_discrete);
  return r;
}

inline ExactResult exact_by_network_flow(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  const Matrix c = cost_matrix(mu, nu);
  const auto a = integer_weights(mu.weights());
  const auto b = integer_weights(nu.weights());
  const int n = static_cast<int>(mu.size());
  const int m = static_cast<int>(nu.size());
  NetworkSimplex ns(n + m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) ns.add_arc(i, n + j, c(i, j));
  for (int i = 0; i < n; ++i) ns.set_supply(i, a[i]);
  for (int j = 0; j < m; ++j) ns.set_supply(n + j, -b[j]);
  if (ns.run() != NetworkSimplex::Status::optimal) throw PrecisionError("w2_discrete_exact: network flow failed");
  ExactResult r;
  double total = 0.0;
  int e = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j, ++e) {
      const auto f = ns.flow(e);
      if (f == 0) continue;
      const double mass = static_cast<double>(f) / kWeightScale;
      r.plan.entries.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j), mass});
      total += mass * c(i, j);
    }
  r.plan.total_cost = total;
  W2Diagnostics d;
  d.iterations = ns.pivots();
  r.result = make_result(total, W2Method::exact_discrete, d);
  return r;
}

}  // namespace detail

/// Exact W_2 between two discrete measures under rho_N.
/// Uniform equal-size pairs use the assignment solver (cap policy.assignment_cap);
/// other pairs use network flow (cap policy.network_flow_cap).
inline ExactResult w2_discrete_exact(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                     const NumericPolicy& policy = default_policy()) {
  if (mu.dim() != nu.dim()) throw std::invalid_argument("w2_discrete_exact: dimension mismatch");
  if (mu.size() == nu.size() && mu.is_uniform() && nu.is_uniform()) {
    if (mu.size() > policy.assignment_cap)
      throw CapacityError("w2_discrete_exact: support exceeds the assignment cap; use w2_sinkhorn");
    return detail::exact_by_assignment(mu, nu);
  }
  if (std::max(mu.size(), nu.size()) > policy.network_flow_cap)
    throw CapacityError("w2_discrete_exact: support exceeds the network-flow cap; use w2_sinkhorn");
  return detail::exact_by_network_flow(mu, nu);
}

/// Optimal coupling of two uniform clouds on the line (flat coordinates) by
/// the north-west corner rule on sorted atoms; returns sum of mass * cost.
inline double uniform_sorted_cost_1d(std::vector<double> u, std::vector<double> v) {
  std::sort(u.begin(), u.end());
  std::sort(v.begin(), v.end());
  const auto n = static_cast<std::int64_t>(u.size());
  const auto m = static_cast<std::int64_t>(v.size());
  // Source i carries m units, sink j carries n units; total n * m.
  std::int64_t left_i = m, left_j = n;
  std::size_t i = 0, j = 0;
  double total = 0.0;
  while (i < u.size() && j < v.size()) {
    const std::int64_t f = std::min(left_i, left_j);
    const double d = u[i] - v[j];
    total += static_cast<double>(f) * d * d;
    left_i -= f;
    left_j -= f;
    if (left_i == 0) {
      ++i;
      left_i = m;
    }
    if (left_j == 0) {
      ++j;
      left_j = n;
    }
  }
  return total / (static_cast<double>(n) * static_cast<double>(m));
}

struct CertifiedOptions {
  std::size_t sink_neighbours = 24;
  std::size_t extra_source_neighbours = 16;
  std::size_t max_rounds = 20;
  std::size_t violators_per_sink = 16;
};

/// Exact squared W_2 between the uniform clouds u (n points) and v (m points),
/// given in flat coordinates of dimension d. The network simplex runs on a
/// sparse nearest-neighbour arc set; optimality over the complete bipartite
/// graph is then certified by dual feasibility of every arc, and violated arcs
/// are added until the certificate holds.
inline W2Result uniform_exact_certified(const std::vector<double>& u, const std::vector<double>& v, std::size_t d,
                                        const CertifiedOptions& opt = {}) {
  const std::size_t n = u.size() / d;
  const std::size_t m = v.size() / d;
  if (n == 0 || m == 0) throw std::invalid_argument("uniform_exact_certified: empty cloud");
  const std::int64_t g = std::gcd(static_cast<std::int64_t>(n), static_cast<std::int64_t>(m));
  const std::int64_t source_supply = static_cast<std::int64_t>(m) / g;
  const std::int64_t sink_demand = static_cast<std::int64_t>(n) / g;
  const double total_units = static_cast<double>(source_supply) * static_cast<double>(n);

  // Candidate arcs, packed as i * m + j.
  std::vector<std::uint64_t> arcs;
  {
    const std::size_t ks = std::min(n, opt.sink_neighbours);
    std::vector<std::pair<double, std::size_t>> buf(n);
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t i = 0; i < n; ++i) buf[i] = {sq_dist(&u[i * d], &v[j * d], d), i};
      std::nth_element(buf.begin(), buf.begin() + (ks - 1), buf.end());
      for (std::size_t k = 0; k < ks; ++k) arcs.push_back(static_cast<std::uint64_t>(buf[k].second) * m + j);
    }
    const std::size_t kr = std::min(m, 2 * ((m + n - 1) / n) + opt.extra_source_neighbours);
    std::vector<std::pair<double, std::size_t>> row(m);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < m; ++j) row[j] = {sq_dist(&u[i * d], &v[j * d], d), j};
      std::nth_element(row.begin(), row.begin() + (kr - 1), row.end());
      for (std::size_t k = 0; k < kr; ++k) arcs.push_back(static_cast<std::uint64_t>(i) * m + row[k].second);
    }
  }

  W2Diagnostics diag;
  for (std::size_t round = 0;; ++round) {
    std::sort(arcs.begin(), arcs.end());
    arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());
    NetworkSimplex ns(static_cast<int>(n + m));
    for (auto a : arcs) {
      const std::size_t i = a / m, j = a % m;
      ns.add_arc(static_cast<int>(i), static_cast<int>(n + j), sq_dist(&u[i * d], &v[j * d], d));
    }
    for (std::size_t i = 0; i < n; ++i) ns.set_supply(static_cast<int>(i), source_supply);
    for (std::size_t j = 0; j < m; ++j) ns.set_supply(static_cast<int>(n + j), -sink_demand);
    ns.run();
    diag.iterations += ns.pivots();
    diag.certificate_rounds = round + 1;

    // Dual certificate over all n * m arcs.
    double max_cost = 0.0;
    for (auto a : arcs) max_cost = std::max(max_cost, sq_dist(&u[(a / m) * d], &v[(a % m) * d], d));
    const double tol = 1e-9 * (1.0 + max_cost);
    std::vector<std::uint64_t> added;
    double worst = 0.0;
    std::vector<std::pair<double, std::size_t>> viol;
    for (std::size_t j = 0; j < m; ++j) {
      viol.clear();
      const double pj = ns.potential(static_cast<int>(n + j));
      for (std::size_t i = 0; i < n; ++i) {
        const double rc = sq_dist(&u[i * d], &v[j * d], d) + ns.potential(static_cast<int>(i)) - pj;
        if (rc < -tol) viol.emplace_back(rc, i);
      }
      if (viol.empty()) continue;
      const std::size_t keep = std::min(viol.size(), opt.violators_per_sink);
      std::partial_sort(viol.begin(), viol.begin() + keep, viol.end());
      worst = std::min(worst, viol.front().first);
      for (std::size_t k = 0; k < keep; ++k) added.push_back(static_cast<std::uint64_t>(viol[k].second) * m + j);
    }
    if (added.empty() && ns.artificial_flow() == 0) {
      diag.duality_gap = worst < 0.0 ? -worst : 0.0;
      diag.converged = true;
      return make_result(ns.total_cost() / total_units, W2Method::exact_discrete, diag);
    }
    if (round + 1 >= opt.max_rounds) {
      diag.converged = false;
      diag.duality_gap = worst < 0.0 ? -worst : 0.0;
      throw PrecisionError("uniform_exact_certified: dual certificate failed to close");
    }
    arcs.insert(arcs.end(), added.begin(), added.end());
  }
}

}  // namespace laguerre::transport
