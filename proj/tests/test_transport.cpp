#include <catch_amalgamated.hpp>

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "laguerre/sampling.hpp"
#include "laguerre/transport.hpp"
#include "support.hpp"

using namespace laguerre;
using namespace laguerre::transport;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::vector<double> random_points(std::mt19937_64& gen, std::size_t count, std::size_t dim) {
  std::gamma_distribution<double> g(1.2);
  std::vector<double> p(count * dim);
  for (auto& v : p) v = g(gen) + 1e-9;
  return p;
}

// Minimum of sum_i C(i, s(i)) over every permutation s, summed in index order.
double brute_force_assignment(const Matrix& c) {
  std::vector<std::size_t> perm(c.rows);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double s = 0.0;
    for (std::size_t i = 0; i < c.rows; ++i) s += c(i, perm[i]);
    best = std::min(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// North-west corner coupling of two weighted clouds on the line, optimal for convex costs.
double sorted_weighted_cost_1d(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  std::vector<std::pair<double, double>> a, b;
  for (std::size_t i = 0; i < mu.size(); ++i) a.emplace_back(2.0 * std::sqrt(mu.point(i)[0]), mu.weights()[i]);
  for (std::size_t j = 0; j < nu.size(); ++j) b.emplace_back(2.0 * std::sqrt(nu.point(j)[0]), nu.weights()[j]);
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double ra = a[0].second, rb = b[0].second, total = 0.0;
  while (i < a.size() && j < b.size()) {
    const double m = std::min(ra, rb);
    total += m * (a[i].first - b[j].first) * (a[i].first - b[j].first);
    ra -= m;
    rb -= m;
    if (ra <= 1e-15 && ++i < a.size()) ra = a[i].second;
    if (rb <= 1e-15 && ++j < b.size()) rb = b[j].second;
  }
  return total;
}

}  // namespace

TEST_CASE("quantile coupling against the model", "[transport][quantile]") {
  const SampleSet one(ModelParams{0.0}, {1.0}, 0);
  const double oracle = 8.0 - 4.0 * std::sqrt(std::numbers::pi);
  CHECK_THAT(w2_exact_1d_model(one, ModelParams{0.0}).squared, WithinAbs(oracle, 1e-13));
  CHECK_THAT(oracle, WithinAbs(0.910185, 1e-6));
  CHECK_THAT(w2_exact_1d_model(one, ModelParams{0.0}, 1e-12, QuantileIntegration::quadrature).squared,
             WithinAbs(oracle, 1e-10));
  // Single atom: the product coupling, 4 (X - 2 sqrt(X) Gamma(a + 1/2) / Gamma(a) + a) with a = alpha + 1.
  for (double a : {-0.5, 1.3})
    for (double x : {0.3, 2.5}) {
      const SampleSet s(ModelParams{a}, {x}, 0);
      const double m = boost::math::tgamma(a + 1.5) / boost::math::tgamma(a + 1.0);
      CHECK_THAT(w2_exact_1d_model(s, ModelParams{a}).squared,
                 WithinAbs(4.0 * (x - 2.0 * std::sqrt(x) * m + a + 1.0), 1e-12));
    }
  for (double a : {-0.5, 0.0, 1.0}) {
    const auto s = sample_mu_alpha(ModelParams{a}, 40, 17);
    const double closed = w2_exact_1d_model(s, ModelParams{a}).squared;
    const double quad = w2_exact_1d_model(s, ModelParams{a}, 1e-11, QuantileIntegration::quadrature).squared;
    CHECK(closed > 0.0);
    CHECK_THAT(closed, WithinAbs(quad, 1e-9));
  }
  CHECK_THROWS_AS(w2_exact_1d_model(sample_mu_alpha(ModelParams{0.0, 0.0}, 4, 1), ModelParams{0.0, 0.0}),
                  UnsupportedError);
}

TEST_CASE("quantile coupling agrees with a large two-sample estimate", "[transport][quantile]") {
  // The two-sample value exceeds the target by about W2^2(mu_M, mu) on average;
  // that bias is removed with a second independent large sample, since
  // E W2^2(mu_M, mu_M') is about twice it.
  const ModelParams p{0.0};
  double exact = 0.0, two_sample = 0.0, bias = 0.0;
  for (std::uint64_t rep = 0; rep < 20; ++rep) {
    const auto s = sample_mu_alpha(p, 10000, derive_seed(100, {rep, 0}));
    const auto big = flat_transform(sample_mu_alpha(p, 1000000, derive_seed(100, {rep, 1})).data());
    const auto other = flat_transform(sample_mu_alpha(p, 1000000, derive_seed(100, {rep, 2})).data());
    exact += w2_exact_1d_model(s, p).squared;
    two_sample += uniform_sorted_cost_1d(flat_transform(s.data()), big);
    bias += 0.5 * uniform_sorted_cost_1d(big, other);
    if (rep == 0)
      CHECK_THAT(w2_exact_1d_model(s, p).squared,
                 WithinAbs(w2_exact_1d_model(s, p, 1e-12, QuantileIntegration::quadrature).squared, 1e-12));
  }
  CHECK(std::abs(two_sample - bias - exact) <= 0.05 * exact);
}

TEST_CASE("cost matrix", "[transport]") {
  const auto mu = DiscreteMeasure::uniform(1, {1.0, 2.0, 3.0});
  const auto c = cost_matrix(mu, mu);
  for (std::size_t i = 0; i < 3; ++i) CHECK(c(i, i) == 0.0);
  CHECK(cost_matrix(DiscreteMeasure::uniform(1, {1.0}), DiscreteMeasure::uniform(1, {4.0}))(0, 0) == 4.0);
  std::mt19937_64 gen(2);
  const auto a = DiscreteMeasure::uniform(2, random_points(gen, 5, 2));
  const auto b = DiscreteMeasure::uniform(2, random_points(gen, 7, 2));
  const auto ab = cost_matrix(a, b), ba = cost_matrix(b, a);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 7; ++j) CHECK(ab(i, j) == ba(j, i));
  CHECK_THROWS(cost_matrix(a, DiscreteMeasure::uniform(1, {1.0})));
  CHECK_THROWS(DiscreteMeasure(1, {1.0, 2.0}, {0.5, 0.6}));
}

TEST_CASE("exact discrete transport", "[transport][exact]") {
  const std::vector<double> pa{1.0, 2.0}, pb{4.0, 0.5};
  const auto r = w2_discrete_exact(DiscreteMeasure::uniform(2, pa), DiscreteMeasure::uniform(2, pb));
  CHECK_THAT(r.result.value, WithinRel(rho_N(pa, pb), 1e-15));
  std::mt19937_64 gen(8);
  const auto cloud = random_points(gen, 6, 2);
  CHECK(w2_discrete_exact(DiscreteMeasure::uniform(2, cloud), DiscreteMeasure::uniform(2, cloud)).result.squared ==
        0.0);

  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + gen() % 7, dim = 1 + gen() % 2;
    const auto mu = DiscreteMeasure::uniform(dim, random_points(gen, n, dim));
    const auto nu = DiscreteMeasure::uniform(dim, random_points(gen, n, dim));
    const auto ex = w2_discrete_exact(mu, nu);
    REQUIRE(ex.result.squared == brute_force_assignment(cost_matrix(mu, nu)) / static_cast<double>(n));
    REQUIRE(ex.plan.marginal_residual(mu.weights(), nu.weights()) < 1e-9);
  }
}

TEST_CASE("1-D exact transport is the sorted matching", "[transport][exact]") {
  std::mt19937_64 gen(12);
  for (int trial = 0; trial < 50; ++trial) {
    auto pts_a = random_points(gen, 60, 1), pts_b = random_points(gen, 60, 1);
    const double v = w2_discrete_exact(DiscreteMeasure::uniform(1, pts_a), DiscreteMeasure::uniform(1, pts_b))
                         .result.squared;
    CHECK_THAT(v, WithinAbs(uniform_sorted_cost_1d(flat_transform(pts_a), flat_transform(pts_b)), 1e-12));
    std::shuffle(pts_a.begin(), pts_a.end(), gen);
    const double w = w2_discrete_exact(DiscreteMeasure::uniform(1, pts_a), DiscreteMeasure::uniform(1, pts_b))
                         .result.squared;
    CHECK_THAT(w, WithinAbs(v, 1e-12));
  }
}

TEST_CASE("general weights by network flow", "[transport][exact]") {
  std::mt19937_64 gen(21);
  std::uniform_real_distribution<double> uw(0.05, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + gen() % 30, m = 2 + gen() % 30;
    auto weights = [&](std::size_t k) {
      std::vector<double> w(k);
      double s = 0.0;
      for (auto& x : w) s += (x = uw(gen));
      for (auto& x : w) x /= s;
      return w;
    };
    const DiscreteMeasure mu(1, random_points(gen, n, 1), weights(n));
    const DiscreteMeasure nu(1, random_points(gen, m, 1), weights(m));
    const auto r = w2_discrete_exact(mu, nu);
    CHECK_THAT(r.result.squared, WithinAbs(sorted_weighted_cost_1d(mu, nu), 1e-9));
    CHECK(r.plan.marginal_residual(mu.weights(), nu.weights()) < 1e-9);
  }
  // Weights in multiples of 1/K: expanding atoms gives a uniform assignment oracle.
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + gen() % 5, k = 12;
    auto pts = random_points(gen, n, 2), qts = random_points(gen, n + 1, 2);
    std::vector<double> w(n, 0.0), v(n + 1, 0.0);
    std::vector<double> exp_a, exp_b;
    for (std::size_t u = 0; u < k; ++u) {
      const std::size_t i = u < n ? u : gen() % n;
      w[i] += 1.0 / k;
      exp_a.insert(exp_a.end(), pts.begin() + 2 * i, pts.begin() + 2 * i + 2);
      const std::size_t j = u < n + 1 ? u : gen() % (n + 1);
      v[j] += 1.0 / k;
      exp_b.insert(exp_b.end(), qts.begin() + 2 * j, qts.begin() + 2 * j + 2);
    }
    double sw = std::accumulate(w.begin(), w.end(), 0.0), sv = std::accumulate(v.begin(), v.end(), 0.0);
    for (auto& x : w) x /= sw;
    for (auto& x : v) x /= sv;
    const auto r = w2_discrete_exact(DiscreteMeasure(2, pts, w), DiscreteMeasure(2, qts, v));
    const auto o = w2_discrete_exact(DiscreteMeasure::uniform(2, exp_a), DiscreteMeasure::uniform(2, exp_b));
    CHECK_THAT(r.result.squared, WithinAbs(o.result.squared, 1e-9));
  }
  NumericPolicy small;
  small.network_flow_cap = 4;
  small.assignment_cap = 4;
  CHECK_THROWS_AS(w2_discrete_exact(DiscreteMeasure::uniform(1, random_points(gen, 5, 1)),
                                    DiscreteMeasure::uniform(1, random_points(gen, 5, 1)), small),
                  CapacityError);
  CHECK_THROWS_AS(w2_discrete_exact(DiscreteMeasure::uniform(1, random_points(gen, 3, 1)),
                                    DiscreteMeasure::uniform(1, random_points(gen, 5, 1)), small),
                  CapacityError);
}

TEST_CASE("network simplex optimality conditions", "[transport][simplex]") {
  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> uc(0.0, 10.0);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + static_cast<int>(gen() % 20), m = 1 + static_cast<int>(gen() % 30);
    std::vector<std::int64_t> s(n), d(m, 0);
    std::int64_t total = 0;
    for (auto& x : s) total += (x = 1 + static_cast<std::int64_t>(gen() % 40));
    for (std::int64_t u = 0; u < total; ++u) ++d[gen() % m];
    Matrix c(n, m);
    for (auto& x : c.data) x = uc(gen);
    NetworkSimplex ns(n + m);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) ns.add_arc(i, n + j, c(i, j));
    for (int i = 0; i < n; ++i) ns.set_supply(i, s[i]);
    for (int j = 0; j < m; ++j) ns.set_supply(n + j, -d[j]);
    REQUIRE(ns.run() == NetworkSimplex::Status::optimal);
    std::vector<std::int64_t> rs(n, 0), cs(m, 0);
    int e = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j, ++e) {
        const auto f = ns.flow(e);
        REQUIRE(f >= 0);
        rs[i] += f;
        cs[j] += f;
        const double rc = c(i, j) + ns.potential(i) - ns.potential(n + j);
        REQUIRE(rc >= -1e-9);
        if (f > 0) REQUIRE(std::abs(rc) <= 1e-9);
      }
    REQUIRE(rs == s);
    REQUIRE(cs == d);
  }
}

TEST_CASE("certified sparse solver", "[transport][simplex]") {
  std::mt19937_64 gen(41);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 20 + gen() % 20, dim = 2;
    const auto a = random_points(gen, n, dim);
    const auto b = random_points(gen, n, dim);
    const auto sparse = uniform_exact_certified(flat_transform(a), flat_transform(b), dim, {2, 0, 20, 2});
    const auto dense = w2_discrete_exact(DiscreteMeasure::uniform(dim, a), DiscreteMeasure::uniform(dim, b));
    CHECK_THAT(sparse.squared, WithinAbs(dense.result.squared, 1e-12));
    const auto c = random_points(gen, 3 * n, dim);
    const auto sp2 = uniform_exact_certified(flat_transform(a), flat_transform(c), dim, {3, 0, 20, 2});
    const auto dn2 = w2_discrete_exact(DiscreteMeasure::uniform(dim, a), DiscreteMeasure::uniform(dim, c));
    CHECK_THAT(sp2.squared, WithinAbs(dn2.result.squared, 1e-9));
  }
}

TEST_CASE("Sinkhorn divergence", "[transport][sinkhorn]") {
  std::mt19937_64 gen(51);
  const auto cloud = DiscreteMeasure::uniform(2, random_points(gen, 8, 2));
  CHECK_THAT(w2_sinkhorn(cloud, cloud, 0.01).squared, WithinAbs(0.0, 1e-6));
  for (int trial = 0; trial < 20; ++trial) {
    const auto mu = DiscreteMeasure::uniform(2, random_points(gen, 8, 2));
    const auto nu = DiscreteMeasure::uniform(2, random_points(gen, 8, 2));
    const double exact = w2_discrete_exact(mu, nu).result.squared;
    for (double eps : {0.05, 0.01}) {
      const auto s = w2_sinkhorn(mu, nu, eps);
      CHECK(s.diagnostics.converged);
      CHECK(std::abs(s.squared - exact) <= (eps < 0.02 ? 0.02 : 0.03) * exact);
      CHECK_THAT(w2_sinkhorn(nu, mu, eps).squared, WithinAbs(s.squared, 1e-10));
    }
    double prev = -std::numeric_limits<double>::infinity();
    for (double eps : {0.01, 0.03, 0.1, 0.3, 1.0}) {
      const double raw = w2_sinkhorn(mu, nu, eps).diagnostics.raw_entropic_cost;
      CHECK(raw >= prev - 1e-9);
      prev = raw;
    }
  }
  const auto mu = DiscreteMeasure::uniform(1, random_points(gen, 8, 1));
  const auto nu = DiscreteMeasure::uniform(1, random_points(gen, 8, 1));
  SinkhornOptions quick;
  quick.iters_per_stage = 0;
  const auto r = w2_sinkhorn(mu, nu, 1e-3, 1, quick);
  CHECK_FALSE(r.diagnostics.converged);
  CHECK(r.diagnostics.marginal_violation > 1e-8);
  CHECK_THROWS(w2_sinkhorn(mu, nu, 0.0));
}

TEST_CASE("reference-sample proxy", "[transport][proxy]") {
  const ModelParams p2{0.0, 0.0};
  const auto one = sample_mu_alpha(p2, 1, 3);
  const auto r1 = w2_model_proxy_nd(one, p2, 4, 99);
  CHECK(r1.squared >= 0.0);
  CHECK(r1.squared == w2_model_proxy_nd(one, p2, 4, 99).squared);
  CHECK(r1.method == W2Method::proxy_nd);
  CHECK_THROWS(w2_model_proxy_nd(one, p2, 3, 99));

  double small = 0.0, large = 0.0;
  for (std::uint64_t rep = 0; rep < 50; ++rep) {
    const auto s = sample_mu_alpha(p2, 128, derive_seed(7, {rep}));
    small += w2_model_proxy_nd(s, p2, 4, derive_seed(8, {rep})).squared;
    large += w2_model_proxy_nd(s, p2, 64, derive_seed(9, {rep})).squared;
  }
  CHECK(large <= small);

  const ModelParams p1{0.0};
  double proxy = 0.0, exact = 0.0;
  for (std::uint64_t rep = 0; rep < 100; ++rep) {
    const auto s = sample_mu_alpha(p1, 256, derive_seed(10, {rep}));
    proxy += w2_model_proxy_nd(s, p1, 64, derive_seed(11, {rep})).squared;
    exact += w2_exact_1d_model(s, p1).squared;
  }
  CHECK(std::abs(proxy - exact) <= 0.05 * exact);
}
