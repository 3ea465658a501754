#include <catch_amalgamated.hpp>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "laguerre/bessel.hpp"
#include "laguerre/kernel.hpp"
#include "laguerre/metric.hpp"
#include "laguerre/polynomial.hpp"
#include "laguerre/quadrature.hpp"
#include "laguerre/sampling.hpp"
#include "laguerre/semigroup.hpp"
#include "laguerre/special.hpp"
#include "support.hpp"

using namespace laguerre;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

QuadOptions tight() { return QuadOptions{1e-12, 1e-14}; }

}  // namespace

TEST_CASE("model params validate and classify", "[core]") {
  ModelParams p{-0.5, 0.25};
  CHECK(p.dim() == 2);
  CHECK(p.alpha_star() == -0.25);
  CHECK(p.theorem_regime_ok());
  CHECK_FALSE(ModelParams{-0.6}.theorem_regime_ok());
  CHECK_THROWS_AS(ModelParams{-1.0}, std::invalid_argument);
  CHECK_THROWS_AS(ModelParams(std::vector<double>{}), std::invalid_argument);
  CHECK(ModelParams::parse("-0.5,-0.5") == ModelParams({-0.5, -0.5}));
  CHECK(ModelParams::parse("1.30").alpha(0) == 1.3);
  CHECK_THROWS(ModelParams::parse("0.5,,1"));
  CHECK_THROWS_AS(Point({1.0, 0.0}), std::domain_error);
  CHECK(MultiIndex{{1, 2}}.order() == 3);
}

TEST_CASE("density of mu alpha", "[core]") {
  CHECK_THAT(density_mu_alpha(ModelParams{0.0}, Point{1.0}), WithinRel(std::exp(-1.0), 1e-14));
  CHECK_THAT(density_mu_alpha(ModelParams{0.0, 0.0}, Point{1.0, 1.0}), WithinRel(std::exp(-2.0), 1e-14));
  const double oracle = std::pow(0.25, -0.5) * std::exp(-0.25) / boost::math::tgamma(0.5);
  CHECK_THAT(density_mu_alpha(ModelParams{-0.5}, Point{0.25}), WithinRel(oracle, 1e-13));
  CHECK_THAT(oracle, WithinAbs(0.8788, 1e-4));
  const std::vector<double> bad{-1.0};
  CHECK_THROWS_AS(density_mu_alpha(ModelParams{0.0}, bad), std::domain_error);
  for (double a : {-0.5, 0.0, 2.0}) {
    auto r = integrate_mu_1d(a, [](double) { return 1.0; }, tight());
    CHECK(r.converged);
    CHECK_THAT(r.value, WithinAbs(1.0, 1e-10));
  }
}

TEST_CASE("incomplete gamma against boost", "[core][special]") {
  for (double a : {0.5, 1.0, 1.5, 3.0, 12.5, 200.0})
    for (double x : {1e-3, 0.1, 0.5, 1.0, 2.0, 5.0, 13.0, 40.0, 210.0}) {
      CHECK_THAT(gamma_p(a, x), WithinAbs(boost::math::gamma_p(a, x), 1e-14));
      const double q = boost::math::gamma_q(a, x);
      if (q > 1e-300) CHECK_THAT(gamma_q(a, x), WithinRel(q, 1e-11));
    }
}

TEST_CASE("gamma quantile", "[core][special]") {
  CHECK_THAT(gamma_quantile(1.0 - std::exp(-1.0), 1.0), WithinRel(1.0, 1e-12));
  CHECK_THAT(gamma_quantile(0.5, 1.0), WithinRel(std::log(2.0), 1e-12));
  // Bisection oracle on Boost's incomplete gamma.
  double lo = 0.0, hi = 10.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (boost::math::gamma_p(0.5, mid) < 0.3 ? lo : hi) = mid;
  }
  CHECK_THAT(gamma_quantile(0.3, 0.5), WithinRel(0.5 * (lo + hi), 1e-12));
  for (double a : {0.5, 0.75, 1.0, 2.0, 3.5, 50.0})
    for (double p : {1e-12, 1e-6, 0.01, 0.3, 0.5, 0.9, 0.999999}) {
      CHECK_THAT(gamma_quantile(p, a), WithinRel(boost::math::gamma_p_inv(a, p), 1e-12));
      CHECK_THAT(gamma_quantile_upper(p, a), WithinRel(boost::math::gamma_q_inv(a, p), 1e-12));
    }
  CHECK_THROWS_AS(gamma_quantile(0.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(gamma_quantile(1.0, 1.0), std::domain_error);
}

TEST_CASE("sampling mu alpha", "[core][sampling]") {
  const std::size_t n = 1000000;
  for (auto [a, mean] : {std::pair{0.0, 1.0}, std::pair{2.0, 3.0}}) {
    const auto s = sample_mu_alpha(ModelParams{a}, n, 42);
    double m = 0.0;
    for (double v : s.data()) m += v;
    m /= n;
    CHECK(std::abs(m - mean) < 4.0 * std::sqrt(mean / n));
  }
  const auto s = sample_mu_alpha(ModelParams{-0.5}, n, 7);
  const double d = testsupport::ks_statistic(s.data(), [](double x) { return boost::math::gamma_p(0.5, x); });
  CHECK(d < testsupport::ks_critical_1pct(n));
  for (double v : s.data()) REQUIRE(v > 0.0);

  const auto a = sample_mu_alpha(ModelParams{0.3, -0.5}, 3000, 99);
  const auto b = sample_mu_alpha(ModelParams{0.3, -0.5}, 3000, 99);
  CHECK(a.data() == b.data());
  CHECK(a.seed() == 99);
  CHECK_THROWS(sample_mu_alpha(ModelParams{0.0}, 0, 1));
}

TEST_CASE("laguerre polynomials", "[core][polynomial]") {
  CHECK(laguerre_L(0, 0.7, 3.1) == 1.0);
  CHECK_THAT(laguerre_L(1, 0.7, 3.1), WithinAbs(0.7 + 1.0 - 3.1, 1e-15));
  CHECK_THAT(laguerre_L(2, 0.0, 2.0), WithinAbs(-1.0, 1e-15));
  for (double a : {-0.5, 0.0, 1.3})
    for (unsigned k = 0; k <= 8; ++k)
      for (double x : {0.1, 1.0, 4.0, 9.0})
        CHECK_THAT(laguerre_L(k, a, x), WithinAbs(testsupport::laguerre_explicit(k, a, x), 1e-9));

  const ModelParams p0{0.0};
  const std::vector<double> pt{2.5};
  CHECK(laguerre_l_normalized(MultiIndex{{0}}, p0, pt) == 1.0);
}

TEST_CASE("orthonormality of normalized polynomials", "[core][polynomial]") {
  for (double a : {-0.5, 0.0, 1.0}) {
    const ModelParams p{a};
    for (unsigned i = 0; i <= 3; ++i)
      for (unsigned j = i; j <= 3; ++j) {
        auto r = integrate_mu_1d(
            a,
            [&](double x) {
              const std::vector<double> v{x};
              return laguerre_l_normalized(MultiIndex{{i}}, p, v) * laguerre_l_normalized(MultiIndex{{j}}, p, v);
            },
            tight());
        CHECK_THAT(r.value, WithinAbs(i == j ? 1.0 : 0.0, 1e-6));
      }
  }
  // Spec examples: <l_1, l_2> = 0 for alpha = 0, ||l_3||^2 = 1 for alpha = 1.
  auto cross = integrate_mu_1d(0.0, [](double x) {
    const auto l = laguerre_l_sequence(2, 0.0, x);
    return l[1] * l[2];
  });
  CHECK_THAT(cross.value, WithinAbs(0.0, 1e-9));
  auto sq = integrate_mu_1d(1.0, [](double x) {
    const auto l = laguerre_l_sequence(3, 1.0, x);
    return l[3] * l[3];
  });
  CHECK_THAT(sq.value, WithinAbs(1.0, 1e-9));

  // Two-dimensional Gram entries factor into one-dimensional integrals.
  const ModelParams p2{-0.5, 1.0};
  for (unsigned a1 = 0; a1 <= 2; ++a1)
    for (unsigned b1 = 0; b1 <= 1; ++b1) {
      double prod = 1.0;
      const unsigned idx[2] = {a1, b1};
      for (std::size_t d = 0; d < 2; ++d) {
        prod *= integrate_mu_1d(p2.alpha(d), [&](double x) {
                  const double v = laguerre_l_sequence(idx[d], p2.alpha(d), x)[idx[d]];
                  return v * v;
                }).value;
      }
      CHECK_THAT(prod, WithinAbs(1.0, 1e-6));
    }
}

TEST_CASE("scaled Bessel function", "[core][bessel]") {
  CHECK(bessel_I_scaled(0.0, 0.0) == 1.0);
  const double half = std::exp(-1.0) * std::sqrt(2.0 / std::numbers::pi) * std::sinh(1.0);
  CHECK_THAT(bessel_I_scaled(0.5, 1.0), WithinRel(half, 1e-14));
  CHECK_THAT(half, WithinAbs(0.34495, 1e-5));
  // Series with an explicit remainder bound: terms decay geometrically by 1/((j+1)^2 * 4).
  double series = 0.0, term = 1.0;
  for (int j = 0; j < 30; ++j) {
    series += term;
    term *= 0.25 / ((j + 1.0) * (j + 1.0));
  }
  CHECK_THAT(bessel_I_scaled(0.0, 1.0), WithinRel(std::exp(-1.0) * series, 1e-15));

  for (double lam : {-0.5, -0.3, 0.0, 0.5, 1.3, 2.0, 7.5})
    for (double x = 1e-3; x < 500.0; x *= 1.37) {
      const double ref = boost::math::cyl_bessel_i(lam, x) * std::exp(-x);
      CHECK_THAT(bessel_I_scaled(lam, x), WithinRel(ref, 1e-12));
    }
}

TEST_CASE("Bessel series and asymptotic agree on the overlap", "[core][bessel]") {
  double worst = 0.0;
  for (double lam : {-0.5, 0.0, 0.5, 1.3, 2.0, 3.0})
    for (double x = 20.0; x <= 40.0; x += 0.125) {
      const double a = detail::log_bessel_i_scaled_series(lam, x);
      const double b = std::log(detail::bessel_i_scaled_hankel(lam, x));
      worst = std::max(worst, std::abs(std::expm1(a - b)));
    }
  CHECK(worst <= 1e-12);
}

TEST_CASE("kernel closed form against spectral sum", "[core][kernel]") {
  for (double a : {-0.5, 0.0, 1.3}) {
    KernelEvaluator ev(ModelParams{a}, 60);
    for (double t : {0.5, 1.0, 2.0})
      for (int i = 1; i <= 20; ++i)
        for (int j = 1; j <= 20; ++j) {
          const Point x{0.4 * i}, y{0.4 * j};
          const double s = ev.spectral(t, x, y);
          REQUIRE(std::abs(ev.closed(t, x, y) - s) / s <= 1e-8);
        }
  }
  KernelEvaluator ev0(ModelParams{0.0});
  CHECK_THAT(ev0.closed(50.0, Point{1.0}, Point{1.0}), WithinAbs(1.0, 1e-9));
  CHECK_THAT(ev0.closed(2.0, Point{1.0}, Point{1.0}), WithinRel(ev0.spectral(2.0, Point{1.0}, Point{1.0}), 1e-10));
  CHECK_THAT(ev0.closed(1.0, Point{1.0}, Point{2.0}), WithinRel(ev0.spectral(1.0, Point{1.0}, Point{2.0}), 1e-8));
  CHECK(KernelEvaluator(ModelParams{0.4}, 0).spectral(1.0, Point{3.0}, Point{0.2}) == 1.0);
  CHECK_THROWS_AS(ev0.spectral(0.1, Point{1.0}, Point{1.0}), PrecisionError);
  CHECK_THROWS_AS(ev0.closed(0.0, Point{1.0}, Point{1.0}), std::domain_error);

  KernelEvaluator ev2(ModelParams{-0.5, 1.0}, 60);
  const Point x{0.7, 2.0}, y{3.1, 0.4};
  CHECK_THAT(ev2.closed(0.8, x, y), WithinRel(ev2.spectral(0.8, x, y), 1e-8));
  KernelEvaluator ev2p(ModelParams{-0.5, 1.0}, 60, false);
  CHECK_THAT(ev2p.closed(0.8, x, y), WithinRel(ev2.closed(0.8, x, y), 1e-13));
}

TEST_CASE("kernel symmetry is exact", "[core][kernel]") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(1e-3, 30.0), tt(1e-3, 5.0);
  KernelEvaluator ev(ModelParams{0.3, -0.5});
  for (int i = 0; i < 2000; ++i) {
    const Point x{u(gen), u(gen)}, y{u(gen), u(gen)};
    const double t = tt(gen);
    const double a = ev.log_closed(t, x, y);
    REQUIRE(a == ev.log_closed(t, y, x));
    REQUIRE(std::isfinite(a));
    REQUIRE(ev.closed(t, x, y) == ev.closed(t, y, x));
  }
}

TEST_CASE("kernel stochasticity and Chapman-Kolmogorov", "[core][kernel]") {
  for (double a : {-0.5, 0.0, 1.3})
    for (double t : {0.5, 1.0, 2.0})
      for (double x : {0.05, 0.4, 1.0, 2.5, 5.0, 8.0}) {
        auto r = semigroup_apply(a, t, [](double) { return 1.0; }, x, tight());
        CHECK_THAT(r.value, WithinAbs(1.0, 1e-6));
        // Spectral oracle: int p_t(x, .) dmu = 1 by orthonormality.
        auto rs = integrate_mu_1d(
            a,
            [&](double y) {
              KernelEvaluator ev(ModelParams{a});
              return ev.spectral(t, std::vector<double>{x}, std::vector<double>{y});
            },
            tight());
        CHECK_THAT(rs.value, WithinAbs(1.0, 1e-6));
      }
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> st(0.1, 2.0), pt(0.1, 6.0);
  for (double a : {-0.5, 0.0, 1.3})
    for (int k = 0; k < 8; ++k) {
      const double s = st(gen), t = st(gen), x = pt(gen), y = pt(gen);
      auto r = semigroup_apply(a, s, [&](double z) { return kernel_1d(a, t, z, y); }, x, tight());
      CHECK_THAT(r.value, WithinRel(kernel_1d(a, s + t, x, y), 1e-6));
    }
}

TEST_CASE("comparison function", "[core][kernel]") {
  CHECK(phi_comparison(0.0, 1.0, 1e-4, 1e-4) ==
        std::exp(-1.0 * std::log(-std::expm1(-1.0)) - std::exp(-1.0) * 2e-4 / -std::expm1(-1.0)));
  CHECK(1e-8 < phi_threshold(1.0));
  // Bands from a calibration run over x, y in {0.1, ..., 8}, t in {0.1, ..., 3}.
  struct Band {
    double alpha, lo, hi;
  };
  for (auto band : {Band{-0.5, 1.0011, 1.54296}, Band{0.0, 1.00055, 1.26604}, Band{1.3, 1.00024, 3.10132}}) {
    double lo = 1e300, hi = 0.0;
    for (int it = 0; it < 30; ++it)
      for (int i = 1; i <= 80; ++i)
        for (int j = 1; j <= 80; ++j) {
          const double t = 0.1 + 0.1 * it, x = 0.1 * i, y = 0.1 * j;
          const double phi = phi_comparison(band.alpha, t, x, y);
          REQUIRE(phi > 0.0);
          const double r = kernel_1d(band.alpha, t, x, y) / phi;
          lo = std::min(lo, r);
          hi = std::max(hi, r);
        }
    CHECK(lo >= band.lo * (1.0 - 1e-3));
    CHECK(hi <= band.hi * (1.0 + 1e-3));
  }
}

TEST_CASE("intrinsic metric", "[core][metric]") {
  CHECK(rho(1.0, 4.0) == 2.0);
  const std::vector<double> a{1.0, 1.0}, b{4.0, 4.0};
  CHECK_THAT(rho_N(a, b), WithinRel(2.0 * std::sqrt(2.0), 1e-15));
  CHECK(flat_transform(std::vector<double>{0.0, 4.0}) == std::vector<double>{0.0, 4.0});
  CHECK_THROWS(flat_transform(std::vector<double>{-1.0}));
  std::mt19937_64 gen(5);
  std::gamma_distribution<double> g(1.5);
  for (int i = 0; i < 1000; ++i) {
    const std::vector<double> x{g(gen), g(gen), g(gen)}, y{g(gen), g(gen), g(gen)}, z{g(gen), g(gen), g(gen)};
    REQUIRE(rho_N(x, x) == 0.0);
    REQUIRE(rho_N(x, y) >= 0.0);
    REQUIRE(rho_N(x, y) == rho_N(y, x));
    REQUIRE(rho_N(x, z) <= rho_N(x, y) + rho_N(y, z) + 1e-12);
  }
}

TEST_CASE("generator and carre du champ", "[core][generator]") {
  CHECK_THAT(generator_apply([](double x) { return x; }, 0.0, 2.0), WithinAbs(-1.0, 1e-6));
  for (double x : {0.1, 1.0, 7.0, 50.0, 1e3})
    CHECK_THAT(carre_du_champ([](double v) { return std::sqrt(v); }, 0.0, x), WithinAbs(0.25, 1e-6));
  CHECK(std::isfinite(generator_apply([](double x) { return std::log(x); }, 0.0, 1e-5)));
  CHECK_THROWS(generator_apply([](double x) { return x; }, 0.0, 0.0));
  for (double a : {-0.5, 0.0, 1.0})
    for (unsigned k = 0; k <= 3; ++k)
      for (int i = 0; i < 20; ++i) {
        const double x = 0.25 + 0.5 * i;
        auto lk = [&](double v) { return laguerre_l_sequence(k, a, v)[k]; };
        REQUIRE(std::abs(generator_apply(lk, a, x) + k * lk(x)) <= 1e-5);
      }
  const ModelParams p{-0.5, 1.0};
  const MultiIndex n{{2, 1}};
  for (double x0 : {0.3, 1.7, 4.0}) {
    const std::vector<double> x{x0, 5.0 - x0};
    const double res = generator_apply_nd([&](std::span<const double> y) { return laguerre_l_normalized(n, p, y); },
                                          p, x) +
                       3.0 * laguerre_l_normalized(n, p, x);
    CHECK(std::abs(res) <= 1e-5);
  }
}
