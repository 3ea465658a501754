#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "laguerre/config.hpp"
#include "laguerre/transport/cost.hpp"
#include "laguerre/transport/measure.hpp"

namespace laguerre::transport {

struct SinkhornOptions {
  double epsilon = 0.01;
  std::size_t max_iter = 100000;
  double marginal_tol = default_policy().sinkhorn_marginal_tol;
  double eps_start = 1.0;
  double eps_decay = 0.5;
  std::size_t iters_per_stage = 10;
  std::size_t check_every = 1;
  std::size_t newton_after = 50;      // fixed-point steps at the target before Newton polishing
  std::size_t newton_max_size = 1024;  // rows + cols limit for the Newton phase
};

/// Entropic transport problem between two uniform-or-weighted clouds in flat coordinates.
class EntropicProblem {
 public:
  EntropicProblem(const DiscreteMeasure& mu, const DiscreteMeasure& nu)
      : d_(mu.dim()), u_(flat_points(mu)), v_(flat_points(nu)), a_(mu.weights()), b_(nu.weights()) {
    if (mu.dim() != nu.dim()) throw std::invalid_argument("sinkhorn: dimension mismatch");
    log_a_.resize(a_.size());
    log_b_.resize(b_.size());
    for (std::size_t i = 0; i < a_.size(); ++i) log_a_[i] = std::log(a_[i]);
    for (std::size_t j = 0; j < b_.size(); ++j) log_b_[j] = std::log(b_[j]);
    if (a_.size() * b_.size() <= (std::size_t{1} << 22)) {
      cost_ = Matrix(a_.size(), b_.size());
      for (std::size_t i = 0; i < a_.size(); ++i)
        for (std::size_t j = 0; j < b_.size(); ++j) cost_(i, j) = sq_dist(&u_[i * d_], &v_[j * d_], d_);
      dense_ = true;
    }
  }

  [[nodiscard]] std::size_t rows() const { return a_.size(); }
  [[nodiscard]] std::size_t cols() const { return b_.size(); }

  [[nodiscard]] double cost(std::size_t i, std::size_t j) const {
    return dense_ ? cost_(i, j) : sq_dist(&u_[i * d_], &v_[j * d_], d_);
  }

  /// out_i = -eps log sum_j b_j exp((g_j - C_ij) / eps).
  void softmin_rows(const std::vector<double>& g, double eps, std::vector<double>& out) const {
    std::vector<double> z(cols());
    for (std::size_t i = 0; i < rows(); ++i) {
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < cols(); ++j) {
        z[j] = log_b_[j] + (g[j] - cost(i, j)) / eps;
        mx = std::max(mx, z[j]);
      }
      double s = 0.0;
      for (std::size_t j = 0; j < cols(); ++j) s += std::exp(z[j] - mx);
      out[i] = -eps * (mx + std::log(s));
    }
  }

  /// out_j = -eps log sum_i a_i exp((f_i - C_ij) / eps).
  void softmin_cols(const std::vector<double>& f, double eps, std::vector<double>& out) const {
    std::vector<double> z(rows());
    for (std::size_t j = 0; j < cols(); ++j) {
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < rows(); ++i) {
        z[i] = log_a_[i] + (f[i] - cost(i, j)) / eps;
        mx = std::max(mx, z[i]);
      }
      double s = 0.0;
      for (std::size_t i = 0; i < rows(); ++i) s += std::exp(z[i] - mx);
      out[j] = -eps * (mx + std::log(s));
    }
  }

  /// L1 marginal violation of the plan a_i b_j exp((f_i + g_j - C_ij) / eps).
  [[nodiscard]] double marginal_violation(const std::vector<double>& f, const std::vector<double>& g,
                                          double eps) const {
    std::vector<double> col(cols(), 0.0);
    double viol = 0.0;
    for (std::size_t i = 0; i < rows(); ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < cols(); ++j) {
        const double p = a_[i] * b_[j] * std::exp((f[i] + g[j] - cost(i, j)) / eps);
        row += p;
        col[j] += p;
      }
      viol += std::abs(row - a_[i]);
    }
    for (std::size_t j = 0; j < cols(); ++j) viol += std::abs(col[j] - b_[j]);
    return viol;
  }

  [[nodiscard]] bool dense() const { return dense_; }

  /// Plan entries P_ij = a_i b_j exp((f_i + g_j - C_ij) / eps).
  [[nodiscard]] Matrix plan(const std::vector<double>& f, const std::vector<double>& g, double eps) const {
    Matrix p(rows(), cols());
    for (std::size_t i = 0; i < rows(); ++i)
      for (std::size_t j = 0; j < cols(); ++j)
        p(i, j) = std::exp(log_a_[i] + log_b_[j] + (f[i] + g[j] - cost(i, j)) / eps);
    return p;
  }

  [[nodiscard]] const std::vector<double>& a() const { return a_; }
  [[nodiscard]] const std::vector<double>& b() const { return b_; }

  [[nodiscard]] double dual_value(const std::vector<double>& f, const std::vector<double>& g) const {
    double s = 0.0;
    for (std::size_t i = 0; i < rows(); ++i) s += a_[i] * f[i];
    for (std::size_t j = 0; j < cols(); ++j) s += b_[j] * g[j];
    return s;
  }

 private:
  std::size_t d_;
  std::vector<double> u_, v_, a_, b_, log_a_, log_b_;
  Matrix cost_;
  bool dense_ = false;
};

struct EntropicSolution {
  double cost = 0.0;  // OT_eps as the dual value <a, f> + <b, g>
  double marginal_violation = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

namespace detail {

// One Newton step on the entropic dual
//   D(f, g) = <a, f> + <b, g> - eps (sum P - 1),
// with the Hessian system solved densely and a backtracking line search on the L1 marginal violation.
// Returns false if the violation cannot be reduced.
inline bool newton_step(const EntropicProblem& prob, std::vector<double>& f, std::vector<double>& g, double eps) {
  const std::size_t n = prob.rows(), m = prob.cols(), k = n + m;
  const Matrix p = prob.plan(f, g, eps);
  std::vector<double> r(n, 0.0), c(m, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      r[i] += p(i, j);
      c[j] += p(i, j);
    }
  // Hessian block system with the last g coordinate pinned (the dual is
  // invariant under f + c, g - c), leaving a positive definite matrix.
  const std::size_t dim = k - 1;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(dim));
  std::vector<double> full_rhs(k);
  for (std::size_t i = 0; i < n; ++i) full_rhs[i] = eps * (prob.a()[i] - r[i]);
  for (std::size_t j = 0; j < m; ++j) full_rhs[n + j] = eps * (prob.b()[j] - c[j]);
  for (std::size_t u = 0; u < dim; ++u) rhs(static_cast<Eigen::Index>(u)) = full_rhs[u];
  for (std::size_t i = 0; i < n; ++i) h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = r[i];
  for (std::size_t j = 0; j + 1 < m; ++j) {
    const auto col = static_cast<Eigen::Index>(n + j);
    h(col, col) = c[j];
    for (std::size_t i = 0; i < n; ++i) {
      h(static_cast<Eigen::Index>(i), col) = p(i, j);
      h(col, static_cast<Eigen::Index>(i)) = p(i, j);
    }
  }
  const Eigen::VectorXd sol = h.ldlt().solve(rhs);
  std::vector<double> x(k, 0.0);
  for (std::size_t u = 0; u < dim; ++u) x[u] = sol(static_cast<Eigen::Index>(u));

  double base = 0.0;
  for (double v : full_rhs) base += std::abs(v);
  base /= eps;
  std::vector<double> tf(n), tg(m);
  for (double t = 1.0; t > 1e-6; t *= 0.5) {
    for (std::size_t i = 0; i < n; ++i) tf[i] = f[i] + t * x[i];
    for (std::size_t j = 0; j < m; ++j) tg[j] = g[j] + t * x[n + j];
    if (prob.marginal_violation(tf, tg, eps) < base) {
      f = tf;
      g = tg;
      return true;
    }
  }
  return false;
}

}  // namespace detail

/// Log-domain Sinkhorn with symmetric (averaged) potential updates and
/// geometric epsilon annealing from eps_start down to the target. Small dense
/// problems finish with Newton steps on the dual, which converge where plain
/// fixed-point iteration stalls at small epsilon.
inline EntropicSolution solve_entropic(const EntropicProblem& prob, const SinkhornOptions& opt) {
  if (!(opt.epsilon > 0.0)) throw std::domain_error("sinkhorn: epsilon must be > 0");
  std::vector<double> f(prob.rows(), 0.0), g(prob.cols(), 0.0), tf(prob.rows()), tg(prob.cols());
  EntropicSolution sol;
  auto step = [&](double eps) {
    prob.softmin_rows(g, eps, tf);
    prob.softmin_cols(f, eps, tg);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = 0.5 * (f[i] + tf[i]);
    for (std::size_t j = 0; j < g.size(); ++j) g[j] = 0.5 * (g[j] + tg[j]);
    ++sol.iterations;
  };
  double eps = std::max(opt.eps_start, opt.epsilon);
  while (eps > opt.epsilon) {
    for (std::size_t k = 0; k < opt.iters_per_stage; ++k) step(eps);
    eps = std::max(opt.epsilon, eps * opt.eps_decay);
  }
  eps = opt.epsilon;
  const bool newton = prob.dense() && prob.rows() + prob.cols() <= opt.newton_max_size;
  double viol = prob.marginal_violation(f, g, eps);
  for (std::size_t it = 0; it < opt.max_iter && !(viol < opt.marginal_tol); ++it) {
    if (newton && it >= opt.newton_after) {
      ++sol.iterations;
      if (!detail::newton_step(prob, f, g, eps)) step(eps);
      viol = prob.marginal_violation(f, g, eps);
      continue;
    }
    step(eps);
    if (sol.iterations % opt.check_every == 0) viol = prob.marginal_violation(f, g, eps);
  }
  viol = prob.marginal_violation(f, g, eps);
  // Polish toward rounding level so the result does not depend on where the loop stopped.
  for (int extra = 0; newton && viol < opt.marginal_tol && viol > 1e-13 && extra < 10; ++extra) {
    if (!detail::newton_step(prob, f, g, eps)) break;
    ++sol.iterations;
    viol = prob.marginal_violation(f, g, eps);
  }
  sol.marginal_violation = viol;
  sol.converged = viol < opt.marginal_tol;
  sol.cost = prob.dual_value(f, g);
  return sol;
}

/// Debiased Sinkhorn divergence S = OT(mu, nu) - OT(mu, mu) / 2 - OT(nu, nu) / 2,
/// reported as the squared-distance estimate. Raw OT_eps(mu, nu) goes to the diagnostics.
inline W2Result w2_sinkhorn(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double epsilon,
                            std::size_t max_iter = 100000, SinkhornOptions opt = {}) {
  opt.epsilon = epsilon;
  opt.max_iter = max_iter;
  if (mu.size() * nu.size() > (std::size_t{1} << 22)) opt.check_every = 10;
  const auto ab = solve_entropic(EntropicProblem(mu, nu), opt);
  const auto aa = solve_entropic(EntropicProblem(mu, mu), opt);
  const auto bb = solve_entropic(EntropicProblem(nu, nu), opt);
  W2Diagnostics d;
  d.iterations = ab.iterations + aa.iterations + bb.iterations;
  d.marginal_violation = std::max({ab.marginal_violation, aa.marginal_violation, bb.marginal_violation});
  d.converged = ab.converged && aa.converged && bb.converged;
  d.raw_entropic_cost = ab.cost;
  const double div = ab.cost - 0.5 * (aa.cost + bb.cost);
  return make_result(div, W2Method::sinkhorn, d);
}

}  // namespace laguerre::transport
