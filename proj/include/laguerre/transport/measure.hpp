#pragma once

#include <cmath>
#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "laguerre/model.hpp"

namespace laguerre::transport {

/// Weighted point cloud in (0, inf)^N, stored row-major.
class DiscreteMeasure {
 public:
  DiscreteMeasure(std::size_t dim, std::vector<double> points, std::vector<double> weights)
      : dim_(dim), points_(std::move(points)), weights_(std::move(weights)) {
    if (dim_ == 0) throw std::invalid_argument("DiscreteMeasure: dimension must be >= 1");
    if (points_.size() != weights_.size() * dim_) throw std::invalid_argument("DiscreteMeasure: size mismatch");
    if (weights_.empty()) throw std::invalid_argument("DiscreteMeasure: empty support");
    double total = 0.0;
    for (double w : weights_) {
      if (!(w >= 0.0)) throw std::invalid_argument("DiscreteMeasure: weights must be >= 0");
      total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("DiscreteMeasure: weights must sum to 1");
    for (double c : points_)
      if (!(c > 0.0)) throw std::domain_error("DiscreteMeasure: points must be > 0");
  }

  /// Uniform weights 1/m.
  static DiscreteMeasure uniform(std::size_t dim, std::vector<double> points) {
    const std::size_t m = dim ? points.size() / dim : 0;
    return DiscreteMeasure(dim, std::move(points), std::vector<double>(m, m ? 1.0 / static_cast<double>(m) : 0.0));
  }

  /// Empirical measure of a sample.
  static DiscreteMeasure empirical(const SampleSet& s) { return uniform(s.dim(), s.data()); }

  [[nodiscard]] std::size_t dim() const { return dim_; }
  [[nodiscard]] std::size_t size() const { return weights_.size(); }
  [[nodiscard]] std::span<const double> point(std::size_t i) const {
    return std::span<const double>(points_).subspan(i * dim_, dim_);
  }
  [[nodiscard]] const std::vector<double>& points() const { return points_; }
  [[nodiscard]] const std::vector<double>& weights() const { return weights_; }

  /// True when every weight is exactly 1/m as produced by `uniform`.
  [[nodiscard]] bool is_uniform() const {
    const double w = 1.0 / static_cast<double>(size());
    for (double v : weights_)
      if (v != w) return false;
    return true;
  }

 private:
  std::size_t dim_;
  std::vector<double> points_;
  std::vector<double> weights_;
};

struct CouplingEntry {
  std::size_t source;
  std::size_t target;
  double mass;
};

/// Transport plan between two discrete measures.
struct CouplingPlan {
  std::vector<CouplingEntry> entries;
  double total_cost = 0.0;

  /// Largest absolute deviation of the plan's marginals from the given weights.
  [[nodiscard]] double marginal_residual(const std::vector<double>& a, const std::vector<double>& b) const {
    std::vector<double> ra(a.size(), 0.0), rb(b.size(), 0.0);
    for (const auto& e : entries) {
      ra.at(e.source) += e.mass;
      rb.at(e.target) += e.mass;
    }
    double r = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) r = std::max(r, std::abs(ra[i] - a[i]));
    for (std::size_t j = 0; j < b.size(); ++j) r = std::max(r, std::abs(rb[j] - b[j]));
    return r;
  }
};

enum class W2Method { quantile_1d, exact_discrete, sinkhorn, proxy_nd };

inline std::string_view to_string(W2Method m) {
  switch (m) {
    case W2Method::quantile_1d:
      return "quantile-1d";
    case W2Method::exact_discrete:
      return "exact-discrete";
    case W2Method::sinkhorn:
      return "sinkhorn";
    case W2Method::proxy_nd:
      return "proxy-nd";
  }
  return "unknown";
}

/// Solver diagnostics; fields that do not apply to a method stay at their defaults.
struct W2Diagnostics {
  std::size_t iterations = 0;
  double duality_gap = 0.0;
  double marginal_violation = 0.0;
  double raw_entropic_cost = 0.0;
  bool converged = true;
  std::size_t certificate_rounds = 0;
};

struct W2Result {
  double value = 0.0;    // W_2
  double squared = 0.0;  // W_2^2
  W2Method method = W2Method::exact_discrete;
  W2Diagnostics diagnostics;
};

inline W2Result make_result(double squared, W2Method method, W2Diagnostics diag = {}) {
  const double sq = std::max(0.0, squared);
  return W2Result{std::sqrt(sq), sq, method, diag};
}

}  // namespace laguerre::transport
