#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "laguerre/decimal.hpp"

namespace laguerre {

/// Dimension and multi-index of the Laguerre model on (0, inf)^N.
class ModelParams {
 public:
  explicit ModelParams(std::vector<Decimal> alpha) : exact_(std::move(alpha)) {
    if (exact_.empty()) throw std::invalid_argument("ModelParams: dimension must be >= 1");
    alpha_.reserve(exact_.size());
    for (const auto& a : exact_) alpha_.push_back(a.to_double());
    validate();
  }

  /// Each entry is interpreted as its shortest round-trip decimal, so
  /// `ModelParams({-0.5})` is exactly -1/2 for classification purposes.
  explicit ModelParams(const std::vector<double>& alpha) : ModelParams(to_decimals(alpha)) {}
  ModelParams(std::initializer_list<double> alpha) : ModelParams(std::vector<double>(alpha)) {}

  /// Parses a comma-separated list of decimals, e.g. "-0.5,-0.5".
  static ModelParams parse(std::string_view list) {
    std::vector<Decimal> out;
    std::size_t start = 0;
    while (start <= list.size()) {
      const std::size_t comma = list.find(',', start);
      const std::size_t end = comma == std::string_view::npos ? list.size() : comma;
      out.push_back(Decimal::parse(list.substr(start, end - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    return ModelParams(std::move(out));
  }

  [[nodiscard]] std::size_t dim() const { return alpha_.size(); }
  [[nodiscard]] const std::vector<double>& alpha() const { return alpha_; }
  [[nodiscard]] double alpha(std::size_t i) const { return alpha_[i]; }
  [[nodiscard]] const std::vector<Decimal>& alpha_exact() const { return exact_; }

  /// Sum of the alpha entries, accumulated in index order.
  [[nodiscard]] double alpha_star() const { return std::accumulate(alpha_.begin(), alpha_.end(), 0.0); }

  /// True iff every alpha_i >= -1/2 (decided exactly).
  [[nodiscard]] bool theorem_regime_ok() const {
    for (const auto& a : exact_) {
      const Decimal one[] = {a};
      if (Decimal::sign_of_sum(one, 1, 2) < 0) return false;
    }
    return true;
  }

  /// Comma list with full round-trip precision.
  [[nodiscard]] std::string to_string() const {
    std::string s;
    for (std::size_t i = 0; i < alpha_.size(); ++i) {
      if (i) s += ',';
      char buf[64];
      auto [p, ec] = std::to_chars(buf, buf + sizeof buf, alpha_[i]);
      s.append(buf, p);
    }
    return s;
  }

  /// One-dimensional marginal model of coordinate i.
  [[nodiscard]] ModelParams marginal(std::size_t i) const { return ModelParams(std::vector<Decimal>{exact_.at(i)}); }

  friend bool operator==(const ModelParams& a, const ModelParams& b) { return a.exact_ == b.exact_; }

 private:
  static std::vector<Decimal> to_decimals(const std::vector<double>& alpha) {
    std::vector<Decimal> out;
    out.reserve(alpha.size());
    for (double a : alpha) {
      if (!std::isfinite(a)) throw std::invalid_argument("ModelParams: alpha must be finite");
      out.push_back(Decimal::from_double(a));
    }
    return out;
  }

  void validate() const {
    for (const auto& a : exact_) {
      const Decimal one[] = {a};
      if (Decimal::sign_of_sum(one, 1, 1) <= 0)
        throw std::invalid_argument("ModelParams: every alpha_i must exceed -1");
    }
  }

  std::vector<Decimal> exact_;
  std::vector<double> alpha_;
};

/// A point of (0, inf)^N.
class Point {
 public:
  Point() = default;
  explicit Point(std::vector<double> coords) : coords_(std::move(coords)) {
    for (double c : coords_)
      if (!(c > 0.0) || !std::isfinite(c)) throw std::domain_error("Point: coordinates must be finite and > 0");
  }
  Point(std::initializer_list<double> coords) : Point(std::vector<double>(coords)) {}

  [[nodiscard]] std::size_t dim() const { return coords_.size(); }
  [[nodiscard]] double operator[](std::size_t i) const { return coords_[i]; }
  [[nodiscard]] std::span<const double> coords() const { return coords_; }
  operator std::span<const double>() const { return coords_; }  // NOLINT(google-explicit-constructor)

 private:
  std::vector<double> coords_;
};

/// Multi-index n in N_0^N with order |n|.
struct MultiIndex {
  std::vector<unsigned> n;

  [[nodiscard]] unsigned order() const { return std::accumulate(n.begin(), n.end(), 0u); }
  [[nodiscard]] std::size_t dim() const { return n.size(); }
};

/// n i.i.d. points stored row-major, with the seed that produced them.
class SampleSet {
 public:
  SampleSet(ModelParams params, std::vector<double> points, std::uint64_t seed)
      : params_(std::move(params)), points_(std::move(points)), seed_(seed) {
    if (points_.size() % params_.dim() != 0) throw std::invalid_argument("SampleSet: ragged point matrix");
    for (double c : points_)
      if (!(c > 0.0)) throw std::domain_error("SampleSet: coordinates must be > 0");
  }

  [[nodiscard]] const ModelParams& params() const { return params_; }
  [[nodiscard]] std::size_t dim() const { return params_.dim(); }
  [[nodiscard]] std::size_t size() const { return points_.size() / params_.dim(); }
  [[nodiscard]] std::uint64_t seed() const { return seed_; }
  [[nodiscard]] std::span<const double> point(std::size_t i) const {
    return std::span<const double>(points_).subspan(i * dim(), dim());
  }
  [[nodiscard]] const std::vector<double>& data() const { return points_; }

 private:
  ModelParams params_;
  std::vector<double> points_;
  std::uint64_t seed_ = 0;
};

}  // namespace laguerre
