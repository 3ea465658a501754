#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "laguerre/metric.hpp"
#include "laguerre/transport/measure.hpp"

namespace laguerre::transport {

/// Dense row-major matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}
  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

/// Flat coordinates u = 2 sqrt(x) of every point, row-major.
inline std::vector<double> flat_points(const DiscreteMeasure& m) { return flat_transform(m.points()); }

/// Squared Euclidean distance between rows i of `u` and j of `v` (dimension d).
inline double sq_dist(const double* u, const double* v, std::size_t d) {
  double s = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    const double diff = u[k] - v[k];
    s += diff * diff;
  }
  return s;
}

/// C_ij = rho_N(x_i, y_j)^2.
inline Matrix cost_matrix(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (mu.dim() != nu.dim()) throw std::invalid_argument("cost_matrix: dimension mismatch");
  const std::size_t d = mu.dim();
  const auto u = flat_points(mu);
  const auto v = flat_points(nu);
  Matrix c(mu.size(), nu.size());
  for (std::size_t i = 0; i < mu.size(); ++i)
    for (std::size_t j = 0; j < nu.size(); ++j) c(i, j) = sq_dist(&u[i * d], &v[j * d], d);
  return c;
}

}  // namespace laguerre::transport
