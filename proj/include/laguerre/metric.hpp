#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace laguerre {

/// u_i = 2 sqrt(x_i): coordinates in which the intrinsic metric is Euclidean.
/// Zero is accepted so distances to the boundary can be formed.
inline std::vector<double> flat_transform(std::span<const double> x) {
  std::vector<double> u(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] >= 0.0)) throw std::domain_error("flat_transform: coordinates must be >= 0");
    u[i] = 2.0 * std::sqrt(x[i]);
  }
  return u;
}

/// One-dimensional intrinsic distance 2 |sqrt(x) - sqrt(y)|.
inline double rho(double x, double y) { return 2.0 * std::abs(std::sqrt(x) - std::sqrt(y)); }

/// Squared product metric sum_i rho(x_i, y_i)^2.
inline double rho_N_squared(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("rho_N: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = 2.0 * (std::sqrt(x[i]) - std::sqrt(y[i]));
    s += d * d;
  }
  return s;
}

inline double rho_N(std::span<const double> x, std::span<const double> y) { return std::sqrt(rho_N_squared(x, y)); }

}  // namespace laguerre
