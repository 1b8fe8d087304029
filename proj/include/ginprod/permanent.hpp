#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <numeric>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "dyson.hpp"
#include "errors.hpp"

namespace ginprod {

using SquareMatrixView = Eigen::Ref<const Eigen::MatrixXcd>;

namespace detail {
inline int require_square(const SquareMatrixView& m) {
  if (m.rows() != m.cols() || m.rows() < 1) throw DimensionError("permanent needs a non-empty square matrix");
  return static_cast<int>(m.rows());
}
}  // namespace detail

/// Permanent by Ryser's inclusion-exclusion formula with Gray-code subset order.
///
/// perm(A) = (-1)^n sum_{S} (-1)^{|S|} prod_i sum_{j in S} a_ij; successive
/// subsets differ in one column, so each term costs O(n).
inline std::complex<double> permanent_ryser(const SquareMatrixView& m) {
  const int n = detail::require_square(m);
  if (n > 20) throw CapabilityError("permanent_ryser supports n <= 20");
  std::vector<std::complex<double>> row_sums(static_cast<std::size_t>(n), 0.0);
  std::complex<double> total = 0.0;
  std::uint32_t gray = 0;
  const std::uint32_t count = 1u << n;
  for (std::uint32_t k = 1; k < count; ++k) {
    const int col = std::countr_zero(k);
    const std::uint32_t bit = 1u << col;
    gray ^= bit;
    const double sign_update = (gray & bit) ? 1.0 : -1.0;
    std::complex<double> prod = 1.0;
    for (int i = 0; i < n; ++i) {
      row_sums[static_cast<std::size_t>(i)] += sign_update * m(i, col);
      prod *= row_sums[static_cast<std::size_t>(i)];
    }
    total += (std::popcount(gray) % 2 == 0) ? prod : -prod;
  }
  return (n % 2 == 0) ? total : -total;
}

/// Permanent as the direct sum over all n! permutations (test oracle).
inline std::complex<double> permanent_naive(const SquareMatrixView& m) {
  const int n = detail::require_square(m);
  if (n > 8) throw CapabilityError("permanent_naive supports n <= 8");
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::complex<double> total = 0.0;
  do {
    std::complex<double> prod = 1.0;
    for (int i = 0; i < n; ++i) prod *= m(i, perm[static_cast<std::size_t>(i)]);
    total += prod;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

/// Log of the eigenvalue interaction factor of the joint density.
///
///   beta=1: prod_{k<l} |x_k - x_l|
///   beta=2: prod_{k<l} |z_k - z_l|^2
///   beta=4: prod_{k<l} |z_k - z_l|^2 |z_k - conj z_l|^2  prod_n |z_n - conj z_n|^2
///
/// All factors are non-negative; coincident points give -infinity.
inline double vandermonde_interaction(DysonIndex beta, std::span<const std::complex<double>> points) {
  const std::size_t n = points.size();
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = k + 1; l < n; ++l) {
      const double d = std::abs(points[k] - points[l]);
      if (beta.is_real()) acc += std::log(d);
      else acc += 2.0 * std::log(d);
      if (beta.is_quaternion()) acc += 2.0 * std::log(std::abs(points[k] - std::conj(points[l])));
    }
  if (beta.is_quaternion())
    for (const auto& z : points) acc += 2.0 * std::log(std::abs(z - std::conj(z)));
  return acc;
}

/// prod_{l<k} (x_k - x_l), the closed form of det[x_l^{k-1}].
inline std::complex<double> vandermonde_product(std::span<const std::complex<double>> points) {
  std::complex<double> acc = 1.0;
  for (std::size_t k = 0; k < points.size(); ++k)
    for (std::size_t l = 0; l < k; ++l) acc *= points[k] - points[l];
  return acc;
}

}  // namespace ginprod
