#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "dyson.hpp"
#include "errors.hpp"
#include "random.hpp"

namespace ginprod {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

/// One Ginibre factor, stored as a dense complex matrix.
///
/// Quaternionic factors use the 2x2 complex embedding, so a p x q quaternion
/// matrix is held as a 2p x 2q complex matrix. Every scalar entry (real,
/// complex or quaternion) has E|entry|^2 = 1.
struct GinibreFactor {
  ComplexMatrix entries;
  DysonIndex beta = DysonIndex::complex();

  Eigen::Index rows() const noexcept { return entries.rows(); }
  Eigen::Index cols() const noexcept { return entries.cols(); }
};

/// Block-diagonal Omega with 2x2 blocks [[0,1],[-1,0]].
inline ComplexMatrix symplectic_unit(Eigen::Index dim) {
  if (dim % 2 != 0) throw DimensionError("symplectic unit needs an even dimension");
  ComplexMatrix omega = ComplexMatrix::Zero(dim, dim);
  for (Eigen::Index k = 0; k < dim; k += 2) {
    omega(k, k + 1) = 1.0;
    omega(k + 1, k) = -1.0;
  }
  return omega;
}

/// Max-abs deviation from Omega_r conj(X) Omega_c^T = X.
inline double symplectic_defect(const ComplexMatrix& x) {
  const ComplexMatrix lhs =
      symplectic_unit(x.rows()) * x.conjugate() * symplectic_unit(x.cols()).transpose();
  return (lhs - x).cwiseAbs().maxCoeff();
}

/// Samples a rows x cols Ginibre matrix (in quaternion units for beta = 4).
inline GinibreFactor sample_factor(DysonIndex beta, int rows, int cols, RandomStream& rng) {
  if (rows < 1 || cols < 1) throw DimensionError("factor dimensions must be positive");
  GinibreFactor f;
  f.beta = beta;
  if (beta.is_real()) {
    f.entries.resize(rows, cols);
    for (int j = 0; j < cols; ++j)
      for (int i = 0; i < rows; ++i) f.entries(i, j) = Complex(rng.gaussian(), 0.0);
  } else if (beta.is_complex()) {
    const double sd = std::sqrt(0.5);
    f.entries.resize(rows, cols);
    for (int j = 0; j < cols; ++j)
      for (int i = 0; i < rows; ++i) {
        const double re = sd * rng.gaussian();
        const double im = sd * rng.gaussian();
        f.entries(i, j) = Complex(re, im);
      }
  } else {
    // q = a + b i + c j + d k  ->  [[a + i b, c + i d], [-c + i d, a - i b]]
    f.entries.resize(2 * rows, 2 * cols);
    for (int j = 0; j < cols; ++j)
      for (int i = 0; i < rows; ++i) {
        const double a = 0.5 * rng.gaussian();
        const double b = 0.5 * rng.gaussian();
        const double c = 0.5 * rng.gaussian();
        const double d = 0.5 * rng.gaussian();
        f.entries(2 * i, 2 * j) = Complex(a, b);
        f.entries(2 * i, 2 * j + 1) = Complex(c, d);
        f.entries(2 * i + 1, 2 * j) = Complex(-c, d);
        f.entries(2 * i + 1, 2 * j + 1) = Complex(a, -b);
      }
  }
  return f;
}

/// Materializes X_1, ..., X_t for a profile; factor i is (N+nu_i) x (N+nu_{i-1}).
inline std::vector<GinibreFactor> sample_factor_chain(DysonIndex beta, const DimensionProfile& profile,
                                                      RandomStream& rng) {
  std::vector<GinibreFactor> chain;
  chain.reserve(static_cast<std::size_t>(profile.length()));
  for (int i = 1; i <= profile.length(); ++i)
    chain.push_back(sample_factor(beta, profile.rows(i), profile.cols(i), rng));
  return chain;
}

/// Throws unless consecutive factors can be multiplied as X_t ... X_1.
inline void check_chain(const std::vector<GinibreFactor>& factors) {
  if (factors.empty()) throw DimensionError("empty factor chain");
  for (std::size_t i = 1; i < factors.size(); ++i)
    if (factors[i].cols() != factors[i - 1].rows())
      throw DimensionError("factor " + std::to_string(i + 1) + " does not chain with factor " +
                           std::to_string(i));
}

}  // namespace ginprod
