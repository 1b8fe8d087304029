#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "bigfloat.hpp"
#include "errors.hpp"

namespace ginprod {

/// Monic polynomial with BigComplex coefficients; coeffs[k] multiplies z^k.
struct BigPolynomial {
  std::vector<BigComplex> coeffs;
  bool real_coefficients = false;

  int degree() const noexcept { return static_cast<int>(coeffs.size()) - 1; }
  mpfr_prec_t precision() const noexcept { return coeffs.front().precision(); }
};

namespace detail {

// out = a * b for square matrices of equal size and precision.
inline void big_matmul(const BigMatrix& a, const BigMatrix& b, BigMatrix& out, BigFloat& tmp) {
  const int n = a.rows();
  const bool real = a.real_only() && b.real_only();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      mpfr_ptr re = out.re(i, j).get();
      mpfr_set_zero(re, 1);
      if (!out.real_only()) mpfr_set_zero(out.im(i, j).get(), 1);
      for (int k = 0; k < n; ++k) {
        mpfr_mul(tmp.get(), a.re(i, k).get(), b.re(k, j).get(), MPFR_RNDN);
        mpfr_add(re, re, tmp.get(), MPFR_RNDN);
        if (real) continue;
        mpfr_ptr im = out.im(i, j).get();
        if (!a.real_only() && !b.real_only()) {
          mpfr_mul(tmp.get(), a.im(i, k).get(), b.im(k, j).get(), MPFR_RNDN);
          mpfr_sub(re, re, tmp.get(), MPFR_RNDN);
        }
        if (!b.real_only()) {
          mpfr_mul(tmp.get(), a.re(i, k).get(), b.im(k, j).get(), MPFR_RNDN);
          mpfr_add(im, im, tmp.get(), MPFR_RNDN);
        }
        if (!a.real_only()) {
          mpfr_mul(tmp.get(), a.im(i, k).get(), b.re(k, j).get(), MPFR_RNDN);
          mpfr_add(im, im, tmp.get(), MPFR_RNDN);
        }
      }
    }
}

inline BigComplex horner(const BigPolynomial& p, const BigComplex& z) {
  BigComplex acc = p.coeffs.back();
  for (int k = p.degree() - 1; k >= 0; --k) acc = acc * z + p.coeffs[static_cast<std::size_t>(k)];
  return acc;
}

inline BigComplex horner_derivative(const BigPolynomial& p, const BigComplex& z) {
  const int n = p.degree();
  const mpfr_prec_t bits = p.precision();
  BigComplex acc(BigFloat(bits, static_cast<double>(n)), BigFloat(bits));
  for (int k = n - 1; k >= 1; --k) {
    const BigFloat kk(bits, static_cast<double>(k));
    const auto& c = p.coeffs[static_cast<std::size_t>(k)];
    acc = acc * z + BigComplex(c.re * kk, c.im * kk);
  }
  return acc;
}

inline double log_sum_exp(const std::vector<double>& xs) {
  double m = -INFINITY;
  for (double x : xs) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace detail

/// Characteristic polynomial det(zI - A) by the Faddeev-LeVerrier recursion.
///
/// Runs entirely at the precision of `a`. The recursion is exact in exact
/// arithmetic; in floating point each coefficient carries an absolute error of
/// order 2^-bits * (2n)^(n-k+2) for entries of magnitude <= 1, so tiny
/// coefficients need enough bits to stand above that floor (see
/// `root_relative_error_log2`).
inline BigPolynomial faddeev_leverrier(const BigMatrix& a) {
  const int n = a.rows();
  if (a.cols() != n) throw DimensionError("characteristic polynomial needs a square matrix");
  const mpfr_prec_t bits = a.precision();
  const bool real = a.real_only();

  BigPolynomial poly;
  poly.real_coefficients = real;
  poly.coeffs.reserve(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) poly.coeffs.emplace_back(bits);
  mpfr_set_ui(poly.coeffs.back().re.get(), 1, MPFR_RNDN);

  BigMatrix m(n, n, bits, real);
  for (int i = 0; i < n; ++i) mpfr_set_ui(m.re(i, i).get(), 1, MPFR_RNDN);
  BigMatrix am(n, n, bits, real);
  BigFloat tmp(bits);
  BigFloat tr_re(bits), tr_im(bits);

  for (int k = 1; k <= n; ++k) {
    detail::big_matmul(a, m, am, tmp);
    mpfr_set_zero(tr_re.get(), 1);
    mpfr_set_zero(tr_im.get(), 1);
    for (int i = 0; i < n; ++i) {
      mpfr_add(tr_re.get(), tr_re.get(), am.re(i, i).get(), MPFR_RNDN);
      if (!real) mpfr_add(tr_im.get(), tr_im.get(), am.im(i, i).get(), MPFR_RNDN);
    }
    auto& c = poly.coeffs[static_cast<std::size_t>(n - k)];
    mpfr_div_si(c.re.get(), tr_re.get(), -k, MPFR_RNDN);
    mpfr_div_si(c.im.get(), tr_im.get(), -k, MPFR_RNDN);
    if (k == n) break;
    for (int i = 0; i < n; ++i) {
      mpfr_add(am.re(i, i).get(), am.re(i, i).get(), c.re.get(), MPFR_RNDN);
      if (!real) mpfr_add(am.im(i, i).get(), am.im(i, i).get(), c.im.get(), MPFR_RNDN);
    }
    std::swap(m, am);
  }
  return poly;
}

/// All roots of a monic polynomial by Aberth-Ehrlich iteration.
///
/// Initial guesses sit on circles whose radii come from the Newton polygon of
/// log|c_k|, which places each root within a modest factor of its final
/// modulus even when the moduli span hundreds of orders of magnitude.
inline std::vector<BigComplex> aberth_roots(const BigPolynomial& p, int max_iterations = 500) {
  const int n = p.degree();
  if (n < 1) throw DomainError("polynomial must have degree at least 1");
  const mpfr_prec_t bits = p.precision();

  std::vector<double> logc(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) logc[static_cast<std::size_t>(k)] = p.coeffs[static_cast<std::size_t>(k)].log_abs();
  if (!std::isfinite(logc[0])) throw DegenerateSampleError("zero constant coefficient: singular matrix");

  // Upper convex hull of (k, log|c_k|).
  std::vector<int> hull;
  for (int k = 0; k <= n; ++k) {
    if (!std::isfinite(logc[static_cast<std::size_t>(k)])) continue;
    while (hull.size() >= 2) {
      const int i = hull[hull.size() - 2], j = hull.back();
      const double cross = (j - i) * (logc[static_cast<std::size_t>(k)] - logc[static_cast<std::size_t>(i)]) -
                           (k - i) * (logc[static_cast<std::size_t>(j)] - logc[static_cast<std::size_t>(i)]);
      if (cross >= 0) hull.pop_back();
      else break;
    }
    hull.push_back(k);
  }

  std::vector<BigComplex> z;
  z.reserve(static_cast<std::size_t>(n));
  for (std::size_t s = 0; s + 1 < hull.size(); ++s) {
    const int k1 = hull[s], k2 = hull[s + 1];
    const int count = k2 - k1;
    const double log_r = (logc[static_cast<std::size_t>(k1)] - logc[static_cast<std::size_t>(k2)]) / count;
    for (int j = 0; j < count; ++j) {
      const double angle = 2.0 * std::numbers::pi * j / count + 0.4 + 0.7 * static_cast<double>(s);
      BigFloat r = BigFloat::exp_of(bits, log_r);
      z.emplace_back(r * BigFloat(bits, std::cos(angle)), r * BigFloat(bits, std::sin(angle)));
    }
  }

  const double tol_log2 = -std::min(static_cast<double>(bits) - 24.0, 160.0);
  BigFloat one(bits, 1.0);
  int converged_sweeps = 0;
  for (int iter = 0; iter < max_iterations; ++iter) {
    double worst = -INFINITY;
    for (int j = 0; j < n; ++j) {
      auto& zj = z[static_cast<std::size_t>(j)];
      const BigComplex pz = detail::horner(p, zj);
      if (pz.re.is_zero() && pz.im.is_zero()) continue;
      const BigComplex dp = detail::horner_derivative(p, zj);
      const BigComplex w = pz / dp;
      BigComplex sum(bits);
      for (int i = 0; i < n; ++i) {
        if (i == j) continue;
        sum = sum + BigComplex(one, BigFloat(bits)) / (zj - z[static_cast<std::size_t>(i)]);
      }
      const BigComplex step = w / (BigComplex(one, BigFloat(bits)) - w * sum);
      zj = zj - step;
      worst = std::max(worst, (step.log_abs() - zj.log_abs()) / std::log(2.0));
    }
    if (worst < tol_log2) {
      if (++converged_sweeps >= 2) return z;
    } else {
      converged_sweeps = 0;
    }
  }
  throw PrecisionError("Aberth iteration did not converge", static_cast<long>(bits));
}

/// Upper bound (log2) on the relative error of each root caused by the
/// rounding floor of the Faddeev-LeVerrier coefficients. Returns the worst root.
inline double root_relative_error_log2(const BigPolynomial& p, const std::vector<BigComplex>& roots) {
  const int n = p.degree();
  const double bits = static_cast<double>(p.precision());
  const double ln2 = std::log(2.0);
  double worst = -INFINITY;
  for (int j = 0; j < n; ++j) {
    const auto& zj = roots[static_cast<std::size_t>(j)];
    const double log_z = zj.log_abs();
    double log_dp = 0.0;
    for (int i = 0; i < n; ++i)
      if (i != j) log_dp += (zj - roots[static_cast<std::size_t>(i)]).log_abs();
    std::vector<double> terms;
    for (int k = 0; k < n; ++k)
      terms.push_back(-bits * ln2 + (n - k + 2) * std::log(2.0 * n) + k * log_z);
    const double log_err = detail::log_sum_exp(terms) - log_dp - log_z;
    worst = std::max(worst, log_err / ln2);
  }
  return worst;
}

}  // namespace ginprod
