#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

#include "errors.hpp"

namespace ginprod::specfun {

// Real-argument gamma family. All use the same scheme: shift the argument up
// with the recurrence until it clears a threshold, then sum the asymptotic
// (Stirling / Bernoulli) series.

namespace detail {

// B_{2k}, k = 1..10
inline constexpr std::array<double, 10> kBernoulli = {
    1.0 / 6.0,   -1.0 / 30.0,         1.0 / 42.0, -1.0 / 30.0,        5.0 / 66.0,
    -691.0 / 2730.0, 7.0 / 6.0, -3617.0 / 510.0, 43867.0 / 798.0, -174611.0 / 330.0};

inline constexpr double kHalfLog2Pi = 0.91893853320467274178032973640562;

inline void require_positive(double x, const char* name) {
  if (!(x > 0.0) || !std::isfinite(x))
    throw DomainError(std::string(name) + ": argument must be positive and finite");
}

inline double factorial(int m) {
  double f = 1.0;
  for (int k = 2; k <= m; ++k) f *= k;
  return f;
}

}  // namespace detail

/// log Gamma(x) for x > 0.
inline double log_gamma(double x) {
  detail::require_positive(x, "log_gamma");
  double shift_product = 1.0;
  double shift_log = 0.0;
  while (x < 10.0) {
    shift_product *= x;
    if (shift_product < 1e-280) {
      shift_log += std::log(shift_product);
      shift_product = 1.0;
    }
    x += 1.0;
  }
  shift_log += std::log(shift_product);
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double series = 0.0;
  double pw = inv;
  for (int k = 1; k <= 8; ++k) {
    series += detail::kBernoulli[static_cast<std::size_t>(k - 1)] / (2.0 * k * (2.0 * k - 1.0)) * pw;
    pw *= inv2;
  }
  return (x - 0.5) * std::log(x) - x + detail::kHalfLog2Pi + series - shift_log;
}

/// Digamma psi(x) = Gamma'(x)/Gamma(x) for x > 0.
inline double digamma(double x) {
  detail::require_positive(x, "digamma");
  double acc = 0.0;
  while (x < 10.0) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  const double inv2 = 1.0 / (x * x);
  double series = 0.0;
  double pw = inv2;
  for (int k = 1; k <= 8; ++k) {
    series += detail::kBernoulli[static_cast<std::size_t>(k - 1)] / (2.0 * k) * pw;
    pw *= inv2;
  }
  return acc + std::log(x) - 0.5 / x - series;
}

/// Polygamma psi^(m)(x) for 0 <= m <= 4 and x > 0.
inline double polygamma(int m, double x) {
  if (m == 0) return digamma(x);
  if (m < 0 || m > 4) throw CapabilityError("polygamma order must be in [0, 4]");
  detail::require_positive(x, "polygamma");
  const double sign = (m % 2 == 1) ? 1.0 : -1.0;  // (-1)^(m+1)
  const double m_fact = detail::factorial(m);
  double acc = 0.0;
  while (x < 20.0) {
    acc += sign * m_fact / std::pow(x, m + 1);
    x += 1.0;
  }
  const double inv = 1.0 / x;
  double series = detail::factorial(m - 1) * std::pow(inv, m) + 0.5 * m_fact * std::pow(inv, m + 1);
  double pw = std::pow(inv, m + 2);
  for (int k = 1; k <= 10; ++k) {
    // B_{2k} (2k+m-1)! / (2k)!
    double ratio = 1.0;
    for (int j = 2 * k + 1; j <= 2 * k + m - 1; ++j) ratio *= j;
    series += detail::kBernoulli[static_cast<std::size_t>(k - 1)] * ratio * pw;
    pw *= inv * inv;
  }
  return acc + sign * series;
}

/// Trigamma psi'(x) for x > 0.
inline double trigamma(double x) { return polygamma(1, x); }

/// Complementary error function; relative accuracy of the C library (< 1e-15).
inline double erfc(double x) { return std::erfc(x); }

/// Principal-branch-continuous log Gamma(z) for Re z > 0.
///
/// The result is the analytic continuation of log Gamma from the positive
/// real axis (imaginary part not reduced modulo 2 pi).
inline std::complex<double> log_gamma(std::complex<double> z) {
  if (!(z.real() > 0.0)) throw DomainError("complex log_gamma: real part must be positive");
  std::complex<double> shift_log = 0.0;
  while (z.real() < 10.0) {
    shift_log += std::log(z);
    z += 1.0;
  }
  const std::complex<double> inv = 1.0 / z;
  const std::complex<double> inv2 = inv * inv;
  std::complex<double> series = 0.0;
  std::complex<double> pw = inv;
  for (int k = 1; k <= 8; ++k) {
    series += detail::kBernoulli[static_cast<std::size_t>(k - 1)] / (2.0 * k * (2.0 * k - 1.0)) * pw;
    pw *= inv2;
  }
  return (z - 0.5) * std::log(z) - z + detail::kHalfLog2Pi + series - shift_log;
}

}  // namespace ginprod::specfun
