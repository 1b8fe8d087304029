#pragma once

// Brute-force quadratures shared by the unit tests and the acceptance run.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <ginprod/theory.hpp>

namespace ginprod::quadrature {

template <class F>
double trapezoid(F&& f, double lo, double hi, int nodes) {
  const double h = (hi - lo) / nodes;
  double s = 0.5 * (f(lo) + f(hi));
  for (int k = 1; k < nodes; ++k) s += f(lo + k * h);
  return s * h;
}

// Total mass of the exact two-point density, beta = 2.
// The angular average of |z1 - z2|^2 is r1^2 + r2^2, so only radii are
// integrated, on a log-radius grid with the Meijer weights tabulated once.
inline double two_point_mass(const DimensionProfile& profile, double lo = -10.0, double hi = 10.0, int nodes = 800) {
  const auto b = DysonIndex::complex();
  const double log_z = theory::log_normalization(b, profile);
  const double h = (hi - lo) / nodes;
  std::vector<double> r2(static_cast<std::size_t>(nodes + 1)), lw(r2.size());
  for (std::size_t i = 0; i < r2.size(); ++i) {
    const double r = std::exp(lo + static_cast<double>(i) * h);
    r2[i] = r * r;
    lw[i] = theory::log_weight(b, profile, r);
  }
  double total = 0.0;
  for (std::size_t i = 0; i < r2.size(); ++i)
    for (std::size_t j = 0; j < r2.size(); ++j) {
      const double wi = (i == 0 || i + 1 == r2.size()) ? 0.5 : 1.0;
      const double wj = (j == 0 || j + 1 == r2.size()) ? 0.5 : 1.0;
      total += wi * wj * std::exp(lw[i] + lw[j] - log_z) * (r2[i] + r2[j]) * r2[i] * r2[j];
    }
  const double pi = std::numbers::pi;
  return total * 4 * pi * pi * h * h;
}

// Density of (lambda_1, lambda_2) obtained by integrating the exact
// beta = 2 joint density over both phases (midpoint rule, m points each).
inline double phase_marginal(const DimensionProfile& profile, double l1, double l2, int m = 16) {
  const int t = profile.length();
  const double pi = std::numbers::pi;
  const double r1 = std::exp(t * l1), r2 = std::exp(t * l2);
  double s = 0.0;
  for (int a = 0; a < m; ++a)
    for (int c = 0; c < m; ++c) {
      const std::vector<std::complex<double>> z{std::polar(r1, 2 * pi * a / m), std::polar(r2, 2 * pi * c / m)};
      s += theory::joint_density_exact(DysonIndex::complex(), profile, z);
    }
  return s * (2 * pi / m) * (2 * pi / m) * t * t * r1 * r1 * r2 * r2;
}

}  // namespace ginprod::quadrature
