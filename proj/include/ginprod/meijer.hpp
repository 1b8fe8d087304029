#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "specfun.hpp"

namespace ginprod::specfun {

namespace detail {

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) comp_ += (sum_ - t) + x;
    else comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline std::vector<std::pair<double, int>> group_values(std::span<const double> values) {
  std::map<double, int> counts;
  for (double v : values) ++counts[v];
  return {counts.begin(), counts.end()};
}

}  // namespace detail

/// Lower parameter row b_1..b_t of G^{t,0}_{0,t}(- ; b ; z).
struct MeijerParams {
  std::vector<double> b;

  int order() const noexcept { return static_cast<int>(b.size()); }
  double min_b() const { return *std::min_element(b.begin(), b.end()); }
};

/// Natural log of G^{t,0}_{0,t}(- ; b ; z) for z > 0.
///
/// Evaluates the Mellin-Barnes integral (1/2pi) \int z^{c+iy} prod Gamma(b_i - c - iy) dy
/// with the trapezoid rule on a vertical line Re u = c left of every pole. The
/// abscissa is the real saddle point of |z^u prod Gamma(b_i - u)|, which keeps
/// cancellation in the oscillatory sum small; for tiny z the saddle crowds the
/// first pole and is held at distance 0.05 from it. The step is a fixed
/// fraction of the distance to the nearest pole, and the sum stops once the
/// integrand magnitude (monotone in |y|) falls below 1e-18 of its value at y = 0.
inline double log_meijer_g(const MeijerParams& params, double z) {
  const int t = params.order();
  if (t < 1) throw DomainError("meijer_g: need at least one parameter");
  if (t > 8) throw CapabilityError("meijer_g: order above 8 is not supported");
  if (!(z > 0.0) || !std::isfinite(z)) throw DomainError("meijer_g: argument must be positive");

  const auto groups = detail::group_values(params.b);
  const double bmin = params.min_b();
  const double log_z = std::log(z);

  // Saddle: log z = sum psi(b_i - c). The left side of that equation minus the
  // right is increasing in c's distance from bmin, so bisect.
  auto saddle_gap = [&](double c) {
    double s = 0.0;
    for (auto [b, m] : groups) s += m * digamma(b - c);
    return s - log_z;
  };
  constexpr double kMinPoleDistance = 0.05;
  double c = bmin - 0.5;
  if (saddle_gap(c) < 0.0) {
    double lo = c - 1.0;
    while (saddle_gap(lo) < 0.0) lo = bmin - 2.0 * (bmin - lo);
    double hi = c;
    for (int it = 0; it < 200 && hi - lo > 1e-12 * (1.0 + std::fabs(lo)); ++it) {
      const double mid = 0.5 * (lo + hi);
      (saddle_gap(mid) < 0.0 ? hi : lo) = mid;
    }
    c = 0.5 * (lo + hi);
  } else if (saddle_gap(bmin - kMinPoleDistance) > 0.0) {
    c = bmin - kMinPoleDistance;
  } else {
    double lo = c, hi = bmin - kMinPoleDistance;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (saddle_gap(mid) < 0.0 ? hi : lo) = mid;
    }
    c = 0.5 * (lo + hi);
  }

  const double pole_distance = bmin - c;
  const double h = std::min(pole_distance / 8.0, 0.1);

  auto log_integrand = [&](double y) {
    std::complex<double> acc(c * log_z, y * log_z);
    for (auto [b, m] : groups) acc += static_cast<double>(m) * log_gamma(std::complex<double>(b - c, -y));
    return acc;
  };

  const std::complex<double> log_f0 = log_integrand(0.0);
  const double cutoff = std::log(1e-18);
  detail::CompensatedSum sum;
  sum.add(0.5);
  constexpr long kMaxNodes = 4'000'000;
  long j = 1;
  for (;; ++j) {
    if (j > kMaxNodes)
      throw AccuracyError("meijer_g: contour truncation did not converge (t=" + std::to_string(t) +
                          ", z=" + std::to_string(z) + ")");
    const std::complex<double> lf = log_integrand(static_cast<double>(j) * h) - log_f0;
    if (lf.real() < cutoff) break;
    sum.add(std::exp(lf.real()) * std::cos(lf.imag()));
  }
  const double total = sum.value();
  if (!(total > 0.0))
    throw AccuracyError("meijer_g: quadrature lost all significance (t=" + std::to_string(t) +
                        ", z=" + std::to_string(z) + ")");
  return log_f0.real() + std::log(total * h / std::numbers::pi);
}

inline double meijer_g(const MeijerParams& params, double z) { return std::exp(log_meijer_g(params, z)); }

/// Both sides of \int_0^inf r^{s-1} G(z r) dr = z^{-s} prod Gamma(b_i + s).
struct MomentIdentity {
  double lhs;
  double rhs;

  double relative_error() const { return std::fabs(lhs - rhs) / std::fabs(rhs); }
};

/// Quadrature of the Mellin moment against the gamma-product closed form.
///
/// The left side is integrated in v = log r with the trapezoid rule, walking
/// out from the log-mean of the moment-weighted density until the integrand
/// falls below 1e-18 of its running maximum on both sides.
inline MomentIdentity check_moment_identity(const MeijerParams& params, double z, double s) {
  if (!(z > 0.0)) throw DomainError("moment identity: z must be positive");
  for (double b : params.b)
    if (!(b + s > 0.0)) throw DomainError("moment identity: divergent integral, need b_i + s > 0");

  double log_rhs = -s * std::log(z);
  double centre = -std::log(z);
  for (double b : params.b) {
    log_rhs += log_gamma(b + s);
    centre += digamma(b + s);
  }

  const double h = 0.1;
  auto log_term = [&](double v) { return s * v + log_meijer_g(params, z * std::exp(v)); };

  // Work relative to the centre value to keep exponentials in range.
  const double ref = log_term(centre);
  detail::CompensatedSum sum;
  sum.add(1.0);
  const double cutoff = std::log(1e-18);
  for (int dir : {-1, 1}) {
    double running_max = 0.0;
    for (long j = 1;; ++j) {
      if (j > 2'000'000) throw AccuracyError("moment identity: integration range did not close");
      const double lt = log_term(centre + dir * static_cast<double>(j) * h) - ref;
      running_max = std::max(running_max, lt);
      sum.add(std::exp(lt));
      if (lt < running_max + cutoff) break;
    }
  }
  return {std::exp(ref) * sum.value() * h, std::exp(log_rhs)};
}

}  // namespace ginprod::specfun
