#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "meijer.hpp"
#include "specfun.hpp"

namespace ginprod::specfun {

/// Density of  shift + scale * sum_i log G_i  with independent G_i ~ Gamma(a_i, 1).
///
/// The characteristic function is
///     phi(s) = exp(i s shift) prod_i Gamma(a_i + i s scale) / Gamma(a_i),
/// and the density is recovered by trapezoid Fourier inversion on s >= 0.
/// The step is set from the support window (periodic images must not
/// overlap the bulk) and halved until the density at probe points stabilizes;
/// the node range extends until |phi| < 1e-17. The evaluator is immutable
/// after construction.
class LogGammaSumDensity {
 public:
  LogGammaSumDensity(std::span<const double> a, double scale, double shift)
      : scale_(scale), shift_(shift) {
    if (a.empty()) throw DomainError("log-gamma sum density: need at least one shape parameter");
    if (scale == 0.0 || !std::isfinite(scale)) throw DomainError("log-gamma sum density: scale must be non-zero");
    for (double v : a)
      if (!(v > 0.0)) throw DomainError("log-gamma sum density: shape parameters must be positive");
    groups_ = detail::group_values(a);

    double s1 = 0.0, s2 = 0.0;
    double amin = groups_.front().first;
    for (auto [v, m] : groups_) {
      s1 += m * digamma(v);
      s2 += m * trigamma(v);
    }
    mean_ = shift_ + scale_ * s1;
    variance_ = scale_ * scale_ * s2;

    const double sd = std::sqrt(variance_);
    const double heavy = 45.0 * std::fabs(scale_) / amin + 12.0 * sd;
    const double light = 12.0 * sd + 6.0 * std::fabs(scale_);
    if (scale_ > 0.0) support_ = {mean_ - heavy, mean_ + light};
    else support_ = {mean_ - light, mean_ + heavy};

    double period = 2.0 * (support_.second - support_.first);
    build(2.0 * std::numbers::pi / period);
    const std::vector<double> probes = {mean_, mean_ - sd, mean_ + sd, mean_ - 3 * sd, mean_ + 3 * sd};
    std::vector<double> previous = evaluate_all(probes);
    for (int refinement = 0;; ++refinement) {
      if (refinement > 12) throw AccuracyError("log-gamma sum density: inversion grid did not stabilize");
      period *= 2.0;
      build(2.0 * std::numbers::pi / period);
      std::vector<double> current = evaluate_all(probes);
      double peak = 0.0, diff = 0.0;
      for (std::size_t k = 0; k < probes.size(); ++k) {
        peak = std::max(peak, std::fabs(current[k]));
        diff = std::max(diff, std::fabs(current[k] - previous[k]));
      }
      if (diff <= 1e-8 * peak) break;
      previous = std::move(current);
    }
  }

  double operator()(double lambda) const {
    const double x = lambda - mean_;
    const std::complex<double> step = std::polar(1.0, -h_ * x);
    std::complex<double> rot = 1.0;
    detail::CompensatedSum sum;
    sum.add(0.5);
    for (std::size_t j = 1; j < phi_.size(); ++j) {
      if (j % 32 == 0) rot = std::polar(1.0, -static_cast<double>(j) * h_ * x);
      else rot *= step;
      sum.add((phi_[j] * rot).real());
    }
    return sum.value() * h_ / std::numbers::pi;
  }

  double mean() const noexcept { return mean_; }
  double variance() const noexcept { return variance_; }
  double scale() const noexcept { return scale_; }
  double shift() const noexcept { return shift_; }

  /// n-th cumulant from polygamma values (order 1..5).
  double cumulant(int order) const {
    if (order < 1 || order > 5) throw CapabilityError("cumulant order must be in [1, 5]");
    double s = 0.0;
    for (auto [v, m] : groups_) s += m * polygamma(order - 1, v);
    return std::pow(scale_, order) * s + (order == 1 ? shift_ : 0.0);
  }

  /// Window outside which the density is below ~1e-18 of its peak.
  std::pair<double, double> support() const noexcept { return support_; }
  std::size_t nodes() const noexcept { return phi_.size(); }

 private:
  std::complex<double> log_phi(double s) const {
    std::complex<double> acc(0.0, s * shift_);
    for (auto [v, m] : groups_)
      acc += static_cast<double>(m) * (log_gamma(std::complex<double>(v, s * scale_)) - log_gamma(v));
    return acc;
  }

  void build(double h) {
    h_ = h;
    phi_.clear();
    const double cutoff = std::log(1e-17);
    for (long j = 0;; ++j) {
      if (j > 4'000'000) throw AccuracyError("log-gamma sum density: characteristic function decays too slowly");
      const double s = static_cast<double>(j) * h_;
      const std::complex<double> lp = log_phi(s);
      if (j > 0 && lp.real() < cutoff) break;
      // Centre the phase on the mean so evaluation only rotates by s (lambda - mean).
      phi_.push_back(std::exp(lp - std::complex<double>(0.0, s * mean_)));
    }
  }

  std::vector<double> evaluate_all(const std::vector<double>& xs) const {
    std::vector<double> out;
    out.reserve(xs.size());
    for (double x : xs) out.push_back((*this)(x));
    return out;
  }

  double scale_;
  double shift_;
  std::vector<std::pair<double, int>> groups_;
  double mean_ = 0.0;
  double variance_ = 0.0;
  std::pair<double, double> support_;
  double h_ = 0.0;
  std::vector<std::complex<double>> phi_;
};

}  // namespace ginprod::specfun
