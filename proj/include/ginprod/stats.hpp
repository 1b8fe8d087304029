#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "dyson.hpp"
#include "errors.hpp"

namespace ginprod::stats {

struct Summary {
  double mean;
  double variance;  // unbiased
  double skewness;  // adjusted Fisher-Pearson
  std::size_t count;

  double sd() const { return std::sqrt(variance); }
};

/// Streaming mean and central moments up to order 3 (Welford / Terriberry).
///
/// Accumulators merge associatively, so partial results from workers can be
/// combined in any grouping.
class MomentAccumulator {
 public:
  void add(double x) noexcept {
    const double n1 = static_cast<double>(n_);
    ++n_;
    const double n = static_cast<double>(n_);
    const double delta = x - mean_;
    const double delta_n = delta / n;
    const double term1 = delta * delta_n * n1;
    mean_ += delta_n;
    m3_ += term1 * delta_n * (n - 2.0) - 3.0 * delta_n * m2_;
    m2_ += term1;
  }

  void merge(const MomentAccumulator& other) noexcept {
    if (other.n_ == 0) return;
    if (n_ == 0) {
      *this = other;
      return;
    }
    const double na = static_cast<double>(n_);
    const double nb = static_cast<double>(other.n_);
    const double n = na + nb;
    const double delta = other.mean_ - mean_;
    const double m2 = m2_ + other.m2_ + delta * delta * na * nb / n;
    const double m3 = m3_ + other.m3_ + delta * delta * delta * na * nb * (na - nb) / (n * n) +
                      3.0 * delta * (na * other.m2_ - nb * m2_) / n;
    mean_ = (na * mean_ + nb * other.mean_) / n;
    m2_ = m2;
    m3_ = m3;
    n_ += other.n_;
  }

  std::size_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }

  Summary summary() const {
    if (n_ < 2) throw InsufficientDataError("summary needs at least two samples");
    const double n = static_cast<double>(n_);
    const double var = m2_ / (n - 1.0);
    double skew = 0.0;
    if (m2_ > 0.0 && n_ > 2) {
      const double g1 = std::sqrt(n) * m3_ / std::pow(m2_, 1.5);
      skew = g1 * std::sqrt(n * (n - 1.0)) / (n - 2.0);
    }
    return {mean_, var, skew, n_};
  }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double m3_ = 0.0;
};

inline Summary summarize(std::span<const double> samples) {
  MomentAccumulator acc;
  for (double x : samples) acc.add(x);
  return acc.summary();
}

/// Fixed-edge histogram; counts outside [edges.front(), edges.back()] are dropped
/// from `counts` but still tallied in `underflow`/`overflow`.
struct Histogram {
  std::vector<double> edges;
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;
  std::uint64_t underflow = 0;
  std::uint64_t overflow = 0;

  explicit Histogram(std::vector<double> e) : edges(std::move(e)) {
    if (edges.size() < 2 || !std::is_sorted(edges.begin(), edges.end()))
      throw DomainError("histogram edges must be sorted with at least two entries");
    counts.assign(edges.size() - 1, 0);
  }

  static Histogram uniform(double lo, double hi, std::size_t bins) {
    if (!(hi > lo) || bins == 0) throw DomainError("uniform histogram needs hi > lo and bins > 0");
    std::vector<double> e(bins + 1);
    for (std::size_t k = 0; k <= bins; ++k) e[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(bins);
    e.back() = hi;
    return Histogram(std::move(e));
  }

  void add(double x) {
    if (x < edges.front()) {
      ++underflow;
      return;
    }
    if (x > edges.back()) {
      ++overflow;
      return;
    }
    auto it = std::upper_bound(edges.begin(), edges.end(), x);
    std::size_t bin = static_cast<std::size_t>(it - edges.begin());
    bin = bin == 0 ? 0 : bin - 1;
    if (bin >= counts.size()) bin = counts.size() - 1;  // x == last edge
    ++counts[bin];
    ++total;
  }

  void merge(const Histogram& other) {
    if (other.edges != edges) throw DomainError("cannot merge histograms with different edges");
    for (std::size_t k = 0; k < counts.size(); ++k) counts[k] += other.counts[k];
    total += other.total;
    underflow += other.underflow;
    overflow += other.overflow;
  }

  /// Probability density estimate per bin (counts / (total * width)).
  std::vector<double> density() const {
    std::vector<double> d(counts.size(), 0.0);
    if (total == 0) return d;
    for (std::size_t k = 0; k < counts.size(); ++k)
      d[k] = static_cast<double>(counts[k]) / (static_cast<double>(total) * (edges[k + 1] - edges[k]));
    return d;
  }
};

/// Histogram with Freedman-Diaconis bin width 2 IQR n^(-1/3).
inline Histogram freedman_diaconis(std::span<const double> samples) {
  if (samples.size() < 2) throw InsufficientDataError("histogram needs at least two samples");
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  auto quantile = [&](double p) {
    const double pos = p * static_cast<double>(s.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, s.size() - 1);
    return s[lo] + (pos - static_cast<double>(lo)) * (s[hi] - s[lo]);
  };
  const double lo = s.front(), hi = s.back();
  double width = 2.0 * (quantile(0.75) - quantile(0.25)) / std::cbrt(static_cast<double>(s.size()));
  std::size_t bins = 1;
  if (width > 0.0 && hi > lo) bins = static_cast<std::size_t>(std::ceil((hi - lo) / width));
  bins = std::clamp<std::size_t>(bins, 1, 10000);
  Histogram h = hi > lo ? Histogram::uniform(lo, hi, bins) : Histogram::uniform(lo - 0.5, lo + 0.5, 1);
  for (double x : s) h.add(x);
  return h;
}

inline double gaussian_cdf(double x, double mean, double sd) {
  return 0.5 * std::erfc(-(x - mean) / (sd * std::numbers::sqrt2));
}

/// sup_x |F_n(x) - F(x)| for the empirical CDF F_n of `samples`.
inline double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw InsufficientDataError("KS statistic needs samples");
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = cdf(s[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

/// Two-sample statistic sup_x |F_a(x) - F_b(x)|.
inline double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw InsufficientDataError("KS statistic needs samples");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= v) ++i;
    while (j < y.size() && y[j] <= v) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / static_cast<double>(x.size()) -
                              static_cast<double>(j) / static_cast<double>(y.size())));
  }
  return d;
}

enum class Level { percent1, percent5 };

/// Asymptotic one-sample Kolmogorov critical value c(alpha) / sqrt(n).
inline double ks_critical(std::size_t n, Level level = Level::percent1) {
  const double c = level == Level::percent1 ? 1.628 : 1.358;
  return c / std::sqrt(static_cast<double>(n));
}

/// Two-sample critical value c(alpha) sqrt((n + m) / (n m)).
inline double ks_critical_two_sample(std::size_t n, std::size_t m, Level level = Level::percent1) {
  const double c = level == Level::percent1 ? 1.628 : 1.358;
  const double nn = static_cast<double>(n), mm = static_cast<double>(m);
  return c * std::sqrt((nn + mm) / (nn * mm));
}

/// CDF of the density 2 sin^2(theta) / pi on [0, pi].
inline double sine_squared_cdf(double theta) {
  const double th = std::clamp(theta, 0.0, std::numbers::pi);
  return (th - std::sin(th) * std::cos(th)) / std::numbers::pi;
}

struct PhaseTestReport {
  std::string test;     // "ks-uniform", "ks-sine-squared" or "real-fraction"
  double statistic;     // KS distance, or fraction of phases at {0, pi}
  double critical;      // KS critical value, or required fraction
  bool passed;
  std::size_t count;
};

/// Goodness of fit of eigenvalue phases to the large-t phase law.
///
/// beta=2: KS against uniform on [0, 2 pi). beta=4: KS against the
/// 2 sin^2 / pi law on [0, pi]. beta=1: fraction of phases exactly 0 or pi,
/// which passes when at least `real_fraction_required` of them are.
inline PhaseTestReport phase_histogram_test(DysonIndex beta, std::span<const double> thetas,
                                            Level level = Level::percent1,
                                            double real_fraction_required = 0.999) {
  if (thetas.empty()) throw InsufficientDataError("phase test needs samples");
  const std::size_t n = thetas.size();
  if (beta.is_real()) {
    std::size_t real = 0;
    for (double th : thetas)
      if (th == 0.0 || th == std::numbers::pi) ++real;
    const double frac = static_cast<double>(real) / static_cast<double>(n);
    return {"real-fraction", frac, real_fraction_required, frac >= real_fraction_required, n};
  }
  const double crit = ks_critical(n, level);
  if (beta.is_complex()) {
    const double d = ks_statistic(thetas, [](double th) { return std::clamp(th / (2.0 * std::numbers::pi), 0.0, 1.0); });
    return {"ks-uniform", d, crit, d < crit, n};
  }
  const double d = ks_statistic(thetas, sine_squared_cdf);
  return {"ks-sine-squared", d, crit, d < crit, n};
}

}  // namespace ginprod::stats
