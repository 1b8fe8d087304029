#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <mpfr.h>

#include "bigfloat.hpp"
#include "dyson.hpp"
#include "ensemble.hpp"
#include "errors.hpp"
#include "polynomial.hpp"
#include "random.hpp"
#include "theory.hpp"

namespace ginprod {

/// Full description of a Monte Carlo experiment.
///
/// `precision_bits` empty means the automatic policy of `auto_precision_bits`.
struct ProductSpec {
  DysonIndex beta = DysonIndex::complex();
  DimensionProfile profile = DimensionProfile::square(1, 1);
  int reps = 1;
  std::uint64_t seed = 0;
  std::optional<long> precision_bits;

  int t() const noexcept { return profile.length(); }

  void validate() const {
    if (reps < 0) throw DomainError("replication count must be non-negative");
    if (precision_bits && *precision_bits < 53) throw DomainError("explicit precision must be at least 53 bits");
  }
};

inline std::vector<GinibreFactor> sample_factor_chain(const ProductSpec& spec, RandomStream& rng) {
  spec.validate();
  return sample_factor_chain(spec.beta, spec.profile, rng);
}

/// One realization: eigenvalue exponents and phases, singular exponents.
///
/// `lambda`, `theta` are empty when the profile does not close to a square
/// product. `column_exponents` holds the per-column QR growth rates in frame
/// order (pair-averaged for beta=4) before sorting; column j of the frame
/// carries the exponent whose mean is mu_{N+1-j}.
struct SpectralSample {
  std::vector<double> lambda;
  std::vector<double> theta;
  std::vector<double> gamma;
  std::vector<double> column_exponents;
  double log_scale = 0.0;
  std::optional<int> real_count;
  long precision_bits = 0;
  bool retried = false;
};

namespace detail {

// Indices that sort `keys` descending, ties kept in original order.
inline std::vector<std::size_t> descending_order(const std::vector<double>& keys) {
  std::vector<std::size_t> idx(keys.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return keys[a] > keys[b]; });
  return idx;
}

template <class T>
std::vector<T> permuted(const std::vector<T>& v, const std::vector<std::size_t>& idx) {
  std::vector<T> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(v[i]);
  return out;
}

}  // namespace detail

/// Thin-QR renormalization of a propagated orthonormal frame.
///
/// Each pushed factor maps the frame forward, B = X Q, and B = Q R is
/// refactored with diag(R) made real positive by rephasing the columns of Q.
/// The logs of diag(R) accumulate per column; the raw product is never formed.
class FrameTracker {
 public:
  FrameTracker(DysonIndex beta, int n) : beta_(beta), n_(n) {
    const int k = n * beta.embedding_factor();
    q_ = ComplexMatrix::Identity(k, k);
    log_r_.assign(static_cast<std::size_t>(k), 0.0);
  }

  void push(const GinibreFactor& x) {
    if (x.cols() != q_.rows()) throw DimensionError("factor does not chain with the tracked frame");
    const Eigen::Index k = q_.cols();
    const ComplexMatrix b = x.entries * q_;
    Eigen::HouseholderQR<ComplexMatrix> qr(b);
    const ComplexMatrix& packed = qr.matrixQR();
    q_ = qr.householderQ() * ComplexMatrix::Identity(b.rows(), k);
    for (Eigen::Index j = 0; j < k; ++j) {
      const Complex r = packed(j, j);
      const double mag = std::abs(r);
      if (!(mag > 0.0)) throw DegenerateSampleError("rank collapse in QR renormalization");
      q_.col(j) *= r / mag;
      log_r_[static_cast<std::size_t>(j)] += std::log(mag);
    }
    ++steps_;
  }

  int steps() const noexcept { return steps_; }

  /// Accumulated log|R_jj| per frame column, pair-averaged for beta=4 (length N).
  std::vector<double> column_log_growth() const {
    std::vector<double> out(static_cast<std::size_t>(n_));
    for (int j = 0; j < n_; ++j) {
      if (beta_.is_quaternion())
        out[static_cast<std::size_t>(j)] =
            0.5 * (log_r_[static_cast<std::size_t>(2 * j)] + log_r_[static_cast<std::size_t>(2 * j + 1)]);
      else
        out[static_cast<std::size_t>(j)] = log_r_[static_cast<std::size_t>(j)];
    }
    return out;
  }

  /// Column growth divided by the step count, in frame order.
  std::vector<double> column_exponents() const {
    if (steps_ == 0) throw DimensionError("no factors pushed");
    auto g = column_log_growth();
    for (auto& v : g) v /= steps_;
    return g;
  }

  /// gamma_1 >= ... >= gamma_N.
  std::vector<double> exponents() const {
    auto g = column_exponents();
    std::sort(g.begin(), g.end(), std::greater<>());
    return g;
  }

 private:
  DysonIndex beta_;
  int n_;
  ComplexMatrix q_;
  std::vector<double> log_r_;
  int steps_ = 0;
};

/// Singular exponents gamma_n = log sigma_n / t, sorted descending.
inline std::vector<double> singular_exponents(const std::vector<GinibreFactor>& factors) {
  check_chain(factors);
  const DysonIndex beta = factors.front().beta;
  FrameTracker tracker(beta, static_cast<int>(factors.front().cols() / beta.embedding_factor()));
  for (const auto& f : factors) tracker.push(f);
  return tracker.exponents();
}

/// Running product Y = e^s Yhat in MPFR arithmetic.
///
/// After every multiplication the partial product is divided by its entry of
/// largest modulus, whose log accumulates in s, so Yhat has max-abs entry 1.
/// Factors are exact doubles, which lets the update use mpfr_mul_d.
class ScaledProduct {
 public:
  ScaledProduct(mpfr_prec_t bits, bool real_only, bool quaternion = false)
      : bits_(bits), real_only_(real_only), quaternion_(quaternion), y_(1, 1, bits, real_only),
        out_(1, 1, bits, real_only), tmp_(bits) {}

  void push(const GinibreFactor& x) {
    if (real_only_ && !x.beta.is_real()) throw DomainError("real product cannot absorb a complex factor");
    const int rows = static_cast<int>(x.rows());
    const int cols = static_cast<int>(x.cols());
    if (!started_) {
      BigMatrix first(rows, cols, bits_, real_only_);
      for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
          mpfr_set_d(first.re(i, j).get(), x.entries(i, j).real(), MPFR_RNDN);
          if (!real_only_) mpfr_set_d(first.im(i, j).get(), x.entries(i, j).imag(), MPFR_RNDN);
        }
      y_ = std::move(first);
      started_ = true;
    } else {
      if (cols != y_.rows()) throw DimensionError("factor does not chain with the running product");
      if (out_.rows() != rows || out_.cols() != y_.cols()) out_ = BigMatrix(rows, y_.cols(), bits_, real_only_);
      multiply(x, out_);
      std::swap(y_, out_);
    }
    rescale();
    ++steps_;
  }

  const BigMatrix& matrix() const noexcept { return y_; }
  double log_scale() const noexcept { return log_scale_; }
  int steps() const noexcept { return steps_; }
  mpfr_prec_t precision() const noexcept { return bits_; }

 private:
  void multiply(const GinibreFactor& x, BigMatrix& out) {
    const int rows = out.rows();
    const int cols = out.cols();
    const int inner = y_.rows();
    mpfr_ptr t = tmp_.get();
    // Quaternionic blocks [[p, q], [-conj q, conj p]] are fixed by their first column.
    const int jstep = quaternion_ ? 2 : 1;
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; j += jstep) {
        mpfr_ptr re = out.re(i, j).get();
        mpfr_set_zero(re, 1);
        if (!real_only_) mpfr_set_zero(out.im(i, j).get(), 1);
        for (int k = 0; k < inner; ++k) {
          const double xr = x.entries(i, k).real();
          const double xi = x.entries(i, k).imag();
          if (xr != 0.0) {
            mpfr_mul_d(t, y_.re(k, j).get(), xr, MPFR_RNDN);
            mpfr_add(re, re, t, MPFR_RNDN);
          }
          if (real_only_) continue;
          mpfr_ptr im = out.im(i, j).get();
          if (xr != 0.0) {
            mpfr_mul_d(t, y_.im(k, j).get(), xr, MPFR_RNDN);
            mpfr_add(im, im, t, MPFR_RNDN);
          }
          if (xi != 0.0) {
            mpfr_mul_d(t, y_.im(k, j).get(), xi, MPFR_RNDN);
            mpfr_sub(re, re, t, MPFR_RNDN);
            mpfr_mul_d(t, y_.re(k, j).get(), xi, MPFR_RNDN);
            mpfr_add(im, im, t, MPFR_RNDN);
          }
        }
      }
    if (!quaternion_) return;
    for (int i = 0; i < rows; i += 2)
      for (int j = 0; j < cols; j += 2) {
        mpfr_neg(out.re(i, j + 1).get(), out.re(i + 1, j).get(), MPFR_RNDN);
        mpfr_set(out.im(i, j + 1).get(), out.im(i + 1, j).get(), MPFR_RNDN);
        mpfr_set(out.re(i + 1, j + 1).get(), out.re(i, j).get(), MPFR_RNDN);
        mpfr_neg(out.im(i + 1, j + 1).get(), out.im(i, j).get(), MPFR_RNDN);
      }
  }

  void rescale() {
    int bi = -1, bj = -1;
    double best = -INFINITY;
    for (int i = 0; i < y_.rows(); ++i)
      for (int j = 0; j < y_.cols(); ++j) {
        const double lr = y_.re(i, j).log_abs();
        const double li = real_only_ ? -INFINITY : y_.im(i, j).log_abs();
        const double hi = std::max(lr, li);
        if (!std::isfinite(hi)) continue;
        const double mag = hi + 0.5 * std::log1p(std::exp(2.0 * (std::min(lr, li) - hi)));
        if (mag > best) {
          best = mag;
          bi = i;
          bj = j;
        }
      }
    if (bi < 0) throw DegenerateSampleError("running product is exactly zero");
    BigFloat m(bits_);
    if (real_only_) mpfr_abs(m.get(), y_.re(bi, bj).get(), MPFR_RNDN);
    else mpfr_hypot(m.get(), y_.re(bi, bj).get(), y_.im(bi, bj).get(), MPFR_RNDN);
    log_scale_ += m.log_abs();
    BigFloat inv(bits_);
    mpfr_ui_div(inv.get(), 1, m.get(), MPFR_RNDN);
    for (int i = 0; i < y_.rows(); ++i)
      for (int j = 0; j < y_.cols(); ++j) {
        mpfr_mul(y_.re(i, j).get(), y_.re(i, j).get(), inv.get(), MPFR_RNDN);
        if (!real_only_) mpfr_mul(y_.im(i, j).get(), y_.im(i, j).get(), inv.get(), MPFR_RNDN);
      }
    // The pivot itself is set exactly so max-abs is 1 without rounding drift.
    if (real_only_) mpfr_set_si(y_.re(bi, bj).get(), mpfr_sgn(y_.re(bi, bj).get()) > 0 ? 1 : -1, MPFR_RNDN);
  }

  mpfr_prec_t bits_;
  bool real_only_;
  bool quaternion_;
  BigMatrix y_;
  BigMatrix out_;
  BigFloat tmp_;
  double log_scale_ = 0.0;
  int steps_ = 0;
  bool started_ = false;
};

/// Yhat and s with X_t ... X_1 = e^s Yhat.
inline ScaledProduct scaled_product(const std::vector<GinibreFactor>& factors, mpfr_prec_t bits) {
  check_chain(factors);
  ScaledProduct p(bits, factors.front().beta.is_real(), factors.front().beta.is_quaternion());
  for (const auto& f : factors) p.push(f);
  return p;
}

/// Working precision for the eigenvalue route.
///
/// The characteristic polynomial of Yhat has constant term det(Yhat), whose
/// modulus is about exp(-t sum_roots (mu_max - mu_root)); the Faddeev-LeVerrier
/// rounding floor must sit below it. Bits cover that gap plus four standard
/// deviations of t*lambda per root and 96 guard bits. For beta=4 every exponent
/// appears twice among the 2N roots.
inline long auto_precision_bits(DysonIndex beta, const DimensionProfile& profile) {
  const int n = profile.n();
  const int t = profile.length();
  const int mult = beta.embedding_factor();
  const double mu_max = theory::lyapunov_mean(beta, profile, n);
  double nats = 0.0;
  for (int k = 1; k <= n; ++k) {
    const double gap = mu_max - theory::lyapunov_mean(beta, profile, k);
    const double sd = std::sqrt(theory::lyapunov_variance(beta, profile, k, t));
    nats += mult * t * (gap + 4.0 * sd);
  }
  return std::max<long>(53, static_cast<long>(std::ceil(nats / std::numbers::ln2)) + 96);
}

/// Eigenvalues of e^s Yhat as log-moduli and phases, all roots of the
/// characteristic polynomial (2N of them for beta=4).
struct ProductSpectrum {
  std::vector<double> log_modulus;  // log|z| = log|zhat| + s
  std::vector<double> phase;        // arg z in (-pi, pi]
  double log_scale = 0.0;
  double error_log2 = 0.0;          // a-posteriori relative root error bound
};

/// Roots of det(z - Yhat) with an a-posteriori accuracy check.
///
/// Throws PrecisionError when the rounding floor of the characteristic
/// polynomial could move any root by more than 2^-45 relative.
inline ProductSpectrum product_eigenvalues(const ScaledProduct& product) {
  const BigMatrix& y = product.matrix();
  if (y.rows() != y.cols()) throw DimensionError("eigenvalues need a square product (profile must end with nu = 0)");
  const BigPolynomial poly = faddeev_leverrier(y);
  const std::vector<BigComplex> roots = aberth_roots(poly);
  ProductSpectrum out;
  out.log_scale = product.log_scale();
  out.error_log2 = root_relative_error_log2(poly, roots);
  if (out.error_log2 > -45.0)
    throw PrecisionError("eigenvalue roots not resolved", static_cast<long>(product.precision()));
  for (const auto& r : roots) {
    out.log_modulus.push_back(r.log_abs() + product.log_scale());
    out.phase.push_back(r.arg());
  }
  return out;
}

inline ProductSpectrum product_eigenvalues(const std::vector<GinibreFactor>& factors, long precision_bits) {
  return product_eigenvalues(scaled_product(factors, static_cast<mpfr_prec_t>(precision_bits)));
}

/// Eigenvalue exponents and canonical phases.
struct EigenExponents {
  std::vector<double> lambda;  // descending
  std::vector<double> theta;
  double log_scale = 0.0;
};

/// Converts a spectrum of a t-fold product to exponents lambda = log|z| / t.
///
/// beta=2 phases are mapped to [0, 2 pi); beta=1 phases stay in (-pi, pi] for
/// `classify_real`; beta=4 keeps the N roots of largest imaginary part, with
/// phases in [0, pi].
inline EigenExponents to_exponents(DysonIndex beta, const ProductSpectrum& spectrum, int t) {
  std::vector<std::size_t> keep(spectrum.phase.size());
  std::iota(keep.begin(), keep.end(), std::size_t{0});
  if (beta.is_quaternion()) {
    std::vector<double> im(keep.size());
    for (std::size_t k = 0; k < keep.size(); ++k) im[k] = std::sin(spectrum.phase[k]);
    keep = detail::descending_order(im);
    keep.resize(keep.size() / 2);
  }
  std::vector<double> lambda, theta;
  for (auto k : keep) {
    lambda.push_back(spectrum.log_modulus[k] / t);
    double th = spectrum.phase[k];
    if (beta.is_complex() && th < 0.0) th += 2.0 * std::numbers::pi;
    if (beta.is_complex() && th >= 2.0 * std::numbers::pi) th = 0.0;
    if (beta.is_quaternion()) th = std::clamp(th, 0.0, std::numbers::pi);
    theta.push_back(th);
  }
  const auto order = detail::descending_order(lambda);
  return {detail::permuted(lambda, order), detail::permuted(theta, order), spectrum.log_scale};
}

/// Eigenvalue exponents of X_t ... X_1 at the given working precision.
inline EigenExponents eigen_exponents(const std::vector<GinibreFactor>& factors, long precision_bits) {
  const auto spectrum = product_eigenvalues(factors, precision_bits);
  return to_exponents(factors.front().beta, spectrum, static_cast<int>(factors.size()));
}

/// Counts eigenvalues with |Im z| / |z| = |sin theta| below `tol` and snaps
/// their phases to 0 or pi.
inline int classify_real(std::span<const double> lambda, std::span<double> theta, double tol = 1e-6) {
  if (lambda.size() != theta.size()) throw DimensionError("lambda and theta lengths differ");
  int count = 0;
  for (auto& th : theta) {
    if (std::fabs(std::sin(th)) < tol) {
      th = std::cos(th) > 0.0 ? 0.0 : std::numbers::pi;
      ++count;
    }
  }
  return count;
}

namespace detail {

inline EigenExponents eigen_with_retry(const std::vector<GinibreFactor>& factors, long bits, long& used,
                                       bool& retried) {
  try {
    used = bits;
    return eigen_exponents(factors, bits);
  } catch (const PrecisionError&) {
    retried = true;
    used = 2 * bits;
    return eigen_exponents(factors, 2 * bits);
  }
}

}  // namespace detail

/// Simulates realization `index` of an experiment.
///
/// The factor chain is drawn from the realization's own random stream. A
/// precision failure is retried once with doubled bits; a second failure
/// propagates.
inline SpectralSample simulate_realization(const ProductSpec& spec, std::uint64_t index) {
  spec.validate();
  RandomStream rng = RandomStream::for_realization(spec.seed, index);
  const auto factors = sample_factor_chain(spec.beta, spec.profile, rng);
  SpectralSample s;
  FrameTracker tracker(spec.beta, spec.profile.n());
  for (const auto& f : factors) tracker.push(f);
  s.gamma = tracker.exponents();
  s.column_exponents = tracker.column_exponents();
  if (!spec.profile.closes()) return s;

  const long bits = spec.precision_bits.value_or(auto_precision_bits(spec.beta, spec.profile));
  auto eig = detail::eigen_with_retry(factors, bits, s.precision_bits, s.retried);
  s.lambda = std::move(eig.lambda);
  s.theta = std::move(eig.theta);
  s.log_scale = eig.log_scale;
  if (spec.beta.is_real()) s.real_count = classify_real(s.lambda, s.theta);
  return s;
}

/// Exponents after every step t' = 1..t of one realization.
struct ConvergenceTrace {
  std::vector<std::vector<double>> lambda;  // [t'-1][n], empty when the prefix is not square
  std::vector<std::vector<double>> gamma;   // [t'-1][n]
  long precision_bits = 0;
  bool retried = false;
};

namespace detail {

inline ConvergenceTrace trace_at(const ProductSpec& spec, const std::vector<GinibreFactor>& factors, long bits) {
  ConvergenceTrace trace;
  trace.precision_bits = bits;
  FrameTracker tracker(spec.beta, spec.profile.n());
  ScaledProduct product(static_cast<mpfr_prec_t>(bits), spec.beta.is_real(), spec.beta.is_quaternion());
  for (std::size_t i = 0; i < factors.size(); ++i) {
    tracker.push(factors[i]);
    product.push(factors[i]);
    trace.gamma.push_back(tracker.exponents());
    const int step = static_cast<int>(i) + 1;
    if (spec.profile.nu(step) == 0)
      trace.lambda.push_back(to_exponents(spec.beta, product_eigenvalues(product), step).lambda);
    else
      trace.lambda.emplace_back();
  }
  return trace;
}

}  // namespace detail

/// Single-realization trace of lambda and gamma at every step.
///
/// Uses the precision required by the full length t at every step; a
/// precision failure anywhere reruns the whole trace once with doubled bits.
inline ConvergenceTrace trace_realization(const ProductSpec& spec, std::uint64_t index) {
  spec.validate();
  RandomStream rng = RandomStream::for_realization(spec.seed, index);
  const auto factors = sample_factor_chain(spec.beta, spec.profile, rng);
  const long bits = spec.precision_bits.value_or(auto_precision_bits(spec.beta, spec.profile));
  try {
    return detail::trace_at(spec, factors, bits);
  } catch (const PrecisionError&) {
    auto trace = detail::trace_at(spec, factors, 2 * bits);
    trace.retried = true;
    return trace;
  }
}

}  // namespace ginprod
