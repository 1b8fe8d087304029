#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include <mpfr.h>

namespace ginprod {

/// Owning RAII handle for an MPFR number with a fixed precision.
///
/// Arithmetic operators round to nearest at the larger operand precision. Hot
/// loops should call the MPFR functions on `get()` with preallocated outputs.
class BigFloat {
 public:
  explicit BigFloat(mpfr_prec_t bits) {
    mpfr_init2(v_, bits);
    mpfr_set_zero(v_, 1);
  }
  BigFloat(mpfr_prec_t bits, double value) {
    mpfr_init2(v_, bits);
    mpfr_set_d(v_, value, MPFR_RNDN);
  }
  BigFloat(const BigFloat& other) {
    mpfr_init2(v_, mpfr_get_prec(other.v_));
    mpfr_set(v_, other.v_, MPFR_RNDN);
  }
  BigFloat(BigFloat&& other) noexcept {
    mpfr_init2(v_, MPFR_PREC_MIN);
    mpfr_swap(v_, other.v_);
  }
  BigFloat& operator=(const BigFloat& other) {
    if (this != &other) {
      mpfr_set_prec(v_, mpfr_get_prec(other.v_));
      mpfr_set(v_, other.v_, MPFR_RNDN);
    }
    return *this;
  }
  BigFloat& operator=(BigFloat&& other) noexcept {
    mpfr_swap(v_, other.v_);
    return *this;
  }
  ~BigFloat() { mpfr_clear(v_); }

  mpfr_ptr get() noexcept { return v_; }
  mpfr_srcptr get() const noexcept { return v_; }
  mpfr_prec_t precision() const noexcept { return mpfr_get_prec(v_); }

  double to_double() const noexcept { return mpfr_get_d(v_, MPFR_RNDN); }
  bool is_zero() const noexcept { return mpfr_zero_p(v_) != 0; }

  /// Natural log of |x| as a double; valid far outside the double exponent range.
  double log_abs() const noexcept {
    if (mpfr_zero_p(v_)) return -INFINITY;
    long exp2 = 0;
    const double mant = mpfr_get_d_2exp(&exp2, v_, MPFR_RNDN);
    return std::log(std::fabs(mant)) + static_cast<double>(exp2) * std::log(2.0);
  }

  /// Natural exponent of x, x given as a double log value.
  static BigFloat exp_of(mpfr_prec_t bits, double log_value) {
    BigFloat r(bits, log_value);
    mpfr_exp(r.v_, r.v_, MPFR_RNDN);
    return r;
  }

  BigFloat operator-() const {
    BigFloat r(*this);
    mpfr_neg(r.v_, r.v_, MPFR_RNDN);
    return r;
  }

#define GINPROD_BIGFLOAT_BINOP(op, fn)                                       \
  friend BigFloat operator op(const BigFloat& a, const BigFloat& b) {       \
    BigFloat r(std::max(a.precision(), b.precision()));                     \
    fn(r.v_, a.v_, b.v_, MPFR_RNDN);                                         \
    return r;                                                               \
  }                                                                         \
  BigFloat& operator op##=(const BigFloat& b) {                             \
    fn(v_, v_, b.v_, MPFR_RNDN);                                             \
    return *this;                                                           \
  }
  GINPROD_BIGFLOAT_BINOP(+, mpfr_add)
  GINPROD_BIGFLOAT_BINOP(-, mpfr_sub)
  GINPROD_BIGFLOAT_BINOP(*, mpfr_mul)
  GINPROD_BIGFLOAT_BINOP(/, mpfr_div)
#undef GINPROD_BIGFLOAT_BINOP

 private:
  mpfr_t v_;
};

/// Complex number with BigFloat parts.
struct BigComplex {
  BigFloat re;
  BigFloat im;

  explicit BigComplex(mpfr_prec_t bits) : re(bits), im(bits) {}
  BigComplex(BigFloat r, BigFloat i) : re(std::move(r)), im(std::move(i)) {}
  BigComplex(mpfr_prec_t bits, std::complex<double> z) : re(bits, z.real()), im(bits, z.imag()) {}

  mpfr_prec_t precision() const noexcept { return re.precision(); }

  friend BigComplex operator+(const BigComplex& a, const BigComplex& b) {
    return {a.re + b.re, a.im + b.im};
  }
  friend BigComplex operator-(const BigComplex& a, const BigComplex& b) {
    return {a.re - b.re, a.im - b.im};
  }
  friend BigComplex operator*(const BigComplex& a, const BigComplex& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend BigComplex operator/(const BigComplex& a, const BigComplex& b) {
    const BigFloat den = b.re * b.re + b.im * b.im;
    return {(a.re * b.re + a.im * b.im) / den, (a.im * b.re - a.re * b.im) / den};
  }

  BigComplex conj() const { return {re, -im}; }

  /// |z| at the working precision.
  BigFloat abs() const {
    BigFloat r(precision());
    mpfr_hypot(r.get(), re.get(), im.get(), MPFR_RNDN);
    return r;
  }

  double log_abs() const { return abs().log_abs(); }

  /// Argument in (-pi, pi].
  double arg() const {
    BigFloat r(64);
    mpfr_atan2(r.get(), im.get(), re.get(), MPFR_RNDN);
    return r.to_double();
  }

  std::complex<double> to_complex() const { return {re.to_double(), im.to_double()}; }
};

/// Dense row-major matrix of BigFloat entries, optionally with an imaginary plane.
class BigMatrix {
 public:
  BigMatrix(int rows, int cols, mpfr_prec_t bits, bool real_only)
      : rows_(rows), cols_(cols), bits_(bits), real_only_(real_only) {
    const auto size = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
    re_.reserve(size);
    for (std::size_t k = 0; k < size; ++k) re_.emplace_back(bits);
    if (!real_only) {
      im_.reserve(size);
      for (std::size_t k = 0; k < size; ++k) im_.emplace_back(bits);
    }
  }

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  mpfr_prec_t precision() const noexcept { return bits_; }
  bool real_only() const noexcept { return real_only_; }

  BigFloat& re(int i, int j) { return re_[index(i, j)]; }
  const BigFloat& re(int i, int j) const { return re_[index(i, j)]; }
  BigFloat& im(int i, int j) { return im_[index(i, j)]; }
  const BigFloat& im(int i, int j) const { return im_[index(i, j)]; }

  BigComplex at(int i, int j) const {
    if (real_only_) return {re(i, j), BigFloat(bits_)};
    return {re(i, j), im(i, j)};
  }

  std::complex<double> to_complex(int i, int j) const {
    return {re(i, j).to_double(), real_only_ ? 0.0 : im(i, j).to_double()};
  }

 private:
  std::size_t index(int i, int j) const noexcept {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(j);
  }

  int rows_;
  int cols_;
  mpfr_prec_t bits_;
  bool real_only_;
  std::vector<BigFloat> re_;
  std::vector<BigFloat> im_;
};

}  // namespace ginprod
