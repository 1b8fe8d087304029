#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "density.hpp"
#include "dyson.hpp"
#include "errors.hpp"
#include "meijer.hpp"
#include "permanent.hpp"
#include "specfun.hpp"

namespace ginprod::theory {

namespace detail {

inline void require_index(const DimensionProfile& profile, int n) {
  if (n < 1 || n > profile.n()) throw DomainError("exponent index out of range 1..N");
}

// (1/t) sum_i f(nu_i), grouped by distinct nu so constant profiles are exact multiples.
template <class F>
double time_average(const DimensionProfile& profile, F&& f) {
  double acc = 0.0;
  for (auto [nu, count] : profile.multiplicities()) acc += count * f(nu);
  return acc / profile.length();
}

}  // namespace detail

/// Asymptotic exponent mean mu_n = 1/2 log(2/beta) + 1/2 <psi(beta (nu + n) / 2)>.
inline double lyapunov_mean(DysonIndex beta, const DimensionProfile& profile, int n) {
  detail::require_index(profile, n);
  const double b = beta.as_double();
  return 0.5 * std::log(2.0 / b) +
         0.5 * detail::time_average(profile, [&](int nu) { return specfun::digamma(b * (nu + n) / 2.0); });
}

/// Exponent variance sigma_n^2 = <psi'(beta (nu + n) / 2)> / (4 t).
///
/// The time average runs over `profile`; `t` sets the 1/(4t) prefactor, so a
/// short constant profile can stand in for a long one.
inline double lyapunov_variance(DysonIndex beta, const DimensionProfile& profile, int n, int t) {
  detail::require_index(profile, n);
  if (t < 1) throw DomainError("time must be positive");
  const double b = beta.as_double();
  return detail::time_average(profile, [&](int nu) { return specfun::trigamma(b * (nu + n) / 2.0); }) /
         (4.0 * t);
}

/// Means and variances of all N exponents at t = profile length.
struct TheoryPrediction {
  DysonIndex beta;
  DimensionProfile profile;
  int t;
  std::vector<double> mu;      // increasing in n
  std::vector<double> sigma2;  // proportional to 1/t

  int n() const noexcept { return profile.n(); }
  double sigma(int n) const { return std::sqrt(sigma2.at(static_cast<std::size_t>(n - 1))); }
  double mean(int n) const { return mu.at(static_cast<std::size_t>(n - 1)); }
};

inline TheoryPrediction predict(DysonIndex beta, const DimensionProfile& profile) {
  TheoryPrediction p{beta, profile, profile.length(), {}, {}};
  for (int n = 1; n <= profile.n(); ++n) {
    p.mu.push_back(lyapunov_mean(beta, profile, n));
    p.sigma2.push_back(lyapunov_variance(beta, profile, n, profile.length()));
  }
  return p;
}

/// Shape parameters, scale and shift of the finite-t marginal f_{kl} as a log-gamma sum.
struct MarginalParams {
  std::vector<double> a;
  double scale;
  double shift;
};

/// beta=2: a_i = nu_i + (k+l)/2;  beta=4: a_i = 2 nu_i + (k+l+1)/2, shift -log(2)/2;
/// beta=1: a_i = (nu_i + k)/2, shift +log(2)/2 (l unused). Scale is 1/(2t) throughout.
inline MarginalParams marginal_params(DysonIndex beta, const DimensionProfile& profile, int k, int l) {
  const int t = profile.length();
  const int limit = beta.embedding_factor() * profile.n();
  if (k < 1 || k > limit || (!beta.is_real() && (l < 1 || l > limit)))
    throw DomainError("marginal index out of range");
  MarginalParams p{{}, 1.0 / (2.0 * t), 0.0};
  p.a.reserve(static_cast<std::size_t>(t));
  for (int nu : profile.nus()) {
    if (beta.is_complex()) p.a.push_back(nu + (k + l) / 2.0);
    else if (beta.is_quaternion()) p.a.push_back(2.0 * nu + (k + l + 1) / 2.0);
    else p.a.push_back((nu + k) / 2.0);
  }
  if (beta.is_quaternion()) p.shift = -0.5 * std::log(2.0);
  if (beta.is_real()) p.shift = 0.5 * std::log(2.0);
  return p;
}

/// Exact finite-t density f_{kl}(lambda; t).
inline specfun::LogGammaSumDensity finite_t_marginal(DysonIndex beta, const DimensionProfile& profile, int k,
                                                     int l) {
  const MarginalParams p = marginal_params(beta, profile, k, l);
  return specfun::LogGammaSumDensity(p.a, p.scale, p.shift);
}

/// Marginal indices (k, l) describing the n-th exponent: (n,n), (2n-1,2n) for beta=4, (n,-) for beta=1.
inline std::pair<int, int> exponent_marginal_indices(DysonIndex beta, int n) {
  if (beta.is_quaternion()) return {2 * n - 1, 2 * n};
  return {n, n};
}

/// Exact finite-t density f_n of the n-th exponent.
inline specfun::LogGammaSumDensity exponent_density(DysonIndex beta, const DimensionProfile& profile, int n) {
  const auto [k, l] = exponent_marginal_indices(beta, n);
  return finite_t_marginal(beta, profile, k, l);
}

/// n-th cumulant of f_{kl}: sum_i (2t)^-n psi^(n-1)(a_i), plus the shift for n = 1.
inline double cumulant(DysonIndex beta, const DimensionProfile& profile, int k, int l, int order) {
  if (order < 1 || order > 5) throw CapabilityError("cumulant order must be in [1, 5]");
  const MarginalParams p = marginal_params(beta, profile, k, l);
  double s = 0.0;
  for (auto [a, m] : specfun::detail::group_values(p.a)) s += m * specfun::polygamma(order - 1, a);
  return std::pow(p.scale, order) * s + (order == 1 ? p.shift : 0.0);
}

/// log D_{kl}(t) for beta=2: sum_i log Gamma(nu_i+(k+l)/2) - (log Gamma(nu_i+k) + log Gamma(nu_i+l))/2.
inline double log_decoupling_coefficient(const DimensionProfile& profile, int k, int l) {
  if (k < 1 || l < 1) throw DomainError("decoupling indices must be positive");
  double acc = 0.0;
  for (auto [nu, count] : profile.multiplicities()) {
    const double mid = specfun::log_gamma(nu + (k + l) / 2.0);
    const double avg = 0.5 * (specfun::log_gamma(nu + k) + specfun::log_gamma(nu + l));
    acc += count * (mid - avg);
  }
  return acc;
}

inline double decoupling_coefficient(const DimensionProfile& profile, int k, int l) {
  return std::exp(log_decoupling_coefficient(profile, k, l));
}

/// log D_sigma(t) for beta=4; `sigma` is a permutation of 1..2N in one-line notation.
inline double log_pair_coefficient(const DimensionProfile& profile, std::span<const int> sigma) {
  const int two_n = static_cast<int>(sigma.size());
  if (two_n % 2 != 0 || two_n / 2 != profile.n())
    throw DimensionError("pair coefficient needs a permutation of 2N elements");
  std::vector<int> check(sigma.begin(), sigma.end());
  std::sort(check.begin(), check.end());
  for (int i = 0; i < two_n; ++i)
    if (check[static_cast<std::size_t>(i)] != i + 1) throw DomainError("sigma is not a permutation of 1..2N");
  const int n_half = two_n / 2;
  double acc = 0.0;
  for (auto [nu, count] : profile.multiplicities()) {
    double term = 0.0;
    for (int n = 1; n <= n_half; ++n) {
      const int s1 = sigma[static_cast<std::size_t>(n - 1)];
      const int s2 = sigma[static_cast<std::size_t>(n - 1 + n_half)];
      term += specfun::log_gamma(2.0 * nu + (s1 + s2 + 1) / 2.0) - specfun::log_gamma(2.0 * nu + 2.0 * n);
    }
    acc += count * term;
  }
  return acc;
}

inline double pair_coefficient(const DimensionProfile& profile, std::span<const int> sigma) {
  return std::exp(log_pair_coefficient(profile, sigma));
}

/// log Z_{N,nu}^beta, the constant of the exact joint eigenvalue density.
inline double log_normalization(DysonIndex beta, const DimensionProfile& profile) {
  const int n_dim = profile.n();
  const int t = profile.length();
  double acc = specfun::log_gamma(n_dim + 1.0);
  const double ln2 = std::log(2.0);
  if (beta.is_real()) acc += t * n_dim * (n_dim + 1) / 4.0 * ln2;
  if (!beta.is_real()) acc += n_dim * std::log(std::numbers::pi);
  if (beta.is_quaternion()) acc -= static_cast<double>(t) * n_dim * (n_dim + 1) * ln2;
  for (auto [nu, count] : profile.multiplicities())
    for (int n = 1; n <= n_dim; ++n) {
      double arg = beta.is_real() ? (nu + n) / 2.0 : beta.is_complex() ? nu + n : 2.0 * nu + 2.0 * n;
      acc += count * specfun::log_gamma(arg);
    }
  return acc;
}

/// log w(z) = log G^{t,0}_{0,t}(- ; beta nu_1/2, ..., beta nu_t/2 ; (beta/2)^t |z|^2).
inline double log_weight(DysonIndex beta, const DimensionProfile& profile, std::complex<double> z) {
  const double r2 = std::norm(z);
  if (!(r2 > 0.0)) throw DomainError("weight is evaluated away from the origin");
  specfun::MeijerParams params;
  for (int nu : profile.nus()) params.b.push_back(beta.as_double() * nu / 2.0);
  const double log_arg = profile.length() * std::log(beta.as_double() / 2.0) + std::log(r2);
  return specfun::log_meijer_g(params, std::exp(log_arg));
}

/// Log of the exact joint eigenvalue density P_N^beta(z_1..z_N; t).
///
/// Desk-scale oracle: N <= 4 and t <= 4. Points must be real for beta=1 and in
/// the closed upper half plane for beta=4.
inline double log_joint_density_exact(DysonIndex beta, const DimensionProfile& profile,
                                      std::span<const std::complex<double>> points) {
  if (profile.n() > 4 || profile.length() > 4)
    throw CapabilityError("exact joint density limited to N <= 4, t <= 4");
  if (static_cast<int>(points.size()) != profile.n()) throw DimensionError("need exactly N points");
  for (const auto& z : points) {
    if (beta.is_real() && z.imag() != 0.0) throw DomainError("beta=1 density takes real points");
    if (beta.is_quaternion() && z.imag() < 0.0) throw DomainError("beta=4 density takes upper half-plane points");
  }
  double acc = -log_normalization(beta, profile) + vandermonde_interaction(beta, points);
  if (!std::isfinite(acc)) return acc;
  for (const auto& z : points) acc += log_weight(beta, profile, z);
  return acc;
}

inline double joint_density_exact(DysonIndex beta, const DimensionProfile& profile,
                                  std::span<const std::complex<double>> points) {
  return std::exp(log_joint_density_exact(beta, profile, points));
}

/// Large-t phase factor: 1/2 on {0, pi} for beta=1, 1/(2 pi) for beta=2, 2 sin^2(theta)/pi for beta=4.
inline double phase_weight(DysonIndex beta, double theta) {
  if (beta.is_real()) {
    if (theta != 0.0 && theta != std::numbers::pi) throw DomainError("beta=1 phases must be 0 or pi");
    return 0.5;
  }
  if (beta.is_complex()) {
    if (theta < 0.0 || theta >= 2.0 * std::numbers::pi) throw DomainError("beta=2 phases lie in [0, 2 pi)");
    return 0.5 / std::numbers::pi;
  }
  if (theta < 0.0 || theta > std::numbers::pi) throw DomainError("beta=4 phases lie in [0, pi]");
  const double s = std::sin(theta);
  return 2.0 * s * s / std::numbers::pi;
}

inline double gaussian_pdf(double x, double mean, double variance) {
  const double d = x - mean;
  return std::exp(-0.5 * d * d / variance) / std::sqrt(2.0 * std::numbers::pi * variance);
}

/// Large-t permanental joint density (1/N!) perm[phase(theta_l) f_k(lambda_l)] with Gaussian f_k.
inline double permanental_joint(const TheoryPrediction& prediction, std::span<const double> lambdas,
                                std::span<const double> thetas) {
  const int n = prediction.n();
  if (static_cast<int>(lambdas.size()) != n || static_cast<int>(thetas.size()) != n)
    throw DimensionError("permanental joint needs N exponents and N phases");
  Eigen::MatrixXcd m(n, n);
  for (int l = 0; l < n; ++l) {
    const double w = phase_weight(prediction.beta, thetas[static_cast<std::size_t>(l)]);
    for (int k = 0; k < n; ++k)
      m(k, l) = w * gaussian_pdf(lambdas[static_cast<std::size_t>(l)], prediction.mu[static_cast<std::size_t>(k)],
                                 prediction.sigma2[static_cast<std::size_t>(k)]);
  }
  return permanent_ryser(m).real() / std::exp(specfun::log_gamma(n + 1.0));
}

/// Phase-integrated large-t density (1/N!) perm[f_k(lambda_l)] with Gaussian f_k.
inline double permanental_exponent_density(const TheoryPrediction& prediction, std::span<const double> lambdas) {
  const int n = prediction.n();
  if (static_cast<int>(lambdas.size()) != n) throw DimensionError("need N exponents");
  Eigen::MatrixXcd m(n, n);
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k)
      m(k, l) = gaussian_pdf(lambdas[static_cast<std::size_t>(l)], prediction.mu[static_cast<std::size_t>(k)],
                             prediction.sigma2[static_cast<std::size_t>(k)]);
  return permanent_ryser(m).real() / std::exp(specfun::log_gamma(n + 1.0));
}

/// Phase-integrated finite-t density (1/N!) perm[f_k(lambda_l; t)] with the exact marginals.
/// Holds at every t for beta = 2 and beta = 4.
inline double finite_t_permanental_density(DysonIndex beta, const DimensionProfile& profile,
                                           std::span<const double> lambdas) {
  if (beta.is_real()) throw DomainError("finite-t permanental form holds for beta = 2 and 4 only");
  const int n = profile.n();
  if (static_cast<int>(lambdas.size()) != n) throw DimensionError("need N exponents");
  Eigen::MatrixXcd m(n, n);
  for (int k = 1; k <= n; ++k) {
    const auto f = exponent_density(beta, profile, k);
    for (int l = 0; l < n; ++l) m(k - 1, l) = f(lambdas[static_cast<std::size_t>(l)]);
  }
  return permanent_ryser(m).real() / std::exp(specfun::log_gamma(n + 1.0));
}

/// Probability 1/2 erfc[(mu_k - mu_l) / sqrt(2 sigma_k^2 + 2 sigma_l^2)] that the
/// exponent drawn from f_l exceeds the one drawn from f_k.
inline double ordering_probability(const TheoryPrediction& prediction, int k, int l) {
  if (k == l) throw DomainError("ordering probability needs distinct indices");
  const double num = prediction.mean(k) - prediction.mean(l);
  const double den = std::sqrt(2.0 * prediction.sigma2.at(static_cast<std::size_t>(k - 1)) +
                               2.0 * prediction.sigma2.at(static_cast<std::size_t>(l - 1)));
  return 0.5 * specfun::erfc(num / den);
}

}  // namespace ginprod::theory
