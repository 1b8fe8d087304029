#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/polygamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>
#include <gtest/gtest.h>

#include <ginprod/density.hpp>
#include <ginprod/meijer.hpp>
#include <ginprod/random.hpp>
#include <ginprod/specfun.hpp>

using namespace ginprod;
using namespace ginprod::specfun;

namespace {

std::vector<double> grid_points() {
  std::vector<double> xs;
  for (double x = 1e-3; x < 1e6; x *= 1.7) xs.push_back(x);
  xs.push_back(0.5);
  xs.push_back(1.0);
  xs.push_back(9.999);
  xs.push_back(10.0);
  return xs;
}

// Trapezoid integral of f over [lo, hi].
template <class F>
double integrate(F&& f, double lo, double hi, int nodes) {
  const double h = (hi - lo) / nodes;
  double s = 0.5 * (f(lo) + f(hi));
  for (int k = 1; k < nodes; ++k) s += f(lo + k * h);
  return s * h;
}

}  // namespace

TEST(GammaFamily, ClosedFormValues) {
  EXPECT_NEAR(digamma(1.0), -0.57721566490153286, 1e-14);
  EXPECT_NEAR(digamma(0.5), -1.96351002602142347, 1e-14);
  EXPECT_NEAR(trigamma(1.0), 1.64493406684822644, 1e-14);
  EXPECT_NEAR(log_gamma(0.5), 0.5 * std::log(std::numbers::pi), 1e-14);
  EXPECT_NEAR(log_gamma(1.0), 0.0, 1e-14);
  EXPECT_NEAR(log_gamma(2.0), 0.0, 1e-14);
}

TEST(GammaFamily, MatchesBoostOnWideRange) {
  for (double x : grid_points()) {
    EXPECT_NEAR(log_gamma(x), std::lgamma(x), 1e-13 * std::max(1.0, std::fabs(std::lgamma(x)))) << x;
    EXPECT_NEAR(digamma(x), boost::math::digamma(x), 1e-13 * std::max(1.0, std::fabs(boost::math::digamma(x)))) << x;
    const double tg = boost::math::trigamma(x);
    EXPECT_NEAR(trigamma(x), tg, 1e-13 * std::max(1.0, tg)) << x;
  }
}

TEST(GammaFamily, PolygammaOrdersUpToFour) {
  for (int m = 0; m <= 4; ++m)
    for (double x : {0.05, 0.5, 1.0, 2.5, 7.0, 19.5, 40.0, 1234.5}) {
      const double ref = boost::math::polygamma(m, x);
      EXPECT_NEAR(polygamma(m, x), ref, 1e-12 * std::max(1.0, std::fabs(ref))) << "m=" << m << " x=" << x;
    }
  EXPECT_THROW(polygamma(5, 1.0), CapabilityError);
  EXPECT_THROW(polygamma(-1, 1.0), CapabilityError);
}

TEST(GammaFamily, TrigammaIsDerivativeOfDigamma) {
  const double h = 1e-4;
  for (double x : {0.3, 1.0, 2.7, 15.0, 300.0}) {
    const double fd = (digamma(x + h) - digamma(x - h)) / (2 * h);
    EXPECT_NEAR(trigamma(x), fd, 1e-6 * std::max(1.0, trigamma(x))) << x;
  }
}

TEST(GammaFamily, RejectsNonPositiveArguments) {
  EXPECT_THROW(log_gamma(0.0), DomainError);
  EXPECT_THROW(digamma(-1.0), DomainError);
  EXPECT_THROW(trigamma(0.0), DomainError);
  EXPECT_THROW(log_gamma(std::complex<double>(-0.5, 1.0)), DomainError);
}

TEST(GammaFamily, ComplexLogGammaAgreesWithRealAxisAndReflection) {
  for (double x : {0.2, 1.0, 3.3, 12.0}) {
    const auto v = log_gamma(std::complex<double>(x, 0.0));
    EXPECT_NEAR(v.real(), std::lgamma(x), 1e-13);
    EXPECT_NEAR(v.imag(), 0.0, 1e-15);
  }
  // |Gamma(1/2 + iy)|^2 = pi / cosh(pi y)
  for (double y : {0.3, 2.0, 9.0, 40.0}) {
    const auto v = log_gamma(std::complex<double>(0.5, y));
    EXPECT_NEAR(2 * v.real(), std::log(std::numbers::pi / std::cosh(std::numbers::pi * y)), 1e-11) << y;
  }
  // Recurrence log Gamma(z+1) = log Gamma(z) + log z (no branch jump for Re z > 0).
  const std::complex<double> z(0.7, 5.0);
  const auto diff = log_gamma(z + 1.0) - log_gamma(z) - std::log(z);
  EXPECT_NEAR(std::abs(diff), 0.0, 1e-12);
}

TEST(Erfc, ReferenceValues) {
  EXPECT_EQ(specfun::erfc(0.0), 1.0);
  EXPECT_LT(specfun::erfc(10.0), 3e-45);
  EXPECT_NEAR(specfun::erfc(1.0), 0.15729920705028513, 1e-12 * 0.1573);
  EXPECT_NEAR(specfun::erfc(-1.0), 2.0 - 0.15729920705028513, 1e-12);
}

TEST(Erfc, MatchesContinuedFractionOracle) {
  // Lentz evaluation of the Laplace continued fraction for x >= 2.
  auto oracle = [](double x) {
    double f = x, c = x, d = 0.0;
    for (int k = 1; k < 400; ++k) {
      const double a = 0.5 * k;
      d = x + a * d;
      c = x + a / c;
      d = 1.0 / d;
      const double delta = c * d;
      f *= delta;
      if (std::fabs(delta - 1.0) < 1e-17) break;
    }
    return std::exp(-x * x) / (std::sqrt(std::numbers::pi) * f);
  };
  for (double x : {2.0, 3.5, 6.0, 12.0}) EXPECT_NEAR(specfun::erfc(x) / oracle(x), 1.0, 1e-12) << x;
}

TEST(Meijer, ClosedFormsOfOrderOneAndTwo) {
  for (double z : {0.01, 0.3, 1.0, 2.5, 10.0, 40.0}) {
    EXPECT_NEAR(meijer_g({{0.0}}, z) / std::exp(-z), 1.0, 1e-8) << z;
    EXPECT_NEAR(meijer_g({{1.0}}, z) / (z * std::exp(-z)), 1.0, 1e-8) << z;
    EXPECT_NEAR(meijer_g({{0.0, 0.0}}, z) / (2.0 * std::cyl_bessel_k(0.0, 2.0 * std::sqrt(z))), 1.0, 1e-8) << z;
  }
  EXPECT_NEAR(meijer_g({{0.0}}, 1.0), 0.36787944117144233, 1e-9);
  EXPECT_NEAR(meijer_g({{0.0, 0.0}}, 1.0), 0.22778774549906688, 1e-9);
}

TEST(Meijer, HalfIntegerOrderTwoMatchesBesselK) {
  // G^{2,0}_{0,2}(-; a, b; z) = 2 z^{(a+b)/2} K_{a-b}(2 sqrt z)
  for (auto [a, b] : {std::pair{0.5, 1.5}, std::pair{1.0, 3.0}, std::pair{2.0, 2.5}})
    for (double z : {0.2, 1.0, 6.0}) {
      const double ref = 2.0 * std::pow(z, 0.5 * (a + b)) * std::cyl_bessel_k(std::fabs(a - b), 2.0 * std::sqrt(z));
      EXPECT_NEAR(meijer_g({{a, b}}, z) / ref, 1.0, 1e-8) << a << " " << b << " " << z;
    }
}

TEST(Meijer, ShiftIdentityOverRandomParameters) {
  RandomStream rng(77);
  for (int trial = 0; trial < 40; ++trial) {
    const int t = 1 + trial % 4;
    MeijerParams p;
    for (int i = 0; i < t; ++i) p.b.push_back(0.5 + 3.0 * rng.uniform());
    const double z = 0.1 + 9.9 * rng.uniform();
    const double c = 3.0 * rng.uniform();
    MeijerParams q = p;
    for (auto& b : q.b) b += c;
    const double lhs = c * std::log(z) + log_meijer_g(p, z);
    EXPECT_NEAR(lhs, log_meijer_g(q, z), 1e-8) << "trial " << trial;
  }
}

TEST(Meijer, MomentIdentity) {
  EXPECT_NEAR(check_moment_identity({{0.0, 0.0}}, 1.0, 2.0).rhs, 1.0, 1e-14);
  const auto one = check_moment_identity({{0.0}}, 1.0, 1.0);
  EXPECT_NEAR(one.lhs, 1.0, 1e-8);
  EXPECT_NEAR(one.rhs, 1.0, 1e-14);
  const auto three = check_moment_identity({{1.0, 2.0, 3.0}}, 1.0, 1.5);
  EXPECT_LT(three.relative_error(), 1e-8);
  const auto two = check_moment_identity({{0.0, 0.0}}, 1.0, 2.0);
  EXPECT_LT(two.relative_error(), 1e-8);

  RandomStream rng(5);
  for (int trial = 0; trial < 12; ++trial) {
    const int t = 1 + trial % 4;
    MeijerParams p;
    for (int i = 0; i < t; ++i) p.b.push_back(0.5 + 2.0 * rng.uniform());
    const double z = 0.2 + 5.0 * rng.uniform();
    const double s = 0.3 + 2.0 * rng.uniform();
    EXPECT_LT(check_moment_identity(p, z, s).relative_error(), 1e-8) << trial;
  }
}

TEST(Meijer, PositiveOnPositiveAxis) {
  for (double z = 1e-3; z < 1e3; z *= 3.0) {
    EXPECT_GT(meijer_g({{0.5, 1.0, 1.5}}, z), 0.0);
    EXPECT_GT(meijer_g({{1.0, 1.0, 1.0, 1.0}}, z), 0.0);
  }
}

TEST(Meijer, TinyArguments) {
  // Contour sits close to the first pole here; G ~ z^{min b} must not cancel away.
  for (double lz : {-30.0, -120.0, -200.0}) {
    const double z = std::exp(lz);
    EXPECT_NEAR(log_meijer_g({{0.0}}, z), -z, 1e-10);
    EXPECT_NEAR(log_meijer_g({{0.0, 0.0}}, z), std::log(2 * std::cyl_bessel_k(0.0, 2 * std::exp(lz / 2))), 1e-9);
    EXPECT_NEAR(log_meijer_g({{0.7}}, z), 0.7 * lz - z, 1e-9);
  }
  EXPECT_LT(check_moment_identity({{0.02, 1.1, 2.8}}, 0.5, 0.2).relative_error(), 1e-8);
}

TEST(Meijer, ErrorsAndLimits) {
  EXPECT_THROW(meijer_g({{0.0}}, 0.0), DomainError);
  EXPECT_THROW(meijer_g({{0.0}}, -1.0), DomainError);
  EXPECT_THROW(meijer_g({std::vector<double>(9, 1.0)}, 1.0), CapabilityError);
  EXPECT_THROW(check_moment_identity({{0.0}}, 1.0, -0.5), DomainError);
}

TEST(LogGammaSumDensity, ClosedFormSingleExponential) {
  const std::vector<double> a{1.0};
  LogGammaSumDensity f(a, 0.5, 0.0);
  EXPECT_NEAR(f(0.0), 2.0 * std::exp(-1.0), 1e-9);
  for (double x : {-2.0, -0.5, 0.4, 1.0}) {
    const double ref = 2.0 * std::exp(2.0 * x) * std::exp(-std::exp(2.0 * x));
    EXPECT_NEAR(f(x), ref, 1e-9) << x;
  }
}

TEST(LogGammaSumDensity, NormalizationAndMoments) {
  const std::vector<std::vector<double>> cases = {{1.0}, {0.5, 2.0, 3.5}, std::vector<double>(100, 1.0), {4.0, 4.0, 7.5}};
  for (const auto& a : cases)
    for (double scale : {0.5, -0.25, 0.01}) {
      LogGammaSumDensity f(a, scale, 0.3);
      const auto [lo, hi] = f.support();
      const int nodes = 20000;
      const double mass = integrate(f, lo, hi, nodes);
      EXPECT_NEAR(mass, 1.0, 1e-6) << a.size() << " " << scale;
      const double m1 = integrate([&](double x) { return x * f(x); }, lo, hi, nodes);
      const double m2 = integrate([&](double x) { return (x - m1) * (x - m1) * f(x); }, lo, hi, nodes);
      double s1 = 0, s2 = 0;
      for (double v : a) {
        s1 += boost::math::digamma(v);
        s2 += boost::math::trigamma(v);
      }
      EXPECT_NEAR(m1, 0.3 + scale * s1, 1e-6 * std::max(1.0, std::fabs(m1)));
      EXPECT_NEAR(m2, scale * scale * s2, 1e-6 * std::max(1e-3, m2));
      EXPECT_NEAR(f.mean(), 0.3 + scale * s1, 1e-12 * std::max(1.0, std::fabs(f.mean())));
      EXPECT_NEAR(f.cumulant(2), scale * scale * s2, 1e-13 * f.cumulant(2));
    }
}

TEST(LogGammaSumDensity, StandardizedDistanceToGaussian) {
  const std::vector<double> a(100, 1.0);
  LogGammaSumDensity f(a, 1.0 / 200.0, 0.0);
  const double mu = boost::math::digamma(1.0) / 2.0;
  const double sd = std::sqrt(boost::math::trigamma(1.0) / 400.0);
  EXPECT_NEAR(f.mean(), mu, 1e-13);
  EXPECT_NEAR(std::sqrt(f.variance()), sd, 1e-13);
  double dist = 0.0;
  for (double x = -6.0; x <= 6.0; x += 0.01) {
    const double phi = std::exp(-0.5 * x * x) / std::sqrt(2 * std::numbers::pi);
    dist = std::max(dist, std::fabs(sd * f(mu + sd * x) - phi));
  }
  EXPECT_LT(dist, 0.02);
  EXPECT_GT(dist, 1e-3);  // the sum is visibly skewed at t=100
}

TEST(LogGammaSumDensity, AgreesWithMonteCarloHistogram) {
  // 200k draws of (1/40) sum_{i<20} log E_i, E_i ~ Exp(1), binned in 0.05-sd bins around the mean.
  const std::vector<double> a(20, 1.0);
  const double scale = 1.0 / 40.0;
  LogGammaSumDensity f(a, scale, 0.0);
  RandomStream rng(2);
  const int draws = 200000;
  const double sd = std::sqrt(f.variance());
  const double lo = f.mean() - 3 * sd, width = 0.25 * sd;
  std::vector<int> counts(24, 0);
  for (int k = 0; k < draws; ++k) {
    double s = 0.0;
    for (int i = 0; i < 20; ++i) s += std::log(-std::log1p(-rng.uniform()));
    const double x = scale * s;
    const int bin = static_cast<int>(std::floor((x - lo) / width));
    if (bin >= 0 && bin < 24) ++counts[static_cast<std::size_t>(bin)];
  }
  for (int b = 0; b < 24; ++b) {
    const double x0 = lo + b * width;
    const double p = integrate(f, x0, x0 + width, 50);
    const double expected = p * draws;
    EXPECT_NEAR(counts[static_cast<std::size_t>(b)], expected, 5.0 * std::sqrt(expected) + 1.0) << b;
  }
}

TEST(LogGammaSumDensity, RejectsBadParameters) {
  const std::vector<double> ok{1.0};
  const std::vector<double> bad{0.0};
  EXPECT_THROW(LogGammaSumDensity(bad, 1.0, 0.0), DomainError);
  EXPECT_THROW(LogGammaSumDensity(ok, 0.0, 0.0), DomainError);
  EXPECT_THROW(LogGammaSumDensity(std::vector<double>{}, 1.0, 0.0), DomainError);
}
