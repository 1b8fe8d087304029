#include <cmath>
#include <vector>

#include <boost/math/special_functions/digamma.hpp>
#include <gtest/gtest.h>

#include <ginprod/ensemble.hpp>
#include <ginprod/stats.hpp>
#include <ginprod/theory.hpp>

using namespace ginprod;

TEST(DysonIndex, OnlyThreeValues) {
  EXPECT_EQ(DysonIndex::from_int(1), DysonIndex::real());
  EXPECT_EQ(DysonIndex::from_int(2), DysonIndex::complex());
  EXPECT_EQ(DysonIndex::from_int(4), DysonIndex::quaternion());
  for (int bad : {0, 3, 5, -1}) EXPECT_THROW(DysonIndex::from_int(bad), DomainError);
  EXPECT_EQ(DysonIndex::quaternion().embedding_factor(), 2);
  EXPECT_EQ(DysonIndex::real().embedding_factor(), 1);
}

TEST(DimensionProfile, ShapesAndValidation) {
  const DimensionProfile p(2, {0, 1, 1});
  EXPECT_EQ(p.length(), 3);
  EXPECT_EQ(p.nu(0), 0);
  EXPECT_EQ(p.rows(1), 2);
  EXPECT_EQ(p.cols(1), 2);
  EXPECT_EQ(p.rows(2), 3);
  EXPECT_EQ(p.cols(2), 2);
  EXPECT_EQ(p.rows(3), 3);
  EXPECT_EQ(p.cols(3), 3);
  EXPECT_FALSE(p.closes());
  EXPECT_THROW(DimensionProfile(2, {1, 0}), DimensionError);
  EXPECT_NO_THROW(DimensionProfile::any_order(2, {1, 0}));
  EXPECT_THROW(DimensionProfile(0, {0}), DimensionError);
  EXPECT_THROW(DimensionProfile(2, {}), DimensionError);
  EXPECT_THROW(DimensionProfile(2, {-1}), DimensionError);
  EXPECT_TRUE(DimensionProfile::square(3, 5).is_square());
  const auto m = DimensionProfile(1, {0, 0, 2, 2, 2}).multiplicities();
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m[0], (std::pair<int, int>{0, 2}));
  EXPECT_EQ(m[1], (std::pair<int, int>{2, 3}));
}

TEST(SampleFactor, RealEntryVariance) {
  RandomStream rng(11);
  stats::MomentAccumulator acc;
  for (int k = 0; k < 1'000'000; ++k) {
    const auto f = sample_factor(DysonIndex::real(), 1, 1, rng);
    ASSERT_EQ(f.entries(0, 0).imag(), 0.0);
    acc.add(f.entries(0, 0).real());
  }
  EXPECT_NEAR(acc.summary().variance, 1.0, 0.01);
  EXPECT_NEAR(acc.mean(), 0.0, 0.005);
}

TEST(SampleFactor, ComplexEntrySecondMoment) {
  RandomStream rng(12);
  stats::MomentAccumulator abs2, re;
  int draws = 0;
  while (draws < 1'000'000) {
    const auto f = sample_factor(DysonIndex::complex(), 3, 2, rng);
    ASSERT_EQ(f.rows(), 3);
    ASSERT_EQ(f.cols(), 2);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 2; ++j) {
        abs2.add(std::norm(f.entries(i, j)));
        re.add(f.entries(i, j).real());
        ++draws;
      }
  }
  EXPECT_NEAR(abs2.mean(), 1.0, 0.01);
  EXPECT_NEAR(re.summary().variance, 0.5, 0.005);
}

TEST(SampleFactor, QuaternionBlocksAreSymplecticAndNormalized) {
  RandomStream rng(13);
  stats::MomentAccumulator abs2, comp;
  for (int k = 0; k < 200'000; ++k) {
    const auto f = sample_factor(DysonIndex::quaternion(), 1, 1, rng);
    ASSERT_EQ(f.rows(), 2);
    ASSERT_EQ(symplectic_defect(f.entries), 0.0);
    abs2.add(std::norm(f.entries(0, 0)) + std::norm(f.entries(0, 1)));
    comp.add(f.entries(0, 1).imag());
  }
  EXPECT_NEAR(abs2.mean(), 1.0, 0.01);
  EXPECT_NEAR(comp.summary().variance, 0.25, 0.005);

  const auto big = sample_factor(DysonIndex::quaternion(), 3, 2, rng);
  EXPECT_EQ(big.rows(), 6);
  EXPECT_EQ(big.cols(), 4);
  EXPECT_EQ(symplectic_defect(big.entries), 0.0);
}

TEST(SampleFactor, InvalidDimensions) {
  RandomStream rng(1);
  EXPECT_THROW(sample_factor(DysonIndex::real(), 0, 2, rng), DimensionError);
  EXPECT_THROW(sample_factor(DysonIndex::complex(), 2, -1, rng), DimensionError);
}

TEST(SampleFactor, QuaternionicClosureUnderProducts) {
  RandomStream rng(14);
  for (int k = 0; k < 20; ++k) {
    const auto a = sample_factor(DysonIndex::quaternion(), 2, 2, rng);
    const auto b = sample_factor(DysonIndex::quaternion(), 2, 2, rng);
    EXPECT_LT(symplectic_defect(a.entries * b.entries), 1e-14);
  }
}

TEST(SampleFactor, ScalarLogModulusMatchesExponentMean) {
  // For N = 1 the exponent is E log|x|; this pins the entry normalization.
  for (int beta : {1, 2, 4}) {
    const auto b = DysonIndex::from_int(beta);
    RandomStream rng(100 + static_cast<std::uint64_t>(beta));
    stats::MomentAccumulator acc;
    for (int k = 0; k < 200'000; ++k) {
      const auto f = sample_factor(b, 1, 1, rng);
      acc.add(0.5 * std::log(f.entries.col(0).squaredNorm()));
    }
    const double mu = theory::lyapunov_mean(b, DimensionProfile::square(1, 1), 1);
    const double se = std::sqrt(acc.summary().variance / 200'000.0);
    EXPECT_NEAR(acc.mean(), mu, 4.0 * se) << "beta=" << beta;
  }
}

TEST(FactorChain, Shapes) {
  RandomStream rng(3);
  const auto real = sample_factor_chain(DysonIndex::real(), DimensionProfile::square(3, 200), rng);
  ASSERT_EQ(real.size(), 200u);
  for (const auto& f : real) {
    EXPECT_EQ(f.rows(), 3);
    EXPECT_EQ(f.cols(), 3);
    EXPECT_EQ(f.entries.imag().cwiseAbs().maxCoeff(), 0.0);
  }
  const auto rect = sample_factor_chain(DysonIndex::complex(), DimensionProfile(2, {0, 1, 1}), rng);
  ASSERT_EQ(rect.size(), 3u);
  EXPECT_EQ(rect[0].rows(), 2);
  EXPECT_EQ(rect[0].cols(), 2);
  EXPECT_EQ(rect[1].rows(), 3);
  EXPECT_EQ(rect[1].cols(), 2);
  EXPECT_EQ(rect[2].rows(), 3);
  EXPECT_EQ(rect[2].cols(), 3);
  EXPECT_NO_THROW(check_chain(rect));
  const auto quat = sample_factor_chain(DysonIndex::quaternion(), DimensionProfile::square(3, 200), rng);
  for (const auto& f : quat) {
    EXPECT_EQ(f.rows(), 6);
    EXPECT_EQ(f.cols(), 6);
    EXPECT_EQ(symplectic_defect(f.entries), 0.0);
  }
  std::vector<GinibreFactor> broken{rect[1], rect[1]};
  EXPECT_THROW(check_chain(broken), DimensionError);
}

TEST(FactorChain, Reproducible) {
  auto a = RandomStream::for_realization(99, 7);
  auto b = RandomStream::for_realization(99, 7);
  auto c = RandomStream::for_realization(99, 8);
  const auto prof = DimensionProfile(2, {0, 1, 2});
  const auto fa = sample_factor_chain(DysonIndex::quaternion(), prof, a);
  const auto fb = sample_factor_chain(DysonIndex::quaternion(), prof, b);
  const auto fc = sample_factor_chain(DysonIndex::quaternion(), prof, c);
  for (std::size_t i = 0; i < fa.size(); ++i) {
    EXPECT_TRUE((fa[i].entries.array() == fb[i].entries.array()).all());
    EXPECT_FALSE((fa[i].entries.array() == fc[i].entries.array()).all());
  }
}

TEST(FactorChain, WeakCommutationOfTopExponent) {
  // Top singular exponent of a short rectangular product, for a profile and a
  // permutation of it; the two samples must be indistinguishable.
  auto top_exponents = [](const DimensionProfile& prof, std::uint64_t seed) {
    std::vector<double> out;
    for (std::uint64_t r = 0; r < 10'000; ++r) {
      auto rng = RandomStream::for_realization(seed, r);
      const auto chain = sample_factor_chain(DysonIndex::real(), prof, rng);
      ComplexMatrix y = chain.front().entries;
      for (std::size_t i = 1; i < chain.size(); ++i) y = chain[i].entries * y;
      Eigen::JacobiSVD<ComplexMatrix> svd(y);
      out.push_back(std::log(svd.singularValues()(0)) / static_cast<double>(chain.size()));
    }
    return out;
  };
  const auto a = top_exponents(DimensionProfile(2, {0, 1, 2, 3}), 1);
  const auto b = top_exponents(DimensionProfile::any_order(2, {3, 1, 0, 2}), 2);
  EXPECT_LT(stats::ks_two_sample(a, b), stats::ks_critical_two_sample(a.size(), b.size()));
}
