#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>

#include "lglab/rng.hpp"
#include "lglab/stats.hpp"

using namespace lglab;

TEST(Stats, KolmogorovSurvivalKnownValues) {
  EXPECT_NEAR(stats::kolmogorov_q(1.0), 0.26999967167735456, 1e-12);
  EXPECT_NEAR(stats::kolmogorov_q(1.3580986393225507), 0.05, 1e-9);
  EXPECT_DOUBLE_EQ(stats::kolmogorov_q(0.0), 1.0);
}

TEST(Stats, KsTwoSampleSeparatesShiftedSamples) {
  Rng a(1), b(2);
  std::vector<double> x(2000), y(2000), z(2000);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = a.normal();
    y[i] = b.normal();
    z[i] = b.normal(0.3, 1.0);
  }
  EXPECT_GT(stats::ks_two_sample(x, y).p_value, 0.05);
  EXPECT_LT(stats::ks_two_sample(x, z).p_value, 1e-6);
  EXPECT_THROW(stats::ks_two_sample({}, y), validation_error);
}

TEST(Stats, KsStatisticOnTinySamples) {
  const auto r = stats::ks_two_sample({1.0, 2.0, 3.0}, {1.5, 2.5, 3.5});
  EXPECT_NEAR(r.statistic, 1.0 / 3.0, 1e-15);
}

TEST(Stats, ChiSquareUniformMatchesBoost) {
  const std::vector<double> counts{12, 8, 10, 15, 5};
  const auto r = stats::chi_square_uniform(counts);
  EXPECT_NEAR(r.statistic, (4.0 + 4.0 + 0.0 + 25.0 + 25.0) / 10.0, 1e-14);
  EXPECT_DOUBLE_EQ(r.dof, 4.0);
  // chi2 survival at 5.8 with 4 dof = e^{-2.9} (1 + 2.9)
  EXPECT_NEAR(r.p_value, std::exp(-2.9) * 3.9, 1e-12);
}

TEST(Stats, JackknifeOfIidSamplesIsTheNaiveError) {
  Rng r(5);
  std::vector<double> x(100000);
  for (double& v : x) v = r.normal(2.0, 3.0);
  EXPECT_NEAR(stats::jackknife_stderr(x), 3.0 / std::sqrt(1e5), 0.1 * 3.0 / std::sqrt(1e5));
  EXPECT_NEAR(stats::mean(x), 2.0, 0.05);
  EXPECT_NEAR(stats::standard_error(x), 3.0 / std::sqrt(1e5), 1e-4);
}

TEST(Stats, FitSlope) {
  EXPECT_NEAR(stats::fit_slope({0, 1, 2, 3}, {1, 3, 5, 7}), 2.0, 1e-15);
  EXPECT_THROW(stats::fit_slope({1}, {1}), validation_error);
}

TEST(Rng, DeterministicAndDistinctStreams) {
  Rng a(42), b(42), c(derive_seed(42, 1));
  for (int i = 0; i < 10; ++i) {
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
  }
  EXPECT_NE(Rng(42).next_u64(), c.next_u64());
  Rng u(3);
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double v = u.uniform();
    ASSERT_GE(v, 0.0);
    ASSERT_LT(v, 1.0);
    s += v;
    s2 += v * v;
  }
  EXPECT_NEAR(s / 1e5, 0.5, 0.005);
  EXPECT_NEAR(s2 / 1e5 - 0.25, 1.0 / 12.0, 0.002);
}
