#include <gtest/gtest.h>

#include <cmath>

#include "volopt/error.hpp"
#include "volopt/normal.hpp"
#include "volopt/synthetic.hpp"

using namespace volopt;

TEST(OptOracle, KnownValues) {
  EXPECT_NEAR(opt_oracle(StandardGaussian{}, 0.3), 0.7706, 1e-3);
  EXPECT_NEAR(opt_oracle(three_component_mixture(), 0.8), 3.0178, 1e-2);
  EXPECT_EQ(opt_oracle(CensoredGaussian{}, 0.3), 0.0);
}

TEST(OptOracle, CensoredAboveAtoms) {
  // Beyond the two atoms the cheapest extra mass sits next to either atom.
  const double atoms = 2 * normal_cdf(-1.0);
  const double extra = 0.5 - atoms;
  // Continuous part has density phi(y - 1) on (0, 2), largest at the centre.
  const double half = normal_quantile(0.5 + extra / 2);
  EXPECT_NEAR(opt_oracle(CensoredGaussian{}, 0.5), 2 * half, 1e-4);
}

TEST(OptOracle, RejectsSupervised) {
  EXPECT_THROW(opt_oracle(RomanoSynthetic{}, 0.7), ConfigError);
  EXPECT_THROW(opt_oracle(IzbickiBimodal{}, 0.7), ConfigError);
}

TEST(OptOracle, DefaultRelu) {
  const double v = opt_oracle(default_relu(), 0.8);
  EXPECT_NEAR(v, 1.7659, 2e-3);
}

TEST(Sample, SingleComponentMean) {
  GaussianMixture g{{{1.0, 0.0, 1.0}}};
  const std::size_t n = 10000;
  auto d = sample(g, n, 17);
  EXPECT_EQ(d.size(), n);
  EXPECT_EQ(d.dim(), 0u);
  EXPECT_NEAR(d.y.mean(), 0.0, 4.0 / std::sqrt(static_cast<double>(n)));
}

TEST(Sample, Deterministic) {
  auto a = sample(RomanoSynthetic{}, 50, 3);
  auto b = sample(RomanoSynthetic{}, 50, 3);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.y, b.y);
  auto c = sample(RomanoSynthetic{}, 50, 4);
  EXPECT_NE(a.y, c.y);
}

TEST(Sample, CensoredSupport) {
  auto d = sample(CensoredGaussian{}, 5000, 1);
  std::size_t zeros = 0, twos = 0;
  for (double y : d.labels()) {
    ASSERT_GE(y, 0.0);
    ASSERT_LE(y, 2.0);
    zeros += y == 0.0;
    twos += y == 2.0;
  }
  const double p = normal_cdf(-1.0);
  const double tol = 4 * std::sqrt(p * (1 - p) / 5000);
  EXPECT_NEAR(zeros / 5000.0, p, tol);
  EXPECT_NEAR(twos / 5000.0, p, tol);
}

TEST(Sample, MixtureMatchesLaw) {
  auto spec = three_component_mixture();
  auto d = sample(spec, 20000, 8);
  auto law = conditional_law(spec, Covariate(0));
  for (double y : {-6.0, -1.0, 0.5, 8.0}) {
    double emp = 0;
    for (double v : d.labels()) emp += v <= y;
    EXPECT_NEAR(emp / 20000.0, law->cdf(y), 0.012) << y;
  }
}

TEST(Sample, RomanoMatchesConditionalLaw) {
  auto d = sample(RomanoSynthetic{}, 20000, 9);
  ASSERT_EQ(d.dim(), 1u);
  for (Eigen::Index i = 0; i < d.x.rows(); ++i) {
    ASSERT_GE(d.x(i, 0), 0.0);
    ASSERT_LE(d.x(i, 0), 5.0);
  }
  // Probability integral transform of the labels is uniform.
  double below = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    auto law = conditional_law(RomanoSynthetic{}, d.x.row(static_cast<Eigen::Index>(i)));
    below += law->cdf(d.y(static_cast<Eigen::Index>(i))) <= 0.5;
  }
  EXPECT_NEAR(below / 20000.0, 0.5, 0.015);
}

TEST(Sample, IzbickiUnimodalBranch) {
  Covariate x = Covariate::Zero(20);
  x(0) = -1.0;  // g = 0 below -0.5
  auto law = conditional_law(IzbickiBimodal{}, x);
  const double f = (x(0) - 1) * (x(0) - 1) * (x(0) + 1);
  const double sd = std::sqrt(0.25 + std::abs(x(0)));
  EXPECT_NEAR(law->cdf(f), 0.5, 1e-12);
  EXPECT_NEAR(law->cdf(f + sd), normal_cdf(1.0), 1e-12);

  x(0) = 1.0;
  auto bimodal = conditional_law(IzbickiBimodal{}, x);
  const double g = 2 * std::sqrt(1.5);
  const double s2 = std::sqrt(1.25);
  EXPECT_NEAR(bimodal->cdf(0.0), 0.5 * normal_cdf(g / s2) + 0.5 * normal_cdf(-g / s2), 1e-12);
}

TEST(Sample, IzbickiShape) {
  auto d = sample(IzbickiBimodal{5}, 100, 2);
  EXPECT_EQ(d.dim(), 5u);
  EXPECT_LE(d.x.maxCoeff(), 1.5);
  EXPECT_GE(d.x.minCoeff(), -1.5);
}

TEST(Parse, RoundTrip) {
  for (const char* text : {"gaussian", "censored", "mixture", "relu", "romano", "izbicki", "izbicki:7",
                           "mixture:0.5,0,1;0.5,4,0.25", "relu:1,1,0;-1,2,0.5"}) {
    auto spec = parse_distribution(text);
    EXPECT_EQ(to_string(parse_distribution(to_string(spec))), to_string(spec)) << text;
  }
  EXPECT_TRUE(is_supervised(parse_distribution("romano")));
  EXPECT_FALSE(is_supervised(parse_distribution("mixture")));
}

TEST(Parse, Rejects) {
  EXPECT_THROW(parse_distribution("poisson"), ConfigError);
  EXPECT_THROW(parse_distribution("mixture:0.5,0,1;0.6,1,1"), ConfigError);
  EXPECT_THROW(parse_distribution("mixture:1,0,-1"), ConfigError);
  EXPECT_THROW(parse_distribution("izbicki:0"), ConfigError);
  EXPECT_THROW(sample(StandardGaussian{}, 0, 1), ConfigError);
}
