#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "volopt/error.hpp"
#include "volopt/normal.hpp"
#include "volopt/split_conformal.hpp"
#include "volopt/synthetic.hpp"

using namespace volopt;

TEST(Split, HalvesPartitionInput) {
  std::vector<double> data{1, 2, 3, 4, 5, 6, 7, 8};
  auto [a, b] = split(data, 42);
  EXPECT_EQ(a.size(), 4u);
  EXPECT_EQ(b.size(), 4u);
  std::vector<double> all(a.values().begin(), a.values().end());
  all.insert(all.end(), b.values().begin(), b.values().end());
  std::sort(all.begin(), all.end());
  EXPECT_EQ(all, data);
  auto [c, d] = split(data, 42);
  EXPECT_EQ(a, c);
  EXPECT_EQ(b, d);
}

TEST(Split, OddSizeAndSeeds) {
  std::vector<double> data(9);
  for (int i = 0; i < 9; ++i) data[static_cast<std::size_t>(i)] = i;
  EXPECT_EQ(split(data, 1).first.size(), 5u);
  std::set<std::vector<double>> firsts;
  for (std::uint64_t s = 0; s < 100; ++s) {
    auto halves = split(data, s);
    auto v = halves.first.values();
    firsts.insert({v.begin(), v.end()});
  }
  EXPECT_GT(firsts.size(), 50u);
  EXPECT_THROW(split(std::vector<double>{1, 2, 3}, 0), ConfigError);
}

TEST(Calibrate, IndexArithmetic) {
  EXPECT_EQ(threshold_index(4, 0.5), 2u);
  EXPECT_EQ(threshold_index(4, 0.25), 1u);
  EXPECT_EQ(threshold_index(299, 0.2), 60u);
  EXPECT_EQ(upper_rank(4, 0.5), 3u);
  EXPECT_EQ(upper_rank(9, 0.1), 9u);
}

TEST(Calibrate, AllScoresMax) {
  auto c = calibrate_scores({5, 5, 5, 5, 5}, 0.3, 5);
  EXPECT_EQ(c.threshold, 5);
}

TEST(Calibrate, SecondSmallest) {
  auto c = calibrate_scores({4, 1, 3, 2}, 0.5, 5);
  EXPECT_EQ(c.index, 2u);
  EXPECT_EQ(c.threshold, 2);
}

TEST(Calibrate, ZeroIndexAcceptsEverything) {
  auto c = calibrate_scores({0, 1, 2, 3}, 0.25, 3);
  EXPECT_EQ(c.index, 1u);
  EXPECT_EQ(c.threshold, 0);
  auto tiny = calibrate_scores({1, 2, 3}, 0.1, 3);
  EXPECT_EQ(tiny.index, 0u);
  EXPECT_EQ(tiny.threshold, 0);
  EXPECT_FALSE(tiny.warning.empty());
  EXPECT_THROW(calibrate_scores({}, 0.1, 3), ConfigError);
}

TEST(Predict, GaussianLengthNearOpt) {
  double total = 0;
  const int reps = 100;
  for (int r = 0; r < reps; ++r) {
    auto d = sample(StandardGaussian{}, 200, static_cast<std::uint64_t>(r));
    auto p = predict_unsupervised(d.labels(), NestedConfig{.k = 1, .alpha = 0.7, .m = 50, .strict = false}, 1000 + r);
    ASSERT_LE(p.set.size(), 1u);
    total += volume(p.set);
  }
  EXPECT_NEAR(total / reps, 0.7706, 0.15);
}

TEST(Predict, CensoredTwoPoints) {
  auto d = sample(CensoredGaussian{}, 600, 5);
  auto p = predict_unsupervised(d.labels(), NestedConfig{.k = 2, .alpha = 0.7, .m = 50, .strict = false}, 8);
  ASSERT_EQ(p.set.size(), 2u);
  EXPECT_EQ(p.set[0], (Interval{0, 0}));
  EXPECT_EQ(p.set[1], (Interval{2, 2}));
}

TEST(Predict, LargestAlphaGivesSmallestLevel) {
  SortedSample train({0, 1, 2, 3, 4, 5});
  SortedSample calib({0.5, 1.5, 2.5, 3.5, 4.5});
  NestedConfig cfg{.k = 6, .alpha = 1.0 - 1.0 / 6.0 - 1e-12, .m = 6, .strict = false};
  auto p = predict_from_halves(train, calib, cfg);
  auto ns = build_nested(train, cfg);
  auto cal = calibrate(ns, calib, cfg.alpha);
  EXPECT_EQ(cal.index, 5u);
  EXPECT_EQ(p.set, level_for_threshold(ns, cal.threshold));
}

// Marginal coverage of the split procedure over fresh test draws.
TEST(Predict, MarginalCoverage) {
  auto spec = three_component_mixture();
  auto law = conditional_law(spec, Covariate(0));
  double cov = 0;
  const int reps = 200;
  for (int r = 0; r < reps; ++r) {
    auto d = sample(spec, 100, static_cast<std::uint64_t>(r) + 77);
    auto p = predict_unsupervised(d.labels(), NestedConfig{.k = 3, .alpha = 0.2, .m = 20, .strict = false}, r);
    for (const auto& iv : p.set) cov += law->cdf(iv.hi) - law->cdf(iv.lo);
  }
  EXPECT_GE(cov / reps, 0.8 - 3 * std::sqrt(0.16 / reps));
}
