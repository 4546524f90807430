#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <stdexcept>

#include "volopt/error.hpp"
#include "volopt/nested_system.hpp"

using namespace volopt;

TEST(GreedyExpand, NearestPointFirst) {
  EXPECT_EQ(greedy_expand(normalize({{2, 3}}), SortedSample({1, 2, 3, 5}), 3), normalize({{1, 3}}));
  EXPECT_EQ(greedy_expand(normalize({{2, 3}}), SortedSample({1, 2, 3, 3.5}), 4), normalize({{1, 3.5}}));
  EXPECT_EQ(greedy_expand(normalize({{1, 5}}), SortedSample({1, 2, 5}), 3), normalize({{1, 5}}));
}

TEST(GreedyExpand, TieGoesToSmallerPoint) {
  EXPECT_EQ(greedy_expand(normalize({{2, 3}}), SortedSample({1, 2, 3, 4}), 3), normalize({{1, 3}}));
}

TEST(GreedyExpand, SharedGapPointGoesToLeftInterval) {
  auto u = greedy_expand(normalize({{0, 0}, {2, 2}}), SortedSample({0, 1, 2, 10}), 3);
  EXPECT_EQ(u, normalize({{0, 1}, {2, 2}}));
}

TEST(GreedyContract, Examples) {
  EXPECT_EQ(greedy_contract(normalize({{0, 10}}), SortedSample({0, 1, 9, 10}), 3), normalize({{0, 9}}));
  EXPECT_EQ(greedy_contract(normalize({{3, 3}}), SortedSample({3}), 0), IntervalUnion{});
  EXPECT_EQ(greedy_contract(normalize({{0, 1}, {5, 9}}), SortedSample({0, 1, 5, 9}), 3),
            normalize({{0, 1}, {5, 5}}));
  EXPECT_THROW(greedy_contract(IntervalUnion::whole_line(), SortedSample({1}), 0), std::invalid_argument);
}

TEST(GreedyContract, DuplicatesCountPerPoint) {
  // Dropping 4 (two copies) saves 1 per point, dropping 3 saves 1 for one point.
  auto u = greedy_contract(normalize({{0, 4}}), SortedSample({0, 3, 4, 4}), 2);
  EXPECT_EQ(u, normalize({{4, 4}}));
}

TEST(GreedyContract, KeepsAtomsOverContinuousPoints) {
  std::vector<double> v(20, 0.0);
  for (int i = 1; i <= 10; ++i) v.push_back(0.01 * i);
  auto u = greedy_contract(normalize({{0, 0.1}}), SortedSample(v), 20);
  EXPECT_EQ(u, normalize({{0, 0}}));
}

TEST(GreedyContract, StopsRatherThanUndershoot) {
  SortedSample s(std::vector<double>(10, 3.0));
  EXPECT_EQ(greedy_contract(normalize({{3, 3}}), s, 4), normalize({{3, 3}}));
  EXPECT_EQ(greedy_contract(normalize({{3, 3}}), s, 0), IntervalUnion{});
}

TEST(GreedyContract, TrimsToCoveredHull) {
  EXPECT_EQ(greedy_contract(normalize({{-1, 5}, {7, 8}}), SortedSample({0, 1, 2}), 2), normalize({{0, 1}}));
}

TEST(BuildNested, EquispacedLadder) {
  SortedSample s({0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
  NestedConfig cfg{.k = 1, .alpha = 0.5, .m = 5, .delta = 1e-6};
  auto ns = build_nested(s, cfg);
  ASSERT_EQ(ns.m(), 5);
  for (int j = 1; j <= 5; ++j) {
    EXPECT_EQ(ns.level(j).size(), 1u);
    EXPECT_EQ(count_covered(s, ns.level(j)), static_cast<std::size_t>(2 * j));
    EXPECT_NEAR(volume(ns.level(j)), 2 * j - 1, 1e-12);
    if (j > 1) EXPECT_TRUE(is_subset(ns.level(j - 1), ns.level(j)));
  }
}

TEST(BuildNested, JStarAndAssumption) {
  SortedSample s(std::vector<double>(100, 0.0));
  NestedConfig cfg{.k = 1, .alpha = 0.3, .m = 10, .delta = 0.01, .gamma = 0.05};
  auto ns = build_nested(s, cfg);
  // ceil((0.7 + 0.01 + 0.03) * 10) = 8
  EXPECT_EQ(ns.j_star, 8);
  EXPECT_TRUE(ns.assumption_holds);

  cfg.delta.reset();
  EXPECT_THROW(build_nested(s, cfg), ConfigError);
  cfg.strict = false;
  auto loose = build_nested(s, cfg);
  EXPECT_FALSE(loose.assumption_holds);
  EXPECT_FALSE(loose.diagnostic.empty());
  EXPECT_EQ(loose.j_star, 10);
}

TEST(BuildNested, RejectsBadConfig) {
  SortedSample s({1, 2, 3});
  EXPECT_THROW(build_nested(s, NestedConfig{.m = 1}), ConfigError);
  EXPECT_THROW(build_nested(s, NestedConfig{.k = 0}), ConfigError);
  EXPECT_THROW(build_nested(SortedSample{}, NestedConfig{}), ConfigError);
}

TEST(Score, CountsContainingLevels) {
  SortedSample s({0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
  auto ns = build_nested(s, NestedConfig{.k = 1, .alpha = 0.5, .m = 5, .delta = 1e-6});
  EXPECT_EQ(score(ns, 100.0), 0);
  const double inner = ns.level(1)[0].lo;
  EXPECT_EQ(score(ns, inner), 5);
  for (double y : s.values()) {
    int direct = 0;
    for (int j = 1; j <= ns.m(); ++j) direct += contains(ns.level(j), y);
    EXPECT_EQ(score(ns, y), direct);
  }
}

TEST(LevelForThreshold, Boundaries) {
  SortedSample s({0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
  auto ns = build_nested(s, NestedConfig{.k = 1, .alpha = 0.5, .m = 5, .delta = 1e-6});
  EXPECT_EQ(level_for_threshold(ns, 5), ns.level(1));
  EXPECT_EQ(level_for_threshold(ns, 1), ns.level(5));
  EXPECT_TRUE(level_for_threshold(ns, 0).is_whole_line());
  EXPECT_TRUE(level_for_threshold(ns, 6).empty());
}

// Nesting, count ladder, interval budget and the score/level duality on
// random mixtures with ties.
TEST(BuildNested, RandomizedStructure) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 20 + rng() % 150;
    const int k = 1 + static_cast<int>(rng() % 4);
    const int m = 5 + static_cast<int>(rng() % 30);
    std::vector<double> v(n);
    std::normal_distribution<double> N(0, 1);
    for (auto& x : v) x = (rng() % 2 ? 5.0 : 0.0) + std::round(N(rng) * 20) / 20;
    SortedSample s(v);
    NestedConfig cfg{.k = k, .alpha = 0.2, .m = m, .strict = false};
    auto ns = build_nested(s, cfg);
    for (int j = 1; j <= m; ++j) {
      const auto& lv = ns.level(j);
      ASSERT_LE(lv.size(), static_cast<std::size_t>(k));
      if (j > 1) ASSERT_TRUE(is_subset(ns.level(j - 1), lv));
      const auto got = count_covered(s, lv);
      const auto target = ns.target_counts[static_cast<std::size_t>(j - 1)];
      if (j >= ns.j_star) ASSERT_GE(got, target);
      if (j < ns.j_star && got > target) {
        // Contraction only stops early when every boundary value is too heavy to drop.
        for (const auto& iv : lv) {
          for (double e : {iv.lo, iv.hi}) {
            const auto r = s.values();
            const auto c = std::upper_bound(r.begin(), r.end(), e) - std::lower_bound(r.begin(), r.end(), e);
            ASSERT_GT(static_cast<std::size_t>(c), got - target);
          }
        }
      }
    }
    std::uniform_real_distribution<double> U(s.front() - 1, s.back() + 1);
    for (int probe = 0; probe < 200; ++probe) {
      const double y = probe % 2 ? U(rng) : s[rng() % n];
      const int q = score(ns, y);
      for (int t = 0; t <= m + 1; ++t) ASSERT_EQ(q >= t, contains(level_for_threshold(ns, t), y));
    }
  }
}

TEST(NestedSystem, Json) {
  SortedSample s({0, 1, 2, 3});
  auto ns = build_nested(s, NestedConfig{.k = 1, .alpha = 0.5, .m = 2, .delta = 0.0, .strict = false});
  auto j = to_json(ns);
  EXPECT_EQ(j["m"], 2);
  EXPECT_EQ(j["levels"].size(), 2u);
}
