#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "volopt/interval.hpp"

using namespace volopt;

TEST(Normalize, MergesOverlaps) {
  auto u = normalize({{0, 1}, {0.5, 2}});
  ASSERT_EQ(u.size(), 1u);
  EXPECT_EQ(u[0], (Interval{0, 2}));
}

TEST(Normalize, KeepsPointInterval) {
  auto u = normalize({{3, 3}});
  ASSERT_EQ(u.size(), 1u);
  EXPECT_EQ(u[0], (Interval{3, 3}));
  EXPECT_EQ(volume(u), 0.0);
}

TEST(Normalize, Sorts) {
  auto u = normalize({{5, 6}, {0, 1}});
  ASSERT_EQ(u.size(), 2u);
  EXPECT_EQ(u[0], (Interval{0, 1}));
  EXPECT_EQ(u[1], (Interval{5, 6}));
}

TEST(Normalize, TouchingIntervalsMerge) {
  auto u = normalize({{0, 1}, {1, 2}});
  ASSERT_EQ(u.size(), 1u);
  EXPECT_EQ(u[0], (Interval{0, 2}));
}

TEST(Normalize, RejectsBadIntervals) {
  EXPECT_THROW(normalize({{2, 1}}), std::invalid_argument);
  EXPECT_THROW(normalize({{std::nan(""), 1}}), std::invalid_argument);
}

TEST(Volume, Basic) {
  EXPECT_EQ(volume(normalize({{0, 1}, {2, 4}})), 3.0);
  EXPECT_EQ(volume(IntervalUnion{}), 0.0);
  EXPECT_TRUE(std::isinf(volume(IntervalUnion::whole_line())));
}

TEST(Contains, ClosedEndpoints) {
  auto u = normalize({{0, 1}});
  EXPECT_TRUE(contains(u, 1.0));
  EXPECT_FALSE(contains(u, 1.0000001));
  EXPECT_TRUE(contains(normalize({{3, 3}}), 3.0));
  EXPECT_FALSE(contains(IntervalUnion{}, 0.0));
  EXPECT_TRUE(contains(IntervalUnion::whole_line(), 1e300));
}

TEST(CountCovered, Examples) {
  EXPECT_EQ(count_covered(SortedSample({1, 2, 3, 4, 5}), normalize({{2, 4}})), 3u);
  EXPECT_EQ(count_covered(SortedSample({1, 2, 3}), IntervalUnion{}), 0u);
  EXPECT_EQ(count_covered(SortedSample({0, 0, 0, 1}), normalize({{0, 0}})), 3u);
  EXPECT_EQ(count_covered(SortedSample({0, 0, 0, 1}), IntervalUnion::whole_line()), 4u);
}

TEST(SortedSample, SortsAndRejectsNaN) {
  SortedSample s({3, 1, 2, 1});
  EXPECT_EQ(s[0], 1);
  EXPECT_EQ(s[3], 3);
  EXPECT_EQ(s.count_between(1, 1), 2u);
  EXPECT_THROW(SortedSample({1, std::nan("")}), std::invalid_argument);
}

TEST(IntervalUnion, SubsetAndUnite) {
  auto a = normalize({{0, 1}, {4, 5}});
  auto b = normalize({{-1, 2}, {3, 6}});
  EXPECT_TRUE(is_subset(a, b));
  EXPECT_FALSE(is_subset(b, a));
  EXPECT_TRUE(is_subset(a, IntervalUnion::whole_line()));
  EXPECT_FALSE(is_subset(IntervalUnion::whole_line(), a));
  EXPECT_EQ(unite(a, normalize({{1, 4}})), normalize({{0, 5}}));
}

TEST(IntervalUnion, JsonRoundTrip) {
  auto u = normalize({{-6.0312345678901234, -5.97}, {0.1, 1.0 / 3.0}});
  EXPECT_EQ(interval_union_from_json(to_json(u)), u);
  EXPECT_EQ(interval_union_from_json(to_json(IntervalUnion::whole_line())), IntervalUnion::whole_line());
  EXPECT_EQ(interval_union_from_json(to_json(IntervalUnion{})), IntervalUnion{});
}

// Counting against a linear scan and containment against sampled points.
TEST(IntervalUnion, RandomizedAgainstScan) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-5, 5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Interval> raw;
    for (int i = 0; i < 4; ++i) {
      double a = U(rng), b = U(rng);
      raw.push_back({std::min(a, b), std::max(a, b)});
    }
    auto u = normalize(raw);
    for (std::size_t i = 1; i < u.size(); ++i) ASSERT_LT(u[i - 1].hi, u[i].lo);
    std::vector<double> ys;
    for (int i = 0; i < 50; ++i) ys.push_back(U(rng));
    SortedSample s(ys);
    std::size_t expected = 0;
    for (double y : ys) {
      bool in_raw = false;
      for (auto& iv : raw) in_raw |= iv.contains(y);
      ASSERT_EQ(contains(u, y), in_raw);
      expected += in_raw;
    }
    ASSERT_EQ(count_covered(s, u), expected);
  }
}
