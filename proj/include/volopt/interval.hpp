#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "json.hpp"

namespace volopt {

/// Closed interval [lo, hi]. Zero-length intervals represent point masses.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool contains(double y) const { return lo <= y && y <= hi; }

  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Ascending multiset of real observations. Duplicates are kept.
class SortedSample {
 public:
  SortedSample() = default;
  /// Sorts `values`. Rejects NaN.
  explicit SortedSample(std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double front() const { return values_.front(); }
  double back() const { return values_.back(); }
  std::span<const double> values() const { return values_; }

  /// Number of sample points in [lo, hi].
  std::size_t count_between(double lo, double hi) const;

  friend bool operator==(const SortedSample&, const SortedSample&) = default;

 private:
  std::vector<double> values_;
};

/// Normalized union of disjoint closed intervals sorted by `lo`, with
/// hi_i < lo_{i+1}. A distinguished whole-line value stands for the trivial
/// set R; it is never encoded as a huge finite interval.
class IntervalUnion {
 public:
  /// The empty set.
  IntervalUnion() = default;

  static IntervalUnion whole_line();

  const std::vector<Interval>& intervals() const { return intervals_; }
  std::size_t size() const { return intervals_.size(); }
  bool empty() const { return !whole_line_ && intervals_.empty(); }
  bool is_whole_line() const { return whole_line_; }

  auto begin() const { return intervals_.begin(); }
  auto end() const { return intervals_.end(); }
  const Interval& operator[](std::size_t i) const { return intervals_[i]; }

  friend bool operator==(const IntervalUnion&, const IntervalUnion&) = default;

 private:
  friend IntervalUnion normalize(std::vector<Interval> intervals);

  std::vector<Interval> intervals_;
  bool whole_line_ = false;
};

/// Sorts and merges overlapping or touching intervals. Throws
/// std::invalid_argument on an interval with lo > hi or NaN endpoints.
IntervalUnion normalize(std::vector<Interval> intervals);

/// Lebesgue measure; +inf for the whole line.
double volume(const IntervalUnion& u);

bool contains(const IntervalUnion& u, double y);

/// Number of sample points (with multiplicity) inside `u`, by binary search
/// per interval.
std::size_t count_covered(const SortedSample& s, const IntervalUnion& u);

/// Set containment, decided by interval algebra.
bool is_subset(const IntervalUnion& inner, const IntervalUnion& outer);

IntervalUnion unite(const IntervalUnion& a, const IntervalUnion& b);

/// [[lo, hi], ...] at full double precision; the whole line is the string
/// "whole_line".
nlohmann::json to_json(const IntervalUnion& u);
IntervalUnion interval_union_from_json(const nlohmann::json& j);

std::ostream& operator<<(std::ostream& out, const Interval& iv);
std::ostream& operator<<(std::ostream& out, const IntervalUnion& u);

}  // namespace volopt
