#include "volopt/interval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace volopt {

SortedSample::SortedSample(std::vector<double> values) : values_(std::move(values)) {
  for (double v : values_) {
    if (std::isnan(v)) throw std::invalid_argument("SortedSample: NaN value");
  }
  std::sort(values_.begin(), values_.end());
}

std::size_t SortedSample::count_between(double lo, double hi) const {
  if (hi < lo) return 0;
  auto first = std::lower_bound(values_.begin(), values_.end(), lo);
  auto last = std::upper_bound(first, values_.end(), hi);
  return static_cast<std::size_t>(last - first);
}

IntervalUnion IntervalUnion::whole_line() {
  IntervalUnion u;
  u.whole_line_ = true;
  return u;
}

IntervalUnion normalize(std::vector<Interval> intervals) {
  for (const auto& iv : intervals) {
    if (std::isnan(iv.lo) || std::isnan(iv.hi)) {
      throw std::invalid_argument("normalize: NaN endpoint");
    }
    if (iv.lo > iv.hi) {
      throw std::invalid_argument("normalize: interval with lo > hi [" + std::to_string(iv.lo) +
                                  ", " + std::to_string(iv.hi) + "]");
    }
  }
  std::sort(intervals.begin(), intervals.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi); });

  IntervalUnion out;
  for (const auto& iv : intervals) {
    if (!out.intervals_.empty() && iv.lo <= out.intervals_.back().hi) {
      out.intervals_.back().hi = std::max(out.intervals_.back().hi, iv.hi);
    } else {
      out.intervals_.push_back(iv);
    }
  }
  return out;
}

double volume(const IntervalUnion& u) {
  if (u.is_whole_line()) return std::numeric_limits<double>::infinity();
  double total = 0.0;
  for (const auto& iv : u) total += iv.length();
  return total;
}

bool contains(const IntervalUnion& u, double y) {
  if (u.is_whole_line()) return true;
  const auto& ivs = u.intervals();
  // First interval whose hi >= y; it is the only candidate.
  auto it = std::lower_bound(ivs.begin(), ivs.end(), y,
                             [](const Interval& iv, double v) { return iv.hi < v; });
  return it != ivs.end() && it->lo <= y;
}

std::size_t count_covered(const SortedSample& s, const IntervalUnion& u) {
  if (u.is_whole_line()) return s.size();
  std::size_t total = 0;
  for (const auto& iv : u) total += s.count_between(iv.lo, iv.hi);
  return total;
}

bool is_subset(const IntervalUnion& inner, const IntervalUnion& outer) {
  if (outer.is_whole_line()) return true;
  if (inner.is_whole_line()) return false;
  const auto& out = outer.intervals();
  for (const auto& iv : inner) {
    auto it = std::lower_bound(out.begin(), out.end(), iv.lo,
                               [](const Interval& o, double v) { return o.hi < v; });
    if (it == out.end() || it->lo > iv.lo || it->hi < iv.hi) return false;
  }
  return true;
}

IntervalUnion unite(const IntervalUnion& a, const IntervalUnion& b) {
  if (a.is_whole_line() || b.is_whole_line()) return IntervalUnion::whole_line();
  std::vector<Interval> all(a.begin(), a.end());
  all.insert(all.end(), b.begin(), b.end());
  return normalize(std::move(all));
}

nlohmann::json to_json(const IntervalUnion& u) {
  if (u.is_whole_line()) return "whole_line";
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& iv : u) arr.push_back({iv.lo, iv.hi});
  return arr;
}

IntervalUnion interval_union_from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "whole_line") return IntervalUnion::whole_line();
    throw std::invalid_argument("interval union json: unknown sentinel");
  }
  std::vector<Interval> ivs;
  for (const auto& pair : j) {
    if (!pair.is_array() || pair.size() != 2) {
      throw std::invalid_argument("interval union json: expected [lo, hi] pairs");
    }
    ivs.push_back({pair[0].get<double>(), pair[1].get<double>()});
  }
  return normalize(std::move(ivs));
}

std::ostream& operator<<(std::ostream& out, const Interval& iv) { return out << '[' << iv.lo << ", " << iv.hi << ']'; }

std::ostream& operator<<(std::ostream& out, const IntervalUnion& u) { return out << to_json(u).dump(); }

}  // namespace volopt
