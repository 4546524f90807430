#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "volopt/interval.hpp"

namespace volopt {

struct NestedConfig {
  int k = 1;
  double alpha = 0.1;
  int m = 50;
  /// Default sqrt((k + ln n) / n).
  std::optional<double> delta;
  /// Slack of the DP level; default 1 / m.
  std::optional<double> gamma;
  /// Sample size entering 1/n and the default delta. Defaults to the size of
  /// the sample handed to build_nested; the supervised pipeline sets it to the
  /// calibration size because there the "sample" is a quantile grid.
  std::optional<std::size_t> reference_n;
  /// Reject configurations violating 3 delta + gamma + 1/n <= alpha. When
  /// false the violation is only recorded in NestedSystem::diagnostic.
  bool strict = true;

  double resolved_delta(std::size_t n) const;
  double resolved_gamma() const;
};

/// Levels S_1 ⊆ ... ⊆ S_m, each a union of at most k intervals.
struct NestedSystem {
  std::vector<IntervalUnion> levels;  // levels[j - 1] is S_j
  int j_star = 1;
  std::vector<std::size_t> target_counts;    // ceil(j n / m)
  std::vector<std::size_t> achieved_counts;  // may differ under duplicates
  double delta = 0.0;
  double gamma = 0.0;
  bool assumption_holds = true;
  std::string diagnostic;

  int m() const { return static_cast<int>(levels.size()); }
  const IntervalUnion& level(int j) const { return levels.at(static_cast<std::size_t>(j - 1)); }
};

/// S_{j*} from the DP at covered fraction j*/m, j* = ceil((1 - alpha + 1/n + 3 delta) m)
/// clamped to [1, m]; higher levels by greedy expansion, lower by greedy
/// contraction.
NestedSystem build_nested(const SortedSample& s, const NestedConfig& cfg);

/// Repeatedly extends the interval whose boundary is nearest to an uncovered
/// sample point until at least `target_count` points are covered. Ties go to
/// the smaller point. Interval count never increases.
IntervalUnion greedy_expand(const IntervalUnion& current, const SortedSample& s, std::size_t target_count);

/// Repeatedly drops the boundary sample value whose removal shrinks the
/// volume most per dropped point (a value of multiplicity c drops c points;
/// deleting a single-point interval shrinks nothing) until at most
/// `target_count` points are covered. Removals that would go below
/// `target_count` are skipped; when only such removals remain the count stays
/// above it. Ties go to the right endpoint, then to the rightmost interval.
IntervalUnion greedy_contract(const IntervalUnion& current, const SortedSample& s, std::size_t target_count);

/// Number of levels containing y, in [0, m].
int score(const NestedSystem& ns, double y);

/// {y : score(y) >= t}: S_{m - t + 1}; the whole line for t <= 0 and the
/// empty set for t > m.
IntervalUnion level_for_threshold(const NestedSystem& ns, int t);

/// {m, j_star, levels: [[[lo, hi], ...], ...]}
nlohmann::json to_json(const NestedSystem& ns);

}  // namespace volopt
