#pragma once

#include <cstddef>

#include "volopt/interval.hpp"

namespace volopt {

inline constexpr std::size_t kDefaultMaxDpCells = 64'000'000;

/// Inputs of the minimum-volume k-interval program.
///   alpha: miscoverage in (0, 1)
///   gamma: coverage slack in (0, alpha); sets the mass-bucket width
///   k:     interval budget
struct DpConfig {
  double alpha = 0.1;
  double gamma = 0.01;
  int k = 1;
  /// Upper bound on k * n * (number of buckets); exceeding it is a
  /// ConfigError asking the caller to raise gamma.
  std::size_t max_cells = kDefaultMaxDpCells;

  void validate() const;
};

struct DpResult {
  IntervalUnion set;
  /// 1 / ceil(1 / gamma): the slack actually used.
  double effective_gamma = 0.0;
  /// Covered-count the table certified (ceil(l * gamma_eff * n) at the target bucket).
  std::size_t required = 0;
  std::size_t covered = 0;
};

/// Minimum-volume union of at most k intervals covering at least
/// ceil((1 - alpha) n) sample points, up to the gamma slack: the volume is no
/// larger than the best union covering ceil((1 - alpha + gamma) n) points when
/// gamma * n <= 1, and all endpoints are sample values.
///
/// Runs in O(k n^2 / gamma): the table entry (i, j, l) holds the minimum
/// volume of i intervals over Y(1..j) covering at least ceil(l gamma n)
/// points with the rightmost interval ending at Y(j). The rightmost interval
/// is credited its exact count; the previous intervals are looked up through
/// a running prefix minimum over their right end.
DpResult solve_dp(const SortedSample& s, const DpConfig& cfg);

/// Same program parameterized by the covered fraction instead of alpha.
/// `coverage` may be 1 (cover every point), which DpConfig cannot express.
DpResult solve_dp_coverage(const SortedSample& s, double coverage, double gamma, int k,
                           std::size_t max_cells = kDefaultMaxDpCells);

/// Exhaustive minimizer over unions of <= k intervals with endpoints at
/// sample values covering at least `cover_count` points. Verification
/// oracle only: n <= max_n and k <= 3.
IntervalUnion brute_force_opt_k(const SortedSample& s, std::size_t cover_count, int k,
                                std::size_t max_n = 20);

struct EmpiricalOpt {
  double volume = 0.0;
  double effective_gamma = 0.0;
};

/// Volume of solve_dp at miscoverage 1 - coverage.
EmpiricalOpt opt_k_empirical(const SortedSample& s, double coverage, int k, double gamma);

}  // namespace volopt
