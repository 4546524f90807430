#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "volopt/interval.hpp"
#include "volopt/nested_system.hpp"

namespace volopt {

/// floor((n + 1) alpha): 1-based rank of the calibration threshold among
/// ascending scores.
std::size_t threshold_index(std::size_t n, double alpha);

/// ceil((1 - alpha)(n + 1)): 1-based rank used by residual-type scores,
/// where small is conforming.
std::size_t upper_rank(std::size_t n, double alpha);

struct CalibrationResult {
  std::vector<int> scores;  // ascending
  std::size_t index = 0;    // floor((n + 1) alpha)
  /// Scores >= threshold are accepted: 0 accepts everything, m + 1 nothing.
  int threshold = 0;
  std::string warning;
};

struct PredictionSet {
  IntervalUnion set;
  int threshold = 0;
  double effective_gamma = 0.0;
  double delta = 0.0;
  int m = 0;
  /// Fraction of calibration points inside the set.
  double calibration_coverage = 0.0;
  std::uint64_t seed = 0;
  std::string warning;
};

/// Seeded uniform partition into two halves; the first gets the extra point
/// of an odd-sized input.
std::pair<SortedSample, SortedSample> split(std::span<const double> data, std::uint64_t seed);

/// Threshold from integer conformity scores in [0, m].
CalibrationResult calibrate_scores(std::vector<int> scores, double alpha, int m);

CalibrationResult calibrate(const NestedSystem& ns, const SortedSample& calib, double alpha);

/// Split, nest on the first half, calibrate on the second.
PredictionSet predict_unsupervised(std::span<const double> data, const NestedConfig& cfg, std::uint64_t seed);

/// Nest on `train`, calibrate on `calib`.
PredictionSet predict_from_halves(const SortedSample& train, const SortedSample& calib, const NestedConfig& cfg);

}  // namespace volopt
