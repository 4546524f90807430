#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "volopt/cdf.hpp"
#include "volopt/data.hpp"
#include "volopt/interval.hpp"
#include "volopt/nested_system.hpp"
#include "volopt/split_conformal.hpp"

namespace volopt {

/// Y_0 <= ... <= Y_L. Y_l is the level-l/L quantile for 1 <= l <= L and
/// Y_0 = sup{y : F(y) <= 0}, so that the step CDF of Y_1..Y_L reproduces an
/// empirical F exactly.
struct QuantileGrid {
  std::vector<double> levels;
  int L() const { return static_cast<int>(levels.size()) - 1; }
  /// Y_1..Y_L.
  std::vector<double> upper_levels() const { return {levels.begin() + 1, levels.end()}; }
};

QuantileGrid quantile_grid(const ConditionalLaw& law, int L);

/// The nested system of Y_1..Y_L treated as a sample.
NestedSystem build_conditional_nested(const QuantileGrid& grid, const NestedConfig& cfg);

inline int score_supervised(const NestedSystem& ns_for_x, double y) { return score(ns_for_x, y); }

struct SupervisedConfig {
  double alpha = 0.1;
  int k = 1;
  int m = 50;
  /// Grid size; 0 means L = m.
  int L = 0;
  std::optional<double> gamma;
  std::optional<double> delta;
  bool strict = true;

  int grid_size() const { return L > 0 ? L : m; }
};

struct SupervisedPrediction {
  IntervalUnion set;
  int threshold = 0;
  /// Index of the test point, which also identifies its nested system.
  std::size_t system_id = 0;
};

struct SupervisedRun {
  std::vector<SupervisedPrediction> predictions;
  CalibrationResult calibration;
  double delta = 0.0;
  double gamma = 0.0;
  bool assumption_holds = true;
  std::string diagnostic;
};

/// Calibrates on per-point grids. Nested systems are built only for the
/// calibration and test points.
SupervisedRun run_dcp_dp(std::span<const QuantileGrid> calib_grids, std::span<const double> calib_y,
                         std::span<const QuantileGrid> test_grids, const SupervisedConfig& cfg);

/// Same, evaluating `cdf` at the calibration and test covariates. Rejects a
/// CDF whose fingerprint covers the calibration data.
SupervisedRun run_dcp_dp(const LabeledData& calib, const CovariateMatrix& test_x, const ConditionalCdf& cdf,
                         const SupervisedConfig& cfg);

std::vector<QuantileGrid> grids_for(std::span<const LawPtr> laws, int L);

/// CSV `point_id,level,value` with the full 0..L/L ladder per point and
/// non-decreasing values. Points are returned in increasing point_id order.
std::vector<QuantileGrid> read_quantile_grids(std::istream& in);
std::vector<QuantileGrid> read_quantile_grids_file(const std::string& path);
void write_quantile_grids(std::ostream& out, std::span<const QuantileGrid> grids);

/// CSV `x_0,...,x_{d-1},y` with a header row.
LabeledData read_labeled_csv(std::istream& in);
LabeledData read_labeled_csv_file(const std::string& path);
void write_labeled_csv(std::ostream& out, const LabeledData& d);

}  // namespace volopt
