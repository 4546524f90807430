#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "volopt/cdf.hpp"
#include "volopt/interval.hpp"
#include "volopt/supervised.hpp"

namespace volopt {

struct KdeConfig {
  double rho = 0.5;
  /// Scan points over [min - 3 rho, max + 3 rho]; the training points are added.
  std::size_t grid_points = 10'000;

  void validate() const;
};

/// (1 / (n rho)) sum_i phi((y - Y_i) / rho).
double kde_score(const SortedSample& train, double rho, double y);
/// log of kde_score, finite even where the score underflows.
double kde_log_score(const SortedSample& train, double rho, double y);

/// {y : kde_log_score(y) >= log_threshold}: scan, then bisection of each
/// crossing to 1e-9.
IntervalUnion kde_superlevel_set(const SortedSample& train, const KdeConfig& cfg, double log_threshold);

struct KdePrediction {
  IntervalUnion set;
  /// -inf accepts everything, +inf nothing.
  double log_threshold = 0.0;
  std::size_t index = 0;
  std::uint64_t seed = 0;
  std::string warning;
};

KdePrediction cp_kde_from_halves(const SortedSample& train, const SortedSample& calib, double alpha,
                                 const KdeConfig& cfg);
KdePrediction run_cp_kde(std::span<const double> data, double alpha, const KdeConfig& cfg, std::uint64_t seed);

/// Per-test-point sets of a calibrated supervised baseline.
struct BaselineRun {
  std::vector<IntervalUnion> sets;
  /// Calibrated buffer (label units for CQR, probability units otherwise);
  /// +inf when the rank exceeds the calibration size.
  double buffer = 0.0;
  std::size_t rank = 0;
};

/// [Q(alpha/2) - b, Q(1 - alpha/2) + b] with b the ceil((1 - alpha)(n + 1))-th
/// smallest residual max(Q_lo - Y, Y - Q_hi).
BaselineRun run_cqr(std::span<const LawPtr> calib_laws, std::span<const double> calib_y,
                    std::span<const LawPtr> test_laws, double alpha);

/// {y : q_lo - b <= F(y) <= q_hi + b} with (q_lo, q_hi) = (alpha/2, 1 - alpha/2)
/// and b calibrated on max(q_lo - F(Y), F(Y) - q_hi).
BaselineRun run_dcp_qr(std::span<const LawPtr> calib_laws, std::span<const double> calib_y,
                       std::span<const LawPtr> test_laws, double alpha);

/// Shortest grid span Y_l .. Y_{l+w}, w = ceil((1 - alpha) L), over interior
/// levels 1 <= l, l + w <= L - 1 (all levels when that range is empty).
/// Ties go to the smallest l.
struct QuantilePair {
  int low = 0;
  int high = 0;
  int L = 0;
  double q_low() const { return static_cast<double>(low) / L; }
  double q_high() const { return static_cast<double>(high) / L; }
};
QuantilePair shortest_quantile_pair(const QuantileGrid& grid, double alpha);

/// Per point, the pair from shortest_quantile_pair, widened by the same b in
/// quantile space on both sides; b calibrated like DCP-QR.
BaselineRun run_dcp_qr_star(std::span<const LawPtr> calib_laws, std::span<const QuantileGrid> calib_grids,
                            std::span<const double> calib_y, std::span<const LawPtr> test_laws,
                            std::span<const QuantileGrid> test_grids, double alpha);
BaselineRun run_dcp_qr_star(std::span<const LawPtr> calib_laws, std::span<const double> calib_y,
                            std::span<const LawPtr> test_laws, double alpha, int L);

/// [Q(lo_level), Q(hi_level)] with levels clipped to [0, 1]: a wide band ends
/// at the support, which may be infinite (half-lines, or the whole-line
/// sentinel when both ends are).
IntervalUnion quantile_band(const ConditionalLaw& law, double lo_level, double hi_level);

}  // namespace volopt
