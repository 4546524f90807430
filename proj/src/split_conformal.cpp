#include "volopt/split_conformal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "volopt/error.hpp"
#include "volopt/rng.hpp"

namespace volopt {

std::size_t threshold_index(std::size_t n, double alpha) {
  const double idx = std::floor((static_cast<double>(n) + 1.0) * alpha + 1e-9);
  return idx <= 0.0 ? 0 : static_cast<std::size_t>(idx);
}

std::size_t upper_rank(std::size_t n, double alpha) {
  const double idx = std::ceil((1.0 - alpha) * (static_cast<double>(n) + 1.0) - 1e-9);
  return idx <= 0.0 ? 0 : static_cast<std::size_t>(idx);
}

std::pair<SortedSample, SortedSample> split(std::span<const double> data, std::uint64_t seed) {
  if (data.size() < 4) throw ConfigError("split: need at least 4 points");
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng = make_rng(seed, 0x5B11);
  std::shuffle(order.begin(), order.end(), rng);
  const std::size_t first = (data.size() + 1) / 2;
  std::vector<double> a;
  std::vector<double> b;
  for (std::size_t i = 0; i < order.size(); ++i) (i < first ? a : b).push_back(data[order[i]]);
  return {SortedSample(std::move(a)), SortedSample(std::move(b))};
}

CalibrationResult calibrate_scores(std::vector<int> scores, double alpha, int m) {
  if (scores.empty()) throw ConfigError("calibrate: empty calibration set");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("calibrate: alpha must lie in (0, 1)");
  CalibrationResult r;
  std::sort(scores.begin(), scores.end());
  r.scores = std::move(scores);
  r.index = threshold_index(r.scores.size(), alpha);
  if (r.index == 0) {
    r.threshold = 0;
    r.warning = "floor((n+1)alpha) = 0: the prediction set is the whole line";
  } else if (r.index > r.scores.size()) {
    r.threshold = m + 1;
    r.warning = "floor((n+1)alpha) > n: the prediction set is empty";
  } else {
    r.threshold = r.scores[r.index - 1];
  }
  return r;
}

CalibrationResult calibrate(const NestedSystem& ns, const SortedSample& calib, double alpha) {
  std::vector<int> scores;
  scores.reserve(calib.size());
  for (double y : calib.values()) scores.push_back(score(ns, y));
  return calibrate_scores(std::move(scores), alpha, ns.m());
}

PredictionSet predict_from_halves(const SortedSample& train, const SortedSample& calib, const NestedConfig& cfg) {
  const NestedSystem ns = build_nested(train, cfg);
  const CalibrationResult cal = calibrate(ns, calib, cfg.alpha);
  PredictionSet p;
  p.set = level_for_threshold(ns, cal.threshold);
  p.threshold = cal.threshold;
  p.effective_gamma = 1.0 / std::ceil(1.0 / ns.gamma - 1e-9);
  p.delta = ns.delta;
  p.m = ns.m();
  p.calibration_coverage = static_cast<double>(count_covered(calib, p.set)) / static_cast<double>(calib.size());
  p.warning = cal.warning;
  if (!ns.diagnostic.empty()) p.warning += (p.warning.empty() ? "" : "; ") + ns.diagnostic;
  return p;
}

PredictionSet predict_unsupervised(std::span<const double> data, const NestedConfig& cfg, std::uint64_t seed) {
  const auto [train, calib] = split(data, seed);
  PredictionSet p = predict_from_halves(train, calib, cfg);
  p.seed = seed;
  return p;
}

}  // namespace volopt
