#include "volopt/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "volopt/error.hpp"

namespace volopt {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Kernel terms more than exp(-46) below the largest are dropped.
constexpr double kLogCutoff = 46.0;

double kth_smallest(std::vector<double> v, std::size_t rank) {
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(rank - 1), v.end());
  return v[rank - 1];
}

double calibrated_buffer(std::vector<double> scores, double alpha, std::size_t& rank) {
  if (scores.empty()) throw ConfigError("baseline: empty calibration set");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("baseline: alpha must lie in (0, 1)");
  rank = upper_rank(scores.size(), alpha);
  if (rank > scores.size()) return kInf;
  if (rank == 0) rank = 1;
  return kth_smallest(std::move(scores), rank);
}

double band_score(double f, double q_lo, double q_hi) { return std::max(q_lo - f, f - q_hi); }

void check_sizes(std::span<const LawPtr> calib_laws, std::span<const double> calib_y) {
  if (calib_laws.empty()) throw ConfigError("baseline: empty calibration set");
  if (calib_laws.size() != calib_y.size()) throw ConfigError("baseline: law/label count mismatch");
}

}  // namespace

void KdeConfig::validate() const {
  if (!(rho > 0.0)) throw ConfigError("KdeConfig: rho must be positive");
  if (grid_points < 2) throw ConfigError("KdeConfig: grid_points must be >= 2");
}

double kde_log_score(const SortedSample& train, double rho, double y) {
  const auto v = train.values();
  const std::size_t n = v.size();
  auto it = std::lower_bound(v.begin(), v.end(), y);
  std::size_t near = static_cast<std::size_t>(it - v.begin());
  if (near == n || (near > 0 && y - v[near - 1] < v[near] - y)) near = near == n ? n - 1 : near - 1;
  const double z0 = (y - v[near]) / rho;
  const double base = 0.5 * z0 * z0;
  double sum = 0.0;
  for (std::size_t i = near + 1; i-- > 0;) {
    const double z = (y - v[i]) / rho;
    const double e = 0.5 * z * z - base;
    if (e > kLogCutoff) break;
    sum += std::exp(-e);
  }
  for (std::size_t i = near + 1; i < n; ++i) {
    const double z = (y - v[i]) / rho;
    const double e = 0.5 * z * z - base;
    if (e > kLogCutoff) break;
    sum += std::exp(-e);
  }
  return std::log(sum) - base - std::log(static_cast<double>(n) * rho * std::sqrt(2.0 * std::numbers::pi));
}

double kde_score(const SortedSample& train, double rho, double y) { return std::exp(kde_log_score(train, rho, y)); }

IntervalUnion kde_superlevel_set(const SortedSample& train, const KdeConfig& cfg, double log_threshold) {
  cfg.validate();
  if (train.empty()) throw ConfigError("kde: empty training set");
  if (log_threshold == -kInf) return IntervalUnion::whole_line();
  if (log_threshold == kInf) return IntervalUnion{};

  const double rho = cfg.rho;
  auto above = [&](double y) { return kde_log_score(train, rho, y) >= log_threshold; };
  auto refine = [&](double a, double b) {
    const bool a_in = above(a);
    while (b - a > 1e-9) {
      const double mid = 0.5 * (a + b);
      if (mid <= a || mid >= b) break;
      if (above(mid) == a_in) {
        a = mid;
      } else {
        b = mid;
      }
    }
    return 0.5 * (a + b);
  };

  const double lo = train.front() - 3.0 * rho;
  const double hi = train.back() + 3.0 * rho;
  std::vector<double> grid(cfg.grid_points);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid.size() - 1);
  }
  grid.insert(grid.end(), train.values().begin(), train.values().end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  // Outside the data range the score is monotone, so the set's outer ends
  // are found by stepping outward and bisecting.
  auto outer = [&](double from, double direction) {
    double step = 3.0 * rho;
    double inside = from;
    double out = from + direction * step;
    while (above(out)) {
      inside = out;
      step *= 2.0;
      out = from + direction * step;
    }
    return refine(std::min(inside, out), std::max(inside, out));
  };

  std::vector<Interval> ivs;
  bool in = false;
  double start = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const bool a = above(grid[i]);
    if (a && !in) {
      start = i == 0 ? outer(grid[0], -1.0) : refine(grid[i - 1], grid[i]);
      in = true;
    } else if (!a && in) {
      ivs.push_back({start, refine(grid[i - 1], grid[i])});
      in = false;
    }
  }
  if (in) ivs.push_back({start, outer(grid.back(), 1.0)});
  return normalize(std::move(ivs));
}

KdePrediction cp_kde_from_halves(const SortedSample& train, const SortedSample& calib, double alpha,
                                 const KdeConfig& cfg) {
  cfg.validate();
  if (calib.empty()) throw ConfigError("cp_kde: empty calibration set");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("cp_kde: alpha must lie in (0, 1)");
  std::vector<double> scores;
  scores.reserve(calib.size());
  for (double y : calib.values()) scores.push_back(kde_log_score(train, cfg.rho, y));
  KdePrediction p;
  p.index = threshold_index(scores.size(), alpha);
  if (p.index == 0) {
    p.log_threshold = -kInf;
    p.warning = "floor((n+1)alpha) = 0: the prediction set is the whole line";
  } else if (p.index > scores.size()) {
    p.log_threshold = kInf;
    p.warning = "floor((n+1)alpha) > n: the prediction set is empty";
  } else {
    p.log_threshold = kth_smallest(std::move(scores), p.index);
  }
  p.set = kde_superlevel_set(train, cfg, p.log_threshold);
  return p;
}

KdePrediction run_cp_kde(std::span<const double> data, double alpha, const KdeConfig& cfg, std::uint64_t seed) {
  const auto [train, calib] = split(data, seed);
  KdePrediction p = cp_kde_from_halves(train, calib, alpha, cfg);
  p.seed = seed;
  return p;
}

IntervalUnion quantile_band(const ConditionalLaw& law, double lo_level, double hi_level) {
  // Levels outside [0, 1] clip to the ends of the support, which are
  // infinite when mass lies beyond the bracket.
  const Bracket b = law.bracket();
  double lo = 0.0, hi = 0.0;
  if (lo_level > 0.0) {
    lo = law.quantile(lo_level);
  } else {
    lo = law.cdf(std::nextafter(b.lo, -kInf)) > 0.0 ? -kInf : law.upper_quantile(0.0);
  }
  if (hi_level < 1.0) {
    hi = law.upper_quantile(hi_level);
  } else {
    hi = law.cdf(b.hi) < 1.0 ? kInf : law.quantile(1.0);
  }
  if (lo == -kInf && hi == kInf) return IntervalUnion::whole_line();
  if (lo_level > hi_level || lo > hi) return IntervalUnion{};
  return normalize({{lo, hi}});
}

BaselineRun run_cqr(std::span<const LawPtr> calib_laws, std::span<const double> calib_y,
                    std::span<const LawPtr> test_laws, double alpha) {
  check_sizes(calib_laws, calib_y);
  const double q_lo = alpha / 2.0;
  const double q_hi = 1.0 - alpha / 2.0;
  std::vector<double> residuals;
  residuals.reserve(calib_y.size());
  for (std::size_t i = 0; i < calib_y.size(); ++i) {
    residuals.push_back(std::max(calib_laws[i]->quantile(q_lo) - calib_y[i], calib_y[i] - calib_laws[i]->quantile(q_hi)));
  }
  BaselineRun run;
  run.buffer = calibrated_buffer(std::move(residuals), alpha, run.rank);
  run.sets.reserve(test_laws.size());
  for (const auto& law : test_laws) {
    if (run.buffer == kInf) {
      run.sets.push_back(IntervalUnion::whole_line());
      continue;
    }
    const double lo = law->quantile(q_lo) - run.buffer;
    const double hi = law->quantile(q_hi) + run.buffer;
    run.sets.push_back(lo > hi ? IntervalUnion{} : normalize({{lo, hi}}));
  }
  return run;
}

BaselineRun run_dcp_qr(std::span<const LawPtr> calib_laws, std::span<const double> calib_y,
                       std::span<const LawPtr> test_laws, double alpha) {
  check_sizes(calib_laws, calib_y);
  const double q_lo = alpha / 2.0;
  const double q_hi = 1.0 - alpha / 2.0;
  std::vector<double> scores;
  scores.reserve(calib_y.size());
  for (std::size_t i = 0; i < calib_y.size(); ++i) scores.push_back(band_score(calib_laws[i]->cdf(calib_y[i]), q_lo, q_hi));
  BaselineRun run;
  run.buffer = calibrated_buffer(std::move(scores), alpha, run.rank);
  run.sets.reserve(test_laws.size());
  for (const auto& law : test_laws) {
    run.sets.push_back(run.buffer == kInf ? IntervalUnion::whole_line()
                                          : quantile_band(*law, q_lo - run.buffer, q_hi + run.buffer));
  }
  return run;
}

QuantilePair shortest_quantile_pair(const QuantileGrid& grid, double alpha) {
  const int L = grid.L();
  const int w = std::min(L, static_cast<int>(std::ceil((1.0 - alpha) * L - 1e-9)));
  int first = 1;
  int last = L - 1 - w;
  if (last < first) {
    first = 0;
    last = L - w;
  }
  QuantilePair best{first, first + w, L};
  double best_len = kInf;
  for (int l = first; l <= last; ++l) {
    const double len = grid.levels[static_cast<std::size_t>(l + w)] - grid.levels[static_cast<std::size_t>(l)];
    if (len < best_len) {
      best_len = len;
      best = {l, l + w, L};
    }
  }
  return best;
}

BaselineRun run_dcp_qr_star(std::span<const LawPtr> calib_laws, std::span<const QuantileGrid> calib_grids,
                            std::span<const double> calib_y, std::span<const LawPtr> test_laws,
                            std::span<const QuantileGrid> test_grids, double alpha) {
  check_sizes(calib_laws, calib_y);
  if (calib_grids.size() != calib_laws.size() || test_grids.size() != test_laws.size()) {
    throw ConfigError("dcp_qr_star: grid/law count mismatch");
  }
  std::vector<double> scores;
  scores.reserve(calib_y.size());
  for (std::size_t i = 0; i < calib_y.size(); ++i) {
    const auto pair = shortest_quantile_pair(calib_grids[i], alpha);
    scores.push_back(band_score(calib_laws[i]->cdf(calib_y[i]), pair.q_low(), pair.q_high()));
  }
  BaselineRun run;
  run.buffer = calibrated_buffer(std::move(scores), alpha, run.rank);
  run.sets.reserve(test_laws.size());
  for (std::size_t i = 0; i < test_laws.size(); ++i) {
    if (run.buffer == kInf) {
      run.sets.push_back(IntervalUnion::whole_line());
      continue;
    }
    const auto pair = shortest_quantile_pair(test_grids[i], alpha);
    run.sets.push_back(quantile_band(*test_laws[i], pair.q_low() - run.buffer, pair.q_high() + run.buffer));
  }
  return run;
}

BaselineRun run_dcp_qr_star(std::span<const LawPtr> calib_laws, std::span<const double> calib_y,
                            std::span<const LawPtr> test_laws, double alpha, int L) {
  const auto cg = grids_for(calib_laws, L);
  const auto tg = grids_for(test_laws, L);
  return run_dcp_qr_star(calib_laws, cg, calib_y, test_laws, tg, alpha);
}

}  // namespace volopt
