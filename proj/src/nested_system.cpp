#include "volopt/nested_system.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "volopt/error.hpp"
#include "volopt/interval_dp.hpp"

namespace volopt {
namespace {

std::size_t level_target(int j, int m, std::size_t n) {
  return static_cast<std::size_t>(std::ceil(static_cast<double>(j) * static_cast<double>(n) / m - 1e-9));
}

}  // namespace

double NestedConfig::resolved_delta(std::size_t n) const {
  if (delta) return *delta;
  const double nn = static_cast<double>(n);
  return std::sqrt((k + std::log(nn)) / nn);
}

double NestedConfig::resolved_gamma() const { return gamma.value_or(1.0 / m); }

NestedSystem build_nested(const SortedSample& s, const NestedConfig& cfg) {
  if (cfg.m < 2) throw ConfigError("build_nested: m must be >= 2");
  if (cfg.k < 1) throw ConfigError("build_nested: k must be >= 1");
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw ConfigError("build_nested: alpha must lie in (0, 1)");
  if (s.empty()) throw ConfigError("build_nested: empty sample");

  const std::size_t n = s.size();
  const std::size_t n_ref = cfg.reference_n.value_or(n);
  if (n_ref == 0) throw ConfigError("build_nested: reference_n must be positive");

  NestedSystem ns;
  ns.delta = cfg.resolved_delta(n_ref);
  ns.gamma = cfg.resolved_gamma();
  if (!(ns.delta >= 0.0)) throw ConfigError("build_nested: delta must be >= 0");
  if (!(ns.gamma > 0.0 && ns.gamma <= 1.0)) throw ConfigError("build_nested: gamma must lie in (0, 1]");

  const double slack = 3.0 * ns.delta + ns.gamma + 1.0 / static_cast<double>(n_ref);
  if (slack > cfg.alpha) {
    std::ostringstream msg;
    msg << "3*delta + gamma + 1/n <= alpha violated: 3*" << ns.delta << " + " << ns.gamma << " + 1/" << n_ref
        << " = " << slack << " > " << cfg.alpha;
    ns.assumption_holds = false;
    ns.diagnostic = msg.str();
    if (cfg.strict) throw ConfigError("build_nested: " + ns.diagnostic);
  }

  const int m = cfg.m;
  const double raw = std::ceil((1.0 - cfg.alpha + 1.0 / static_cast<double>(n_ref) + 3.0 * ns.delta) * m - 1e-9);
  ns.j_star = static_cast<int>(std::clamp(raw, 1.0, static_cast<double>(m)));

  ns.levels.resize(static_cast<std::size_t>(m));
  ns.target_counts.resize(static_cast<std::size_t>(m));
  ns.achieved_counts.resize(static_cast<std::size_t>(m));
  for (int j = 1; j <= m; ++j) ns.target_counts[static_cast<std::size_t>(j - 1)] = level_target(j, m, n);

  // Bucket rounding costs up to one bucket per interval, which at j* = m
  // (full coverage) can force clusters to merge. A finer slack only tightens
  // the volume bound, so count resolution is used whenever the table fits.
  double dp_gamma = ns.gamma;
  const double per_point = 1.0 / static_cast<double>(n);
  const double exact_cells = static_cast<double>(std::min<std::size_t>(static_cast<std::size_t>(cfg.k), n)) *
                             static_cast<double>(n) * static_cast<double>(n + 1);
  if (per_point < dp_gamma && exact_cells <= static_cast<double>(kDefaultMaxDpCells)) dp_gamma = per_point;
  const DpResult dp = solve_dp_coverage(s, static_cast<double>(ns.j_star) / m, dp_gamma, cfg.k);
  ns.levels[static_cast<std::size_t>(ns.j_star - 1)] = dp.set;

  for (int j = ns.j_star + 1; j <= m; ++j) {
    const auto& below = ns.levels[static_cast<std::size_t>(j - 2)];
    ns.levels[static_cast<std::size_t>(j - 1)] = greedy_expand(below, s, ns.target_counts[static_cast<std::size_t>(j - 1)]);
  }
  for (int j = ns.j_star - 1; j >= 1; --j) {
    const auto& above = ns.levels[static_cast<std::size_t>(j)];
    ns.levels[static_cast<std::size_t>(j - 1)] = greedy_contract(above, s, ns.target_counts[static_cast<std::size_t>(j - 1)]);
  }
  for (std::size_t j = 0; j < ns.levels.size(); ++j) ns.achieved_counts[j] = count_covered(s, ns.levels[j]);
  return ns;
}

IntervalUnion greedy_expand(const IntervalUnion& current, const SortedSample& s, std::size_t target_count) {
  if (current.is_whole_line()) return current;
  target_count = std::min(target_count, s.size());
  std::size_t covered = count_covered(s, current);
  if (covered >= target_count) return current;
  if (current.empty()) throw std::invalid_argument("greedy_expand: cannot expand the empty set");

  std::vector<Interval> ivs = current.intervals();
  const auto y = s.values();
  constexpr double kInf = std::numeric_limits<double>::infinity();

  while (covered < target_count) {
    double best_dist = kInf;
    double best_point = kInf;
    std::size_t best_iv = 0;
    bool best_right = false;
    auto consider = [&](std::size_t r, double point, double dist, bool right) {
      if (dist < best_dist || (dist == best_dist && point < best_point)) {
        best_dist = dist;
        best_point = point;
        best_iv = r;
        best_right = right;
      }
    };
    for (std::size_t r = 0; r < ivs.size(); ++r) {
      auto lo_it = std::lower_bound(y.begin(), y.end(), ivs[r].lo);
      if (lo_it != y.begin()) {
        const double p = *(lo_it - 1);
        if (r == 0 || p > ivs[r - 1].hi) consider(r, p, ivs[r].lo - p, false);
      }
      auto hi_it = std::upper_bound(y.begin(), y.end(), ivs[r].hi);
      if (hi_it != y.end()) {
        const double p = *hi_it;
        if (r + 1 == ivs.size() || p < ivs[r + 1].lo) consider(r, p, p - ivs[r].hi, true);
      }
    }
    if (best_dist == kInf) break;  // every point covered
    if (best_right) {
      ivs[best_iv].hi = best_point;
    } else {
      ivs[best_iv].lo = best_point;
    }
    covered += s.count_between(best_point, best_point);
  }
  return normalize(std::move(ivs));
}

IntervalUnion greedy_contract(const IntervalUnion& current, const SortedSample& s, std::size_t target_count) {
  if (current.is_whole_line()) throw std::invalid_argument("greedy_contract: cannot contract the whole line");
  std::size_t covered = count_covered(s, current);
  if (covered <= target_count) return current;

  const auto y = s.values();
  std::vector<Interval> ivs;
  for (const auto& iv : current) {
    auto first = std::lower_bound(y.begin(), y.end(), iv.lo);
    auto last = std::upper_bound(y.begin(), y.end(), iv.hi);
    if (first != last) ivs.push_back({*first, *(last - 1)});
  }

  struct Candidate {
    double rate = -1.0;  // volume reduction per dropped point
    bool right = false;
    std::size_t iv = 0;
    std::size_t drop = 0;
  };

  while (covered > target_count && !ivs.empty()) {
    Candidate best;
    bool found = false;
    auto consider = [&](std::size_t r, bool right, double gain, std::size_t drop) {
      if (covered - drop < target_count) return;
      const double rate = gain / static_cast<double>(drop);
      // Lexicographic key (rate, right side, interval index), maximized.
      if (!found || rate > best.rate || (rate == best.rate && right >= best.right)) {
        best = {rate, right, r, drop};
        found = true;
      }
    };
    for (std::size_t r = 0; r < ivs.size(); ++r) {
      const Interval& iv = ivs[r];
      const std::size_t at_lo = s.count_between(iv.lo, iv.lo);
      if (iv.lo == iv.hi) {
        consider(r, true, 0.0, at_lo);
        continue;
      }
      auto up = std::upper_bound(y.begin(), y.end(), iv.lo);
      consider(r, false, *up - iv.lo, at_lo);
      auto down = std::lower_bound(y.begin(), y.end(), iv.hi);
      consider(r, true, iv.hi - *(down - 1), s.count_between(iv.hi, iv.hi));
    }
    if (!found) break;  // every removal would undershoot the target

    Interval& iv = ivs[best.iv];
    covered -= best.drop;
    if (iv.lo == iv.hi) {
      ivs.erase(ivs.begin() + static_cast<std::ptrdiff_t>(best.iv));
    } else if (best.right) {
      iv.hi = *(std::lower_bound(y.begin(), y.end(), iv.hi) - 1);
    } else {
      iv.lo = *std::upper_bound(y.begin(), y.end(), iv.lo);
    }
  }
  return normalize(std::move(ivs));
}

int score(const NestedSystem& ns, double y) {
  // Containment is monotone in j, so the smallest containing level is found
  // by bisection.
  int lo = 1;
  int hi = ns.m() + 1;
  while (lo < hi) {
    const int mid = lo + (hi - lo) / 2;
    if (contains(ns.level(mid), y)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return ns.m() - lo + 1;
}

IntervalUnion level_for_threshold(const NestedSystem& ns, int t) {
  if (t <= 0) return IntervalUnion::whole_line();
  if (t > ns.m()) return IntervalUnion{};
  return ns.level(ns.m() - t + 1);
}

nlohmann::json to_json(const NestedSystem& ns) {
  nlohmann::json levels = nlohmann::json::array();
  for (const auto& level : ns.levels) levels.push_back(to_json(level));
  return {{"m", ns.m()}, {"j_star", ns.j_star}, {"levels", levels}};
}

}  // namespace volopt
