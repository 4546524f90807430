#include "volopt/interval_dp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "volopt/error.hpp"

namespace volopt {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRoundEps = 1e-9;

std::size_t ceil_count(double x) {
  double c = std::ceil(x - kRoundEps);
  return c <= 0.0 ? 0 : static_cast<std::size_t>(c);
}

// Bucket ledger: bucket l certifies ceil(l * width) covered points.
class Buckets {
 public:
  Buckets(std::size_t n, double width, std::size_t target) : need_(target + 1), prev_(n + 1, 0) {
    for (std::size_t l = 0; l <= target; ++l) need_[l] = std::min(n, ceil_count(l * width));
    // prev_[r] = smallest bucket whose requirement is >= r.
    std::size_t l = 0;
    for (std::size_t r = 0; r <= n; ++r) {
      while (l < target && need_[l] < r) ++l;
      prev_[r] = l;
    }
  }

  std::size_t need(std::size_t l) const { return need_[l]; }
  std::size_t remaining_bucket(std::size_t l, std::size_t covered) const {
    return covered >= need_[l] ? 0 : prev_[need_[l] - covered];
  }

 private:
  std::vector<std::size_t> need_;
  std::vector<std::size_t> prev_;
};

}  // namespace

void DpConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("DpConfig: alpha must lie in (0, 1)");
  if (!(gamma > 0.0 && gamma < alpha)) throw ConfigError("DpConfig: gamma must lie in (0, alpha)");
  if (k < 1) throw ConfigError("DpConfig: k must be >= 1");
}

DpResult solve_dp(const SortedSample& s, const DpConfig& cfg) {
  cfg.validate();
  return solve_dp_coverage(s, 1.0 - cfg.alpha, cfg.gamma, cfg.k, cfg.max_cells);
}

DpResult solve_dp_coverage(const SortedSample& s, double coverage, double gamma, int k,
                           std::size_t max_cells) {
  const std::size_t n = s.size();
  if (n == 0) throw ConfigError("solve_dp: empty sample");
  if (k < 1) throw ConfigError("solve_dp: k must be >= 1");
  if (!(coverage > 0.0 && coverage <= 1.0)) throw ConfigError("solve_dp: coverage must lie in (0, 1]");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("solve_dp: gamma must lie in (0, 1]");

  const double inv_gamma = std::ceil(1.0 / gamma - kRoundEps);
  const std::size_t num_buckets = static_cast<std::size_t>(inv_gamma);
  const double eff_gamma = 1.0 / inv_gamma;
  const std::size_t target = std::clamp<std::size_t>(ceil_count(coverage * inv_gamma), 1, num_buckets);
  const std::size_t kk = std::min<std::size_t>(static_cast<std::size_t>(k), n);
  const std::size_t width = target + 1;

  const double cells = static_cast<double>(kk) * static_cast<double>(n) * static_cast<double>(width);
  if (cells > static_cast<double>(max_cells)) {
    throw ConfigError("solve_dp: table of " + std::to_string(static_cast<std::uint64_t>(cells)) +
                      " cells exceeds the budget of " + std::to_string(max_cells) + "; raise gamma");
  }

  const Buckets buckets(n, eff_gamma * static_cast<double>(n), target);
  const auto y = s.values();
  auto at = [width](std::size_t j, std::size_t l) { return j * width + l; };

  // Backpointers for every layer; values for the current and previous layer.
  std::vector<std::vector<std::int32_t>> left(kk, std::vector<std::int32_t>(n * width, -1));
  std::vector<std::vector<std::int32_t>> prefix_arg(kk, std::vector<std::int32_t>(n * width, -1));
  std::vector<double> cost(n * width, kInf);
  std::vector<double> prefix(n * width, kInf);
  std::vector<double> best_per_layer(kk, kInf);
  std::vector<std::int32_t> best_end_per_layer(kk, -1);

  for (std::size_t i = 0; i < kk; ++i) {
    std::vector<double> next(n * width, kInf);
    for (std::size_t j = i; j < n; ++j) {
      for (std::size_t l = 0; l <= target; ++l) {
        double best = kInf;
        std::int32_t best_a = -1;
        if (i == 0) {
          const std::size_t r = buckets.need(l);
          if (r <= j + 1) {
            const std::size_t a = r == 0 ? j : j + 1 - r;
            best = y[j] - y[a];
            best_a = static_cast<std::int32_t>(a);
          }
        } else {
          for (std::size_t a = i; a <= j; ++a) {
            const std::size_t lp = buckets.remaining_bucket(l, j - a + 1);
            const double before = prefix[at(a - 1, lp)];
            if (before == kInf) continue;
            const double v = y[j] - y[a] + before;
            if (v < best) {
              best = v;
              best_a = static_cast<std::int32_t>(a);
            }
          }
        }
        next[at(j, l)] = best;
        left[i][at(j, l)] = best_a;
      }
    }
    cost.swap(next);

    // Running minimum over the right end of this layer's last interval.
    for (std::size_t l = 0; l <= target; ++l) {
      double run = kInf;
      std::int32_t arg = -1;
      for (std::size_t j = 0; j < n; ++j) {
        if (cost[at(j, l)] < run) {
          run = cost[at(j, l)];
          arg = static_cast<std::int32_t>(j);
        }
        prefix[at(j, l)] = run;
        prefix_arg[i][at(j, l)] = arg;
      }
    }
    best_per_layer[i] = prefix[at(n - 1, target)];
    best_end_per_layer[i] = prefix_arg[i][at(n - 1, target)];
  }

  // Fewest intervals among (numerically) equal minima.
  const double scale = std::max(1.0, y[n - 1] - y[0]);
  std::size_t layer = 0;
  for (std::size_t i = 1; i < kk; ++i) {
    if (best_per_layer[i] < best_per_layer[layer] - 1e-12 * scale) layer = i;
  }
  if (best_per_layer[layer] == kInf) {
    throw std::logic_error("solve_dp: no feasible solution (internal error)");
  }

  std::vector<Interval> out;
  std::size_t j = static_cast<std::size_t>(best_end_per_layer[layer]);
  std::size_t l = target;
  for (std::size_t i = layer + 1; i-- > 0;) {
    const std::size_t a = static_cast<std::size_t>(left[i][at(j, l)]);
    out.push_back({y[a], y[j]});
    if (i == 0) break;
    const std::size_t lp = buckets.remaining_bucket(l, j - a + 1);
    j = static_cast<std::size_t>(prefix_arg[i - 1][at(a - 1, lp)]);
    l = lp;
  }

  DpResult result;
  result.set = normalize(std::move(out));
  result.effective_gamma = eff_gamma;
  result.required = buckets.need(target);
  result.covered = count_covered(s, result.set);
  return result;
}

IntervalUnion brute_force_opt_k(const SortedSample& s, std::size_t cover_count, int k, std::size_t max_n) {
  const std::size_t n = s.size();
  if (n == 0 || n > max_n) throw ConfigError("brute_force_opt_k: sample size outside [1, max_n]");
  if (k < 1 || k > 3) throw ConfigError("brute_force_opt_k: k must lie in [1, 3]");
  if (cover_count < 1 || cover_count > n) throw ConfigError("brute_force_opt_k: cover_count outside [1, n]");

  const auto y = s.values();
  double best_volume = kInf;
  std::size_t best_count = 0;
  IntervalUnion best;
  std::vector<Interval> chosen;

  // Intervals by index, ordered and disjoint: a1 <= b1 < a2 <= b2 < ...
  auto search = [&](auto&& self, std::size_t first) -> void {
    if (!chosen.empty()) {
      IntervalUnion u = normalize(chosen);
      if (count_covered(s, u) >= cover_count) {
        const double v = volume(u);
        if (v < best_volume || (v == best_volume && u.size() < best_count)) {
          best_volume = v;
          best_count = u.size();
          best = std::move(u);
        }
      }
    }
    if (chosen.size() == static_cast<std::size_t>(k)) return;
    for (std::size_t a = first; a < n; ++a) {
      for (std::size_t b = a; b < n; ++b) {
        chosen.push_back({y[a], y[b]});
        self(self, b + 1);
        chosen.pop_back();
      }
    }
  };
  search(search, 0);
  return best;
}

EmpiricalOpt opt_k_empirical(const SortedSample& s, double coverage, int k, double gamma) {
  const DpResult r = solve_dp_coverage(s, coverage, gamma, k);
  return {volume(r.set), r.effective_gamma};
}

}  // namespace volopt
