#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "volopt/bench.hpp"
#include "volopt/cdf.hpp"
#include "volopt/interval_dp.hpp"
#include "volopt/nested_system.hpp"
#include "volopt/supervised.hpp"
#include "volopt/synthetic.hpp"

using namespace volopt;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& detail, double seconds) {
  std::printf("AC%-2d %s  %s  (%.1fs)\n", id, pass ? "PASS" : "FAIL", detail.c_str(), seconds);
  std::fflush(stdout);
  if (!pass) ++failures;
}

template <class F>
void criterion(int id, F&& body) {
  const auto t0 = std::chrono::steady_clock::now();
  std::string detail;
  bool pass = false;
  try {
    pass = body(detail);
  } catch (const std::exception& e) {
    detail += std::string(" exception: ") + e.what();
  }
  report(id, pass, detail, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

const ResultRow& row(const std::vector<ResultRow>& rows, Method m) {
  for (const auto& r : rows)
    if (r.method == to_string(m)) return r;
  throw std::runtime_error("missing method row");
}

ExperimentConfig mixture_config() {
  ExperimentConfig c;
  c.distribution = "mixture";
  c.alpha = 0.2;
  c.k = 3;
  c.rho = 0.5;
  c.n_train = 300;  // n = 600 split in halves
  c.n_calib = 300;
  c.n_test = 1000;
  c.replications = 20;
  return c;
}

ExperimentConfig romano_config() {
  ExperimentConfig c;
  c.distribution = "romano";
  c.cdf = "oracle";
  c.alpha = 0.3;
  c.k = 5;
  c.n_train = 300;
  c.n_calib = 300;
  c.n_test = 1000;
  c.replications = 20;
  return c;
}

bool ac1(std::string& d) {
  std::mt19937_64 rng(20240601);
  std::size_t bad_cover = 0, bad_volume = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 3 + rng() % 13;
    const int k = 1 + trial % 3;
    std::vector<double> v(n);
    std::normal_distribution<double> N(0, 1);
    for (auto& x : v) x = (rng() % 3 == 0 ? 4.0 : 0.0) + N(rng);
    SortedSample s(v);
    const double gamma = 1.0 / static_cast<double>(n);
    const double alpha = gamma + (0.6 - gamma) * std::uniform_real_distribution<double>(0.01, 1)(rng);
    auto r = solve_dp(s, DpConfig{.alpha = alpha, .gamma = gamma, .k = k});
    const auto need = static_cast<std::size_t>(std::ceil((1 - alpha) * static_cast<double>(n) - 1e-9));
    const auto need_plus = std::min(n, static_cast<std::size_t>(std::ceil((1 - alpha + gamma) * static_cast<double>(n) - 1e-9)));
    if (r.covered < need) ++bad_cover;
    if (volume(r.set) > volume(brute_force_opt_k(s, need_plus, k))) ++bad_volume;
  }
  d = "500 instances: coverage violations " + std::to_string(bad_cover) + ", volume violations " +
      std::to_string(bad_volume);
  return bad_cover == 0 && bad_volume == 0;
}

bool ac2(std::string& d) {
  const double g = opt_oracle(StandardGaussian{}, 0.3);
  const double m = opt_oracle(three_component_mixture(), 0.8);
  const double c = opt_oracle(CensoredGaussian{}, 0.3);
  d = fmt("N(0,1)@0.3=%.4f", g) + fmt(" mixture@0.8=%.4f", m) + fmt(" censored@0.3=%g", c);
  return std::abs(g - 0.7706) <= 1e-3 && std::abs(m - 3.0178) <= 1e-2 && c == 0.0;
}

std::vector<ResultRow> mixture_rows;

bool ac3(std::string& d) {
  auto c = mixture_config();
  c.methods = {Method::cp_dp, Method::cp_kde};
  mixture_rows = run_experiment(c);
  const auto& dp = row(mixture_rows, Method::cp_dp);
  const auto& kde = row(mixture_rows, Method::cp_kde);
  d = fmt("cp_dp volume %.4f in [3.02,3.50]", dp.avg_volume) + fmt(" coverage %.1f%% >= 77", dp.coverage_pct) +
      fmt("; cp_kde volume %.4f in [4.0,5.0]", kde.avg_volume);
  return dp.avg_volume >= 3.02 && dp.avg_volume <= 3.50 && dp.coverage_pct >= 77.0 && kde.avg_volume >= 4.0 &&
         kde.avg_volume <= 5.0;
}

bool ac4(std::string& d) {
  auto c = mixture_config();
  c.methods = {Method::cp_dp};
  double lo = 1e300, hi = 0;
  std::ostringstream ks;
  for (int k = 3; k <= 10; ++k) {
    c.k = k;
    const double v = run_experiment(c)[0].avg_volume;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    ks << (k == 3 ? "" : ",") << fmt("%.3f", v);
  }
  c.k = 3;
  c.methods = {Method::cp_kde};
  c.rho = 0.001;
  const double narrow = run_experiment(c)[0].avg_volume;
  c.rho = 0.5;
  const double wide = mixture_rows.empty() ? run_experiment(c)[0].avg_volume : row(mixture_rows, Method::cp_kde).avg_volume;
  const double spread = hi / lo - 1;
  d = "cp_dp k=3..10 [" + ks.str() + "] spread " + fmt("%.1f%% < 10%%", 100 * spread) +
      fmt("; kde rho=0.001/rho=0.5 = %.2f >= 2", narrow / wide);
  return spread < 0.10 && narrow >= 2 * wide;
}

bool ac5(std::string& d) {
  const double reps = 1000;
  bool ok = true;
  std::ostringstream out;
  auto check = [&](const std::vector<ResultRow>& rows, double alpha) {
    const double floor_pct = 100 * ((1 - alpha) - 3 * std::sqrt(alpha * (1 - alpha) / reps));
    for (const auto& r : rows) {
      const bool pass = r.coverage_pct >= floor_pct;
      ok &= pass;
      out << r.method << "/" << r.distribution << fmt(" %.2f%%", r.coverage_pct) << fmt(">=%.2f ", floor_pct);
    }
  };
  auto m = mixture_config();
  m.methods = {Method::cp_dp, Method::cp_kde};
  m.replications = 1000;
  m.n_test = 200;
  m.seed = 5000;
  check(run_experiment(m), m.alpha);

  auto r = romano_config();
  r.methods = {Method::dcp_dp, Method::cqr, Method::dcp_qr, Method::dcp_qr_star};
  r.replications = 1000;
  r.n_calib = 100;
  r.n_test = 20;
  r.seed = 9000;
  r.clip_whole_line = true;  // coverage counts every set, infinite or not
  check(run_experiment(r), r.alpha);
  d = out.str();
  return ok;
}

bool ac6(std::string& d) {
  auto c = romano_config();
  c.methods = {Method::dcp_dp, Method::dcp_qr_star, Method::dcp_qr};
  auto rows = run_experiment(c);
  const auto& dp = row(rows, Method::dcp_dp);
  const auto& star = row(rows, Method::dcp_qr_star);
  const auto& qr = row(rows, Method::dcp_qr);
  d = fmt("dcp_dp %.4f", dp.avg_volume) + fmt(" < dcp_qr_star %.4f", star.avg_volume) +
      fmt(" < dcp_qr %.4f", qr.avg_volume) + fmt("; coverage %.1f/", dp.coverage_pct) +
      fmt("%.1f/", star.coverage_pct) + fmt("%.1f%% >= 68", qr.coverage_pct) +
      "; infinite sets excluded from volume: " + std::to_string(star.n_infinite) + "/" +
      std::to_string(c.replications * c.n_test) + " for dcp_qr_star";
  return dp.avg_volume < star.avg_volume && star.avg_volume < qr.avg_volume && dp.avg_volume >= 0.3 &&
         dp.avg_volume <= 0.9 && star.avg_volume >= 1.0 && star.avg_volume <= 1.7 && dp.coverage_pct >= 68 &&
         star.coverage_pct >= 68 && qr.coverage_pct >= 68;
}

bool ac7(std::string& d) {
  ExperimentConfig c;
  c.distribution = "izbicki:20";
  c.methods = {Method::dcp_dp};
  c.cdf = "knn:50";
  c.knn_features = {0};
  c.alpha = 0.3;
  c.n_train = 1000;
  c.n_calib = 300;
  c.n_test = 1000;
  c.replications = 20;
  c.k = 1;
  const auto one = run_experiment(c)[0];
  c.k = 2;
  const auto two = run_experiment(c)[0];
  d = fmt("k=2 %.4f", two.avg_volume) + fmt(" < k=1 %.4f", one.avg_volume) + "; k=2 in [3.2,4.2]" +
      fmt("; coverage %.1f/", two.coverage_pct) + fmt("%.1f%% >= 68", one.coverage_pct);
  return two.avg_volume < one.avg_volume && two.avg_volume >= 3.2 && two.avg_volume <= 4.2 &&
         two.coverage_pct >= 68 && one.coverage_pct >= 68;
}

bool ac8(std::string& d) {
  std::mt19937_64 rng(777);
  std::size_t nest = 0, ladder = 0, duality = 0, budget = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 30 + rng() % 300;
    const int k = 1 + static_cast<int>(rng() % 5);
    const int m = 10 + static_cast<int>(rng() % 41);
    std::vector<double> v(n);
    std::normal_distribution<double> N(0, 1);
    const int modes = 1 + static_cast<int>(rng() % 4);
    for (auto& x : v) x = 6.0 * static_cast<double>(rng() % static_cast<unsigned>(modes)) + N(rng);
    SortedSample s(v);
    auto ns = build_nested(s, NestedConfig{.k = k, .alpha = 0.1 + 0.5 * (rng() % 100) / 100.0, .m = m,
                                           .strict = false});
    for (int j = 1; j <= m; ++j) {
      if (j > 1 && !is_subset(ns.level(j - 1), ns.level(j))) ++nest;
      if (ns.level(j).size() > static_cast<std::size_t>(k)) ++budget;
      const auto want = static_cast<std::size_t>(std::ceil(static_cast<double>(j) * n / m - 1e-9));
      if (count_covered(s, ns.level(j)) != want) ++ladder;
    }
    std::vector<double> probes(s.values().begin(), s.values().end());
    const double lo = s.front() - 1, hi = s.back() + 1;
    for (int i = 0; i <= 10'000; ++i) probes.push_back(lo + (hi - lo) * i / 10'000.0);
    for (double y : probes) {
      const int q = score(ns, y);
      for (int t = 0; t <= m + 1; ++t)
        if ((q >= t) != contains(level_for_threshold(ns, t), y)) ++duality;
    }
  }
  d = "200 samples: nesting " + std::to_string(nest) + ", ladder " + std::to_string(ladder) + ", interval budget " +
      std::to_string(budget) + ", score/level duality " + std::to_string(duality) + " violations";
  return nest == 0 && ladder == 0 && duality == 0 && budget == 0;
}

bool ac9(std::string& d) {
  const IzbickiBimodal spec{20};
  const double alpha = 0.3;
  const std::size_t n_calib = 1000;
  auto calib = sample(spec, n_calib, 31);
  auto test = sample(spec, 100, 32);
  auto cdf = oracle_cdf(spec);
  SupervisedConfig cfg{.alpha = alpha, .k = 2, .m = 50, .strict = false};
  auto run = run_dcp_dp(calib, test.x, *cdf, cfg);
  const double floor_cov = 1 - alpha - 3 * run.delta;
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> U(0, 1);
  int good = 0;
  double worst = 1;
  for (std::size_t i = 0; i < test.size(); ++i) {
    auto law = cdf->at(test.x.row(static_cast<Eigen::Index>(i)));
    int hit = 0;
    for (int r = 0; r < 10'000; ++r) hit += contains(run.predictions[i].set, law->quantile(U(rng)));
    const double cov = hit / 10'000.0;
    worst = std::min(worst, cov);
    good += cov >= floor_cov;
  }
  d = std::to_string(good) + "/100 x with coverage >= 1-alpha-3delta = " + fmt("%.3f", floor_cov) +
      fmt(" (worst %.3f); need 95", worst);
  return good >= 95;
}

}  // namespace

int main() {
  criterion(1, ac1);
  criterion(2, ac2);
  criterion(3, ac3);
  criterion(4, ac4);
  criterion(5, ac5);
  criterion(6, ac6);
  criterion(7, ac7);
  criterion(8, ac8);
  criterion(9, ac9);
  std::printf(
      "AC10 EXCLUDED  ReLU-Gaussian OPT 5.1361 and its plots (coefficients unknown) and the CD-split/HPD-split "
      "rows (external density-estimation stack); covered by criteria 1-9\n");
  std::printf("%d of 9 checked criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
