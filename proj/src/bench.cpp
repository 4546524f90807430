#include "volopt/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "volopt/baselines.hpp"
#include "volopt/cdf.hpp"
#include "volopt/error.hpp"
#include "volopt/rng.hpp"
#include "volopt/split_conformal.hpp"
#include "volopt/supervised.hpp"
#include "volopt/synthetic.hpp"

namespace volopt {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_list(std::string_view s, char sep = ',') {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    auto item = trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (!item.empty()) out.push_back(item);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <class T>
T parse_value(std::string_view key, std::string_view s) {
  s = trim(s);
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError("config: bad value '" + std::string(s) + "' for " + std::string(key));
  }
  return v;
}

bool parse_bool(std::string_view key, std::string_view s) {
  s = trim(s);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError("config: bad boolean '" + std::string(s) + "' for " + std::string(key));
}

std::optional<double> parse_auto(std::string_view key, std::string_view s) {
  if (trim(s) == "auto") return std::nullopt;
  return parse_value<double>(key, s);
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

double parse_double_cell(std::string_view s) {
  if (s == "inf") return kInf;
  if (s == "-inf") return -kInf;
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  return parse_value<double>("csv", s);
}

std::string format_auto(const std::optional<double>& v) { return v ? format_double(*v) : "auto"; }

struct CdfChoice {
  enum Kind { oracle, empirical, knn, file } kind = oracle;
  std::size_t neighbors = 0;
  std::string path;
};

CdfChoice parse_cdf(std::string_view s) {
  CdfChoice c;
  if (s == "oracle") {
    c.kind = CdfChoice::oracle;
  } else if (s == "empirical") {
    c.kind = CdfChoice::empirical;
  } else if (s.starts_with("knn:")) {
    c.kind = CdfChoice::knn;
    c.neighbors = parse_value<std::size_t>("cdf", s.substr(4));
  } else if (s.starts_with("file:")) {
    c.kind = CdfChoice::file;
    c.path = std::string(s.substr(5));
    if (c.path.empty()) throw ConfigError("config: cdf=file: needs a path");
  } else {
    throw ConfigError("config: unknown cdf provider '" + std::string(s) + "'");
  }
  return c;
}

double clipped_volume(const IntervalUnion& set, double lo, double hi) {
  if (set.is_whole_line()) return hi - lo;
  double v = 0.0;
  for (const auto& iv : set) v += std::max(0.0, std::min(iv.hi, hi) - std::max(iv.lo, lo));
  return v;
}

struct Outcome {
  double coverage = 0.0;
  double volume = 0.0;  // mean over finite sets; NaN when none
  std::size_t n_infinite = 0;
  double ms = 0.0;
};

class VolumeTally {
 public:
  VolumeTally(bool clip, double lo, double hi) : clip_(clip), lo_(lo), hi_(hi) {}
  void add(const IntervalUnion& set) {
    double v = volume(set);
    if (std::isinf(v)) {
      if (!clip_) {
        ++infinite_;
        return;
      }
      v = clipped_volume(set, lo_, hi_);
    }
    sum_ += v;
    ++finite_;
  }
  double mean() const { return finite_ ? sum_ / static_cast<double>(finite_) : std::numeric_limits<double>::quiet_NaN(); }
  std::size_t infinite() const { return infinite_; }

 private:
  bool clip_;
  double lo_, hi_;
  double sum_ = 0.0;
  std::size_t finite_ = 0;
  std::size_t infinite_ = 0;
};

using Clock = std::chrono::steady_clock;
double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::vector<Outcome> run_unsupervised_rep(const ExperimentConfig& cfg, const DistributionSpec& spec,
                                          std::uint64_t seed_r, PlotData* plot) {
  const LabeledData data = sample(spec, cfg.n_train + cfg.n_calib, derive_seed(seed_r, 1));
  const LabeledData test = sample(spec, cfg.n_test, derive_seed(seed_r, 2));
  const auto [train, calib] = split(data.labels(), derive_seed(seed_r, 3));
  const double lo = std::min(train.front(), calib.front());
  const double hi = std::max(train.back(), calib.back());

  std::vector<Outcome> out;
  for (Method method : cfg.methods) {
    const auto t0 = Clock::now();
    IntervalUnion set;
    if (method == Method::cp_dp) {
      NestedConfig nc;
      nc.k = cfg.k;
      nc.alpha = cfg.alpha;
      nc.m = cfg.m;
      nc.gamma = cfg.gamma;
      nc.delta = cfg.delta;
      nc.strict = cfg.strict;
      set = predict_from_halves(train, calib, nc).set;
    } else {
      set = cp_kde_from_halves(train, calib, cfg.alpha, KdeConfig{cfg.rho, cfg.kde_grid}).set;
    }
    Outcome o;
    o.ms = ms_since(t0);
    std::size_t covered = 0;
    for (double y : test.labels()) covered += contains(set, y) ? 1 : 0;
    o.coverage = static_cast<double>(covered) / static_cast<double>(test.size());
    VolumeTally tally(cfg.clip_whole_line, lo, hi);
    tally.add(set);
    o.volume = tally.mean();
    o.n_infinite = tally.infinite();
    out.push_back(o);
    if (plot) {
      plot->unsupervised.push_back({to_string(method), std::vector<double>(data.labels().begin(), data.labels().end()), set});
    }
  }
  return out;
}

struct SupervisedInputs {
  LabeledData calib;
  LabeledData test;
  std::vector<LawPtr> calib_laws;
  std::vector<LawPtr> test_laws;
  std::vector<QuantileGrid> calib_grids;
  std::vector<QuantileGrid> test_grids;
  double lo = 0.0;
  double hi = 0.0;
};

bool needs_grids(const ExperimentConfig& cfg) {
  return std::any_of(cfg.methods.begin(), cfg.methods.end(),
                     [](Method m) { return m == Method::dcp_dp || m == Method::dcp_qr_star; });
}

SupervisedInputs file_inputs(const ExperimentConfig& cfg) {
  SupervisedInputs in;
  in.calib = read_labeled_csv_file(cfg.calib_file);
  in.test = read_labeled_csv_file(cfg.test_file);
  auto grids = read_quantile_grids_file(parse_cdf(cfg.cdf).path);
  if (grids.size() != in.calib.size() + in.test.size()) {
    throw ConfigError("quantile grid file has " + std::to_string(grids.size()) + " points; expected " +
                      std::to_string(in.calib.size() + in.test.size()) + " (calibration rows, then test rows)");
  }
  for (std::size_t i = 0; i < grids.size(); ++i) {
    LawPtr law = std::make_shared<GridLaw>(grids[i].levels);
    (i < in.calib.size() ? in.calib_laws : in.test_laws).push_back(std::move(law));
    (i < in.calib.size() ? in.calib_grids : in.test_grids).push_back(std::move(grids[i]));
  }
  in.lo = std::min(in.calib.y.minCoeff(), in.test.y.minCoeff());
  in.hi = std::max(in.calib.y.maxCoeff(), in.test.y.maxCoeff());
  return in;
}

SupervisedInputs generated_inputs(const ExperimentConfig& cfg, const DistributionSpec& spec, std::uint64_t seed_r) {
  SupervisedInputs in;
  const LabeledData all = sample(spec, cfg.n_train + cfg.n_calib, derive_seed(seed_r, 1));
  in.test = sample(spec, cfg.n_test, derive_seed(seed_r, 2));
  const LabeledData train = all.slice(0, cfg.n_train);
  in.calib = all.slice(cfg.n_train, all.size());

  const CdfChoice choice = parse_cdf(cfg.cdf);
  std::shared_ptr<const ConditionalCdf> cdf;
  switch (choice.kind) {
    case CdfChoice::oracle:
      cdf = oracle_cdf(spec);
      break;
    case CdfChoice::empirical:
      cdf = empirical_cdf(SortedSample(std::vector<double>(train.labels().begin(), train.labels().end())));
      break;
    case CdfChoice::knn:
      cdf = knn_cdf(train, {choice.neighbors, cfg.knn_features});
      break;
    case CdfChoice::file:
      throw std::logic_error("file cdf handled separately");
  }
  if (cdf->fingerprint().overlaps(in.calib)) throw ConfigError("the conditional CDF was fitted on calibration data");
  in.calib_laws = laws_at(*cdf, in.calib.x);
  in.test_laws = laws_at(*cdf, in.test.x);
  if (needs_grids(cfg)) {
    const int L = cfg.L > 0 ? cfg.L : cfg.m;
    in.calib_grids = grids_for(in.calib_laws, L);
    in.test_grids = grids_for(in.test_laws, L);
  }
  in.lo = all.y.minCoeff();
  in.hi = all.y.maxCoeff();
  return in;
}

std::vector<Outcome> run_supervised_rep(const ExperimentConfig& cfg, const DistributionSpec& spec,
                                        std::uint64_t seed_r, PlotData* plot) {
  const auto t_setup = Clock::now();
  const SupervisedInputs in =
      parse_cdf(cfg.cdf).kind == CdfChoice::file ? file_inputs(cfg) : generated_inputs(cfg, spec, seed_r);
  const double setup_ms = ms_since(t_setup);

  std::vector<Outcome> out;
  for (Method method : cfg.methods) {
    const auto t0 = Clock::now();
    std::vector<IntervalUnion> sets;
    switch (method) {
      case Method::dcp_dp: {
        SupervisedConfig sc;
        sc.alpha = cfg.alpha;
        sc.k = cfg.k;
        sc.m = cfg.m;
        sc.L = cfg.L;
        sc.gamma = cfg.gamma;
        sc.delta = cfg.delta;
        sc.strict = cfg.strict;
        auto run = run_dcp_dp(in.calib_grids, in.calib.labels(), in.test_grids, sc);
        for (auto& p : run.predictions) sets.push_back(std::move(p.set));
        break;
      }
      case Method::cqr:
        sets = run_cqr(in.calib_laws, in.calib.labels(), in.test_laws, cfg.alpha).sets;
        break;
      case Method::dcp_qr:
        sets = run_dcp_qr(in.calib_laws, in.calib.labels(), in.test_laws, cfg.alpha).sets;
        break;
      case Method::dcp_qr_star:
        sets = run_dcp_qr_star(in.calib_laws, in.calib_grids, in.calib.labels(), in.test_laws, in.test_grids, cfg.alpha)
                   .sets;
        break;
      default:
        throw std::logic_error("unsupervised method in supervised run");
    }
    Outcome o;
    o.ms = ms_since(t0) + setup_ms;
    VolumeTally tally(cfg.clip_whole_line, in.lo, in.hi);
    std::size_t covered = 0;
    for (std::size_t i = 0; i < sets.size(); ++i) {
      covered += contains(sets[i], in.test.y(static_cast<Eigen::Index>(i))) ? 1 : 0;
      tally.add(sets[i]);
    }
    o.coverage = static_cast<double>(covered) / static_cast<double>(sets.size());
    o.volume = tally.mean();
    o.n_infinite = tally.infinite();
    out.push_back(o);
    if (plot) {
      PlotData::Supervised s;
      s.method = to_string(method);
      for (std::size_t i = 0; i < in.test.size(); ++i) {
        s.x.push_back(in.test.dim() ? in.test.x(static_cast<Eigen::Index>(i), 0) : 0.0);
        s.y.push_back(in.test.y(static_cast<Eigen::Index>(i)));
      }
      s.sets = std::move(sets);
      plot->supervised.push_back(std::move(s));
    }
  }
  return out;
}

void write_intervals_row(std::ostream& out, const IntervalUnion& set, std::size_t slots) {
  std::size_t used = 0;
  if (set.is_whole_line()) {
    out << ",-inf,inf";
    used = 1;
  } else {
    for (const auto& iv : set) {
      out << ',' << format_double(iv.lo) << ',' << format_double(iv.hi);
      ++used;
    }
  }
  for (; used < slots; ++used) out << ",,";
}


}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::cp_dp: return "cp_dp";
    case Method::cp_kde: return "cp_kde";
    case Method::cqr: return "cqr";
    case Method::dcp_qr: return "dcp_qr";
    case Method::dcp_qr_star: return "dcp_qr_star";
    case Method::dcp_dp: return "dcp_dp";
  }
  return "?";
}

Method parse_method(std::string_view s) {
  for (Method m : {Method::cp_dp, Method::cp_kde, Method::cqr, Method::dcp_qr, Method::dcp_qr_star, Method::dcp_dp}) {
    if (to_string(m) == s) return m;
  }
  throw ConfigError("unknown method '" + std::string(s) + "'");
}

bool is_supervised(Method m) { return m != Method::cp_dp && m != Method::cp_kde; }

void ExperimentConfig::set(std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key == "distribution") {
    distribution = std::string(value);
  } else if (key == "method" || key == "methods") {
    methods.clear();
    for (auto item : split_list(value)) methods.push_back(parse_method(item));
  } else if (key == "alpha") {
    alpha = parse_value<double>(key, value);
  } else if (key == "k") {
    k = parse_value<int>(key, value);
  } else if (key == "m") {
    m = parse_value<int>(key, value);
  } else if (key == "gamma") {
    gamma = parse_auto(key, value);
  } else if (key == "delta") {
    delta = parse_auto(key, value);
  } else if (key == "rho") {
    rho = parse_value<double>(key, value);
  } else if (key == "cdf") {
    cdf = std::string(value);
  } else if (key == "knn_features") {
    knn_features.clear();
    for (auto item : split_list(value)) knn_features.push_back(parse_value<int>(key, item));
  } else if (key == "L") {
    L = parse_value<int>(key, value);
  } else if (key == "n_train") {
    n_train = parse_value<std::size_t>(key, value);
  } else if (key == "n_calib") {
    n_calib = parse_value<std::size_t>(key, value);
  } else if (key == "n_test") {
    n_test = parse_value<std::size_t>(key, value);
  } else if (key == "replications") {
    replications = parse_value<std::size_t>(key, value);
  } else if (key == "seed") {
    seed = parse_value<std::uint64_t>(key, value);
  } else if (key == "clip_whole_line") {
    clip_whole_line = parse_bool(key, value);
  } else if (key == "strict") {
    strict = parse_bool(key, value);
  } else if (key == "kde_grid") {
    kde_grid = parse_value<std::size_t>(key, value);
  } else if (key == "calib_file") {
    calib_file = std::string(value);
  } else if (key == "test_file") {
    test_file = std::string(value);
  } else {
    throw ConfigError("config: unknown key '" + std::string(key) + "'");
  }
}

void ExperimentConfig::validate() const {
  const DistributionSpec spec = parse_distribution(distribution);
  if (methods.empty()) throw ConfigError("config: no method");
  const bool supervised_spec = volopt::is_supervised(spec);
  const bool file_cdf = parse_cdf(cdf).kind == CdfChoice::file;
  for (Method mth : methods) {
    if (is_supervised(mth) && !supervised_spec && !file_cdf) {
      throw ConfigError("config: method " + to_string(mth) + " needs a supervised distribution");
    }
    if (!is_supervised(mth) && supervised_spec) {
      throw ConfigError("config: method " + to_string(mth) + " needs an unsupervised distribution");
    }
  }
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("config: alpha must lie in (0, 1)");
  if (k < 1) throw ConfigError("config: k must be >= 1");
  if (m < 2) throw ConfigError("config: m must be >= 2");
  if (gamma && !(*gamma > 0.0 && *gamma <= 1.0)) throw ConfigError("config: gamma must lie in (0, 1]");
  if (delta && !(*delta >= 0.0)) throw ConfigError("config: delta must be >= 0");
  if (L != 0 && L < 2) throw ConfigError("config: L must be >= 2 (or 0 for L = m)");
  if (replications < 1) throw ConfigError("config: replications must be >= 1");
  if (n_test < 1) throw ConfigError("config: n_test must be >= 1");
  if (kde_grid < 2) throw ConfigError("config: kde_grid must be >= 2");
  const bool any_kde = std::find(methods.begin(), methods.end(), Method::cp_kde) != methods.end();
  if (any_kde && !(rho > 0.0)) throw ConfigError("config: rho must be positive");
  if (!supervised_spec && n_train + n_calib < 4) throw ConfigError("config: n_train + n_calib must be >= 4");
  if (supervised_spec && !file_cdf) {
    if (n_calib < 1) throw ConfigError("config: n_calib must be >= 1");
    const CdfChoice c = parse_cdf(cdf);
    if (c.kind == CdfChoice::knn) {
      if (c.neighbors < 1 || c.neighbors > n_train) throw ConfigError("config: knn neighbors must lie in [1, n_train]");
      const int d = std::holds_alternative<IzbickiBimodal>(spec) ? std::get<IzbickiBimodal>(spec).dim : 1;
      for (int f : knn_features) {
        if (f < 0 || f >= d) throw ConfigError("config: knn feature out of range");
      }
    }
    if (c.kind != CdfChoice::oracle && n_train < 1) throw ConfigError("config: n_train must be >= 1");
  }
  if (file_cdf && (calib_file.empty() || test_file.empty())) {
    throw ConfigError("config: cdf=file: requires calib_file and test_file");
  }
}

void ExperimentConfig::apply_paper_scale() {
  n_train = 1000;
  n_calib = 1000;
  n_test = 5000;
  replications = 100;
}

std::string ExperimentConfig::to_text() const {
  std::ostringstream os;
  std::string ms;
  for (std::size_t i = 0; i < methods.size(); ++i) ms += (i ? "," : "") + to_string(methods[i]);
  std::string feats;
  for (std::size_t i = 0; i < knn_features.size(); ++i) feats += (i ? "," : "") + std::to_string(knn_features[i]);
  os << "distribution=" << distribution << "\nmethod=" << ms << "\nalpha=" << format_double(alpha) << "\nk=" << k
     << "\nm=" << m << "\ngamma=" << format_auto(gamma) << "\ndelta=" << format_auto(delta)
     << "\nrho=" << format_double(rho) << "\ncdf=" << cdf << "\nknn_features=" << feats << "\nL=" << L
     << "\nn_train=" << n_train << "\nn_calib=" << n_calib << "\nn_test=" << n_test
     << "\nreplications=" << replications << "\nseed=" << seed << "\nclip_whole_line=" << (clip_whole_line ? "true" : "false")
     << "\nstrict=" << (strict ? "true" : "false") << "\nkde_grid=" << kde_grid << '\n';
  if (!calib_file.empty()) os << "calib_file=" << calib_file << '\n';
  if (!test_file.empty()) os << "test_file=" << test_file << '\n';
  return os.str();
}

ExperimentConfig ExperimentConfig::parse(std::istream& in) {
  ExperimentConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    std::string_view body = trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
    }
    cfg.set(body.substr(0, eq), body.substr(eq + 1));
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  return parse(in);
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg, unsigned workers, PlotData* plot) {
  cfg.validate();
  const DistributionSpec spec = parse_distribution(cfg.distribution);
  const bool file_cdf = parse_cdf(cfg.cdf).kind == CdfChoice::file;
  const bool supervised = volopt::is_supervised(spec) || file_cdf;
  const std::size_t reps = file_cdf ? 1 : cfg.replications;

  std::vector<std::vector<Outcome>> results(reps);
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  std::uint64_t failed_seed = 0;
  bool stop = false;

  auto worker = [&] {
    while (true) {
      const std::size_t r = next.fetch_add(1);
      if (r >= reps) return;
      {
        std::lock_guard lock(error_mutex);
        if (stop) return;
      }
      const std::uint64_t seed_r = cfg.seed + r;
      try {
        PlotData* p = (r == 0) ? plot : nullptr;
        results[r] = supervised ? run_supervised_rep(cfg, spec, seed_r, p) : run_unsupervised_rep(cfg, spec, seed_r, p);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error || seed_r < failed_seed) {
          error = std::current_exception();
          failed_seed = seed_r;
        }
        stop = true;
      }
    }
  };
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, reps));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) {
    try {
      std::rethrow_exception(error);
    } catch (const ConfigError& e) {
      throw ConfigError("replication with seed " + std::to_string(failed_seed) + " failed: " + e.what());
    } catch (const std::exception& e) {
      throw std::runtime_error("replication with seed " + std::to_string(failed_seed) + " failed: " + e.what());
    }
  }

  std::vector<ResultRow> rows;
  for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
    ResultRow row;
    row.method = to_string(cfg.methods[mi]);
    row.distribution = cfg.distribution;
    row.alpha = cfg.alpha;
    row.k = cfg.k;
    row.m = cfg.m;
    row.gamma = cfg.gamma;
    row.delta = cfg.delta;
    row.rho = cfg.rho;
    row.cdf = cfg.cdf;
    row.n_train = cfg.n_train;
    row.n_calib = cfg.n_calib;
    row.n_test = cfg.n_test;
    row.replications = reps;
    row.seed = cfg.seed;

    // Seed-ordered fold, so the aggregate does not depend on scheduling.
    double cov_sum = 0.0, cov_sq = 0.0, vol_sum = 0.0, vol_sq = 0.0;
    std::size_t vol_count = 0;
    for (const auto& rep : results) {
      const Outcome& o = rep[mi];
      cov_sum += o.coverage;
      cov_sq += o.coverage * o.coverage;
      row.wall_ms += o.ms;
      row.n_infinite += o.n_infinite;
      if (!std::isnan(o.volume)) {
        vol_sum += o.volume;
        vol_sq += o.volume * o.volume;
        ++vol_count;
      }
    }
    const double R = static_cast<double>(reps);
    const double cov_mean = cov_sum / R;
    row.coverage_pct = 100.0 * cov_mean;
    row.se_coverage = reps > 1 ? 100.0 * std::sqrt(std::max(0.0, (cov_sq - R * cov_mean * cov_mean) / (R - 1)) / R) : 0.0;
    if (vol_count == 0) {
      row.avg_volume = kInf;
      row.se_volume = 0.0;
    } else {
      const double V = static_cast<double>(vol_count);
      const double vol_mean = vol_sum / V;
      row.avg_volume = vol_mean;
      row.se_volume = vol_count > 1 ? std::sqrt(std::max(0.0, (vol_sq - V * vol_mean * vol_mean) / (V - 1)) / V) : 0.0;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<ResultRow> sweep(const ExperimentConfig& cfg, std::string_view parameter, const std::vector<double>& values,
                             unsigned workers) {
  if (parameter != "k" && parameter != "rho" && parameter != "alpha" && parameter != "n") {
    throw ConfigError("sweep: parameter must be one of k, rho, alpha, n");
  }
  if (values.empty()) throw ConfigError("sweep: no values");
  std::vector<ResultRow> rows;
  for (double v : values) {
    ExperimentConfig c = cfg;
    if (parameter == "k") {
      if (v != std::floor(v)) throw ConfigError("sweep: k must be an integer");
      c.k = static_cast<int>(v);
    } else if (parameter == "rho") {
      c.rho = v;
    } else if (parameter == "alpha") {
      c.alpha = v;
    } else {
      if (v != std::floor(v) || v < 2) throw ConfigError("sweep: n must be an integer >= 2");
      const auto n = static_cast<std::size_t>(v);
      c.n_train = (n + 1) / 2;
      c.n_calib = n / 2;
    }
    auto part = run_experiment(c, workers);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  return rows;
}

namespace {
constexpr const char* kCsvHeader =
    "method,distribution,alpha,k,m,gamma,delta,rho,cdf,n_train,n_calib,n_test,replications,seed,avg_volume,"
    "coverage_pct,se_volume,se_coverage,wall_ms,n_infinite";

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

std::vector<std::string> csv_cells(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  cells.push_back(std::move(cur));
  return cells;
}
}  // namespace

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    out << csv_quote(r.method) << ',' << csv_quote(r.distribution) << ',' << format_double(r.alpha) << ',' << r.k << ','
        << r.m << ',' << format_auto(r.gamma) << ',' << format_auto(r.delta) << ',' << format_double(r.rho) << ','
        << csv_quote(r.cdf) << ',' << r.n_train << ',' << r.n_calib << ',' << r.n_test << ',' << r.replications << ','
        << r.seed << ',' << format_double(r.avg_volume) << ',' << format_double(r.coverage_pct) << ','
        << format_double(r.se_volume) << ',' << format_double(r.se_coverage) << ',' << format_double(r.wall_ms) << ','
        << r.n_infinite << '\n';
  }
}

std::vector<ResultRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != kCsvHeader) throw ConfigError("results csv: unexpected header");
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto c = csv_cells(line);
    if (c.size() != 20) throw ConfigError("results csv: expected 20 columns");
    ResultRow r;
    r.method = c[0];
    r.distribution = c[1];
    r.alpha = parse_double_cell(c[2]);
    r.k = parse_value<int>("k", c[3]);
    r.m = parse_value<int>("m", c[4]);
    r.gamma = parse_auto("gamma", c[5]);
    r.delta = parse_auto("delta", c[6]);
    r.rho = parse_double_cell(c[7]);
    r.cdf = c[8];
    r.n_train = parse_value<std::size_t>("n_train", c[9]);
    r.n_calib = parse_value<std::size_t>("n_calib", c[10]);
    r.n_test = parse_value<std::size_t>("n_test", c[11]);
    r.replications = parse_value<std::size_t>("replications", c[12]);
    r.seed = parse_value<std::uint64_t>("seed", c[13]);
    r.avg_volume = parse_double_cell(c[14]);
    r.coverage_pct = parse_double_cell(c[15]);
    r.se_volume = parse_double_cell(c[16]);
    r.se_coverage = parse_double_cell(c[17]);
    r.wall_ms = parse_double_cell(c[18]);
    r.n_infinite = parse_value<std::size_t>("n_infinite", c[19]);
    rows.push_back(std::move(r));
  }
  return rows;
}

nlohmann::json to_json(const std::vector<ResultRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  auto num = [](double v) -> nlohmann::json {
    if (std::isfinite(v)) return v;
    return format_double(v);
  };
  auto opt = [&](const std::optional<double>& v) -> nlohmann::json { return v ? num(*v) : nlohmann::json("auto"); };
  for (const auto& r : rows) {
    arr.push_back({{"method", r.method},
                   {"distribution", r.distribution},
                   {"alpha", num(r.alpha)},
                   {"k", r.k},
                   {"m", r.m},
                   {"gamma", opt(r.gamma)},
                   {"delta", opt(r.delta)},
                   {"rho", num(r.rho)},
                   {"cdf", r.cdf},
                   {"n_train", r.n_train},
                   {"n_calib", r.n_calib},
                   {"n_test", r.n_test},
                   {"replications", r.replications},
                   {"seed", r.seed},
                   {"avg_volume", num(r.avg_volume)},
                   {"coverage_pct", num(r.coverage_pct)},
                   {"se_volume", num(r.se_volume)},
                   {"se_coverage", num(r.se_coverage)},
                   {"wall_ms", num(r.wall_ms)},
                   {"n_infinite", r.n_infinite}});
  }
  return arr;
}

std::vector<ResultRow> rows_from_json(const nlohmann::json& j) {
  auto num = [](const nlohmann::json& v) { return v.is_string() ? parse_double_cell(v.get<std::string>()) : v.get<double>(); };
  auto opt = [&](const nlohmann::json& v) -> std::optional<double> {
    if (v.is_string() && v.get<std::string>() == "auto") return std::nullopt;
    return num(v);
  };
  std::vector<ResultRow> rows;
  for (const auto& o : j) {
    ResultRow r;
    r.method = o.at("method").get<std::string>();
    r.distribution = o.at("distribution").get<std::string>();
    r.alpha = num(o.at("alpha"));
    r.k = o.at("k").get<int>();
    r.m = o.at("m").get<int>();
    r.gamma = opt(o.at("gamma"));
    r.delta = opt(o.at("delta"));
    r.rho = num(o.at("rho"));
    r.cdf = o.at("cdf").get<std::string>();
    r.n_train = o.at("n_train").get<std::size_t>();
    r.n_calib = o.at("n_calib").get<std::size_t>();
    r.n_test = o.at("n_test").get<std::size_t>();
    r.replications = o.at("replications").get<std::size_t>();
    r.seed = o.at("seed").get<std::uint64_t>();
    r.avg_volume = num(o.at("avg_volume"));
    r.coverage_pct = num(o.at("coverage_pct"));
    r.se_volume = num(o.at("se_volume"));
    r.se_coverage = num(o.at("se_coverage"));
    r.wall_ms = num(o.at("wall_ms"));
    r.n_infinite = o.at("n_infinite").get<std::size_t>();
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_table(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << std::left << std::setw(12) << "method" << std::setw(12) << "distribution" << std::right << std::setw(6) << "alpha"
      << std::setw(4) << "k" << std::setw(8) << "rho" << std::setw(12) << "volume" << std::setw(10) << "se"
      << std::setw(10) << "coverage" << std::setw(8) << "se" << std::setw(8) << "n_inf" << std::setw(11) << "wall_ms"
      << '\n';
  for (const auto& r : rows) {
    const std::string dist = r.distribution.substr(0, r.distribution.find(':'));
    out << std::left << std::setw(12) << r.method << std::setw(12) << dist << std::right << std::fixed
        << std::setprecision(2) << std::setw(6) << r.alpha << std::setw(4) << r.k << std::setprecision(3) << std::setw(8)
        << r.rho << std::setprecision(4) << std::setw(12) << r.avg_volume << std::setw(10) << r.se_volume
        << std::setprecision(1) << std::setw(10) << r.coverage_pct << std::setw(8) << r.se_coverage << std::setw(8)
        << r.n_infinite << std::setprecision(0) << std::setw(11) << r.wall_ms << '\n';
    out.unsetf(std::ios::floatfield);
  }
}

std::vector<std::string> write_plot_files(const std::string& dir, const PlotData& plot) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> paths;
  auto open = [&](const std::string& name) {
    const std::string path = (std::filesystem::path(dir) / name).string();
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    paths.push_back(path);
    return f;
  };
  for (const auto& u : plot.unsupervised) {
    {
      auto f = open("plot_" + u.method + "_histogram.csv");
      f << "bin_lo,bin_hi,count\n";
      if (!u.labels.empty()) {
        const auto [mn, mx] = std::minmax_element(u.labels.begin(), u.labels.end());
        const std::size_t bins = 60;
        const double width = (*mx > *mn) ? (*mx - *mn) / bins : 1.0;
        std::vector<std::size_t> counts(bins, 0);
        for (double y : u.labels) {
          auto b = static_cast<std::size_t>((y - *mn) / width);
          counts[std::min(b, bins - 1)]++;
        }
        for (std::size_t b = 0; b < bins; ++b) {
          f << format_double(*mn + width * b) << ',' << format_double(*mn + width * (b + 1)) << ',' << counts[b] << '\n';
        }
      }
    }
    auto f = open("plot_" + u.method + "_intervals.csv");
    f << "lo,hi\n";
    if (u.set.is_whole_line()) {
      f << "-inf,inf\n";
    } else {
      for (const auto& iv : u.set) f << format_double(iv.lo) << ',' << format_double(iv.hi) << '\n';
    }
  }
  for (const auto& s : plot.supervised) {
    std::size_t slots = 1;
    for (const auto& set : s.sets) slots = std::max(slots, set.size());
    auto f = open("plot_" + s.method + "_intervals.csv");
    f << "x,y";
    for (std::size_t i = 0; i < slots; ++i) f << ",lo_" << i << ",hi_" << i;
    f << '\n';
    for (std::size_t i = 0; i < s.sets.size(); ++i) {
      f << format_double(s.x[i]) << ',' << format_double(s.y[i]);
      write_intervals_row(f, s.sets[i], slots);
      f << '\n';
    }
  }
  return paths;
}

}  // namespace volopt
