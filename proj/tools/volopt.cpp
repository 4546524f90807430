#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "volopt/baselines.hpp"
#include "volopt/bench.hpp"
#include "volopt/error.hpp"
#include "volopt/split_conformal.hpp"
#include "volopt/supervised.hpp"
#include "volopt/synthetic.hpp"

namespace fs = std::filesystem;
using namespace volopt;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct CommonOptions {
  std::string config;
  std::vector<std::string> overrides;
  std::string out = "volopt_out";
  unsigned workers = 0;
  bool paper_scale = false;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "key=value experiment file");
  cmd->add_option("--set", o.overrides, "extra key=value settings, applied after --config");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--workers", o.workers, "worker threads (0: all cores)");
  cmd->add_flag("--paper-scale", o.paper_scale, "n_train = n_calib = 1000, n_test = 5000, 100 replications");
}

ExperimentConfig load_config(const CommonOptions& o, bool check_methods = true) {
  ExperimentConfig cfg = o.config.empty() ? ExperimentConfig{} : ExperimentConfig::from_file(o.config);
  for (const auto& kv : o.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (o.paper_scale) cfg.apply_paper_scale();
  if (const char* env = std::getenv("VOLOPT_SEED")) cfg.set("seed", env);
  if (check_methods) {
    cfg.validate();
  } else {
    validate(parse_distribution(cfg.distribution));
  }
  return cfg;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  return f;
}

void emit(const std::string& dir, const std::vector<ResultRow>& rows, const ExperimentConfig& cfg) {
  fs::create_directories(dir);
  {
    auto f = open_out(fs::path(dir) / "results.csv");
    write_csv(f, rows);
  }
  {
    auto f = open_out(fs::path(dir) / "results.json");
    f << to_json(rows).dump(2) << '\n';
  }
  {
    auto f = open_out(fs::path(dir) / "config.txt");
    f << cfg.to_text();
  }
  write_table(std::cout, rows);
  std::cout << "wrote " << (fs::path(dir) / "results.csv").string() << '\n';
}

std::vector<double> parse_values(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError("--values: not a number '" + item + "'");
    }
  }
  return out;
}

std::vector<double> read_single_column(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open data file " + path);
  std::vector<double> v;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    try {
      std::size_t used = 0;
      v.push_back(std::stod(line, &used));
    } catch (const std::exception&) {
      if (line_no == 1) continue;  // header
      throw ConfigError(path + " line " + std::to_string(line_no) + ": not a number");
    }
  }
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Volume-optimal conformal prediction sets"};
  app.require_subcommand(1);

  CommonOptions run_opts;
  auto* run = app.add_subcommand("run", "run an experiment and write results.csv/json plus plot data");
  add_common(run, run_opts);

  CommonOptions sweep_opts;
  std::string sweep_param;
  std::string sweep_values;
  auto* sw = app.add_subcommand("sweep", "run an experiment for each value of one parameter");
  add_common(sw, sweep_opts);
  sw->add_option("--param", sweep_param, "k | rho | alpha | n")->required();
  sw->add_option("--values", sweep_values, "comma-separated values")->required();

  CommonOptions gen_opts;
  std::size_t gen_n = 0;
  auto* gen = app.add_subcommand("datagen", "write a sampled dataset and its manifest");
  add_common(gen, gen_opts);
  gen->add_option("--n", gen_n, "sample size (default n_train + n_calib)");

  std::string oracle_dist = "mixture";
  double oracle_cov = 0.8;
  auto* orc = app.add_subcommand("oracle", "print the optimal volume at a coverage level");
  orc->add_option("--distribution", oracle_dist, "gaussian | censored | mixture[:...] | relu[:...]");
  orc->add_option("--coverage", oracle_cov, "probability mass to cover");

  std::string pred_data;
  std::string pred_method = "cp_dp";
  NestedConfig pred_cfg;
  double pred_rho = 0.5;
  std::uint64_t pred_seed = 1;
  auto* pred = app.add_subcommand("predict", "prediction set for a single-column data file");
  pred->add_option("--data", pred_data, "one value per line")->required();
  pred->add_option("--method", pred_method, "cp_dp | cp_kde");
  pred->add_option("--alpha", pred_cfg.alpha, "miscoverage");
  pred->add_option("--k", pred_cfg.k, "interval budget");
  pred->add_option("--m", pred_cfg.m, "nested levels");
  pred->add_option("--rho", pred_rho, "KDE bandwidth");
  pred->add_option("--seed", pred_seed, "split seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) {
      const ExperimentConfig cfg = load_config(run_opts);
      PlotData plot;
      const auto rows = run_experiment(cfg, run_opts.workers, &plot);
      emit(run_opts.out, rows, cfg);
      write_plot_files(run_opts.out, plot);
    } else if (*sw) {
      const ExperimentConfig cfg = load_config(sweep_opts);
      const auto rows = sweep(cfg, sweep_param, parse_values(sweep_values), sweep_opts.workers);
      emit(sweep_opts.out, rows, cfg);
    } else if (*gen) {
      const ExperimentConfig cfg = load_config(gen_opts, false);
      const std::size_t n = gen_n ? gen_n : cfg.n_train + cfg.n_calib;
      const auto spec = parse_distribution(cfg.distribution);
      const LabeledData d = sample(spec, n, cfg.seed);
      fs::create_directories(gen_opts.out);
      const fs::path data_path = fs::path(gen_opts.out) / "data.csv";
      {
        auto f = open_out(data_path);
        write_labeled_csv(f, d);
      }
      auto f = open_out(fs::path(gen_opts.out) / "manifest.json");
      const nlohmann::json manifest = {{"distribution", to_string(spec)}, {"seed", cfg.seed}, {"n", n}, {"file", "data.csv"}};
      f << manifest.dump(2) << '\n';
      std::cout << "wrote " << data_path.string() << '\n';
    } else if (*orc) {
      std::cout.precision(10);
      std::cout << opt_oracle(parse_distribution(oracle_dist), oracle_cov) << '\n';
    } else if (*pred) {
      if (const char* env = std::getenv("VOLOPT_SEED")) pred_seed = std::stoull(env);
      const auto data = read_single_column(pred_data);
      nlohmann::json out;
      if (pred_method == "cp_dp") {
        pred_cfg.strict = false;
        const PredictionSet p = predict_unsupervised(data, pred_cfg, pred_seed);
        out = {{"set", to_json(p.set)}, {"volume", volume(p.set)},   {"threshold", p.threshold},
               {"m", p.m},              {"delta", p.delta},           {"effective_gamma", p.effective_gamma},
               {"calibration_coverage", p.calibration_coverage},     {"seed", p.seed},
               {"warning", p.warning}};
      } else if (pred_method == "cp_kde") {
        const KdePrediction p = run_cp_kde(data, pred_cfg.alpha, KdeConfig{pred_rho}, pred_seed);
        out = {{"set", to_json(p.set)}, {"volume", volume(p.set)}, {"log_threshold", p.log_threshold},
               {"seed", p.seed},        {"warning", p.warning}};
      } else {
        throw ConfigError("predict: method must be cp_dp or cp_kde");
      }
      std::cout << out.dump(2) << '\n';
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
