#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "volopt/interval.hpp"

namespace volopt {

enum class Method { cp_dp, cp_kde, cqr, dcp_qr, dcp_qr_star, dcp_dp };

std::string to_string(Method m);
Method parse_method(std::string_view s);
bool is_supervised(Method m);

/// key=value text, one per line; '#' starts a comment.
struct ExperimentConfig {
  std::string distribution = "mixture";
  std::vector<Method> methods{Method::cp_dp};
  double alpha = 0.2;
  int k = 3;
  int m = 50;
  std::optional<double> gamma;  // default 1/m
  std::optional<double> delta;  // default sqrt((k + ln n) / n)
  double rho = 0.5;
  /// oracle | empirical | knn:<k_nn> | file:<grid csv>
  std::string cdf = "oracle";
  std::vector<int> knn_features;  // empty: all covariates
  int L = 0;                      // 0: L = m
  std::size_t n_train = 300;
  std::size_t n_calib = 300;
  std::size_t n_test = 1000;
  std::size_t replications = 20;
  std::uint64_t seed = 1;
  /// Report whole-line and half-line sets by their volume inside the range
  /// of the observed labels instead of counting them as infinite.
  bool clip_whole_line = false;
  /// Reject configurations violating 3 delta + gamma + 1/n <= alpha.
  bool strict = false;
  std::size_t kde_grid = 10'000;
  /// Labeled CSVs paired with cdf=file:<grid csv>; grid point ids index the
  /// calibration rows, then the test rows.
  std::string calib_file;
  std::string test_file;

  void set(std::string_view key, std::string_view value);
  void validate() const;
  /// n_train = n_calib = 1000, n_test = 5000, replications = 100.
  void apply_paper_scale();
  std::string to_text() const;

  static ExperimentConfig parse(std::istream& in);
  static ExperimentConfig from_file(const std::string& path);
};

struct ResultRow {
  std::string method;
  std::string distribution;
  double alpha = 0.0;
  int k = 0;
  int m = 0;
  std::optional<double> gamma;
  std::optional<double> delta;
  double rho = 0.0;
  std::string cdf;
  std::size_t n_train = 0;
  std::size_t n_calib = 0;
  std::size_t n_test = 0;
  std::size_t replications = 0;
  std::uint64_t seed = 0;
  /// Mean over replications of the mean finite set volume.
  double avg_volume = 0.0;
  double coverage_pct = 0.0;
  double se_volume = 0.0;
  double se_coverage = 0.0;
  double wall_ms = 0.0;
  /// Prediction sets of infinite volume, summed over replications.
  std::size_t n_infinite = 0;

  bool operator==(const ResultRow&) const = default;
};

/// Replication 0's prediction sets, for plotting.
struct PlotData {
  struct Unsupervised {
    std::string method;
    std::vector<double> labels;
    IntervalUnion set;
  };
  struct Supervised {
    std::string method;
    std::vector<double> x;  // first covariate
    std::vector<double> y;
    std::vector<IntervalUnion> sets;
  };
  std::vector<Unsupervised> unsupervised;
  std::vector<Supervised> supervised;
};

/// One row per configured method. Replication r uses seed + r; results do
/// not depend on `workers`.
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg, unsigned workers = 0, PlotData* plot = nullptr);

/// One run_experiment per value of k, rho, alpha or n (n splits evenly into
/// training and calibration sizes).
std::vector<ResultRow> sweep(const ExperimentConfig& cfg, std::string_view parameter, const std::vector<double>& values,
                             unsigned workers = 0);

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_csv(std::istream& in);
nlohmann::json to_json(const std::vector<ResultRow>& rows);
std::vector<ResultRow> rows_from_json(const nlohmann::json& j);
/// Aligned console table; coverage with one decimal.
void write_table(std::ostream& out, const std::vector<ResultRow>& rows);
/// plot_<method>_histogram.csv and plot_<method>_intervals.csv for
/// unsupervised runs; plot_<method>_intervals.csv with x,y,lo_i,hi_i columns
/// for supervised runs. Returns the written paths.
std::vector<std::string> write_plot_files(const std::string& dir, const PlotData& plot);

}  // namespace volopt
