#include "volopt/supervised.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "volopt/error.hpp"

namespace volopt {
namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    out.push_back(cell);
  }
  return out;
}

double to_double(const std::string& s, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("line " + std::to_string(line_no) + ": not a number: '" + s + "'");
  }
}

}  // namespace

QuantileGrid quantile_grid(const ConditionalLaw& law, int L) {
  if (L < 2) throw ConfigError("quantile_grid: L must be >= 2");
  QuantileGrid g;
  g.levels.resize(static_cast<std::size_t>(L) + 1);
  g.levels[0] = law.upper_quantile(0.0);
  for (int l = 1; l <= L; ++l) {
    g.levels[static_cast<std::size_t>(l)] = law.quantile(static_cast<double>(l) / L);
  }
  // Separate inversions can disagree in the last bit; the ladder must not.
  for (std::size_t l = 1; l < g.levels.size(); ++l) g.levels[l] = std::max(g.levels[l], g.levels[l - 1]);
  return g;
}

NestedSystem build_conditional_nested(const QuantileGrid& grid, const NestedConfig& cfg) {
  return build_nested(SortedSample(grid.upper_levels()), cfg);
}

std::vector<QuantileGrid> grids_for(std::span<const LawPtr> laws, int L) {
  std::vector<QuantileGrid> out;
  out.reserve(laws.size());
  for (const auto& law : laws) out.push_back(quantile_grid(*law, L));
  return out;
}

SupervisedRun run_dcp_dp(std::span<const QuantileGrid> calib_grids, std::span<const double> calib_y,
                         std::span<const QuantileGrid> test_grids, const SupervisedConfig& cfg) {
  if (calib_grids.empty()) throw ConfigError("run_dcp_dp: empty calibration set");
  if (calib_grids.size() != calib_y.size()) throw ConfigError("run_dcp_dp: grid/label count mismatch");

  NestedConfig nc;
  nc.k = cfg.k;
  nc.alpha = cfg.alpha;
  nc.m = cfg.m;
  nc.gamma = cfg.gamma;
  nc.delta = cfg.delta;
  nc.reference_n = calib_grids.size();
  nc.strict = cfg.strict;

  SupervisedRun run;
  std::vector<int> scores;
  scores.reserve(calib_grids.size());
  for (std::size_t i = 0; i < calib_grids.size(); ++i) {
    const NestedSystem ns = build_conditional_nested(calib_grids[i], nc);
    if (i == 0) {
      run.delta = ns.delta;
      run.gamma = ns.gamma;
      run.assumption_holds = ns.assumption_holds;
      run.diagnostic = ns.diagnostic;
    }
    scores.push_back(score_supervised(ns, calib_y[i]));
  }
  run.calibration = calibrate_scores(std::move(scores), cfg.alpha, cfg.m);

  run.predictions.reserve(test_grids.size());
  for (std::size_t i = 0; i < test_grids.size(); ++i) {
    const NestedSystem ns = build_conditional_nested(test_grids[i], nc);
    run.predictions.push_back({level_for_threshold(ns, run.calibration.threshold), run.calibration.threshold, i});
  }
  return run;
}

SupervisedRun run_dcp_dp(const LabeledData& calib, const CovariateMatrix& test_x, const ConditionalCdf& cdf,
                         const SupervisedConfig& cfg) {
  if (calib.size() == 0) throw ConfigError("run_dcp_dp: empty calibration set");
  if (cdf.fingerprint().overlaps(calib)) {
    throw ConfigError("run_dcp_dp: the conditional CDF was fitted on the calibration data");
  }
  const auto calib_laws = laws_at(cdf, calib.x);
  const auto test_laws = laws_at(cdf, test_x);
  const auto calib_grids = grids_for(calib_laws, cfg.grid_size());
  const auto test_grids = grids_for(test_laws, cfg.grid_size());
  return run_dcp_dp(calib_grids, calib.labels(), test_grids, cfg);
}

std::vector<QuantileGrid> read_quantile_grids(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ConfigError("quantile grid: empty input");
  const auto header = split_csv_line(line);
  if (header != std::vector<std::string>{"point_id", "level", "value"}) {
    throw ConfigError("quantile grid: header must be point_id,level,value");
  }
  std::map<long long, std::vector<std::pair<double, double>>> points;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 3) throw ConfigError("quantile grid line " + std::to_string(line_no) + ": expected 3 fields");
    const double id = to_double(cells[0], line_no);
    if (id != std::floor(id)) throw ConfigError("quantile grid line " + std::to_string(line_no) + ": non-integer point_id");
    points[static_cast<long long>(id)].emplace_back(to_double(cells[1], line_no), to_double(cells[2], line_no));
  }
  if (points.empty()) throw ConfigError("quantile grid: no rows");

  std::vector<QuantileGrid> out;
  for (auto& [id, rows] : points) {
    std::sort(rows.begin(), rows.end());
    const std::size_t L = rows.size() - 1;
    const std::string where = "quantile grid point " + std::to_string(id);
    if (L < 2) throw ConfigError(where + ": need levels 0, 1/L, ..., 1 with L >= 2");
    QuantileGrid g;
    for (std::size_t l = 0; l <= L; ++l) {
      const double expected = static_cast<double>(l) / static_cast<double>(L);
      if (std::abs(rows[l].first - expected) > 1e-9) throw ConfigError(where + ": levels do not form the 0..L/L ladder");
      if (l > 0 && rows[l].second < rows[l - 1].second) throw ConfigError(where + ": values decrease with level");
      g.levels.push_back(rows[l].second);
    }
    if (!out.empty() && out.front().L() != g.L()) throw ConfigError(where + ": grid size differs from other points");
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<QuantileGrid> read_quantile_grids_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open quantile grid file " + path);
  return read_quantile_grids(in);
}

void write_quantile_grids(std::ostream& out, std::span<const QuantileGrid> grids) {
  out << "point_id,level,value\n";
  out.precision(17);
  for (std::size_t i = 0; i < grids.size(); ++i) {
    const int L = grids[i].L();
    for (int l = 0; l <= L; ++l) {
      out << i << ',' << static_cast<double>(l) / L << ',' << grids[i].levels[static_cast<std::size_t>(l)] << '\n';
    }
  }
}

LabeledData read_labeled_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("labeled csv: empty input");
  const auto header = split_csv_line(line);
  if (header.empty() || header.back() != "y") throw ConfigError("labeled csv: last header column must be y");
  const std::size_t d = header.size() - 1;
  for (std::size_t c = 0; c < d; ++c) {
    if (header[c] != "x_" + std::to_string(c)) throw ConfigError("labeled csv: header must be x_0,...,x_{d-1},y");
  }
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != d + 1) throw ConfigError("labeled csv line " + std::to_string(line_no) + ": wrong field count");
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(to_double(c, line_no));
    rows.push_back(std::move(row));
  }
  LabeledData out;
  out.x.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
  out.y.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t c = 0; c < d; ++c) out.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = rows[i][c];
    out.y(static_cast<Eigen::Index>(i)) = rows[i][d];
  }
  return out;
}

LabeledData read_labeled_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open labeled data file " + path);
  return read_labeled_csv(in);
}

void write_labeled_csv(std::ostream& out, const LabeledData& d) {
  for (std::size_t c = 0; c < d.dim(); ++c) out << "x_" << c << ',';
  out << "y\n";
  out.precision(17);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    for (Eigen::Index c = 0; c < d.x.cols(); ++c) out << d.x(r, c) << ',';
    out << d.y(r) << '\n';
  }
}

}  // namespace volopt
