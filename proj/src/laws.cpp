#include "volopt/laws.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "volopt/error.hpp"
#include "volopt/normal.hpp"

namespace volopt {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRelTol = 1e-10;
constexpr double kBracketSds = 6.0;

double tolerance(const Bracket& b) { return kRelTol * std::max({1.0, std::abs(b.lo), std::abs(b.hi)}); }

[[noreturn]] void non_monotone() { throw ConfigError("conditional CDF is not monotone in y"); }

// Bisection stops within tolerance of a jump; an atom inside the final
// bracket is the exact answer.
double snap_lower(const ConditionalLaw& law, const Bracket& b, double p) {
  for (const auto& a : law.atoms()) {
    if (a.value > b.lo && a.value <= b.hi && law.cdf(a.value) >= p) return a.value;
  }
  return b.hi;
}

double snap_upper(const ConditionalLaw& law, const Bracket& b, double p) {
  for (const auto& a : law.atoms()) {
    if (a.value > b.lo && a.value <= b.hi && law.cdf(a.value) > p) return a.value;
  }
  return b.lo;
}

}  // namespace

double ConditionalLaw::quantile(double p) const {
  Bracket b = bracket();
  double f_lo = cdf(b.lo);
  if (f_lo >= p) return b.lo;
  double f_hi = cdf(b.hi);
  if (f_hi < p) return b.hi;
  const double tol = tolerance(b);
  while (b.hi - b.lo > tol) {
    const double mid = 0.5 * (b.lo + b.hi);
    const double f = cdf(mid);
    if (f < f_lo || f > f_hi) non_monotone();
    if (f >= p) {
      b.hi = mid;
      f_hi = f;
    } else {
      b.lo = mid;
      f_lo = f;
    }
  }
  return snap_lower(*this, b, p);
}

double ConditionalLaw::upper_quantile(double p) const {
  Bracket b = bracket();
  double f_hi = cdf(b.hi);
  if (f_hi <= p) return b.hi;
  double f_lo = cdf(b.lo);
  if (f_lo > p) return b.lo;
  const double tol = tolerance(b);
  while (b.hi - b.lo > tol) {
    const double mid = 0.5 * (b.lo + b.hi);
    const double f = cdf(mid);
    if (f < f_lo || f > f_hi) non_monotone();
    if (f <= p) {
      b.lo = mid;
      f_lo = f;
    } else {
      b.hi = mid;
      f_hi = f;
    }
  }
  return snap_upper(*this, b, p);
}

// ---------------------------------------------------------------- mixture

GaussianMixtureLaw::GaussianMixtureLaw(std::vector<MixtureComponent> components)
    : components_(std::move(components)) {
  if (components_.empty()) throw ConfigError("GaussianMixtureLaw: no components");
  double total = 0.0;
  bracket_ = {kInf, -kInf};
  for (const auto& c : components_) {
    if (!(c.weight > 0.0)) throw ConfigError("GaussianMixtureLaw: weights must be positive");
    if (!(c.sd >= 0.0) || !std::isfinite(c.mean)) throw ConfigError("GaussianMixtureLaw: bad component");
    total += c.weight;
    bracket_.lo = std::min(bracket_.lo, c.mean - kBracketSds * c.sd);
    bracket_.hi = std::max(bracket_.hi, c.mean + kBracketSds * c.sd);
  }
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("GaussianMixtureLaw: weights must sum to 1");
  if (bracket_.lo == bracket_.hi) {
    bracket_.lo -= 1.0;
    bracket_.hi += 1.0;
  }
}

double GaussianMixtureLaw::cdf(double y) const {
  double f = 0.0;
  for (const auto& c : components_) {
    if (c.sd == 0.0) {
      if (c.mean <= y) f += c.weight;
    } else {
      f += c.weight * normal_cdf((y - c.mean) / c.sd);
    }
  }
  return std::min(f, 1.0);
}

std::vector<Atom> GaussianMixtureLaw::atoms() const {
  std::vector<Atom> out;
  for (const auto& c : components_) {
    if (c.sd == 0.0) out.push_back({c.mean, c.weight});
  }
  return out;
}

std::optional<double> GaussianMixtureLaw::density(double y) const {
  double d = 0.0;
  for (const auto& c : components_) {
    if (c.sd > 0.0) d += c.weight * normal_pdf((y - c.mean) / c.sd) / c.sd;
  }
  return d;
}

double GaussianMixtureLaw::quantile(double p) const {
  // Safeguarded Newton: every evaluation shrinks the bracket, and after each
  // Newton step a probe one tolerance away tries to close it.
  Bracket b = bracket_;
  if (cdf(b.lo) >= p) return b.lo;
  if (cdf(b.hi) < p) return b.hi;
  const double tol = tolerance(b);
  double x = 0.5 * (b.lo + b.hi);
  for (int iter = 0; iter < 400 && b.hi - b.lo > tol; ++iter) {
    const double f = cdf(x) - p;
    if (f >= 0.0) {
      b.hi = x;
    } else {
      b.lo = x;
    }
    if (b.hi - b.lo <= tol) break;
    const double probe = f >= 0.0 ? x - 0.5 * tol : x + 0.5 * tol;
    if (probe > b.lo && probe < b.hi) {
      if (cdf(probe) >= p) {
        b.hi = probe;
      } else {
        b.lo = probe;
      }
      if (b.hi - b.lo <= tol) break;
    }
    const double d = *density(x);
    const double step = d > 0.0 ? x - f / d : kInf;
    x = (step > b.lo && step < b.hi) ? step : 0.5 * (b.lo + b.hi);
  }
  return snap_lower(*this, b, p);
}

// ---------------------------------------------------------------- censored

double CensoredGaussianLaw::cdf(double y) const {
  if (y < 0.0) return 0.0;
  if (y >= 2.0) return 1.0;
  return normal_cdf(y - 1.0);
}

std::vector<Atom> CensoredGaussianLaw::atoms() const {
  const double m = normal_cdf(-1.0);
  return {{0.0, m}, {2.0, m}};
}

std::optional<double> CensoredGaussianLaw::density(double y) const {
  return (y > 0.0 && y < 2.0) ? normal_pdf(y - 1.0) : 0.0;
}

// ---------------------------------------------------------------- relu

ReluGaussianLaw::ReluGaussianLaw(std::vector<ReluTerm> terms) : terms_(std::move(terms)) {
  if (terms_.empty()) throw ConfigError("ReluGaussianLaw: no terms");
  std::vector<double> breaks;
  for (const auto& t : terms_) {
    if (!std::isfinite(t.a) || !std::isfinite(t.w) || !std::isfinite(t.b)) {
      throw ConfigError("ReluGaussianLaw: non-finite coefficient");
    }
    if (t.w != 0.0) breaks.push_back(-t.b / t.w);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  std::vector<double> edges{-kInf};
  edges.insert(edges.end(), breaks.begin(), breaks.end());
  edges.push_back(kInf);
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double lo = edges[i];
    const double hi = edges[i + 1];
    double probe = 0.0;
    if (std::isfinite(lo) && std::isfinite(hi)) {
      probe = 0.5 * (lo + hi);
    } else if (std::isfinite(lo)) {
      probe = lo + 1.0;
    } else if (std::isfinite(hi)) {
      probe = hi - 1.0;
    }
    Piece piece{lo, hi, 0.0, 0.0};
    for (const auto& t : terms_) {
      if (t.w * probe + t.b > 0.0) {
        piece.intercept += t.a * t.b;
        piece.slope += t.a * t.w;
      }
    }
    pieces_.push_back(piece);
  }

  for (const auto& p : pieces_) {
    if (std::abs(p.slope) > 1e-12) continue;
    const double mass = normal_cdf(p.z_hi) - normal_cdf(p.z_lo);
    if (mass <= 0.0) continue;
    auto it = std::find_if(atoms_.begin(), atoms_.end(),
                           [&](const Atom& a) { return std::abs(a.value - p.intercept) <= 1e-12; });
    if (it == atoms_.end()) {
      atoms_.push_back({p.intercept, mass});
    } else {
      it->mass += mass;
    }
  }
  std::sort(atoms_.begin(), atoms_.end(), [](const Atom& a, const Atom& b) { return a.value < b.value; });

  std::vector<double> zs{-8.5, 8.5};
  for (double z : breaks) {
    if (z > -8.5 && z < 8.5) zs.push_back(z);
  }
  bracket_ = {kInf, -kInf};
  for (double z : zs) {
    bracket_.lo = std::min(bracket_.lo, transform(z));
    bracket_.hi = std::max(bracket_.hi, transform(z));
  }
  if (bracket_.lo == bracket_.hi) {
    bracket_.lo -= 1.0;
    bracket_.hi += 1.0;
  }
}

double ReluGaussianLaw::transform(double z) const {
  double y = 0.0;
  for (const auto& t : terms_) y += t.a * std::max(t.w * z + t.b, 0.0);
  return y;
}

double ReluGaussianLaw::cdf(double y) const {
  double f = 0.0;
  for (const auto& p : pieces_) {
    if (std::abs(p.slope) <= 1e-12) {
      if (p.intercept <= y) f += normal_cdf(p.z_hi) - normal_cdf(p.z_lo);
      continue;
    }
    const double zc = (y - p.intercept) / p.slope;
    if (p.slope > 0.0) {
      const double top = std::min(p.z_hi, zc);
      if (top > p.z_lo) f += normal_cdf(top) - normal_cdf(p.z_lo);
    } else {
      const double bottom = std::max(p.z_lo, zc);
      if (bottom < p.z_hi) f += normal_cdf(p.z_hi) - normal_cdf(bottom);
    }
  }
  return std::clamp(f, 0.0, 1.0);
}

std::optional<double> ReluGaussianLaw::density(double y) const {
  double d = 0.0;
  for (const auto& p : pieces_) {
    if (std::abs(p.slope) <= 1e-12) continue;
    const double zc = (y - p.intercept) / p.slope;
    if (zc > p.z_lo && zc < p.z_hi) d += normal_pdf(zc) / std::abs(p.slope);
  }
  return d;
}

// ---------------------------------------------------------------- empirical

EmpiricalLaw::EmpiricalLaw(SortedSample sample) : sample_(std::move(sample)) {
  if (sample_.empty()) throw ConfigError("EmpiricalLaw: empty sample");
}

double EmpiricalLaw::cdf(double y) const {
  const auto v = sample_.values();
  return static_cast<double>(std::upper_bound(v.begin(), v.end(), y) - v.begin()) /
         static_cast<double>(v.size());
}

Bracket EmpiricalLaw::bracket() const {
  double span = sample_.back() - sample_.front();
  if (span <= 0.0) span = 1.0;
  return {sample_.front() - span, sample_.back() + span};
}

std::vector<Atom> EmpiricalLaw::atoms() const {
  std::vector<Atom> out;
  const double unit = 1.0 / static_cast<double>(sample_.size());
  for (double v : sample_.values()) {
    if (!out.empty() && out.back().value == v) {
      out.back().mass += unit;
    } else {
      out.push_back({v, unit});
    }
  }
  return out;
}

double EmpiricalLaw::quantile(double p) const {
  if (p <= 0.0) return bracket().lo;
  const double n = static_cast<double>(sample_.size());
  const double idx = std::clamp(std::ceil(p * n - 1e-9), 1.0, n);
  return sample_[static_cast<std::size_t>(idx) - 1];
}

double EmpiricalLaw::upper_quantile(double p) const {
  const double n = static_cast<double>(sample_.size());
  const double below = std::floor(p * n + 1e-9);
  if (below >= n) return bracket().hi;
  if (below < 0.0) return bracket().lo;
  return sample_[static_cast<std::size_t>(below)];
}

// ---------------------------------------------------------------- grid

GridLaw::GridLaw(std::vector<double> levels) : levels_(std::move(levels)) {
  if (levels_.size() < 2) throw ConfigError("GridLaw: need at least two levels");
  for (std::size_t i = 1; i < levels_.size(); ++i) {
    if (!(levels_[i] >= levels_[i - 1])) throw ConfigError("GridLaw: levels must be non-decreasing");
  }
}

double GridLaw::cdf(double y) const {
  const auto count = std::upper_bound(levels_.begin() + 1, levels_.end(), y) - (levels_.begin() + 1);
  return static_cast<double>(count) / static_cast<double>(levels_.size() - 1);
}

double GridLaw::quantile(double p) const {
  if (p <= 0.0) return levels_.front();
  const double L = static_cast<double>(levels_.size() - 1);
  const double idx = std::clamp(std::ceil(p * L - 1e-9), 1.0, L);
  return levels_[static_cast<std::size_t>(idx)];
}

double GridLaw::upper_quantile(double p) const {
  const double L = static_cast<double>(levels_.size() - 1);
  const double below = std::floor(p * L + 1e-9);
  if (below >= L) return levels_.back();
  if (below < 0.0) return levels_.front();
  return levels_[static_cast<std::size_t>(below) + 1];
}

// ---------------------------------------------------------------- level sets

LevelSet mixture_level_set(const GaussianMixtureLaw& law, double coverage) {
  if (!(coverage >= 0.0 && coverage <= 1.0)) throw ConfigError("mixture_level_set: coverage must lie in [0, 1]");
  std::vector<MixtureComponent> cont;
  std::vector<Atom> atoms = law.atoms();
  for (const auto& c : law.components()) {
    if (c.sd > 0.0) cont.push_back(c);
  }
  std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.mass > b.mass; });

  LevelSet out;
  std::vector<Interval> points;
  double need = coverage;
  for (const auto& a : atoms) {
    if (need <= 1e-15) break;
    points.push_back({a.value, a.value});
    need -= a.mass;
  }
  if (need <= 1e-15 || cont.empty()) {
    out.set = normalize(std::move(points));
    return out;
  }
  double cont_mass = 0.0;
  for (const auto& c : cont) cont_mass += c.weight;
  if (need >= cont_mass - 1e-15) {
    out.volume = kInf;
    out.set = IntervalUnion::whole_line();
    return out;
  }

  auto dens = [&](double y) {
    double d = 0.0;
    for (const auto& c : cont) d += c.weight * normal_pdf((y - c.mean) / c.sd) / c.sd;
    return d;
  };
  std::vector<double> grid;
  for (const auto& c : cont) {
    for (int i = -500; i <= 500; ++i) grid.push_back(c.mean + c.sd * 0.02 * i);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  std::vector<double> grid_dens(grid.size());
  double p_max = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid_dens[i] = dens(grid[i]);
    p_max = std::max(p_max, grid_dens[i]);
  }

  auto crossing = [&](double a, double b, double t) {
    // dens(a) and dens(b) straddle t.
    const bool a_above = dens(a) > t;
    for (int it = 0; it < 100 && b - a > 1e-13 * std::max(1.0, std::abs(a)); ++it) {
      const double mid = 0.5 * (a + b);
      if ((dens(mid) > t) == a_above) {
        a = mid;
      } else {
        b = mid;
      }
    }
    return 0.5 * (a + b);
  };
  auto superlevel = [&](double t) {
    std::vector<Interval> ivs;
    bool inside = false;
    double start = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const bool above = grid_dens[i] > t;
      if (above && !inside) {
        start = i == 0 ? grid[0] : crossing(grid[i - 1], grid[i], t);
        inside = true;
      } else if (!above && inside) {
        ivs.push_back({start, crossing(grid[i - 1], grid[i], t)});
        inside = false;
      }
    }
    if (inside) ivs.push_back({start, grid.back()});
    return ivs;
  };
  auto mass = [&](const std::vector<Interval>& ivs) {
    double m = 0.0;
    for (const auto& c : cont) {
      for (const auto& iv : ivs) m += c.weight * (normal_cdf((iv.hi - c.mean) / c.sd) - normal_cdf((iv.lo - c.mean) / c.sd));
    }
    return m;
  };

  double t_lo = 0.0;  // mass(t_lo) >= need
  double t_hi = p_max;
  for (int it = 0; it < 200 && t_hi - t_lo > 1e-15 * p_max; ++it) {
    const double t = 0.5 * (t_lo + t_hi);
    if (mass(superlevel(t)) >= need) {
      t_lo = t;
    } else {
      t_hi = t;
    }
  }
  std::vector<Interval> ivs = superlevel(t_lo);
  for (const auto& iv : ivs) out.volume += iv.length();
  ivs.insert(ivs.end(), points.begin(), points.end());
  out.set = normalize(std::move(ivs));
  return out;
}

double level_set_volume_by_cells(const ConditionalLaw& law, double coverage, std::size_t cells) {
  if (cells == 0) throw ConfigError("level_set_volume_by_cells: cells must be positive");
  const Bracket b = law.bracket();
  std::vector<Atom> atoms = law.atoms();
  std::sort(atoms.begin(), atoms.end(), [](const Atom& x, const Atom& y) { return x.value < y.value; });
  double need = coverage;
  for (const auto& a : atoms) need -= a.mass;
  if (need <= 1e-15) return 0.0;

  const double h = (b.hi - b.lo) / static_cast<double>(cells);
  std::vector<double> cont(cells);
  double prev = law.cdf(b.lo);
  std::size_t next_atom = 0;
  while (next_atom < atoms.size() && atoms[next_atom].value <= b.lo) ++next_atom;
  for (std::size_t i = 0; i < cells; ++i) {
    const double right = i + 1 == cells ? b.hi : b.lo + h * static_cast<double>(i + 1);
    const double cur = law.cdf(right);
    double m = cur - prev;
    while (next_atom < atoms.size() && atoms[next_atom].value <= right) m -= atoms[next_atom++].mass;
    cont[i] = std::max(m, 0.0);
    prev = cur;
  }
  std::sort(cont.begin(), cont.end(), std::greater<>());
  double acc = 0.0;
  double vol = 0.0;
  for (double m : cont) {
    if (m <= 0.0) break;
    if (acc + m >= need) return vol + h * (need - acc) / m;
    acc += m;
    vol += h;
  }
  return kInf;
}

}  // namespace volopt
