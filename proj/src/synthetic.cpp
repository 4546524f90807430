#include "volopt/synthetic.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <random>
#include <sstream>

#include "volopt/error.hpp"
#include "volopt/normal.hpp"
#include "volopt/rng.hpp"

namespace volopt {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_number(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError("distribution: cannot parse number '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::array<double, 3>> parse_triples(std::string_view body) {
  std::vector<std::array<double, 3>> out;
  for (auto item : split(body, ';')) {
    const auto fields = split(item, ',');
    if (fields.size() != 3) throw ConfigError("distribution: expected three comma-separated numbers per term");
    out.push_back({parse_number(fields[0]), parse_number(fields[1]), parse_number(fields[2])});
  }
  return out;
}

std::vector<MixtureComponent> romano_components(double x) {
  const double lambda = std::sin(x) * std::sin(x) + 0.1;
  const double s = 0.03 * x;
  const double wide = std::sqrt(s * s + 625.0);
  std::vector<MixtureComponent> out;
  double pk = std::exp(-lambda);
  double cum = 0.0;
  for (int k = 0; cum < 1.0 - 1e-12 && k < 200; ++k) {
    if (k > 0) pk *= lambda / k;
    cum += pk;
    out.push_back({0.99 * pk, static_cast<double>(k), s});
    out.push_back({0.01 * pk, static_cast<double>(k), wide});
  }
  for (auto& c : out) c.weight /= cum;
  return out;
}

struct IzbickiParams {
  double f, g, sd;
};

IzbickiParams izbicki_params(double x1) {
  const double f = (x1 - 1.0) * (x1 - 1.0) * (x1 + 1.0);
  const double g = x1 >= -0.5 ? 2.0 * std::sqrt(x1 + 0.5) : 0.0;
  return {f, g, std::sqrt(0.25 + std::abs(x1))};
}

}  // namespace

GaussianMixture three_component_mixture() {
  return {{{1.0 / 3, -6.0, 1e-4}, {1.0 / 3, 0.0, 1.0}, {1.0 / 3, 8.0, 0.25}}};
}

ReluGaussian default_relu() {
  return {{{2.0, 1.0, 0.5},
           {-1.5, 1.5, -0.5},
           {1.0, -2.0, 0.3},
           {-0.8, -1.0, -0.7},
           {1.2, 0.7, 1.0},
           {-2.5, 1.0, -1.2},
           {0.9, -1.3, 1.4}}};
}

bool is_supervised(const DistributionSpec& spec) {
  return std::holds_alternative<RomanoSynthetic>(spec) || std::holds_alternative<IzbickiBimodal>(spec);
}

void validate(const DistributionSpec& spec) {
  std::visit(Overloaded{
                 [](const GaussianMixture& m) {
                   if (m.components.empty()) throw ConfigError("mixture: no components");
                   double total = 0.0;
                   for (const auto& c : m.components) {
                     if (!(c.weight > 0.0)) throw ConfigError("mixture: weights must be positive");
                     if (!(c.variance > 0.0)) throw ConfigError("mixture: variances must be positive");
                     if (!std::isfinite(c.mean)) throw ConfigError("mixture: mean must be finite");
                     total += c.weight;
                   }
                   if (std::abs(total - 1.0) > 1e-6) throw ConfigError("mixture: weights must sum to 1");
                 },
                 [](const ReluGaussian& r) {
                   if (r.terms.empty()) throw ConfigError("relu: no terms");
                 },
                 [](const IzbickiBimodal& b) {
                   if (b.dim < 1) throw ConfigError("izbicki: dimension must be >= 1");
                 },
                 [](const auto&) {},
             },
             spec);
}

DistributionSpec parse_distribution(std::string_view text) {
  const auto colon = text.find(':');
  const std::string_view name = text.substr(0, colon);
  const std::string_view body = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  DistributionSpec spec;
  if (name == "gaussian") {
    spec = StandardGaussian{};
  } else if (name == "censored") {
    spec = CensoredGaussian{};
  } else if (name == "mixture") {
    if (body.empty()) {
      spec = three_component_mixture();
    } else {
      GaussianMixture m;
      for (const auto& t : parse_triples(body)) m.components.push_back({t[0], t[1], t[2]});
      spec = m;
    }
  } else if (name == "relu") {
    if (body.empty()) {
      spec = default_relu();
    } else {
      ReluGaussian r;
      for (const auto& t : parse_triples(body)) r.terms.push_back({t[0], t[1], t[2]});
      spec = r;
    }
  } else if (name == "romano") {
    spec = RomanoSynthetic{};
  } else if (name == "izbicki") {
    IzbickiBimodal b;
    if (!body.empty()) b.dim = static_cast<int>(parse_number(body));
    spec = b;
  } else {
    throw ConfigError("unknown distribution '" + std::string(text) + "'");
  }
  validate(spec);
  return spec;
}

std::string to_string(const DistributionSpec& spec) {
  std::ostringstream os;
  os.precision(17);
  std::visit(Overloaded{
                 [&](const StandardGaussian&) { os << "gaussian"; },
                 [&](const CensoredGaussian&) { os << "censored"; },
                 [&](const GaussianMixture& m) {
                   os << "mixture:";
                   for (std::size_t i = 0; i < m.components.size(); ++i) {
                     const auto& c = m.components[i];
                     os << (i ? ";" : "") << c.weight << ',' << c.mean << ',' << c.variance;
                   }
                 },
                 [&](const ReluGaussian& r) {
                   os << "relu:";
                   for (std::size_t i = 0; i < r.terms.size(); ++i) {
                     const auto& t = r.terms[i];
                     os << (i ? ";" : "") << t.a << ',' << t.w << ',' << t.b;
                   }
                 },
                 [&](const RomanoSynthetic&) { os << "romano"; },
                 [&](const IzbickiBimodal& b) { os << "izbicki:" << b.dim; },
             },
             spec);
  return os.str();
}

LabeledData sample(const DistributionSpec& spec, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw ConfigError("sample: n must be >= 1");
  validate(spec);
  Rng rng = make_rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  LabeledData d;
  d.y.resize(static_cast<Eigen::Index>(n));
  const auto N = static_cast<Eigen::Index>(n);

  std::visit(Overloaded{
                 [&](const StandardGaussian&) {
                   d.x.resize(N, 0);
                   for (Eigen::Index i = 0; i < N; ++i) d.y(i) = normal(rng);
                 },
                 [&](const CensoredGaussian&) {
                   d.x.resize(N, 0);
                   for (Eigen::Index i = 0; i < N; ++i) {
                     const double z = normal(rng);
                     d.y(i) = std::clamp(z + 1.0, 0.0, 2.0);  // relu(z + 1) - relu(z - 1), exact at the atoms
                   }
                 },
                 [&](const GaussianMixture& m) {
                   d.x.resize(N, 0);
                   std::vector<double> w;
                   for (const auto& c : m.components) w.push_back(c.weight);
                   std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
                   for (Eigen::Index i = 0; i < N; ++i) {
                     const auto& c = m.components[pick(rng)];
                     d.y(i) = c.mean + std::sqrt(c.variance) * normal(rng);
                   }
                 },
                 [&](const ReluGaussian& r) {
                   d.x.resize(N, 0);
                   const ReluGaussianLaw law(r.terms);
                   for (Eigen::Index i = 0; i < N; ++i) d.y(i) = law.transform(normal(rng));
                 },
                 [&](const RomanoSynthetic&) {
                   d.x.resize(N, 1);
                   std::uniform_real_distribution<double> ux(0.0, 5.0);
                   for (Eigen::Index i = 0; i < N; ++i) {
                     const double x = ux(rng);
                     std::poisson_distribution<int> pois(std::sin(x) * std::sin(x) + 0.1);
                     double y = pois(rng) + 0.03 * x * normal(rng);
                     const double u = unit(rng);
                     const double e2 = normal(rng);
                     if (u < 0.01) y += 25.0 * e2;
                     d.x(i, 0) = x;
                     d.y(i) = y;
                   }
                 },
                 [&](const IzbickiBimodal& b) {
                   d.x.resize(N, b.dim);
                   std::uniform_real_distribution<double> ux(-1.5, 1.5);
                   for (Eigen::Index i = 0; i < N; ++i) {
                     for (int c = 0; c < b.dim; ++c) d.x(i, c) = ux(rng);
                     const auto p = izbicki_params(d.x(i, 0));
                     const double sign = unit(rng) < 0.5 ? -1.0 : 1.0;
                     d.y(i) = p.f + sign * p.g + p.sd * normal(rng);
                   }
                 },
             },
             spec);
  return d;
}

std::unique_ptr<ConditionalLaw> conditional_law(const DistributionSpec& spec, CovariateRef x) {
  return std::visit(
      Overloaded{
          [](const StandardGaussian&) -> std::unique_ptr<ConditionalLaw> {
            return std::make_unique<GaussianMixtureLaw>(std::vector<MixtureComponent>{{1.0, 0.0, 1.0}});
          },
          [](const CensoredGaussian&) -> std::unique_ptr<ConditionalLaw> {
            return std::make_unique<CensoredGaussianLaw>();
          },
          [](const GaussianMixture& m) -> std::unique_ptr<ConditionalLaw> {
            std::vector<MixtureComponent> comps;
            for (const auto& c : m.components) comps.push_back({c.weight, c.mean, std::sqrt(c.variance)});
            return std::make_unique<GaussianMixtureLaw>(std::move(comps));
          },
          [](const ReluGaussian& r) -> std::unique_ptr<ConditionalLaw> {
            return std::make_unique<ReluGaussianLaw>(r.terms);
          },
          [&](const RomanoSynthetic&) -> std::unique_ptr<ConditionalLaw> {
            if (x.size() < 1) throw ConfigError("romano: covariate required");
            return std::make_unique<GaussianMixtureLaw>(romano_components(x(0)));
          },
          [&](const IzbickiBimodal&) -> std::unique_ptr<ConditionalLaw> {
            if (x.size() < 1) throw ConfigError("izbicki: covariate required");
            const auto p = izbicki_params(x(0));
            return std::make_unique<GaussianMixtureLaw>(
                std::vector<MixtureComponent>{{0.5, p.f - p.g, p.sd}, {0.5, p.f + p.g, p.sd}});
          },
      },
      spec);
}

double opt_oracle(const DistributionSpec& spec, double coverage) {
  if (!(coverage >= 0.0 && coverage <= 1.0)) throw ConfigError("opt_oracle: coverage must lie in [0, 1]");
  if (is_supervised(spec)) throw ConfigError("opt_oracle: only defined for unsupervised distributions");
  validate(spec);
  if (std::holds_alternative<CensoredGaussian>(spec)) {
    const double atom = normal_cdf(-1.0);
    const double need = coverage - 2.0 * atom;
    if (need <= 0.0) return 0.0;
    // The continuous part has density phi(y - 1) on (0, 2), symmetric about 1.
    if (need >= 1.0 - 2.0 * atom) return 2.0;
    return 2.0 * normal_quantile(0.5 * (1.0 + need));
  }
  if (const auto* r = std::get_if<ReluGaussian>(&spec)) {
    return level_set_volume_by_cells(ReluGaussianLaw(r->terms), coverage, 400'000);
  }
  const Covariate none(0);
  const auto law = conditional_law(spec, none);
  return mixture_level_set(static_cast<const GaussianMixtureLaw&>(*law), coverage).volume;
}

}  // namespace volopt
