#pragma once

#include <optional>
#include <span>
#include <vector>

#include "volopt/interval.hpp"

namespace volopt {

/// Finite search range for quantile inversion.
struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
};

struct Atom {
  double value = 0.0;
  double mass = 0.0;
};

/// A distribution on the real line given by its CDF.
class ConditionalLaw {
 public:
  virtual ~ConditionalLaw() = default;

  virtual double cdf(double y) const = 0;
  virtual Bracket bracket() const = 0;
  /// Point masses, if any.
  virtual std::vector<Atom> atoms() const { return {}; }
  /// Density of the continuous part when it is known in closed form.
  virtual std::optional<double> density(double /*y*/) const { return std::nullopt; }

  /// inf{y : F(y) >= p}, clipped to the bracket. Throws ConfigError when
  /// the CDF is found to decrease during the search.
  virtual double quantile(double p) const;
  /// sup{y : F(y) <= p}, clipped to the bracket.
  virtual double upper_quantile(double p) const;
};

struct MixtureComponent {
  double weight = 1.0;
  double mean = 0.0;
  double sd = 1.0;  // 0 makes the component an atom
};

class GaussianMixtureLaw final : public ConditionalLaw {
 public:
  explicit GaussianMixtureLaw(std::vector<MixtureComponent> components);

  double cdf(double y) const override;
  Bracket bracket() const override { return bracket_; }
  std::vector<Atom> atoms() const override;
  std::optional<double> density(double y) const override;
  double quantile(double p) const override;

  const std::vector<MixtureComponent>& components() const { return components_; }

 private:
  std::vector<MixtureComponent> components_;
  Bracket bracket_;
};

/// Y = relu(Z + 1) - relu(Z - 1), Z ~ N(0, 1): atoms of mass Phi(-1) at 0 and 2.
class CensoredGaussianLaw final : public ConditionalLaw {
 public:
  double cdf(double y) const override;
  Bracket bracket() const override { return {0.0, 2.0}; }
  std::vector<Atom> atoms() const override;
  std::optional<double> density(double y) const override;
};

struct ReluTerm {
  double a = 1.0;
  double w = 1.0;
  double b = 0.0;
};

/// Law of sum_j a_j relu(w_j Z + b_j), Z ~ N(0, 1). The map is piecewise
/// linear in Z, so the CDF is a finite sum of normal CDF differences and flat
/// pieces become atoms.
class ReluGaussianLaw final : public ConditionalLaw {
 public:
  explicit ReluGaussianLaw(std::vector<ReluTerm> terms);

  double cdf(double y) const override;
  Bracket bracket() const override { return bracket_; }
  std::vector<Atom> atoms() const override { return atoms_; }
  std::optional<double> density(double y) const override;

  double transform(double z) const;

 private:
  struct Piece {
    double z_lo, z_hi;  // open/closed ends do not matter for a continuous Z
    double intercept, slope;
  };
  std::vector<ReluTerm> terms_;
  std::vector<Piece> pieces_;
  std::vector<Atom> atoms_;
  Bracket bracket_;
};

/// Step CDF of a finite sample; quantiles are exact order statistics.
class EmpiricalLaw final : public ConditionalLaw {
 public:
  explicit EmpiricalLaw(SortedSample sample);

  double cdf(double y) const override;
  Bracket bracket() const override;
  std::vector<Atom> atoms() const override;
  double quantile(double p) const override;
  double upper_quantile(double p) const override;

  const SortedSample& sample() const { return sample_; }

 private:
  SortedSample sample_;
};

/// F(y) = (1/L) #{l >= 1 : Y_l <= y} of a quantile ladder Y_0 <= ... <= Y_L.
class GridLaw final : public ConditionalLaw {
 public:
  explicit GridLaw(std::vector<double> levels);

  double cdf(double y) const override;
  Bracket bracket() const override { return {levels_.front(), levels_.back()}; }
  double quantile(double p) const override;
  double upper_quantile(double p) const override;

 private:
  std::vector<double> levels_;
};

/// Smallest Lebesgue measure of a set of mass >= coverage, by bisection on
/// the density threshold of a Gaussian mixture. Atoms are taken first. The
/// minimizing set is returned alongside; for a k-component mixture it has at
/// most k intervals.
struct LevelSet {
  double volume = 0.0;
  IntervalUnion set;
};
LevelSet mixture_level_set(const GaussianMixtureLaw& law, double coverage);

/// Same quantity for an arbitrary law with known density, computed on
/// `cells` equal cells of the bracket: cells are taken in decreasing order of
/// average continuous density, the last one fractionally.
double level_set_volume_by_cells(const ConditionalLaw& law, double coverage, std::size_t cells);

}  // namespace volopt
