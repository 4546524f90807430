#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "volopt/data.hpp"
#include "volopt/laws.hpp"

namespace volopt {

struct StandardGaussian {};

/// Y = relu(Z + 1) - relu(Z - 1).
struct CensoredGaussian {};

struct GaussianMixture {
  struct Component {
    double weight;
    double mean;
    double variance;
  };
  std::vector<Component> components;
};

/// Y = sum_j a_j relu(w_j Z + b_j).
struct ReluGaussian {
  std::vector<ReluTerm> terms;
};

/// X ~ U[0, 5], Y = Pois(sin^2 X + 0.1) + 0.03 X e1 + 25 1{U < 0.01} e2.
struct RomanoSynthetic {};

/// X ~ U[-1.5, 1.5]^d, Y | X = 0.5 N(f - g, s2) + 0.5 N(f + g, s2) with
/// f = (X1 - 1)^2 (X1 + 1), g = 2 1{X1 >= -0.5} sqrt(X1 + 0.5), s2 = 1/4 + |X1|.
struct IzbickiBimodal {
  int dim = 20;
};

using DistributionSpec =
    std::variant<StandardGaussian, CensoredGaussian, GaussianMixture, ReluGaussian, RomanoSynthetic, IzbickiBimodal>;

/// (1/3) N(-6, 1e-4) + (1/3) N(0, 1) + (1/3) N(8, 0.25).
GaussianMixture three_component_mixture();
/// Seven fixed terms; see README for the coefficients and the oracle value.
ReluGaussian default_relu();

bool is_supervised(const DistributionSpec& spec);
void validate(const DistributionSpec& spec);

/// Names: gaussian, censored, mixture[:w,mean,var;...], relu[:a,w,b;...],
/// romano, izbicki[:d].
DistributionSpec parse_distribution(std::string_view text);
std::string to_string(const DistributionSpec& spec);

/// n draws. Unsupervised specs yield zero covariate columns.
LabeledData sample(const DistributionSpec& spec, std::size_t n, std::uint64_t seed);

/// Law of Y given X = x (x is ignored for unsupervised specs).
std::unique_ptr<ConditionalLaw> conditional_law(const DistributionSpec& spec, CovariateRef x);

/// Smallest volume of a set of probability >= coverage. Defined for the
/// unsupervised specs; the supervised ones are rejected.
double opt_oracle(const DistributionSpec& spec, double coverage);

}  // namespace volopt
