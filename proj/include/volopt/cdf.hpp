#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "volopt/data.hpp"
#include "volopt/laws.hpp"
#include "volopt/synthetic.hpp"

namespace volopt {

using LawPtr = std::shared_ptr<const ConditionalLaw>;

/// Hashes of the rows an estimator was fitted on.
class DataFingerprint {
 public:
  DataFingerprint() = default;
  static DataFingerprint of_rows(const LabeledData& d);
  /// For estimators that only saw labels.
  static DataFingerprint of_labels(std::span<const double> labels);

  bool empty() const { return hashes_.empty(); }
  /// True when more than half of `d`'s rows (as a multiset) were seen.
  bool overlaps(const LabeledData& d) const;

 private:
  std::vector<std::uint64_t> hashes_;  // sorted
  bool labels_only_ = false;
};

/// x -> law of Y given X = x. Implementations are pure and reentrant.
class ConditionalCdf {
 public:
  virtual ~ConditionalCdf() = default;
  virtual LawPtr at(CovariateRef x) const = 0;

  double operator()(CovariateRef x, double y) const { return at(x)->cdf(y); }
  const DataFingerprint& fingerprint() const { return fingerprint_; }

 protected:
  DataFingerprint fingerprint_;
};

/// The covariate-independent step CDF of the labels.
std::shared_ptr<const ConditionalCdf> empirical_cdf(const SortedSample& train_labels);

struct KnnCdfConfig {
  std::size_t num_neighbors = 50;
  /// Covariate columns entering the Euclidean distance; empty means all.
  std::vector<int> features;
};

/// Empirical CDF of the labels of the nearest training covariates; distance
/// ties go to the lower training index.
std::shared_ptr<const ConditionalCdf> knn_cdf(const LabeledData& train, const KnnCdfConfig& cfg);

/// The generator's exact conditional law.
std::shared_ptr<const ConditionalCdf> oracle_cdf(const DistributionSpec& spec);

std::vector<LawPtr> laws_at(const ConditionalCdf& cdf, const CovariateMatrix& xs);

}  // namespace volopt
