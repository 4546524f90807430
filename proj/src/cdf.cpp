#include "volopt/cdf.hpp"

#include <algorithm>
#include <numeric>

#include "volopt/error.hpp"

namespace volopt {
namespace {

class EmpiricalCdf final : public ConditionalCdf {
 public:
  explicit EmpiricalCdf(const SortedSample& labels) : law_(std::make_shared<EmpiricalLaw>(labels)) {
    fingerprint_ = DataFingerprint::of_labels(labels.values());
  }
  LawPtr at(CovariateRef) const override { return law_; }

 private:
  std::shared_ptr<const EmpiricalLaw> law_;
};

class KnnCdf final : public ConditionalCdf {
 public:
  KnnCdf(const LabeledData& train, KnnCdfConfig cfg) : cfg_(std::move(cfg)) {
    if (train.size() == 0) throw ConfigError("knn_cdf: empty training set");
    if (cfg_.num_neighbors < 1 || cfg_.num_neighbors > train.size()) {
      throw ConfigError("knn_cdf: num_neighbors must lie in [1, training size]");
    }
    if (cfg_.features.empty()) {
      cfg_.features.resize(train.dim());
      std::iota(cfg_.features.begin(), cfg_.features.end(), 0);
    }
    for (int f : cfg_.features) {
      if (f < 0 || static_cast<std::size_t>(f) >= train.dim()) throw ConfigError("knn_cdf: feature index out of range");
    }
    points_.resize(static_cast<Eigen::Index>(train.size()), static_cast<Eigen::Index>(cfg_.features.size()));
    for (std::size_t c = 0; c < cfg_.features.size(); ++c) {
      points_.col(static_cast<Eigen::Index>(c)) = train.x.col(cfg_.features[c]);
    }
    labels_.assign(train.y.data(), train.y.data() + train.size());
    fingerprint_ = DataFingerprint::of_rows(train);
  }

  LawPtr at(CovariateRef x) const override {
    Eigen::RowVectorXd q(static_cast<Eigen::Index>(cfg_.features.size()));
    for (std::size_t c = 0; c < cfg_.features.size(); ++c) {
      if (cfg_.features[c] >= x.size()) throw ConfigError("knn_cdf: query has too few covariates");
      q(static_cast<Eigen::Index>(c)) = x(cfg_.features[c]);
    }
    const Eigen::VectorXd dist = (points_.rowwise() - q).rowwise().squaredNorm();
    std::vector<std::size_t> idx(labels_.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    const auto kth = idx.begin() + static_cast<std::ptrdiff_t>(cfg_.num_neighbors);
    std::nth_element(idx.begin(), kth - 1, idx.end(), [&](std::size_t a, std::size_t b) {
      const double da = dist(static_cast<Eigen::Index>(a));
      const double db = dist(static_cast<Eigen::Index>(b));
      return da < db || (da == db && a < b);
    });
    std::vector<double> ys;
    ys.reserve(cfg_.num_neighbors);
    for (auto it = idx.begin(); it != kth; ++it) ys.push_back(labels_[*it]);
    return std::make_shared<EmpiricalLaw>(SortedSample(std::move(ys)));
  }

 private:
  KnnCdfConfig cfg_;
  CovariateMatrix points_;
  std::vector<double> labels_;
};

class OracleCdf final : public ConditionalCdf {
 public:
  explicit OracleCdf(DistributionSpec spec) : spec_(std::move(spec)) { validate(spec_); }
  LawPtr at(CovariateRef x) const override { return conditional_law(spec_, x); }

 private:
  DistributionSpec spec_;
};

std::size_t multiset_intersection(const std::vector<std::uint64_t>& a, std::vector<std::uint64_t> b) {
  std::sort(b.begin(), b.end());
  std::vector<std::uint64_t> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
  return common.size();
}

}  // namespace

DataFingerprint DataFingerprint::of_rows(const LabeledData& d) {
  DataFingerprint f;
  for (std::size_t i = 0; i < d.size(); ++i) f.hashes_.push_back(row_hash(d, i));
  std::sort(f.hashes_.begin(), f.hashes_.end());
  return f;
}

DataFingerprint DataFingerprint::of_labels(std::span<const double> labels) {
  DataFingerprint f;
  f.labels_only_ = true;
  for (double y : labels) f.hashes_.push_back(label_hash(y));
  std::sort(f.hashes_.begin(), f.hashes_.end());
  return f;
}

bool DataFingerprint::overlaps(const LabeledData& d) const {
  if (hashes_.empty() || d.size() == 0) return false;
  std::vector<std::uint64_t> other;
  other.reserve(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    other.push_back(labels_only_ ? label_hash(d.y(static_cast<Eigen::Index>(i))) : row_hash(d, i));
  }
  return 2 * multiset_intersection(hashes_, std::move(other)) > d.size();
}

std::shared_ptr<const ConditionalCdf> empirical_cdf(const SortedSample& train_labels) {
  if (train_labels.empty()) throw ConfigError("empirical_cdf: empty sample");
  return std::make_shared<EmpiricalCdf>(train_labels);
}

std::shared_ptr<const ConditionalCdf> knn_cdf(const LabeledData& train, const KnnCdfConfig& cfg) {
  return std::make_shared<KnnCdf>(train, cfg);
}

std::shared_ptr<const ConditionalCdf> oracle_cdf(const DistributionSpec& spec) {
  return std::make_shared<OracleCdf>(spec);
}

std::vector<LawPtr> laws_at(const ConditionalCdf& cdf, const CovariateMatrix& xs) {
  std::vector<LawPtr> out;
  out.reserve(static_cast<std::size_t>(xs.rows()));
  for (Eigen::Index i = 0; i < xs.rows(); ++i) out.push_back(cdf.at(xs.row(i)));
  return out;
}

}  // namespace volopt
