#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace volopt {

/// Covariates are stored one observation per row.
using CovariateMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Covariate = Eigen::RowVectorXd;
using CovariateRef = Eigen::Ref<const Eigen::RowVectorXd>;

/// (x, y) pairs. Unsupervised data has zero covariate columns.
struct LabeledData {
  CovariateMatrix x;
  Eigen::VectorXd y;

  std::size_t size() const { return static_cast<std::size_t>(y.size()); }
  std::size_t dim() const { return static_cast<std::size_t>(x.cols()); }
  std::span<const double> labels() const { return {y.data(), size()}; }

  /// Rows [begin, end).
  LabeledData slice(std::size_t begin, std::size_t end) const;
  /// Rows in the given order.
  LabeledData select(std::span<const std::size_t> rows) const;
};

/// FNV-1a over the bytes of one row (covariates then label).
std::uint64_t row_hash(const LabeledData& d, std::size_t row);
std::uint64_t label_hash(double y);

}  // namespace volopt
