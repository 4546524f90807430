#include "volopt/data.hpp"

#include <cstring>
#include <stdexcept>

namespace volopt {
namespace {

std::uint64_t fnv1a(const void* data, std::size_t bytes, std::uint64_t h) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= 0x100000001B3ULL;
  }
  return h;
}

constexpr std::uint64_t kFnvOffset = 0xCBF29CE484222325ULL;

}  // namespace

LabeledData LabeledData::slice(std::size_t begin, std::size_t end) const {
  if (begin > end || end > size()) throw std::out_of_range("LabeledData::slice");
  const auto rows = static_cast<Eigen::Index>(end - begin);
  LabeledData out;
  out.x = x.middleRows(static_cast<Eigen::Index>(begin), rows);
  out.y = y.segment(static_cast<Eigen::Index>(begin), rows);
  return out;
}

LabeledData LabeledData::select(std::span<const std::size_t> rows) const {
  LabeledData out;
  out.x.resize(static_cast<Eigen::Index>(rows.size()), x.cols());
  out.y.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= size()) throw std::out_of_range("LabeledData::select");
    out.x.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(rows[i]));
    out.y(static_cast<Eigen::Index>(i)) = y(static_cast<Eigen::Index>(rows[i]));
  }
  return out;
}

std::uint64_t row_hash(const LabeledData& d, std::size_t row) {
  std::uint64_t h = kFnvOffset;
  const auto r = static_cast<Eigen::Index>(row);
  for (Eigen::Index c = 0; c < d.x.cols(); ++c) {
    const double v = d.x(r, c);
    h = fnv1a(&v, sizeof v, h);
  }
  const double v = d.y(r);
  return fnv1a(&v, sizeof v, h);
}

std::uint64_t label_hash(double y) { return fnv1a(&y, sizeof y, kFnvOffset); }

}  // namespace volopt
