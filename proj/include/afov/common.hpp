#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace afov {

/// Data or validation failure (bad file, broken invariant).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A configuration value outside its allowed range. The CLI reports these as
/// usage errors rather than data errors.
class ConfigError : public Error {
 public:
  using Error::Error;
};

using Label = std::uint16_t;
inline constexpr Label kUnlabeled = std::numeric_limits<Label>::max();

/// Per-point class ids; kUnlabeled marks points without a label.
using LabelField = std::vector<Label>;

/// N x 3 coordinates in meters, 32-bit at rest.
using PointCloud = Eigen::Matrix<float, Eigen::Dynamic, 3, Eigen::RowMajor>;

/// Row-major real matrix stored as 32-bit floats.
using FeatureMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Row-major 64-bit matrix used for all loss and gradient math.
using MatrixD = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Vec3 = Eigen::Vector3d;

inline Vec3 point_at(const PointCloud& points, Eigen::Index i) {
  return points.row(i).transpose().cast<double>();
}

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      if (!std::isfinite(static_cast<double>(m(r, c)))) return false;
  return true;
}

inline void require(bool cond, const std::string& what) {
  if (!cond) throw Error(what);
}

}  // namespace afov
