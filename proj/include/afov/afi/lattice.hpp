#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "afov/common.hpp"

namespace afov::afi {

/// M x 3 unit normals of a spherical Fibonacci lattice.
struct LatticeBasis {
  Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor> normals;

  std::size_t size() const { return static_cast<std::size_t>(normals.rows()); }
  Vec3 operator[](std::size_t i) const { return normals.row(static_cast<Eigen::Index>(i)).transpose(); }
};

/// z_i = (2i + 1)/M - 1 (offset lattice, so every z lies strictly inside
/// (-1, 1)), azimuth 2*pi*i*phi with phi = (sqrt(5) - 1)/2.
inline LatticeBasis fibonacci_lattice(std::size_t m) {
  require(m >= 1, "lattice size must be at least 1");
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  LatticeBasis basis;
  basis.normals.resize(static_cast<Eigen::Index>(m), 3);
  for (std::size_t i = 0; i < m; ++i) {
    const double z = (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(m) - 1.0;
    const double r = std::sqrt(1.0 - z * z);
    const double a = 2.0 * M_PI * static_cast<double>(i) * phi;
    basis.normals.row(static_cast<Eigen::Index>(i)) << r * std::cos(a), r * std::sin(a), z;
  }
  return basis;
}

/// Lattice cell whose normal is most aligned with `offset`; ties resolve to
/// the lowest index and a zero offset maps to cell 0.
inline std::size_t nearest_direction(const Vec3& offset, const LatticeBasis& basis) {
  std::size_t best = 0;
  double best_dot = -std::numeric_limits<double>::infinity();
  if (offset.isZero(0.0)) return 0;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const double d = basis.normals.row(static_cast<Eigen::Index>(i)).dot(offset.transpose());
    if (d > best_dot) {
      best_dot = d;
      best = i;
    }
  }
  return best;
}

/// Directional clustering of neighbours around a centre (the centre itself
/// must not be among them).
inline std::vector<std::size_t> direction_cluster(const Vec3& center, std::span<const Vec3> neighbors,
                                                  const LatticeBasis& basis) {
  std::vector<std::size_t> ids;
  ids.reserve(neighbors.size());
  for (const auto& p : neighbors) ids.push_back(nearest_direction(p - center, basis));
  return ids;
}

}  // namespace afov::afi
