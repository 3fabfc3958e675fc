#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "afov/afi/lattice.hpp"
#include "afov/common.hpp"

namespace afov::afi {

/// Per-centre summary over the lattice directions: mean offset, summed
/// features and summed correlation of the neighbours in each direction.
struct DirectionalState {
  Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor> directions;  // M x 3
  MatrixD features;                                                       // M x C
  Eigen::VectorXd correlations;                                           // M
  std::vector<std::size_t> occupied;  // directions with at least one member, ascending

  std::size_t size() const { return static_cast<std::size_t>(directions.rows()); }
  Vec3 direction(std::size_t i) const { return directions.row(static_cast<Eigen::Index>(i)).transpose(); }
};

/// Empty clusters keep d = 0, f = 0, l = 0. Neighbours coincident with the
/// centre belong to cluster 0 but add nothing.
inline DirectionalState aggregate(const Vec3& center, std::span<const Vec3> neighbors,
                                  std::span<const std::size_t> ids, const MatrixD& neighbor_features,
                                  std::span<const double> neighbor_corr, std::size_t m) {
  require(ids.size() == neighbors.size() && neighbor_corr.size() == neighbors.size() &&
              static_cast<std::size_t>(neighbor_features.rows()) == neighbors.size(),
          "aggregate: neighbour arrays disagree in length");
  const auto c = neighbor_features.cols();
  DirectionalState s;
  s.directions.setZero(static_cast<Eigen::Index>(m), 3);
  s.features.setZero(static_cast<Eigen::Index>(m), c);
  s.correlations.setZero(static_cast<Eigen::Index>(m));
  std::vector<int> members(m, 0);
  for (std::size_t n = 0; n < neighbors.size(); ++n) {
    const Vec3 off = neighbors[n] - center;
    if (off.isZero(0.0)) continue;
    const auto i = static_cast<Eigen::Index>(ids[n]);
    require(ids[n] < m, "aggregate: cluster id out of range");
    s.directions.row(i) += off.transpose();
    s.features.row(i) += neighbor_features.row(static_cast<Eigen::Index>(n));
    s.correlations(i) += neighbor_corr[n];
    ++members[ids[n]];
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (members[i] == 0) continue;
    s.directions.row(static_cast<Eigen::Index>(i)) /= members[i];
    s.occupied.push_back(i);
  }
  return s;
}

namespace detail {

struct SideSums {
  double corr = 0.0;   // sum of l over both parallel sets
  double plus = 0.0;   // max |d| with cosine > gamma
  double minus = 0.0;  // max |d| with cosine < -gamma
};

inline SideSums parallel_sets(const DirectionalState& s, const Vec3& unit_link, double gamma) {
  SideSums out;
  for (const auto i : s.occupied) {
    const Vec3 d = s.direction(i);
    const double len = d.norm();
    if (!(len > 0.0)) continue;
    const double cosine = unit_link.dot(d) / len;
    if (cosine > gamma) {
      out.corr += s.correlations(static_cast<Eigen::Index>(i));
      out.plus = std::max(out.plus, len);
    } else if (cosine < -gamma) {
      out.corr += s.correlations(static_cast<Eigen::Index>(i));
      out.minus = std::max(out.minus, len);
    }
  }
  return out;
}

}  // namespace detail

struct PairTerms {
  double along = 0.0;     // product of parallel correlation sums
  double distance = 0.0;  // overlap of the parallel extents relative to the gap
  double value() const { return along * distance; }
};

/// Both components of the correlation between two centres. The link vector
/// is p_a - p_b. Coincident centres give zero.
inline PairTerms pair_terms(const DirectionalState& a, const DirectionalState& b, const Vec3& pa, const Vec3& pb,
                            double gamma) {
  const Vec3 link = pa - pb;
  const double gap = link.norm();
  if (!(gap > 0.0)) return {};
  const Vec3 unit = link / gap;
  const auto sa = detail::parallel_sets(a, unit, gamma);
  const auto sb = detail::parallel_sets(b, unit, gamma);
  PairTerms t;
  t.along = sa.corr * sb.corr;
  const double denom = gap + sa.minus + sb.plus;
  t.distance = (sa.plus + sa.minus) * (sb.plus + sb.minus) / (denom * denom);
  return t;
}

inline double pair_correlation(const DirectionalState& a, const DirectionalState& b, const Vec3& pa,
                               const Vec3& pb, double gamma) {
  return pair_terms(a, b, pa, pb, gamma).value();
}

/// Numerically stable softmax of a vector.
inline Eigen::VectorXd softmax(const Eigen::VectorXd& x) {
  if (x.size() == 0) return x;
  const Eigen::VectorXd e = (x.array() - x.maxCoeff()).exp().matrix();
  return e / e.sum();
}

inline Eigen::RowVectorXd softmax(const Eigen::RowVectorXd& x) {
  return softmax(Eigen::VectorXd(x.transpose())).transpose();
}

}  // namespace afov::afi
