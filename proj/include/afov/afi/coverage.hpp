#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "afov/common.hpp"
#include "afov/rng.hpp"

namespace afov::afi {

/// Probability of keeping the image label at horizontal distance d:
/// beta*e^(-d/T) / (1 + beta*e^(-d/T)) with T = S/ln(beta), so P(0) =
/// beta/(1+beta) and P(S) = 1/2. beta = 1 degenerates to a flat 1/2.
inline double coverage_probability(double d, double beta, double s_dist) {
  if (beta == 1.0) return 0.5;
  const double t = s_dist / std::log(beta);
  const double x = beta * std::exp(-d / t);
  if (std::isinf(x)) return 1.0;
  return x / (1.0 + x);
}

inline double horizontal_distance(const Vec3& p) { return std::hypot(p.x(), p.y()); }

/// Replaces predictions by pseudo-labels with the distance-dependent
/// probability. One uniform draw per point that has a pseudo-label, in the
/// order given by `order` (identity when empty).
inline LabelField coverage_sample(const LabelField& predict, const LabelField& pseudo, const PointCloud& points,
                                  double beta, double s_dist, std::uint64_t seed,
                                  const std::vector<std::size_t>& order = {}) {
  const auto n = predict.size();
  require(pseudo.size() == n && static_cast<std::size_t>(points.rows()) == n,
          "coverage_sample: predict, pseudo and points differ in length");
  require(order.empty() || order.size() == n, "coverage_sample: order has the wrong length");
  Rng rng(seed);
  LabelField out = predict;
  for (std::size_t k = 0; k < n; ++k) {
    const auto i = order.empty() ? k : order[k];
    if (pseudo[i] == kUnlabeled) continue;
    const double p = coverage_probability(horizontal_distance(point_at(points, static_cast<Eigen::Index>(i))),
                                          beta, s_dist);
    if (rng.uniform() < p) out[i] = pseudo[i];
  }
  return out;
}

/// Points outside every camera view lose their prediction.
inline LabelField clear_confused(const LabelField& predict, const std::vector<std::uint8_t>& fov) {
  require(fov.size() == predict.size(), "clear_confused: fov and predict differ in length");
  LabelField out = predict;
  for (std::size_t i = 0; i < out.size(); ++i)
    if (!fov[i]) out[i] = kUnlabeled;
  return out;
}

}  // namespace afov::afi
