#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "afov/common.hpp"
#include "afov/io.hpp"
#include "afov/projection.hpp"
#include "afov/spatial.hpp"

namespace afov {

/// One superpixel <-> superpoint pair.
struct SuperPair {
  std::size_t camera = 0;
  std::size_t mask = 0;  // index within the camera's MaskSet
  Label label = 0;
  std::size_t text = 0;  // prompt row of the mask
  std::vector<std::size_t> points;
  Eigen::VectorXd superpixel;  // unit-norm mask feature
};

struct Correspondence {
  std::vector<SuperPair> pairs;
  std::size_t size() const { return pairs.size(); }
};

/// Pairs every mask that receives at least one winning pixel hit with the set
/// of points behind those hits. Masks without points are dropped, so the pair
/// count never exceeds the mask count.
inline Correspondence build_correspondence(const SceneBundle& bundle,
                                           const std::vector<MaskSet>& teacher,
                                           const std::vector<std::optional<PixelHit>>& hits) {
  check_teacher(bundle, teacher);
  require(hits.size() == bundle.size(), "one hit slot per point required");
  std::map<std::pair<std::size_t, std::size_t>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < hits.size(); ++i) {
    if (!hits[i]) continue;
    const auto m = mask_of(teacher, *hits[i]);
    if (m >= 0) groups[{hits[i]->camera, static_cast<std::size_t>(m)}].push_back(i);
  }

  Correspondence corr;
  for (auto& [key, members] : groups) {
    const auto& set = teacher[key.first];
    const auto& mask = set.masks[key.second];
    Eigen::VectorXd f = set.mask_features.row(static_cast<Eigen::Index>(key.second))
                            .transpose()
                            .cast<double>();
    const double norm = f.norm();
    require(norm > 0.0, "zero-norm mask feature (camera " + std::to_string(key.first) + ", mask " +
                            std::to_string(key.second) + ")");
    corr.pairs.push_back({key.first, key.second, mask.label, mask.text, std::move(members), f / norm});
  }
  return corr;
}

inline Correspondence build_correspondence(const SceneBundle& bundle,
                                           const std::vector<MaskSet>& teacher) {
  return build_correspondence(bundle, teacher, winning_hits(bundle));
}

/// Point-level grouping used when superpoints are switched off: each pair's
/// point set becomes the k nearest covered points around its lexicographically
/// smallest member.
/// Pairing with superpixel and text is kept.
inline Correspondence knn_grouping(const SceneBundle& bundle, const Correspondence& corr,
                                   std::size_t k = 16) {
  std::vector<std::size_t> covered;
  for (const auto& p : corr.pairs) covered.insert(covered.end(), p.points.begin(), p.points.end());
  std::sort(covered.begin(), covered.end());
  std::vector<Vec3> cloud;
  cloud.reserve(covered.size());
  for (const auto i : covered) cloud.push_back(point_at(bundle.points, static_cast<Eigen::Index>(i)));

  Correspondence out = corr;
  for (auto& pair : out.pairs) {
    const auto seed = *std::min_element(pair.points.begin(), pair.points.end(), [&](std::size_t a, std::size_t b) {
      return spatial::lex_less(point_at(bundle.points, static_cast<Eigen::Index>(a)),
                               point_at(bundle.points, static_cast<Eigen::Index>(b)));
    });
    const auto nn = spatial::knn(cloud, point_at(bundle.points, static_cast<Eigen::Index>(seed)), k);
    pair.points.clear();
    for (const auto j : nn) pair.points.push_back(covered[j]);
  }
  return out;
}

/// Mean of member embeddings per pair, L2-normalised.
inline MatrixD pool_superpoints(const MatrixD& point_embeddings, const Correspondence& corr) {
  require(all_finite(point_embeddings), "non-finite point embedding");
  MatrixD pooled(static_cast<Eigen::Index>(corr.size()), point_embeddings.cols());
  for (std::size_t r = 0; r < corr.size(); ++r) {
    const auto& members = corr.pairs[r].points;
    require(!members.empty(), "superpoint " + std::to_string(r) + " has no points");
    Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(point_embeddings.cols());
    for (const auto i : members) mean += point_embeddings.row(static_cast<Eigen::Index>(i));
    mean /= static_cast<double>(members.size());
    const double norm = mean.norm();
    if (!(norm > 0.0)) throw Error("zero-norm pooled superpoint " + std::to_string(r));
    pooled.row(static_cast<Eigen::Index>(r)) = mean / norm;
  }
  return pooled;
}

}  // namespace afov
