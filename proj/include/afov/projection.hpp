#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "afov/camera.hpp"
#include "afov/common.hpp"
#include "afov/io.hpp"

namespace afov {

struct PixelHit {
  std::size_t point = 0;
  std::size_t camera = 0;
  int u = 0;
  int v = 0;
  double depth = 0.0;

  bool operator==(const PixelHit&) const = default;
};

/// Per-point visibility flags (1 = seen by at least one camera).
using FovMask = std::vector<std::uint8_t>;

/// Projects a single point. Pixel coordinates are rounded to nearest with
/// ties to even; the image bound is exclusive.
inline std::optional<PixelHit> project_point(const Vec3& p, const CalibratedCamera& cam) {
  const Vec3 pc = cam.to_camera(p);
  if (!(pc.z() > 0.0)) return std::nullopt;
  const Vec3 h = cam.intrinsics * pc;
  const double u = std::nearbyint(h.x() / h.z());
  const double v = std::nearbyint(h.y() / h.z());
  if (!(u >= 0.0 && u < cam.width && v >= 0.0 && v < cam.height)) return std::nullopt;
  return PixelHit{0, 0, static_cast<int>(u), static_cast<int>(v), pc.z()};
}

/// Camera <- LiDAR mapping for one camera. Out-of-view points are absent;
/// hits are ordered by point index.
inline std::vector<PixelHit> project(const PointCloud& points, const CalibratedCamera& cam,
                                     std::size_t camera_index = 0) {
  std::vector<PixelHit> hits;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    if (auto h = project_point(point_at(points, i), cam)) {
      h->point = static_cast<std::size_t>(i);
      h->camera = camera_index;
      hits.push_back(*h);
    }
  }
  return hits;
}

/// For every point, the hit with the smallest depth over all cameras (ties go
/// to the lowest camera index), or nothing when no camera sees the point.
inline std::vector<std::optional<PixelHit>> winning_hits(const SceneBundle& bundle) {
  std::vector<std::optional<PixelHit>> best(bundle.size());
  for (std::size_t c = 0; c < bundle.cameras.size(); ++c) {
    for (const auto& h : project(bundle.points, bundle.cameras[c], c)) {
      auto& slot = best[h.point];
      if (!slot || h.depth < slot->depth) slot = h;
    }
  }
  return best;
}

inline FovMask fov_mask(const SceneBundle& bundle) {
  FovMask fov(bundle.size(), 0);
  for (std::size_t c = 0; c < bundle.cameras.size(); ++c)
    for (const auto& h : project(bundle.points, bundle.cameras[c], c)) fov[h.point] = 1;
  return fov;
}

inline void check_teacher(const SceneBundle& bundle, const std::vector<MaskSet>& teacher) {
  if (teacher.size() != bundle.cameras.size())
    throw Error("teacher has " + std::to_string(teacher.size()) + " images but scene has " +
                std::to_string(bundle.cameras.size()) + " cameras");
  for (std::size_t c = 0; c < teacher.size(); ++c) {
    const auto& set = teacher[c];
    require(set.camera == static_cast<int>(c), "teacher image order must follow camera order");
    require(set.width == bundle.cameras[c].width && set.height == bundle.cameras[c].height,
            "teacher image size differs from camera " + std::to_string(c));
    require(set.owner.size() == static_cast<std::size_t>(set.width) * set.height,
            "teacher image " + std::to_string(c) + " is not rasterized");
  }
}

/// Mask index hit by a winning pixel, or -1.
inline std::int32_t mask_of(const std::vector<MaskSet>& teacher, const PixelHit& hit) {
  return teacher[hit.camera].mask_at(hit.u, hit.v);
}

/// Each point adopts the label of the mask under its winning pixel; points
/// with no hit, or whose winning pixel has no mask, stay unlabeled.
inline LabelField pseudo_labels(const SceneBundle& bundle, const std::vector<MaskSet>& teacher) {
  check_teacher(bundle, teacher);
  LabelField labels(bundle.size(), kUnlabeled);
  const auto hits = winning_hits(bundle);
  for (std::size_t i = 0; i < hits.size(); ++i) {
    if (!hits[i]) continue;
    const auto m = mask_of(teacher, *hits[i]);
    if (m >= 0) labels[i] = teacher[hits[i]->camera].masks[static_cast<std::size_t>(m)].label;
  }
  return labels;
}

}  // namespace afov
