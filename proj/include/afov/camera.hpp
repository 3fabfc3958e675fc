#pragma once

#include <cmath>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "afov/common.hpp"

namespace afov {

/// Pinhole camera with a rigid world->camera transform: x_cam = R x + t.
struct CalibratedCamera {
  Eigen::Matrix3d intrinsics = Eigen::Matrix3d::Identity();
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
  int width = 0;
  int height = 0;

  Eigen::Vector3d to_camera(const Vec3& world) const { return rotation * world + translation; }

  /// Camera center in world coordinates.
  Eigen::Vector3d center() const { return -rotation.transpose() * translation; }

  bool operator==(const CalibratedCamera&) const = default;
};

inline void validate(const CalibratedCamera& cam) {
  const auto& k = cam.intrinsics;
  require(cam.width > 0 && cam.height > 0, "camera image size must be positive");
  require(k(1, 0) == 0.0 && k(2, 0) == 0.0 && k(2, 1) == 0.0, "intrinsics must be upper-triangular");
  require(k(0, 0) > 0.0 && k(1, 1) > 0.0, "focal lengths must be positive");
  require(k(2, 2) > 0.0, "intrinsics K(2,2) must be positive");
  require(all_finite(k) && all_finite(cam.rotation) && all_finite(cam.translation),
          "camera parameters must be finite");
  const Eigen::Matrix3d gram = cam.rotation * cam.rotation.transpose();
  require((gram - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() <= 1e-9,
          "camera rotation is not orthonormal");
  require(cam.rotation.determinant() > 0.0, "camera rotation must be proper (det = +1)");
}

/// Camera at `eye` looking at `target` with world +z as up. Image x runs
/// right, image y runs down, optical axis is camera +z.
inline CalibratedCamera look_at(const Vec3& eye, const Vec3& target, int width, int height,
                                double hfov_deg) {
  const Vec3 forward = (target - eye).normalized();
  Vec3 right = forward.cross(Vec3::UnitZ());
  if (right.norm() < 1e-12) right = Vec3::UnitX();
  right.normalize();
  const Vec3 down = forward.cross(right);

  CalibratedCamera cam;
  cam.rotation.row(0) = right.transpose();
  cam.rotation.row(1) = down.transpose();
  cam.rotation.row(2) = forward.transpose();
  cam.translation = -cam.rotation * eye;
  const double focal = 0.5 * width / std::tan(0.5 * hfov_deg * M_PI / 180.0);
  cam.intrinsics << focal, 0.0, 0.5 * width, 0.0, focal, 0.5 * height, 0.0, 0.0, 1.0;
  cam.width = width;
  cam.height = height;
  return cam;
}

}  // namespace afov
