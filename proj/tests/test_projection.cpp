#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace afov;

namespace {

/// Camera at the origin looking down world +x (image right = -y, down = -z).
CalibratedCamera forward_camera() {
  auto cam = look_at(Vec3::Zero(), Vec3::UnitX(), 640, 480, 90.0);
  cam.intrinsics << 320, 0, 320, 0, 320, 240, 0, 0, 1;
  return cam;
}

SceneBundle bundle_of(std::initializer_list<Vec3> pts, std::vector<CalibratedCamera> cams) {
  SceneBundle b;
  b.points.resize(static_cast<Eigen::Index>(pts.size()), 3);
  Eigen::Index i = 0;
  for (const auto& p : pts) b.points.row(i++) = p.cast<float>().transpose();
  b.raw_features = FeatureMatrix::Ones(b.points.rows(), 1);
  b.cameras = std::move(cams);
  return b;
}

/// Teacher for one camera where the left half of the image is mask 0 and the
/// right half mask 1.
MaskSet halves(int camera, const CalibratedCamera& cam, Label left, Label right) {
  MaskSet s;
  s.camera = camera;
  s.width = cam.width;
  s.height = cam.height;
  std::vector<std::uint32_t> l, r;
  for (int v = 0; v < cam.height; ++v)
    for (int u = 0; u < cam.width; ++u) (u < cam.width / 2 ? l : r).push_back(static_cast<std::uint32_t>(v * cam.width + u));
  s.masks.push_back({left, 0, encode_runs(l)});
  s.masks.push_back({right, 1, encode_runs(r)});
  s.mask_features = FeatureMatrix::Identity(2, 2);
  s.text_features = FeatureMatrix::Identity(2, 2);
  s.rasterize();
  return s;
}

}  // namespace

TEST(Project, OpticalAxisHitsPrincipalPoint) {
  const auto hit = project_point(Vec3(5, 0, 0), forward_camera());
  ASSERT_TRUE(hit);
  EXPECT_EQ(hit->u, 320);
  EXPECT_EQ(hit->v, 240);
  EXPECT_DOUBLE_EQ(hit->depth, 5.0);
}

TEST(Project, BehindCameraHasNoHit) { EXPECT_FALSE(project_point(Vec3(-1, 0, 0), forward_camera())); }

TEST(Project, RightImageBoundIsExclusive) {
  // u = 320 + 320 * (-y / x): y = -1, x = 1 lands exactly on u = 640.
  EXPECT_FALSE(project_point(Vec3(1, -1, 0), forward_camera()));
  const auto inside = project_point(Vec3(1, -0.996, 0), forward_camera());
  ASSERT_TRUE(inside);
  EXPECT_EQ(inside->u, 639);
}

TEST(Project, RoundsHalfPixelsToEven) {
  auto cam = forward_camera();
  cam.intrinsics(0, 2) = 320.5;  // on-axis point lands on u = 320.5
  const auto hit = project_point(Vec3(5, 0, 0), cam);
  ASSERT_TRUE(hit);
  EXPECT_EQ(hit->u, 320);
  cam.intrinsics(0, 2) = 321.5;
  EXPECT_EQ(project_point(Vec3(5, 0, 0), cam)->u, 322);
}

TEST(Project, PermutationEquivariant) {
  const auto b = synth::generate_scene({.seed = 5, .n_points = 300});
  const auto& cam = b.cameras[0];
  const auto hits = project(b.points, cam);
  PointCloud rev = b.points.colwise().reverse();
  const auto rhits = project(rev, cam);
  ASSERT_EQ(hits.size(), rhits.size());
  const auto n = b.size();
  for (std::size_t k = 0; k < hits.size(); ++k) {
    const auto& a = hits[k];
    const auto& r = rhits[hits.size() - 1 - k];
    EXPECT_EQ(r.point, n - 1 - a.point);
    EXPECT_EQ(r.u, a.u);
    EXPECT_EQ(r.v, a.v);
    EXPECT_EQ(r.depth, a.depth);
  }
}

TEST(Pseudo, PointInsideMaskTakesItsLabel) {
  const auto cam = forward_camera();
  const auto b = bundle_of({Vec3(5, 1, 0), Vec3(5, -1, 0)}, {cam});
  const auto l = pseudo_labels(b, {halves(0, cam, 1, 3)});
  EXPECT_EQ(l, (LabelField{1, 3}));
}

TEST(Pseudo, NearestDepthWins) {
  auto c0 = forward_camera();
  auto c1 = forward_camera();
  c0.translation = Vec3(0, 0, -1);  // point sits at depth 4 in camera 0
  c1.translation = Vec3(0, 0, 1);   // and at depth 6 in camera 1
  const auto b = bundle_of({Vec3(5, 0.5, 0)}, {c0, c1});
  const auto hits = winning_hits(b);
  ASSERT_TRUE(hits[0]);
  EXPECT_EQ(hits[0]->camera, 0u);
  EXPECT_DOUBLE_EQ(hits[0]->depth, 4.0);
  EXPECT_EQ(pseudo_labels(b, {halves(0, c0, 0, 0), halves(1, c1, 2, 2)}), LabelField{0});
  // swap depths: camera 1 now wins
  std::swap(c0.translation, c1.translation);
  const auto b2 = bundle_of({Vec3(5, 0.5, 0)}, {c0, c1});
  EXPECT_EQ(pseudo_labels(b2, {halves(0, c0, 0, 0), halves(1, c1, 2, 2)}), LabelField{2});
}

TEST(Pseudo, EqualDepthGoesToLowestCamera) {
  const auto cam = forward_camera();
  const auto b = bundle_of({Vec3(5, 0.5, 0)}, {cam, cam});
  EXPECT_EQ(pseudo_labels(b, {halves(0, cam, 1, 1), halves(1, cam, 2, 2)}), LabelField{1});
}

TEST(Pseudo, NoHitOrNoMaskIsUnlabeled) {
  const auto cam = forward_camera();
  const auto b = bundle_of({Vec3(-5, 0, 0), Vec3(5, 1, 0)}, {cam});
  auto t = halves(0, cam, 1, 2);
  t.masks.resize(1);  // left half only; point 1 projects left of centre
  t.mask_features = FeatureMatrix::Identity(1, 2);
  t.rasterize();
  EXPECT_EQ(pseudo_labels(b, {t}), (LabelField{kUnlabeled, 1}));
  auto t2 = halves(0, cam, 1, 2);
  t2.masks.erase(t2.masks.begin());
  t2.mask_features = FeatureMatrix::Identity(1, 2);
  t2.rasterize();
  EXPECT_EQ(pseudo_labels(b, {t2}), (LabelField{kUnlabeled, kUnlabeled}));
}

TEST(Pseudo, TeacherCountMismatchIsAnError) {
  const auto cam = forward_camera();
  const auto b = bundle_of({Vec3(5, 0, 0)}, {cam, cam});
  EXPECT_THROW(pseudo_labels(b, {halves(0, cam, 0, 1)}), Error);
}

TEST(Pseudo, ZeroNoiseTeacherMatchesGroundTruthOnCoveredPoints) {
  for (std::uint64_t seed : {1, 2, 3}) {
    synth::SynthSpec spec{.seed = seed, .n_points = 1500};
    const auto b = synth::generate_scene(spec);
    const auto t = synth::generate_teacher(b, default_dictionary(), spec);
    const auto pseudo = pseudo_labels(b, t.images);
    const auto fov = fov_mask(b);
    std::size_t covered = 0;
    for (std::size_t i = 0; i < b.size(); ++i) {
      if (!fov[i]) continue;
      ++covered;
      EXPECT_EQ(pseudo[i], (*b.gt_labels)[i]) << "seed " << seed << " point " << i;
    }
    EXPECT_EQ(covered, b.size());
  }
}

TEST(Fov, PointBehindSingleForwardCameraIsOutside) {
  const auto b = bundle_of({Vec3(-3, 0, 0), Vec3(3, 0, 0)}, {forward_camera()});
  EXPECT_EQ(fov_mask(b), (FovMask{0, 1}));
}

TEST(Fov, NoCamerasMeansNothingCovered) {
  const auto b = bundle_of({Vec3(1, 2, 3), Vec3(0, 0, 0)}, {});
  EXPECT_EQ(fov_mask(b), (FovMask{0, 0}));
}

TEST(Fov, RingScenesAreFullyCoveredByBruteForce) {
  const auto b = synth::generate_scene({.seed = 9, .n_points = 800});
  const auto fov = fov_mask(b);
  for (Eigen::Index i = 0; i < b.points.rows(); ++i) {
    bool seen = false;
    for (const auto& cam : b.cameras) {
      const Vec3 pc = cam.rotation * point_at(b.points, i) + cam.translation;
      if (pc.z() <= 0) continue;
      const double u = std::nearbyint(cam.intrinsics(0, 0) * pc.x() / pc.z() + cam.intrinsics(0, 2));
      const double v = std::nearbyint(cam.intrinsics(1, 1) * pc.y() / pc.z() + cam.intrinsics(1, 2));
      seen = seen || (u >= 0 && v >= 0 && u < cam.width && v < cam.height);
    }
    EXPECT_TRUE(seen);
    EXPECT_EQ(fov[static_cast<std::size_t>(i)], seen ? 1 : 0);
  }
}

TEST(Camera, ValidationRejectsBadCalibration) {
  auto cam = forward_camera();
  EXPECT_NO_THROW(validate(cam));
  cam.rotation(0, 0) += 1e-6;
  EXPECT_THROW(validate(cam), Error);
  cam = forward_camera();
  cam.intrinsics(1, 0) = 1.0;
  EXPECT_THROW(validate(cam), Error);
  cam = forward_camera();
  cam.intrinsics(0, 0) = -1.0;
  EXPECT_THROW(validate(cam), Error);
}
