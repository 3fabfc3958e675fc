#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"

using namespace afov;
namespace fs = std::filesystem;

namespace {

SceneBundle tiny_bundle(int n = 1, int e = 1) {
  SceneBundle b;
  b.name = "tiny";
  b.points = PointCloud::Zero(n, 3);
  b.raw_features = FeatureMatrix::Ones(n, e);
  return b;
}

MaskSet two_mask_image() {
  MaskSet s;
  s.camera = 0;
  s.width = 4;
  s.height = 3;
  s.masks.push_back({1, 0, {{0, 4}}});
  s.masks.push_back({2, 1, {{2, 4}}});  // overlaps pixels 2..3 of mask 0
  s.mask_features = FeatureMatrix::Zero(2, 4);
  s.mask_features(0, 0) = 1.0f;
  s.mask_features(1, 1) = 1.0f;
  s.text_features = FeatureMatrix::Identity(2, 4);
  s.rasterize();
  return s;
}

}  // namespace

TEST(Bundle, MinimalBundleWritesThreeFilesOfForcedSize) {
  const auto dir = oracle::scratch("io_min");
  write_bundle(tiny_bundle(), dir);
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++files;
  EXPECT_EQ(files, 3u);
  EXPECT_EQ(fs::file_size(dir / "points.f32"), 12u);
  EXPECT_EQ(fs::file_size(dir / "features.f32"), 4u);
}

TEST(Bundle, RoundTripIsBitIdentical) {
  const auto dir = oracle::scratch("io_rt");
  auto b = synth::generate_scene(synth::SynthSpec{.seed = 7, .n_points = 500});
  write_bundle(b, dir / "a");
  const auto r = read_bundle(dir / "a");
  EXPECT_EQ(r.name, b.name);
  EXPECT_EQ(r.points, b.points);
  EXPECT_EQ(r.raw_features, b.raw_features);
  EXPECT_EQ(r.gt_labels, b.gt_labels);
  ASSERT_EQ(r.cameras.size(), b.cameras.size());
  for (std::size_t c = 0; c < b.cameras.size(); ++c) EXPECT_EQ(r.cameras[c], b.cameras[c]);
  write_bundle(r, dir / "b");
  EXPECT_EQ(oracle::tree_bytes(dir / "a"), oracle::tree_bytes(dir / "b"));
}

TEST(Bundle, NanCoordinateIsRejected) {
  auto b = tiny_bundle();
  b.points(0, 1) = std::nanf("");
  try {
    write_bundle(b, oracle::scratch("io_nan"));
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("non-finite"), std::string::npos);
  }
}

TEST(Bundle, TruncatedPointsReportLengthMismatch) {
  const auto dir = oracle::scratch("io_trunc");
  write_bundle(tiny_bundle(5, 2), dir);
  fs::resize_file(dir / "points.f32", 50);
  try {
    read_bundle(dir);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("length mismatch"), std::string::npos);
  }
}

TEST(Bundle, HeaderWithZeroPointsIsRejected) {
  const auto dir = oracle::scratch("io_zero");
  write_bundle(tiny_bundle(), dir);
  auto h = detail::read_json(dir / "scene.json");
  h["num_points"] = 0;
  detail::write_json(dir / "scene.json", h);
  EXPECT_THROW(read_bundle(dir), Error);
}

TEST(Bundle, MissingFileIsReported) {
  const auto dir = oracle::scratch("io_missing");
  write_bundle(tiny_bundle(), dir);
  fs::remove(dir / "features.f32");
  EXPECT_THROW(read_bundle(dir), Error);
}

TEST(Bundle, FilesAreLittleEndianFloats) {
  const auto dir = oracle::scratch("io_le");
  auto b = tiny_bundle();
  b.points(0, 0) = 1.0f;
  write_bundle(b, dir);
  const auto bytes = oracle::slurp(dir / "points.f32");
  // 1.0f = 0x3f800000 -> 00 00 80 3f
  EXPECT_EQ(static_cast<unsigned char>(bytes[2]), 0x80);
  EXPECT_EQ(static_cast<unsigned char>(bytes[3]), 0x3f);
  EXPECT_EQ(detail::read_json(dir / "scene.json").at("endianness"), "little");
}

TEST(Labels, RoundTripKeepsUnlabeledSentinel) {
  const auto dir = oracle::scratch("io_labels");
  const LabelField l{0, 3, kUnlabeled, 7};
  write_labels(dir / "l.u16", l);
  EXPECT_EQ(fs::file_size(dir / "l.u16"), 8u);
  EXPECT_EQ(read_labels(dir / "l.u16"), l);
  EXPECT_THROW(read_labels(dir / "l.u16", 5), Error);
}

TEST(Teacher, OneImageTwoMasks) {
  const auto dir = oracle::scratch("io_teacher");
  write_teacher({two_mask_image()}, dir);
  const auto t = read_teacher(dir);
  ASSERT_EQ(t.size(), 1u);
  ASSERT_EQ(t[0].masks.size(), 2u);
  EXPECT_EQ(t[0].mask_features.rows(), 2);
  EXPECT_EQ(t[0].mask_features.cols(), 4);
  EXPECT_EQ(t[0].mask_features(1, 1), 1.0f);
  EXPECT_EQ(t[0].masks[1].label, 2);
  EXPECT_EQ(t[0].masks[1].text, 1u);
}

TEST(Teacher, OverlappingMasksLaterMaskWins) {
  const auto dir = oracle::scratch("io_overlap");
  write_teacher({two_mask_image()}, dir);
  const auto t = read_teacher(dir);
  EXPECT_EQ(t[0].mask_at(0, 0), 0);
  EXPECT_EQ(t[0].mask_at(2, 0), 1);
  EXPECT_EQ(t[0].mask_at(3, 0), 1);
  EXPECT_EQ(t[0].mask_at(1, 1), 1);
  EXPECT_EQ(t[0].mask_at(2, 1), -1);
}

TEST(Teacher, FeatureRowCountMustMatchMasks) {
  const auto dir = oracle::scratch("io_rows");
  write_teacher({two_mask_image()}, dir);
  FeatureMatrix three = FeatureMatrix::Ones(3, 4);
  write_matrix(dir / "mask_feats.f32", three);
  try {
    read_teacher(dir);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("3 rows"), std::string::npos);
  }
}

TEST(Teacher, RleOverrunIsRejected) {
  const auto dir = oracle::scratch("io_overrun");
  write_teacher({two_mask_image()}, dir);
  auto h = detail::read_json(dir / "masks.json");
  h["images"][0]["masks"][1]["rle"] = {10, 5};  // 12 pixels in the image
  detail::write_json(dir / "masks.json", h);
  try {
    read_teacher(dir);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("RLE overrun"), std::string::npos);
  }
}

TEST(Teacher, SyntheticTeacherRoundTripsByteForByte) {
  const auto dir = oracle::scratch("io_synth_teacher");
  synth::SynthSpec spec{.seed = 3, .n_points = 400, .noise_rate = 0.1};
  const auto b = synth::generate_scene(spec);
  const auto t = synth::generate_teacher(b, default_dictionary(), spec);
  write_teacher(t.images, dir / "a");
  const auto r = read_teacher(dir / "a");
  ASSERT_EQ(r.size(), t.images.size());
  for (std::size_t c = 0; c < r.size(); ++c) {
    EXPECT_EQ(r[c].owner, t.images[c].owner);
    EXPECT_EQ(r[c].mask_features, t.images[c].mask_features);
  }
  write_teacher(r, dir / "b");
  EXPECT_EQ(oracle::tree_bytes(dir / "a"), oracle::tree_bytes(dir / "b"));
}

TEST(Runs, EncodeMergesConsecutivePixels) {
  const auto runs = encode_runs({5, 1, 2, 3, 9, 2});
  ASSERT_EQ(runs.size(), 3u);
  EXPECT_EQ(runs[0], (std::pair<std::uint32_t, std::uint32_t>{1, 3}));
  EXPECT_EQ(runs[1], (std::pair<std::uint32_t, std::uint32_t>{5, 1}));
  EXPECT_EQ(runs[2], (std::pair<std::uint32_t, std::uint32_t>{9, 1}));
}
