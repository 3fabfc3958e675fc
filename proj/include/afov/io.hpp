#pragma once

// On-disk layout. All binary payloads are little-endian; every directory
// carries a JSON sidecar that declares dimensions.
//
//   scene/    scene.json, points.f32 (N x 3), features.f32 (N x E),
//             gt_labels.u16 (optional, N)
//   teacher/  masks.json, mask_feats.f32 (R x D), text_feats.f32 (T x D)

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "afov/camera.hpp"
#include "afov/common.hpp"

namespace afov {

namespace fs = std::filesystem;
using json = nlohmann::json;

struct SceneBundle {
  std::string name;
  PointCloud points;
  FeatureMatrix raw_features;
  std::vector<CalibratedCamera> cameras;
  std::optional<LabelField> gt_labels;

  std::size_t size() const { return static_cast<std::size_t>(points.rows()); }
};

/// One run-length-encoded teacher mask. Runs are (start, length) pairs over
/// row-major linear pixel indices.
struct Mask {
  Label label = 0;
  std::uint32_t text = 0;  // prompt row in the text feature matrix
  std::vector<std::pair<std::uint32_t, std::uint32_t>> runs;
};

/// Teacher output for one image: masks, their labels, mask features and the
/// dictionary text features.
struct MaskSet {
  int camera = 0;
  int width = 0;
  int height = 0;
  std::vector<Mask> masks;
  FeatureMatrix mask_features;  // row i belongs to masks[i]
  FeatureMatrix text_features;  // one row per dictionary prompt

  /// Pixel -> mask index, -1 where no mask. Overlaps go to the highest index.
  std::vector<std::int32_t> owner;

  void rasterize() {
    owner.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), -1);
    for (std::size_t m = 0; m < masks.size(); ++m)
      for (const auto& [start, run] : masks[m].runs)
        std::fill_n(owner.begin() + start, run, static_cast<std::int32_t>(m));
  }

  std::int32_t mask_at(int u, int v) const {
    return owner[static_cast<std::size_t>(v) * static_cast<std::size_t>(width) +
                 static_cast<std::size_t>(u)];
  }
};

/// Row-major linear pixel indices -> (start, length) runs.
inline std::vector<std::pair<std::uint32_t, std::uint32_t>> encode_runs(
    std::vector<std::uint32_t> pixels) {
  std::sort(pixels.begin(), pixels.end());
  pixels.erase(std::unique(pixels.begin(), pixels.end()), pixels.end());
  std::vector<std::pair<std::uint32_t, std::uint32_t>> runs;
  for (const auto p : pixels) {
    if (!runs.empty() && runs.back().first + runs.back().second == p)
      ++runs.back().second;
    else
      runs.emplace_back(p, 1u);
  }
  return runs;
}

namespace detail {

template <typename T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    std::reverse(b, b + sizeof(T));
    std::memcpy(&v, b, sizeof(T));
    return v;
  }
}

template <typename T>
void write_raw(const fs::path& path, std::span<const T> values) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open for writing: " + path.string());
  for (const T& v : values) {
    const T le = to_little(v);
    out.write(reinterpret_cast<const char*>(&le), sizeof(T));
  }
  if (!out) throw Error("write failed: " + path.string());
}

template <typename T>
std::vector<T> read_raw(const fs::path& path, std::size_t expected_count) {
  if (!fs::exists(path)) throw Error("missing file: " + path.string());
  const auto bytes = fs::file_size(path);
  if (bytes != expected_count * sizeof(T))
    throw Error("length mismatch: " + path.string() + " has " + std::to_string(bytes) +
                " bytes, header implies " + std::to_string(expected_count * sizeof(T)));
  std::vector<T> values(expected_count);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open: " + path.string());
  in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(bytes));
  if (!in) throw Error("read failed: " + path.string());
  for (auto& v : values) v = to_little(v);
  return values;
}

inline json read_json(const fs::path& path) {
  if (!fs::exists(path)) throw Error("missing file: " + path.string());
  std::ifstream in(path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error("malformed json in " + path.string() + ": " + e.what());
  }
}

inline void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open for writing: " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw Error("write failed: " + path.string());
}

template <typename T>
T field(const json& j, const char* key) {
  if (!j.contains(key)) throw Error(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(std::string("bad field '") + key + "': " + e.what());
  }
}

inline json matrix_to_json(const Eigen::Matrix3d& m) {
  json a = json::array();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) a.push_back(m(r, c));
  return a;
}

inline Eigen::Matrix3d matrix_from_json(const json& j, const char* key) {
  const auto v = field<std::vector<double>>(j, key);
  if (v.size() != 9) throw Error(std::string("field '") + key + "' needs 9 values");
  Eigen::Matrix3d m;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m(r, c) = v[static_cast<std::size_t>(r * 3 + c)];
  return m;
}

}  // namespace detail

inline json camera_to_json(const CalibratedCamera& cam) {
  return json{{"width", cam.width},
              {"height", cam.height},
              {"intrinsics", detail::matrix_to_json(cam.intrinsics)},
              {"rotation", detail::matrix_to_json(cam.rotation)},
              {"translation", {cam.translation.x(), cam.translation.y(), cam.translation.z()}}};
}

inline CalibratedCamera camera_from_json(const json& j) {
  CalibratedCamera cam;
  cam.width = detail::field<int>(j, "width");
  cam.height = detail::field<int>(j, "height");
  cam.intrinsics = detail::matrix_from_json(j, "intrinsics");
  cam.rotation = detail::matrix_from_json(j, "rotation");
  const auto t = detail::field<std::vector<double>>(j, "translation");
  if (t.size() != 3) throw Error("field 'translation' needs 3 values");
  cam.translation = {t[0], t[1], t[2]};
  validate(cam);
  return cam;
}

inline void validate(const SceneBundle& b) {
  require(b.points.rows() >= 1, "scene must contain at least one point");
  require(b.raw_features.cols() >= 1, "feature dimension must be at least 1");
  require(b.raw_features.rows() == b.points.rows(), "feature rows must equal point count");
  require(all_finite(b.points), "non-finite point coordinate");
  require(all_finite(b.raw_features), "non-finite feature value");
  if (b.gt_labels)
    require(b.gt_labels->size() == b.size(), "gt_labels length must equal point count");
  for (const auto& cam : b.cameras) validate(cam);
}

inline void write_matrix(const fs::path& path, const FeatureMatrix& m) {
  require(all_finite(m), "non-finite value in " + path.filename().string());
  detail::write_raw<float>(path, std::span<const float>(m.data(), static_cast<std::size_t>(m.size())));
}

inline FeatureMatrix read_matrix(const fs::path& path, std::size_t rows, std::size_t cols) {
  const auto v = detail::read_raw<float>(path, rows * cols);
  FeatureMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  std::copy(v.begin(), v.end(), m.data());
  require(all_finite(m), "non-finite value in " + path.string());
  return m;
}

inline void write_labels(const fs::path& path, const LabelField& labels) {
  detail::write_raw<Label>(path, std::span<const Label>(labels));
}

/// Reads `expected_n` labels, or infers the count from the file size when
/// `expected_n` is empty.
inline LabelField read_labels(const fs::path& path, std::optional<std::size_t> expected_n = {}) {
  if (!fs::exists(path)) throw Error("missing file: " + path.string());
  const std::size_t n = expected_n ? *expected_n : fs::file_size(path) / sizeof(Label);
  return detail::read_raw<Label>(path, n);
}

inline void write_bundle(const SceneBundle& bundle, const fs::path& dir) {
  validate(bundle);
  fs::create_directories(dir);
  json cams = json::array();
  for (const auto& c : bundle.cameras) cams.push_back(camera_to_json(c));
  const json header{{"format", "afov-scene"},
                    {"version", 1},
                    {"endianness", "little"},
                    {"name", bundle.name},
                    {"num_points", bundle.size()},
                    {"feature_dim", bundle.raw_features.cols()},
                    {"has_gt_labels", bundle.gt_labels.has_value()},
                    {"cameras", cams}};
  detail::write_json(dir / "scene.json", header);
  detail::write_raw<float>(dir / "points.f32",
                           std::span<const float>(bundle.points.data(),
                                                  static_cast<std::size_t>(bundle.points.size())));
  write_matrix(dir / "features.f32", bundle.raw_features);
  if (bundle.gt_labels) write_labels(dir / "gt_labels.u16", *bundle.gt_labels);
  else if (fs::exists(dir / "gt_labels.u16")) fs::remove(dir / "gt_labels.u16");
}

inline SceneBundle read_bundle(const fs::path& dir) {
  const json h = detail::read_json(dir / "scene.json");
  if (h.value("endianness", std::string("little")) != "little")
    throw Error("unsupported endianness in scene.json");
  const auto n = detail::field<std::int64_t>(h, "num_points");
  const auto e = detail::field<std::int64_t>(h, "feature_dim");
  if (n <= 0) throw Error("scene.json: num_points must be >= 1");
  if (e <= 0) throw Error("scene.json: feature_dim must be >= 1");

  SceneBundle b;
  b.name = h.value("name", std::string());
  const auto pts = detail::read_raw<float>(dir / "points.f32", static_cast<std::size_t>(n) * 3);
  b.points.resize(n, 3);
  std::copy(pts.begin(), pts.end(), b.points.data());
  b.raw_features = read_matrix(dir / "features.f32", static_cast<std::size_t>(n),
                               static_cast<std::size_t>(e));
  for (const auto& c : detail::field<json>(h, "cameras")) b.cameras.push_back(camera_from_json(c));
  if (detail::field<bool>(h, "has_gt_labels"))
    b.gt_labels = read_labels(dir / "gt_labels.u16", static_cast<std::size_t>(n));
  validate(b);
  return b;
}

inline void write_teacher(const std::vector<MaskSet>& teacher, const fs::path& dir) {
  require(!teacher.empty(), "teacher must contain at least one image");
  const auto dim = teacher.front().text_features.cols();
  const auto texts = teacher.front().text_features.rows();
  fs::create_directories(dir);

  json images = json::array();
  std::vector<float> mask_rows;
  std::uint32_t index = 0;
  for (const auto& set : teacher) {
    require(set.mask_features.rows() == static_cast<Eigen::Index>(set.masks.size()),
            "mask feature rows must equal mask count");
    require(set.mask_features.cols() == dim && set.text_features.cols() == dim,
            "teacher feature dimensions disagree");
    require(all_finite(set.mask_features), "non-finite mask feature");
    json masks = json::array();
    for (const auto& m : set.masks) {
      json rle = json::array();
      for (const auto& [s, r] : m.runs) {
        rle.push_back(s);
        rle.push_back(r);
      }
      masks.push_back({{"index", index++}, {"label", m.label}, {"text", m.text}, {"rle", rle}});
    }
    mask_rows.insert(mask_rows.end(), set.mask_features.data(),
                     set.mask_features.data() + set.mask_features.size());
    images.push_back(
        {{"camera", set.camera}, {"width", set.width}, {"height", set.height}, {"masks", masks}});
  }
  const json header{{"format", "afov-teacher"}, {"version", 1},       {"endianness", "little"},
                    {"feature_dim", dim},       {"num_texts", texts}, {"num_masks", index},
                    {"images", images}};
  detail::write_json(dir / "masks.json", header);
  detail::write_raw<float>(dir / "mask_feats.f32", std::span<const float>(mask_rows));
  write_matrix(dir / "text_feats.f32", teacher.front().text_features);
}

inline std::vector<MaskSet> read_teacher(const fs::path& dir) {
  const json h = detail::read_json(dir / "masks.json");
  const auto dim = detail::field<std::size_t>(h, "feature_dim");
  const auto texts = detail::field<std::size_t>(h, "num_texts");
  const auto& images = detail::field<json>(h, "images");
  require(dim >= 1, "masks.json: feature_dim must be >= 1");

  std::size_t total = 0;
  for (const auto& img : images) total += detail::field<json>(img, "masks").size();
  if (h.contains("num_masks") && h.at("num_masks").get<std::size_t>() != total)
    throw Error("masks.json: num_masks disagrees with listed masks");

  if (!fs::exists(dir / "mask_feats.f32")) throw Error("missing file: mask_feats.f32");
  const auto feat_bytes = fs::file_size(dir / "mask_feats.f32");
  if (feat_bytes % (dim * sizeof(float)) != 0)
    throw Error("length mismatch: mask_feats.f32 is not a whole number of rows");
  const auto feat_rows = feat_bytes / (dim * sizeof(float));
  if (feat_rows != total)
    throw Error("mask_feats.f32 has " + std::to_string(feat_rows) + " rows but masks.json lists " +
                std::to_string(total) + " masks");
  const FeatureMatrix all_feats = read_matrix(dir / "mask_feats.f32", total, dim);
  const FeatureMatrix text_feats = read_matrix(dir / "text_feats.f32", texts, dim);

  std::vector<MaskSet> out;
  std::size_t row = 0;
  for (const auto& img : images) {
    MaskSet set;
    set.camera = detail::field<int>(img, "camera");
    set.width = detail::field<int>(img, "width");
    set.height = detail::field<int>(img, "height");
    require(set.width > 0 && set.height > 0, "masks.json: image size must be positive");
    const std::uint64_t pixels = static_cast<std::uint64_t>(set.width) * set.height;
    const auto& masks = detail::field<json>(img, "masks");
    set.mask_features.resize(static_cast<Eigen::Index>(masks.size()), static_cast<Eigen::Index>(dim));
    for (const auto& mj : masks) {
      const auto index = detail::field<std::size_t>(mj, "index");
      if (index != row) throw Error("masks.json: mask index " + std::to_string(index) +
                                    " out of order (expected " + std::to_string(row) + ")");
      Mask m;
      const auto label = detail::field<std::int64_t>(mj, "label");
      if (label < 0 || label >= kUnlabeled) throw Error("masks.json: label out of range");
      m.label = static_cast<Label>(label);
      m.text = detail::field<std::uint32_t>(mj, "text");
      if (m.text >= texts) throw Error("masks.json: text index out of range");
      const auto rle = detail::field<std::vector<std::uint64_t>>(mj, "rle");
      if (rle.size() % 2 != 0) throw Error("masks.json: rle must hold (start, run) pairs");
      for (std::size_t k = 0; k < rle.size(); k += 2) {
        if (rle[k] + rle[k + 1] > pixels)
          throw Error("RLE overrun: mask " + std::to_string(index) + " runs past image bounds");
        m.runs.emplace_back(static_cast<std::uint32_t>(rle[k]), static_cast<std::uint32_t>(rle[k + 1]));
      }
      set.mask_features.row(static_cast<Eigen::Index>(set.masks.size())) =
          all_feats.row(static_cast<Eigen::Index>(row));
      set.masks.push_back(std::move(m));
      ++row;
    }
    set.text_features = text_feats;
    set.rasterize();
    out.push_back(std::move(set));
  }
  return out;
}

}  // namespace afov
