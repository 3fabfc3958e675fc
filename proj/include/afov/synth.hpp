#pragma once

// Seeded street-scene generator: a ground plane with axis-aligned boxes (cars,
// buildings) and vertical cylinders (pedestrians), a ring of cameras, and a
// teacher whose masks are cut from the projected ground truth.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <string>
#include <unordered_map>
#include <vector>

#include "afov/camera.hpp"
#include "afov/classdict.hpp"
#include "afov/io.hpp"
#include "afov/projection.hpp"
#include "afov/rng.hpp"

namespace afov::synth {

struct SynthSpec {
  std::uint64_t seed = 0;
  int n_points = 6000;
  std::vector<std::string> classes = {"road", "car", "pedestrian", "building"};
  double noise_rate = 0.0;
  int feature_dim = 16;
  int embed_dim = 16;
  int n_cameras = 4;
  double extent = 40.0;  // side of the square ground patch, meters

  int cars = 4;
  int pedestrians = 4;
  int buildings = 2;
  int image_width = 640;
  int image_height = 480;
  double hfov_deg = 90.0;
  int tile_px = 0;                 // > 0 cuts masks into square tiles
  bool noise_ground_only = false;  // flip only road masks
  bool cover_all = true;           // every point is seen by some camera

  bool operator==(const SynthSpec&) const = default;
};

inline void validate(const SynthSpec& s) {
  if (!(s.noise_rate >= 0.0 && s.noise_rate < 1.0)) throw ConfigError("noise_rate must be in [0,1)");
  if (s.n_points < 100) throw ConfigError("n_points must be at least 100");
  if (s.classes.empty()) throw ConfigError("classes must not be empty");
  if (s.feature_dim < 1) throw ConfigError("feature_dim must be at least 1");
  if (s.n_cameras < 0) throw ConfigError("n_cameras must be non-negative");
  if (!(s.extent > 0.0)) throw ConfigError("extent must be positive");
  if (s.cars < 0 || s.pedestrians < 0 || s.buildings < 0) throw ConfigError("object counts must be non-negative");
  if (s.image_width < 1 || s.image_height < 1) throw ConfigError("image size must be positive");
  if (!(s.hfov_deg > 0.0 && s.hfov_deg < 180.0)) throw ConfigError("hfov must be in (0,180)");
  if (s.tile_px < 0) throw ConfigError("tile_px must be non-negative");
  const auto dict = default_dictionary();
  for (const auto& c : s.classes) {
    bool known = false;
    for (const auto& e : dict.classes()) known = known || e.name == c;
    if (!known) throw ConfigError("unknown synth class '" + c + "'");
  }
  if (s.embed_dim < static_cast<int>(dict.num_classes()))
    throw ConfigError("embed_dim must be at least the number of dictionary classes");
}

inline nlohmann::json to_json(const SynthSpec& s) {
  return {{"seed", s.seed},
          {"n_points", s.n_points},
          {"classes", s.classes},
          {"noise_rate", s.noise_rate},
          {"feature_dim", s.feature_dim},
          {"embed_dim", s.embed_dim},
          {"n_cameras", s.n_cameras},
          {"extent", s.extent},
          {"cars", s.cars},
          {"pedestrians", s.pedestrians},
          {"buildings", s.buildings},
          {"image_width", s.image_width},
          {"image_height", s.image_height},
          {"hfov_deg", s.hfov_deg},
          {"tile_px", s.tile_px},
          {"noise_ground_only", s.noise_ground_only},
          {"cover_all", s.cover_all}};
}

inline SynthSpec spec_from_json(const nlohmann::json& j) {
  SynthSpec s;
  try {
    s.seed = j.value("seed", s.seed);
    s.n_points = j.value("n_points", s.n_points);
    s.classes = j.value("classes", s.classes);
    s.noise_rate = j.value("noise_rate", s.noise_rate);
    s.feature_dim = j.value("feature_dim", s.feature_dim);
    s.embed_dim = j.value("embed_dim", s.embed_dim);
    s.n_cameras = j.value("n_cameras", s.n_cameras);
    s.extent = j.value("extent", s.extent);
    s.cars = j.value("cars", s.cars);
    s.pedestrians = j.value("pedestrians", s.pedestrians);
    s.buildings = j.value("buildings", s.buildings);
    s.image_width = j.value("image_width", s.image_width);
    s.image_height = j.value("image_height", s.image_height);
    s.hfov_deg = j.value("hfov_deg", s.hfov_deg);
    s.tile_px = j.value("tile_px", s.tile_px);
    s.noise_ground_only = j.value("noise_ground_only", s.noise_ground_only);
    s.cover_all = j.value("cover_all", s.cover_all);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad synth spec: ") + e.what());
  }
  validate(s);
  return s;
}

/// Solid primitive the points are sampled from.
struct Primitive {
  enum class Kind { Ground, Box, Cylinder } kind = Kind::Ground;
  Label label = 0;
  Vec3 lo = Vec3::Zero();  // box corner / cylinder base centre
  Vec3 hi = Vec3::Zero();  // box corner / (radius, radius, height) for cylinders
  double area = 0.0;
};

struct SceneLayout {
  std::vector<Primitive> primitives;  // primitives[0] is the ground when present
  std::vector<CalibratedCamera> cameras;
};

namespace detail {

inline Label class_id(const std::string& name) {
  const auto dict = default_dictionary();
  for (const auto& e : dict.classes())
    if (e.name == name) return e.id;
  throw ConfigError("unknown synth class '" + name + "'");
}

inline bool has_class(const SynthSpec& s, const std::string& name) {
  return std::find(s.classes.begin(), s.classes.end(), name) != s.classes.end();
}

/// 2^-10 m grid, so coordinates are exact in float and translations by
/// grid multiples stay exact.
inline double quantize(double x) { return std::nearbyint(x * 1024.0) / 1024.0; }

inline bool footprint_overlaps(const Primitive& a, const Primitive& b, double clearance) {
  return a.lo.x() < b.hi.x() + clearance && b.lo.x() < a.hi.x() + clearance &&
         a.lo.y() < b.hi.y() + clearance && b.lo.y() < a.hi.y() + clearance;
}

/// Axis-aligned footprint bounds of a primitive (cylinders by bounding square).
inline Primitive footprint(const Primitive& p) {
  if (p.kind != Primitive::Kind::Cylinder) return p;
  Primitive f = p;
  f.lo = Vec3(p.lo.x() - p.hi.x(), p.lo.y() - p.hi.x(), 0.0);
  f.hi = Vec3(p.lo.x() + p.hi.x(), p.lo.y() + p.hi.x(), p.hi.z());
  return f;
}

inline bool inside_footprint(const Primitive& p, double x, double y) {
  if (p.kind == Primitive::Kind::Box) return x >= p.lo.x() && x <= p.hi.x() && y >= p.lo.y() && y <= p.hi.y();
  if (p.kind == Primitive::Kind::Cylinder) return std::hypot(x - p.lo.x(), y - p.lo.y()) <= p.hi.x();
  return false;
}

struct Sample {
  Vec3 p;
  double normal_z;
};

inline Sample sample_surface(const Primitive& prim, Rng& rng, double half) {
  switch (prim.kind) {
    case Primitive::Kind::Ground:
      return {Vec3(rng.uniform(-half, half), rng.uniform(-half, half), 0.0), 1.0};
    case Primitive::Kind::Box: {
      const Vec3 e = prim.hi - prim.lo;
      const double top = e.x() * e.y(), sx = e.y() * e.z(), sy = e.x() * e.z();
      const double pick = rng.uniform() * (top + 2.0 * sx + 2.0 * sy);
      const double a = rng.uniform(), b = rng.uniform();
      if (pick < top) return {Vec3(prim.lo.x() + a * e.x(), prim.lo.y() + b * e.y(), prim.hi.z()), 1.0};
      if (pick < top + 2.0 * sx) {
        const double x = pick < top + sx ? prim.lo.x() : prim.hi.x();
        return {Vec3(x, prim.lo.y() + a * e.y(), prim.lo.z() + b * e.z()), 0.0};
      }
      const double y = pick < top + 2.0 * sx + sy ? prim.lo.y() : prim.hi.y();
      return {Vec3(prim.lo.x() + a * e.x(), y, prim.lo.z() + b * e.z()), 0.0};
    }
    case Primitive::Kind::Cylinder: {
      const double r = prim.hi.x(), h = prim.hi.z();
      const double side = 2.0 * M_PI * r * h, cap = M_PI * r * r;
      const double ang = rng.uniform(0.0, 2.0 * M_PI);
      if (rng.uniform() * (side + cap) < side)
        return {Vec3(prim.lo.x() + r * std::cos(ang), prim.lo.y() + r * std::sin(ang), rng.uniform(0.0, h)), 0.0};
      const double rr = r * std::sqrt(rng.uniform());
      return {Vec3(prim.lo.x() + rr * std::cos(ang), prim.lo.y() + rr * std::sin(ang), h), 1.0};
    }
  }
  return {Vec3::Zero(), 0.0};
}

inline double surface_area(const Primitive& p, double extent) {
  if (p.kind == Primitive::Kind::Ground) return extent * extent;
  if (p.kind == Primitive::Kind::Box) {
    const Vec3 e = p.hi - p.lo;
    return e.x() * e.y() + 2.0 * (e.y() * e.z() + e.x() * e.z());
  }
  return 2.0 * M_PI * p.hi.x() * p.hi.z() + M_PI * p.hi.x() * p.hi.x();
}

}  // namespace detail

/// Places the objects and cameras; no points yet.
inline SceneLayout make_layout(const SynthSpec& spec, Rng& rng) {
  SceneLayout lay;
  const double half = spec.extent / 2.0;
  if (detail::has_class(spec, "road")) lay.primitives.push_back({Primitive::Kind::Ground, detail::class_id("road")});

  std::vector<Primitive> placed;
  const auto place = [&](Primitive prim, double sx, double sy) {
    for (int attempt = 0; attempt < 200; ++attempt) {
      const double margin = std::max(sx, sy) / 2.0 + 0.5;
      if (half <= margin) return;
      const double cx = rng.uniform(-half + margin, half - margin);
      const double cy = rng.uniform(-half + margin, half - margin);
      Primitive cand = prim;
      if (prim.kind == Primitive::Kind::Box) {
        cand.lo = Vec3(cx - sx / 2, cy - sy / 2, 0.0);
        cand.hi = Vec3(cx + sx / 2, cy + sy / 2, prim.hi.z());
      } else {
        cand.lo = Vec3(cx, cy, 0.0);
      }
      bool clash = false;
      for (const auto& o : placed)
        clash = clash || detail::footprint_overlaps(detail::footprint(cand), detail::footprint(o), 1.5);
      if (clash) continue;
      placed.push_back(cand);
      return;
    }
  };
  if (detail::has_class(spec, "building"))
    for (int i = 0; i < spec.buildings; ++i) {
      const double sx = rng.uniform(6.0, 10.0), sy = rng.uniform(6.0, 10.0), h = rng.uniform(5.0, 8.0);
      place({Primitive::Kind::Box, detail::class_id("building"), Vec3::Zero(), Vec3(0, 0, h)}, sx, sy);
    }
  if (detail::has_class(spec, "car"))
    for (int i = 0; i < spec.cars; ++i) {
      const bool along_x = rng.uniform() < 0.5;
      const double len = rng.uniform(4.0, 5.0), wid = rng.uniform(1.7, 2.0), h = rng.uniform(1.4, 1.7);
      place({Primitive::Kind::Box, detail::class_id("car"), Vec3::Zero(), Vec3(0, 0, h)}, along_x ? len : wid,
            along_x ? wid : len);
    }
  if (detail::has_class(spec, "pedestrian"))
    for (int i = 0; i < spec.pedestrians; ++i) {
      const double r = rng.uniform(0.25, 0.35), h = rng.uniform(1.6, 1.9);
      place({Primitive::Kind::Cylinder, detail::class_id("pedestrian"), Vec3::Zero(), Vec3(r, r, h)}, 2 * r, 2 * r);
    }
  lay.primitives.insert(lay.primitives.end(), placed.begin(), placed.end());
  for (auto& p : lay.primitives) p.area = detail::surface_area(p, spec.extent);

  const double radius = 0.75 * spec.extent;
  for (int c = 0; c < spec.n_cameras; ++c) {
    const double a = 2.0 * M_PI * c / spec.n_cameras + M_PI / 4.0;
    const Vec3 eye(radius * std::cos(a), radius * std::sin(a), 8.0);
    lay.cameras.push_back(look_at(eye, Vec3::Zero(), spec.image_width, spec.image_height, spec.hfov_deg));
  }
  return lay;
}

/// Winning hit of a single point, following the projection module's rule.
inline std::optional<PixelHit> winning_hit(const Vec3& p, const std::vector<CalibratedCamera>& cams) {
  std::optional<PixelHit> best;
  for (std::size_t c = 0; c < cams.size(); ++c) {
    auto h = project_point(p, cams[c]);
    if (!h) continue;
    h->camera = c;
    if (!best || h->depth < best->depth) best = h;
  }
  return best;
}

/// Expected point count floor per object, so small objects still fill a
/// neighbourhood.
inline constexpr double kMinObjectPoints = 64.0;

/// Points are drawn from the primitives (ground 60% when objects exist,
/// objects by surface area with a floor). A candidate is redrawn when its winning pixel is
/// already owned by a point of another class, so every teacher pixel is pure.
inline SceneBundle generate_scene(const SynthSpec& spec) {
  validate(spec);
  Rng rng(spec.seed);
  const auto lay = make_layout(spec, rng);
  require(!lay.primitives.empty(), "synth scene has no surfaces");
  const double half = spec.extent / 2.0;

  std::vector<double> weight;
  double object_area = 0.0;
  bool has_ground = false;
  for (const auto& p : lay.primitives) {
    if (p.kind == Primitive::Kind::Ground)
      has_ground = true;
    else
      object_area += p.area;
  }
  for (const auto& p : lay.primitives) {
    if (p.kind == Primitive::Kind::Ground)
      weight.push_back(object_area > 0.0 ? 0.6 : 1.0);
    else
      weight.push_back(std::max((has_ground ? 0.4 : 1.0) * p.area / object_area,
                                kMinObjectPoints / static_cast<double>(spec.n_points)));
  }
  double total_w = 0.0;
  for (auto w : weight) total_w += w;

  const auto n = static_cast<std::size_t>(spec.n_points);
  SceneBundle b;
  b.name = "synth-" + std::to_string(spec.seed);
  b.cameras = lay.cameras;
  b.points.resize(static_cast<Eigen::Index>(n), 3);
  LabelField gt(n);
  std::vector<double> normal_z(n);
  std::unordered_map<std::uint64_t, Label> pixel_class;

  std::size_t accepted = 0;
  std::size_t attempts = 0;
  while (accepted < n) {
    if (++attempts > 200 * n) throw Error("synth: too many rejected samples; check camera coverage");
    double pick = rng.uniform() * total_w;
    std::size_t k = 0;
    while (k + 1 < weight.size() && pick >= weight[k]) pick -= weight[k++];
    const auto& prim = lay.primitives[k];
    auto s = detail::sample_surface(prim, rng, half);
    if (prim.kind == Primitive::Kind::Ground) {
      bool covered = false;
      for (std::size_t o = 1; o < lay.primitives.size(); ++o)
        covered = covered || detail::inside_footprint(lay.primitives[o], s.p.x(), s.p.y());
      if (covered) continue;
    }
    const Vec3 q(detail::quantize(s.p.x()), detail::quantize(s.p.y()), detail::quantize(s.p.z()));
    const Vec3 stored = Eigen::Vector3f(q.cast<float>()).cast<double>();
    const auto hit = winning_hit(stored, lay.cameras);
    if (!hit && spec.cover_all && !lay.cameras.empty()) continue;
    if (hit) {
      const std::uint64_t key = (std::uint64_t{hit->camera} << 40) |
                                (static_cast<std::uint64_t>(hit->v) << 20) | static_cast<std::uint64_t>(hit->u);
      const auto it = pixel_class.find(key);
      if (it != pixel_class.end() && it->second != prim.label) continue;
      pixel_class.emplace(key, prim.label);
    }
    b.points.row(static_cast<Eigen::Index>(accepted)) = q.cast<float>().transpose();
    gt[accepted] = prim.label;
    normal_z[accepted] = s.normal_z;
    ++accepted;
  }
  b.gt_labels = gt;

  // Features: height, planarity, four class-correlated noisy channels,
  // normalised x/y, then random Fourier features of position.
  const auto e = static_cast<Eigen::Index>(spec.feature_dim);
  b.raw_features.resize(static_cast<Eigen::Index>(n), e);
  const int fourier = std::max<int>(0, spec.feature_dim - 8);
  std::vector<Vec3> freq(static_cast<std::size_t>(fourier));
  std::vector<double> phase(static_cast<std::size_t>(fourier));
  const double scale = 2.0 * M_PI / (spec.extent / 4.0);
  for (int f = 0; f < fourier; ++f) {
    freq[f] = Vec3(rng.normal(), rng.normal(), rng.normal()) * scale;
    phase[f] = rng.uniform(0.0, 2.0 * M_PI);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 p = point_at(b.points, static_cast<Eigen::Index>(i));
    std::vector<double> row;
    row.reserve(static_cast<std::size_t>(std::max<Eigen::Index>(e, 8)));
    row.push_back(p.z());
    row.push_back(normal_z[i]);
    for (Label c = 0; c < 4; ++c) row.push_back((gt[i] == c ? 1.0 : 0.0) + 0.5 * rng.normal());
    row.push_back(p.x() / spec.extent);
    row.push_back(p.y() / spec.extent);
    for (int f = 0; f < fourier; ++f) row.push_back(std::sin(freq[f].dot(p) + phase[f]));
    for (Eigen::Index c = 0; c < e; ++c)
      b.raw_features(static_cast<Eigen::Index>(i), c) = static_cast<float>(row[static_cast<std::size_t>(c)]);
  }
  validate(b);
  return b;
}

struct SynthTeacher {
  std::vector<MaskSet> images;
  std::vector<Label> clean_labels;  // per global mask row, before noise
};

namespace detail {

/// Per-camera class image: pixels under a winning hit take that point's
/// class; all other pixels take the class of the nearest seeded pixel
/// (breadth-first, seeds in scan order).
inline std::vector<std::int32_t> class_image(const SceneBundle& b, std::size_t cam,
                                             const std::vector<std::optional<PixelHit>>& hits) {
  const int w = b.cameras[cam].width, h = b.cameras[cam].height;
  std::vector<std::int32_t> img(static_cast<std::size_t>(w) * h, -1);
  for (std::size_t i = 0; i < hits.size(); ++i)
    if (hits[i] && hits[i]->camera == cam)
      img[static_cast<std::size_t>(hits[i]->v) * w + hits[i]->u] = (*b.gt_labels)[i];
  std::deque<std::size_t> queue;
  for (std::size_t p = 0; p < img.size(); ++p)
    if (img[p] >= 0) queue.push_back(p);
  while (!queue.empty()) {
    const auto p = queue.front();
    queue.pop_front();
    const int u = static_cast<int>(p % w), v = static_cast<int>(p / w);
    const std::array<std::array<int, 2>, 4> nb{{{u - 1, v}, {u + 1, v}, {u, v - 1}, {u, v + 1}}};
    for (const auto& [x, y] : nb) {
      if (x < 0 || y < 0 || x >= w || y >= h) continue;
      const auto q = static_cast<std::size_t>(y) * w + x;
      if (img[q] >= 0) continue;
      img[q] = img[p];
      queue.push_back(q);
    }
  }
  return img;
}

/// 4-connected components of equal class, optionally cut into tiles; ids
/// are assigned in scan order of each region's first pixel.
inline std::vector<std::int32_t> regions(const std::vector<std::int32_t>& cls, int w, int h, int tile) {
  std::vector<std::int32_t> comp(cls.size(), -1);
  std::int32_t next = 0;
  std::vector<std::size_t> stack;
  for (std::size_t s = 0; s < cls.size(); ++s) {
    if (cls[s] < 0 || comp[s] >= 0) continue;
    comp[s] = next;
    stack.assign(1, s);
    while (!stack.empty()) {
      const auto p = stack.back();
      stack.pop_back();
      const int u = static_cast<int>(p % w), v = static_cast<int>(p / w);
      const std::array<std::array<int, 2>, 4> nb{{{u - 1, v}, {u + 1, v}, {u, v - 1}, {u, v + 1}}};
      for (const auto& [x, y] : nb) {
        if (x < 0 || y < 0 || x >= w || y >= h) continue;
        const auto q = static_cast<std::size_t>(y) * w + x;
        if (comp[q] >= 0 || cls[q] != cls[s]) continue;
        comp[q] = next;
        stack.push_back(q);
      }
    }
    ++next;
  }
  if (tile <= 0) return comp;
  const std::int64_t tiles_x = (w + tile - 1) / tile, tiles_y = (h + tile - 1) / tile;
  std::unordered_map<std::int64_t, std::int32_t> ids;
  std::vector<std::int32_t> out(cls.size(), -1);
  for (std::size_t p = 0; p < cls.size(); ++p) {
    if (comp[p] < 0) continue;
    const int u = static_cast<int>(p % w), v = static_cast<int>(p / w);
    const std::int64_t key = (comp[p] * tiles_y + v / tile) * tiles_x + u / tile;
    const auto [it, fresh] = ids.emplace(key, static_cast<std::int32_t>(ids.size()));
    out[p] = it->second;
  }
  return out;
}

}  // namespace detail

/// One MaskSet per camera. Mask labels are flipped to a uniformly random
/// other spec class with probability noise_rate; mask features are the
/// (flipped) class prototype plus N(0, 0.1^2) noise, renormalised; text
/// features are the exact prototypes of each prompt's class.
inline SynthTeacher generate_teacher(const SceneBundle& b, const ClassDictionary& dict, const SynthSpec& spec) {
  validate(spec);
  require(b.gt_labels.has_value(), "synth teacher needs ground-truth labels");
  const auto d = static_cast<Eigen::Index>(spec.embed_dim);
  require(static_cast<std::size_t>(d) >= dict.num_classes(), "embed_dim must cover every dictionary class");
  Rng rng(spec.seed ^ 0x9e3779b97f4a7c15ULL);

  FeatureMatrix texts = FeatureMatrix::Zero(static_cast<Eigen::Index>(dict.num_prompts()), d);
  for (std::size_t t = 0; t < dict.num_prompts(); ++t) texts(static_cast<Eigen::Index>(t), dict.resolve(t)) = 1.0f;

  std::vector<Label> spec_ids;
  for (const auto& c : spec.classes) spec_ids.push_back(detail::class_id(c));
  const Label road = detail::class_id("road");

  SynthTeacher out;
  const auto hits = winning_hits(b);
  for (std::size_t cam = 0; cam < b.cameras.size(); ++cam) {
    const int w = b.cameras[cam].width, h = b.cameras[cam].height;
    const auto cls = detail::class_image(b, cam, hits);
    const auto reg = detail::regions(cls, w, h, spec.tile_px);
    std::int32_t count = 0;
    for (auto r : reg) count = std::max(count, r + 1);

    std::vector<std::vector<std::uint32_t>> pixels(static_cast<std::size_t>(count));
    std::vector<Label> clean(static_cast<std::size_t>(count));
    for (std::size_t p = 0; p < reg.size(); ++p) {
      if (reg[p] < 0) continue;
      pixels[reg[p]].push_back(static_cast<std::uint32_t>(p));
      clean[reg[p]] = static_cast<Label>(cls[p]);
    }

    MaskSet set;
    set.camera = static_cast<int>(cam);
    set.width = w;
    set.height = h;
    set.text_features = texts;
    set.mask_features.resize(count, d);
    for (std::int32_t m = 0; m < count; ++m) {
      Label label = clean[m];
      const bool eligible = !spec.noise_ground_only || label == road;
      if (eligible && rng.uniform() < spec.noise_rate) {
        std::vector<Label> others;
        for (auto id : spec_ids)
          if (id != label) others.push_back(id);
        if (!others.empty()) label = others[rng.index(others.size())];
      }
      const auto prompts = dict.prompts_of(label);
      Mask mask;
      mask.label = label;
      mask.text = static_cast<std::uint32_t>(prompts[rng.index(prompts.size())]);
      mask.runs = encode_runs(pixels[m]);
      Eigen::RowVectorXd f = Eigen::RowVectorXd::Zero(d);
      f(label) = 1.0;
      for (Eigen::Index k = 0; k < d; ++k) f(k) += 0.1 * rng.normal();
      set.mask_features.row(m) = (f / f.norm()).cast<float>();
      set.masks.push_back(std::move(mask));
      out.clean_labels.push_back(clean[m]);
    }
    set.rasterize();
    out.images.push_back(std::move(set));
  }
  return out;
}

}  // namespace afov::synth
