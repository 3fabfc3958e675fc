#pragma once

// Scenes shared by the AFI tests and the acceptance runner.

#include "afov/afov.hpp"

namespace suite {

/// Planar-noise scene: 20% of the road masks (cut into 16 px tiles) carry a
/// wrong label, object masks are clean.
inline afov::synth::SynthSpec planar_noise(std::uint64_t seed) {
  return {.seed = seed, .n_points = 6000, .noise_rate = 0.2, .tile_px = 16, .noise_ground_only = true};
}

inline constexpr std::uint64_t kPlanarSeeds[] = {11, 12, 13, 14, 15};

/// Zero-noise bundle used for head training.
inline afov::synth::SynthSpec tmp_bundle() {
  return {.seed = 7,
          .n_points = 6000,
          .classes = {"road", "car", "building"},
          .feature_dim = 64,
          .embed_dim = 32,
          .n_cameras = 2};
}

struct Denoise {
  afov::LabelField gt, pseudo, refined;
  double miou_before = 0.0, miou_after = 0.0;
  double object_kept = 0.0;  // non-road points still carrying their true label
};

inline Denoise run_planar(std::uint64_t seed) {
  using namespace afov;
  const auto spec = planar_noise(seed);
  const auto bundle = synth::generate_scene(spec);
  const auto dict = default_dictionary();
  const auto teacher = synth::generate_teacher(bundle, dict, spec);
  Denoise d;
  d.gt = *bundle.gt_labels;
  d.pseudo = pseudo_labels(bundle, teacher.images);
  const auto fov = fov_mask(bundle);
  afi::AfiConfig cfg;
  cfg.coverage_enabled = false;
  cfg.num_classes = static_cast<int>(dict.num_classes());
  d.refined = afi::afi(d.pseudo, bundle.points, cfg, &fov, &d.pseudo);
  const auto nc = dict.num_classes();
  d.miou_before = miou(confusion(d.gt, d.pseudo, nc)).miou_percent();
  d.miou_after = miou(confusion(d.gt, d.refined, nc)).miou_percent();
  std::size_t objects = 0, kept = 0;
  for (std::size_t i = 0; i < d.gt.size(); ++i) {
    if (d.gt[i] == 0) continue;
    ++objects;
    kept += d.refined[i] == d.gt[i];
  }
  d.object_kept = objects ? static_cast<double>(kept) / static_cast<double>(objects) : 1.0;
  return d;
}

}  // namespace suite
