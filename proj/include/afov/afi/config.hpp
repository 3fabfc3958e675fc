#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "afov/common.hpp"
#include "afov/io.hpp"

namespace afov::afi {

struct AfiConfig {
  double gamma = 0.995;  // minimum direction cosine for an interaction (~5.7 degrees)
  double beta = 4.0;     // pseudo/predict odds at zero horizontal distance
  double s_dist = 15.0;  // horizontal distance where coverage probability is 0.5
  int lattice_m = 60;
  int layers = 4;
  std::vector<double> rates = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  int knn = 16;     // encoder neighbourhood
  int knn_up = 3;   // decoder neighbourhood
  bool coverage_enabled = true;
  std::uint64_t seed = 0;
  int num_classes = 0;  // 0: infer from the labels

  bool operator==(const AfiConfig&) const = default;
};

inline void validate(const AfiConfig& c) {
  if (!(c.gamma > 0.0 && c.gamma < 1.0)) throw ConfigError("gamma must be in (0,1)");
  if (!(c.beta > 0.0)) throw ConfigError("beta must be positive");
  if (!(c.s_dist > 0.0)) throw ConfigError("s-dist must be positive");
  if (c.lattice_m < 4) throw ConfigError("lattice-m must be at least 4");
  if (c.layers < 1) throw ConfigError("layers must be at least 1");
  if (c.rates.size() != static_cast<std::size_t>(c.layers))
    throw ConfigError("rates must list one keep ratio per layer");
  for (const double r : c.rates)
    if (!(r > 0.0 && r <= 1.0)) throw ConfigError("rates must be in (0,1]");
  if (c.knn < 1) throw ConfigError("knn must be at least 1");
  if (c.knn_up < 1) throw ConfigError("knn-up must be at least 1");
  if (c.num_classes < 0 || c.num_classes >= kUnlabeled) throw ConfigError("num-classes out of range");
}

inline nlohmann::json to_json(const AfiConfig& c) {
  return {{"gamma", c.gamma},       {"beta", c.beta},     {"s_dist", c.s_dist},
          {"lattice_m", c.lattice_m}, {"layers", c.layers}, {"rates", c.rates},
          {"knn", c.knn},           {"knn_up", c.knn_up}, {"coverage", c.coverage_enabled},
          {"seed", c.seed},         {"num_classes", c.num_classes}};
}

/// Missing keys keep their defaults. A `layers` value without `rates`
/// repeats 1/3 for every layer.
inline AfiConfig config_from_json(const nlohmann::json& j) {
  AfiConfig c;
  try {
    c.gamma = j.value("gamma", c.gamma);
    c.beta = j.value("beta", c.beta);
    c.s_dist = j.value("s_dist", c.s_dist);
    c.lattice_m = j.value("lattice_m", c.lattice_m);
    c.layers = j.value("layers", c.layers);
    if (j.contains("rates"))
      c.rates = j.at("rates").get<std::vector<double>>();
    else
      c.rates.assign(static_cast<std::size_t>(std::max(c.layers, 0)), 1.0 / 3.0);
    c.knn = j.value("knn", c.knn);
    c.knn_up = j.value("knn_up", c.knn_up);
    c.coverage_enabled = j.value("coverage", c.coverage_enabled);
    c.seed = j.value("seed", c.seed);
    c.num_classes = j.value("num_classes", c.num_classes);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad afi config: ") + e.what());
  }
  return c;
}

}  // namespace afov::afi
