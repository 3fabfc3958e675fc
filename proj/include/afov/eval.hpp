#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "afov/classdict.hpp"
#include "afov/common.hpp"

namespace afov {

/// Rows are ground truth, columns are predictions. Column `num_classes` holds
/// UNLABELED predictions; points with UNLABELED truth are only counted in
/// `ignored`.
struct ConfusionMatrix {
  std::size_t num_classes = 0;
  std::vector<std::uint64_t> counts;
  std::uint64_t ignored = 0;

  std::uint64_t at(std::size_t truth, std::size_t pred) const {
    return counts[truth * (num_classes + 1) + pred];
  }
  std::uint64_t unlabeled_predictions(std::size_t truth) const { return at(truth, num_classes); }

  std::uint64_t total() const {
    std::uint64_t t = ignored;
    for (auto c : counts) t += c;
    return t;
  }
};

inline ConfusionMatrix confusion(const LabelField& gt, const LabelField& pred, std::size_t num_classes) {
  if (gt.size() != pred.size())
    throw Error("length mismatch: " + std::to_string(gt.size()) + " truth labels vs " +
                std::to_string(pred.size()) + " predictions");
  require(num_classes >= 1, "num_classes must be positive");
  ConfusionMatrix cm{num_classes, std::vector<std::uint64_t>(num_classes * (num_classes + 1), 0), 0};
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (gt[i] == kUnlabeled) {
      ++cm.ignored;
      continue;
    }
    require(gt[i] < num_classes, "truth label " + std::to_string(gt[i]) + " out of range");
    const std::size_t p = pred[i] == kUnlabeled ? num_classes : pred[i];
    require(p <= num_classes, "predicted label " + std::to_string(pred[i]) + " out of range");
    ++cm.counts[gt[i] * (num_classes + 1) + p];
  }
  return cm;
}

struct IoUReport {
  std::vector<std::optional<double>> per_class;  // empty when absent from truth and prediction
  double mean = 0.0;                             // fraction in [0, 1]
  std::size_t classes_counted = 0;
  std::uint64_t ignored = 0;

  double miou_percent() const { return 100.0 * mean; }
};

/// IoU_c = TP / (TP + FP + FN). UNLABELED predictions count as false
/// negatives of their truth class. Classes absent from both truth and
/// prediction are left out of the mean.
inline IoUReport miou(const ConfusionMatrix& cm) {
  const auto nc = cm.num_classes;
  IoUReport rep;
  rep.ignored = cm.ignored;
  rep.per_class.resize(nc);
  double sum = 0.0;
  for (std::size_t c = 0; c < nc; ++c) {
    const auto tp = cm.at(c, c);
    std::uint64_t fn = 0, fp = 0;
    for (std::size_t p = 0; p <= nc; ++p)
      if (p != c) fn += cm.at(c, p);
    for (std::size_t t = 0; t < nc; ++t)
      if (t != c) fp += cm.at(t, c);
    const auto uni = tp + fp + fn;
    if (uni == 0) continue;
    const double iou = static_cast<double>(tp) / static_cast<double>(uni);
    rep.per_class[c] = iou;
    sum += iou;
    ++rep.classes_counted;
  }
  if (rep.classes_counted > 0) rep.mean = sum / static_cast<double>(rep.classes_counted);
  return rep;
}

inline nlohmann::json metrics_json(const IoUReport& rep, const ClassDictionary* dict = nullptr) {
  nlohmann::json per = nlohmann::json::array();
  for (std::size_t c = 0; c < rep.per_class.size(); ++c) {
    nlohmann::json e{{"id", c}};
    e["name"] = dict ? dict->class_name(static_cast<Label>(c)) : "class " + std::to_string(c);
    e["iou"] = rep.per_class[c] ? nlohmann::json(*rep.per_class[c]) : nlohmann::json(nullptr);
    per.push_back(e);
  }
  return {{"miou", rep.miou_percent()},
          {"classes_counted", rep.classes_counted},
          {"ignored", rep.ignored},
          {"per_class", per}};
}

}  // namespace afov
