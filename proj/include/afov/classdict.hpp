#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "afov/common.hpp"
#include "afov/io.hpp"

namespace afov {

/// Maps open-vocabulary prompts onto dataset classes. Prompt order across the
/// dictionary defines the row order of the text feature matrix.
class ClassDictionary {
 public:
  struct Entry {
    Label id = 0;
    std::string name;
    std::vector<std::string> prompts;
  };

  ClassDictionary() = default;

  explicit ClassDictionary(std::vector<Entry> classes) : classes_(std::move(classes)) {
    require(!classes_.empty(), "class dictionary is empty");
    std::unordered_map<Label, bool> seen_ids;
    for (const auto& c : classes_) {
      require(c.id != kUnlabeled, "class id 65535 is reserved for UNLABELED");
      require(!seen_ids[c.id], "duplicate class id " + std::to_string(c.id));
      seen_ids[c.id] = true;
      require(!c.prompts.empty(), "class '" + c.name + "' has no prompts");
      for (const auto& p : c.prompts) {
        require(!rows_.contains(p), "prompt '" + p + "' registered twice");
        rows_.emplace(p, prompt_class_.size());
        prompt_class_.push_back(c.id);
        prompts_.push_back(p);
      }
      num_classes_ = std::max<std::size_t>(num_classes_, std::size_t{c.id} + 1);
    }
  }

  const std::vector<Entry>& classes() const { return classes_; }
  std::size_t num_prompts() const { return prompts_.size(); }
  const std::string& prompt(std::size_t row) const { return prompts_.at(row); }

  /// One past the largest class id; the width of one-hot label features.
  std::size_t num_classes() const { return num_classes_; }

  std::size_t prompt_row(std::string_view prompt) const {
    const auto it = rows_.find(std::string(prompt));
    if (it == rows_.end()) throw Error("unknown prompt '" + std::string(prompt) + "'");
    return it->second;
  }

  Label resolve(std::string_view prompt) const { return prompt_class_[prompt_row(prompt)]; }

  Label resolve(std::size_t prompt_row) const {
    if (prompt_row >= prompt_class_.size())
      throw Error("unknown prompt id " + std::to_string(prompt_row));
    return prompt_class_[prompt_row];
  }

  std::string class_name(Label id) const {
    for (const auto& c : classes_)
      if (c.id == id) return c.name;
    return id == kUnlabeled ? "unlabeled" : "class " + std::to_string(id);
  }

  /// Prompt rows owned by a class, in dictionary order.
  std::vector<std::size_t> prompts_of(Label id) const {
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < prompt_class_.size(); ++r)
      if (prompt_class_[r] == id) rows.push_back(r);
    return rows;
  }

 private:
  std::vector<Entry> classes_;
  std::unordered_map<std::string, std::size_t> rows_;
  std::vector<Label> prompt_class_;
  std::vector<std::string> prompts_;
  std::size_t num_classes_ = 0;
};

inline nlohmann::json to_json(const ClassDictionary& dict) {
  nlohmann::json classes = nlohmann::json::array();
  for (const auto& c : dict.classes())
    classes.push_back({{"id", c.id}, {"name", c.name}, {"prompts", c.prompts}});
  return {{"classes", classes}};
}

inline ClassDictionary dictionary_from_json(const nlohmann::json& j) {
  std::vector<ClassDictionary::Entry> entries;
  for (const auto& c : detail::field<nlohmann::json>(j, "classes")) {
    const auto id = detail::field<std::int64_t>(c, "id");
    if (id < 0 || id >= kUnlabeled) throw Error("class id out of range");
    entries.push_back({static_cast<Label>(id), detail::field<std::string>(c, "name"),
                       detail::field<std::vector<std::string>>(c, "prompts")});
  }
  return ClassDictionary(std::move(entries));
}

inline ClassDictionary read_dictionary(const std::filesystem::path& path) {
  return dictionary_from_json(detail::read_json(path));
}

inline void write_dictionary(const ClassDictionary& dict, const std::filesystem::path& path) {
  detail::write_json(path, to_json(dict));
}

/// The four-class dictionary shipped with the synthetic harness.
inline ClassDictionary default_dictionary() {
  return ClassDictionary({
      {0, "road", {"road", "street", "asphalt"}},
      {1, "car", {"car", "sedan", "van"}},
      {2, "pedestrian", {"pedestrian", "person", "walker"}},
      {3, "building", {"building", "wall", "house"}},
  });
}

/// Semi-positive weights for a batch of per-mask text features. Entry (i, j)
/// is the text cosine when the two rows carry distinct prompts of the same
/// class, zero otherwise. Negative cosines are kept.
inline MatrixD semi_positive_weights(const MatrixD& text_feats,
                                     std::span<const std::size_t> prompt_ids,
                                     const ClassDictionary& dict) {
  const auto n = text_feats.rows();
  require(static_cast<std::size_t>(n) == prompt_ids.size(), "one prompt id per text row required");
  Eigen::VectorXd norms = text_feats.rowwise().norm();
  for (Eigen::Index i = 0; i < n; ++i)
    require(norms(i) > 0.0, "zero-norm text feature row " + std::to_string(i));

  MatrixD alpha = MatrixD::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto ci = dict.resolve(prompt_ids[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const auto pi = prompt_ids[static_cast<std::size_t>(i)];
      const auto pj = prompt_ids[static_cast<std::size_t>(j)];
      if (pi == pj || dict.resolve(pj) != ci) continue;
      const double cos = text_feats.row(i).dot(text_feats.row(j)) / (norms(i) * norms(j));
      alpha(i, j) = alpha(j, i) = std::clamp(cos, -1.0, 1.0);
    }
  }
  return alpha;
}

}  // namespace afov
