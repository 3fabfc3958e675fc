#pragma once

// Affine projection head E -> D* trained with plain gradient descent on the
// tri-modal loss. Stands in for the projection head of a 3D backbone; the
// backbone itself is replaced by the raw per-point features.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "afov/classdict.hpp"
#include "afov/correspondence.hpp"
#include "afov/io.hpp"
#include "afov/rng.hpp"
#include "afov/tmp_loss.hpp"

namespace afov {

struct ProjectionHead {
  MatrixD weight;  // D* x E
  Eigen::VectorXd bias;

  Eigen::Index input_dim() const { return weight.cols(); }
  Eigen::Index embed_dim() const { return weight.rows(); }

  /// Embeds every row of `features` (N x E) -> N x D*.
  MatrixD embed(const MatrixD& features) const {
    MatrixD out = features * weight.transpose();
    out.rowwise() += bias.transpose();
    return out;
  }

  bool operator==(const ProjectionHead& o) const { return weight == o.weight && bias == o.bias; }
};

inline ProjectionHead init_head(Eigen::Index input_dim, Eigen::Index embed_dim, std::uint64_t seed) {
  Rng rng(seed);
  ProjectionHead head{MatrixD(embed_dim, input_dim), Eigen::VectorXd(embed_dim)};
  for (Eigen::Index r = 0; r < embed_dim; ++r)
    for (Eigen::Index c = 0; c < input_dim; ++c) head.weight(r, c) = rng.uniform(-0.1, 0.1);
  for (Eigen::Index r = 0; r < embed_dim; ++r) head.bias(r) = rng.uniform(-0.1, 0.1);
  return head;
}

struct TrainOptions {
  int steps = 500;
  double lr = 0.5;
  std::uint64_t seed = 0;
  double tau = 0.07;
  double alpha_image = 0.5;
  double alpha_text = 0.5;
  bool superpoints = true;  // false: k-NN point groups instead of mask groups
  std::size_t knn_group = 16;
};

struct TraceRow {
  int step = 0;
  double l_ip = 0.0;
  double l_tp = 0.0;
  double l_tmp = 0.0;

  bool operator==(const TraceRow&) const = default;
};

struct TrainResult {
  ProjectionHead head;
  std::vector<TraceRow> trace;  // loss before each update
  Correspondence corr;
};

/// Members sorted by coordinates, then feature values, so that sums over
/// them do not depend on the point order of the bundle.
inline std::vector<std::size_t> canonical_members(const SceneBundle& bundle, std::vector<std::size_t> members) {
  const auto& f = bundle.raw_features;
  std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
    const auto ia = static_cast<Eigen::Index>(a), ib = static_cast<Eigen::Index>(b);
    for (Eigen::Index c = 0; c < 3; ++c)
      if (bundle.points(ia, c) != bundle.points(ib, c)) return bundle.points(ia, c) < bundle.points(ib, c);
    for (Eigen::Index c = 0; c < f.cols(); ++c)
      if (f(ia, c) != f(ib, c)) return f(ia, c) < f(ib, c);
    return false;
  });
  return members;
}

/// Frozen teacher side of a training batch, built once per scene.
struct TeacherBatch {
  MatrixD mean_features;  // R x E, mean raw feature of each superpoint
  TmpBatch batch;         // superpoints left empty
};

inline TeacherBatch make_teacher_batch(const SceneBundle& bundle, const std::vector<MaskSet>& teacher,
                                       const ClassDictionary& dict, const Correspondence& corr,
                                       const TrainOptions& opt) {
  require(corr.size() >= 1, "correspondence is empty; nothing to train on");
  const auto& texts = teacher.front().text_features;
  require(static_cast<std::size_t>(texts.rows()) == dict.num_prompts(),
          "text feature rows must match dictionary prompts");
  const auto r = static_cast<Eigen::Index>(corr.size());
  const auto d = texts.cols();
  const auto e = bundle.raw_features.cols();

  TeacherBatch tb;
  tb.mean_features = MatrixD::Zero(r, e);
  tb.batch.superpixels.resize(r, d);
  tb.batch.texts.resize(r, d);
  for (Eigen::Index i = 0; i < r; ++i) {
    const auto& pair = corr.pairs[static_cast<std::size_t>(i)];
    for (const auto p : canonical_members(bundle, pair.points))
      tb.mean_features.row(i) += bundle.raw_features.row(static_cast<Eigen::Index>(p)).cast<double>();
    tb.mean_features.row(i) /= static_cast<double>(pair.points.size());
    require(pair.superpixel.size() == d, "mask and text feature dimensions disagree");
    tb.batch.superpixels.row(i) = pair.superpixel.transpose();
    Eigen::RowVectorXd t = texts.row(static_cast<Eigen::Index>(pair.text)).cast<double>();
    require(t.norm() > 0.0, "zero-norm text feature");
    tb.batch.texts.row(i) = t / t.norm();
    tb.batch.class_of.push_back(pair.label);
    tb.batch.text_of.push_back(pair.text);
  }
  tb.batch.semi_positive = semi_positive_weights(tb.batch.texts, tb.batch.text_of, dict);
  tb.batch.tau = opt.tau;
  tb.batch.alpha_image = opt.alpha_image;
  tb.batch.alpha_text = opt.alpha_text;
  return tb;
}

/// Plain gradient descent on the tri-modal loss; one batch = every pair of the
/// scene. Pooled superpoints are passed to the loss unnormalised: the cosine
/// inside the loss applies (and differentiates) the normalisation.
inline TrainResult train_toy_head(const SceneBundle& bundle, const std::vector<MaskSet>& teacher,
                                  const ClassDictionary& dict, const TrainOptions& opt) {
  require(opt.steps >= 0, "steps must be non-negative");
  require(opt.tau > 0.0, "tau must be positive");
  TrainResult res;
  res.corr = build_correspondence(bundle, teacher);
  if (!opt.superpoints) res.corr = knn_grouping(bundle, res.corr, opt.knn_group);
  auto tb = make_teacher_batch(bundle, teacher, dict, res.corr, opt);

  const auto d = teacher.front().text_features.cols();
  res.head = init_head(bundle.raw_features.cols(), d, opt.seed);
  for (int step = 0; step < opt.steps; ++step) {
    tb.batch.superpoints = res.head.embed(tb.mean_features);
    if (!tb.batch.superpoints.rowwise().norm().allFinite())
      throw Error("training diverged at step " + std::to_string(step) + " (embeddings are not finite)");
    const auto rep = loss_tmp(tb.batch);
    if (!std::isfinite(rep.l_tmp))
      throw Error("training diverged at step " + std::to_string(step) + " (loss is not finite)");
    res.trace.push_back({step, rep.l_ip, rep.l_tp, rep.l_tmp});
    res.head.weight -= opt.lr * (rep.grad_superpoints.transpose() * tb.mean_features);
    res.head.bias -= opt.lr * rep.grad_superpoints.colwise().sum().transpose();
    if (!res.head.weight.allFinite() || !res.head.bias.allFinite())
      throw Error("training diverged at step " + std::to_string(step) + " (head weights are not finite)");
  }
  return res;
}

/// Class of the nearest dictionary text (by cosine) for every row.
inline LabelField nearest_text(const MatrixD& embeddings, const FeatureMatrix& text_features,
                               const ClassDictionary& dict) {
  MatrixD texts = text_features.cast<double>();
  for (Eigen::Index t = 0; t < texts.rows(); ++t) texts.row(t).normalize();
  LabelField out(static_cast<std::size_t>(embeddings.rows()), kUnlabeled);
  for (Eigen::Index i = 0; i < embeddings.rows(); ++i) {
    const double n = embeddings.row(i).norm();
    if (!(n > 0.0)) continue;
    Eigen::Index best = 0;
    (texts * embeddings.row(i).transpose()).maxCoeff(&best);
    out[static_cast<std::size_t>(i)] = dict.resolve(static_cast<std::size_t>(best));
  }
  return out;
}

/// Baseline per-point prediction: nearest text of each embedded point.
inline LabelField predict_points(const SceneBundle& bundle, const ProjectionHead& head,
                                 const FeatureMatrix& text_features, const ClassDictionary& dict) {
  return nearest_text(head.embed(bundle.raw_features.cast<double>()), text_features, dict);
}

inline nlohmann::json head_to_json(const ProjectionHead& head) {
  std::vector<double> w(head.weight.data(), head.weight.data() + head.weight.size());
  std::vector<double> b(head.bias.data(), head.bias.data() + head.bias.size());
  return {{"input_dim", head.input_dim()}, {"embed_dim", head.embed_dim()}, {"weight", w}, {"bias", b}};
}

inline ProjectionHead head_from_json(const nlohmann::json& j) {
  const auto e = detail::field<Eigen::Index>(j, "input_dim");
  const auto d = detail::field<Eigen::Index>(j, "embed_dim");
  const auto w = detail::field<std::vector<double>>(j, "weight");
  const auto b = detail::field<std::vector<double>>(j, "bias");
  require(e > 0 && d > 0, "head dimensions must be positive");
  require(w.size() == static_cast<std::size_t>(e * d) && b.size() == static_cast<std::size_t>(d),
          "head.json weight/bias sizes disagree with dimensions");
  ProjectionHead head{MatrixD(d, e), Eigen::VectorXd(d)};
  std::copy(w.begin(), w.end(), head.weight.data());
  std::copy(b.begin(), b.end(), head.bias.data());
  return head;
}

inline void write_trace(const std::filesystem::path& path, const std::vector<TraceRow>& trace) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open for writing: " + path.string());
  out << "step,l_ip,l_tp,l_tmp\n";
  char line[128];
  for (const auto& r : trace) {
    std::snprintf(line, sizeof line, "%d,%.17g,%.17g,%.17g\n", r.step, r.l_ip, r.l_tp, r.l_tmp);
    out << line;
  }
}

}  // namespace afov
