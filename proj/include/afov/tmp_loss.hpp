#pragma once

// Tri-modal contrastive objective: superpixel-superpoint InfoNCE, the
// text-superpoint variant with semi-positive down-weighting, and their
// weighted sum. Gradients flow into the superpoint rows only; superpixel and
// text features are frozen teacher outputs.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "afov/common.hpp"

namespace afov {

struct TmpBatch {
  MatrixD superpoints;  // R' x D, trainable side
  MatrixD superpixels;  // R' x D, row i pairs with superpoint i
  MatrixD texts;        // R' x D, text feature of the mask behind row i
  std::vector<Label> class_of;
  std::vector<std::size_t> text_of;  // prompt id per row; equal ids are never negatives
  MatrixD semi_positive;             // R' x R' weights, see semi_positive_weights
  double tau = 0.07;
  double alpha_image = 0.5;
  double alpha_text = 0.5;

  Eigen::Index size() const { return superpoints.rows(); }
};

struct LossValue {
  double loss = 0.0;
  MatrixD grad;  // d loss / d superpoints
};

struct LossReport {
  double l_ip = 0.0;
  double l_tp = 0.0;
  double l_tmp = 0.0;
  MatrixD grad_superpoints;
};

/// Checks the full batch contract, including unit-norm rows.
inline void validate(const TmpBatch& b) {
  const auto r = b.size();
  require(r >= 1, "batch must contain at least one row");
  require(b.tau > 0.0, "tau must be positive");
  require(b.superpixels.rows() == r && b.texts.rows() == r, "batch row counts disagree");
  require(b.superpixels.cols() == b.superpoints.cols() && b.texts.cols() == b.superpoints.cols(),
          "batch feature dimensions disagree");
  require(b.class_of.size() == static_cast<std::size_t>(r) &&
              b.text_of.size() == static_cast<std::size_t>(r),
          "class_of/text_of must have one entry per row");
  require(b.alpha_image >= 0.0 && b.alpha_image <= 1.0 && b.alpha_text >= 0.0 && b.alpha_text <= 1.0,
          "loss weights must lie in [0, 1]");
  for (const MatrixD* m : {&b.superpoints, &b.superpixels, &b.texts})
    for (Eigen::Index i = 0; i < r; ++i)
      require(std::abs(m->row(i).norm() - 1.0) <= 1e-6, "batch rows must be unit-norm");
}

namespace detail {

/// Shared InfoNCE core. Row i uses anchor a_i against every superpoint p_j.
/// The positive logit is cos(a_i, p_i)/tau; negative j contributes
/// (1 - w_ij) cos(a_i, p_j)/tau when include(i, j) holds.
template <typename Include>
LossValue contrastive(const MatrixD& anchors, const MatrixD& points, const MatrixD* weights,
                      double tau, const Include& include) {
  const auto r = points.rows();
  const auto d = points.cols();
  if (r == 0) throw Error("batch must contain at least one row");
  if (!(tau > 0.0)) throw Error("tau must be positive");
  require(anchors.rows() == r && anchors.cols() == d, "anchor/superpoint shapes disagree");

  MatrixD a_hat(r, d), p_hat(r, d);
  Eigen::VectorXd p_norm(r);
  for (Eigen::Index i = 0; i < r; ++i) {
    const double na = anchors.row(i).norm();
    const double np = points.row(i).norm();
    require(na > 0.0 && std::isfinite(na), "zero-norm anchor row " + std::to_string(i));
    require(np > 0.0 && std::isfinite(np), "zero-norm superpoint row " + std::to_string(i));
    a_hat.row(i) = anchors.row(i) / na;
    p_hat.row(i) = points.row(i) / np;
    p_norm(i) = np;
  }
  const MatrixD sim = a_hat * p_hat.transpose();

  LossValue out;
  out.grad = MatrixD::Zero(r, d);
  std::vector<double> logit(static_cast<std::size_t>(r));
  std::vector<double> scale(static_cast<std::size_t>(r));
  std::vector<char> used(static_cast<std::size_t>(r));
  for (Eigen::Index i = 0; i < r; ++i) {
    double top = -std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < r; ++j) {
      const auto js = static_cast<std::size_t>(j);
      used[js] = (j == i) || include(i, j);
      if (!used[js]) continue;
      scale[js] = (j == i || weights == nullptr) ? 1.0 / tau : (1.0 - (*weights)(i, j)) / tau;
      logit[js] = scale[js] * sim(i, j);
      top = std::max(top, logit[js]);
    }
    const double own = logit[static_cast<std::size_t>(i)];
    double z = 0.0, rest = 0.0;
    for (Eigen::Index j = 0; j < r; ++j) {
      if (!used[static_cast<std::size_t>(j)]) continue;
      const double e = std::exp(logit[static_cast<std::size_t>(j)] - top);
      z += e;
      if (j != i) rest += e;
    }
    const double lse = top + std::log(z);
    // log1p keeps tiny losses exact when the positive dominates the row
    out.loss += own == top ? std::log1p(rest) : lse - own;

    // d loss_i / d sim_ij = (softmax_ij - [i == j]) * scale_ij
    for (Eigen::Index j = 0; j < r; ++j) {
      const auto js = static_cast<std::size_t>(j);
      if (!used[js]) continue;
      const double prob = std::exp(logit[js] - lse);
      const double g = (prob - (j == i ? 1.0 : 0.0)) * scale[js] / static_cast<double>(r);
      // d cos(a, p) / d p = (a_hat - cos * p_hat) / |p|
      out.grad.row(j) += g * (a_hat.row(i) - sim(i, j) * p_hat.row(j)) / p_norm(j);
    }
  }
  out.loss /= static_cast<double>(r);
  return out;
}

}  // namespace detail

/// Superpixel-superpoint contrastive loss; every other row is a negative.
inline LossValue loss_ip(const TmpBatch& b) {
  return detail::contrastive(b.superpixels, b.superpoints, nullptr, b.tau,
                             [](Eigen::Index i, Eigen::Index j) { return i != j; });
}

/// Text-superpoint contrastive loss. Rows carrying the same prompt are not
/// negatives; distinct-prompt negatives are scaled by (1 - alpha_ij).
inline LossValue loss_tp(const TmpBatch& b, const MatrixD& alpha) {
  const auto r = b.size();
  require(alpha.rows() == r && alpha.cols() == r, "alpha must be R' x R'");
  require(b.text_of.size() == static_cast<std::size_t>(r), "text_of must have one entry per row");
  require((alpha - alpha.transpose()).cwiseAbs().maxCoeff() <= 1e-9, "alpha must be symmetric");
  return detail::contrastive(b.texts, b.superpoints, &alpha, b.tau, [&](Eigen::Index i, Eigen::Index j) {
    return b.text_of[static_cast<std::size_t>(i)] != b.text_of[static_cast<std::size_t>(j)];
  });
}

/// Weighted sum of the two losses. Both terms are always evaluated so that a
/// zero weight still reports its loss.
inline LossReport loss_tmp(const TmpBatch& b) {
  require(b.alpha_image >= 0.0 && b.alpha_text >= 0.0, "loss weights must be non-negative");
  const auto ip = loss_ip(b);
  const auto tp = loss_tp(b, b.semi_positive);
  LossReport rep;
  rep.l_ip = ip.loss;
  rep.l_tp = tp.loss;
  rep.l_tmp = b.alpha_image * rep.l_ip + b.alpha_text * rep.l_tp;
  rep.grad_superpoints = b.alpha_image * ip.grad + b.alpha_text * tp.grad;
  return rep;
}

}  // namespace afov
