#pragma once

// Encoder/decoder of the flat-interaction label propagation. Points are
// processed in lexicographic order so that neither the input order nor a
// rigid translation can change a decision.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "afov/afi/config.hpp"
#include "afov/afi/coverage.hpp"
#include "afov/afi/directional.hpp"
#include "afov/afi/lattice.hpp"
#include "afov/spatial.hpp"

namespace afov::afi {

/// One resolution of the encoder. Level 0 is the input cloud (no states).
struct EncoderLevel {
  std::vector<Vec3> positions;
  std::vector<std::size_t> origin;         // index into the level-0 cloud
  std::vector<std::size_t> centers;        // index into the previous level
  std::vector<DirectionalState> states;    // one per position (levels >= 1)
  MatrixD features;                        // rows are probability vectors (levels >= 1)
  std::vector<char> evidence;              // some labeled point reached this one
};

struct EncoderOutput {
  LatticeBasis basis;
  MatrixD onehot;  // N x C input features, zero rows for UNLABELED
  MatrixD input_features;  // first-layer feature update evaluated at every input point
  std::vector<EncoderLevel> levels;
};

inline MatrixD one_hot(const LabelField& labels, std::size_t num_classes) {
  MatrixD f = MatrixD::Zero(static_cast<Eigen::Index>(labels.size()), static_cast<Eigen::Index>(num_classes));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == kUnlabeled) continue;
    require(labels[i] < num_classes, "label " + std::to_string(labels[i]) + " exceeds num_classes");
    f(static_cast<Eigen::Index>(i), labels[i]) = 1.0;
  }
  return f;
}

namespace detail {

inline std::size_t keep_count(double rate, std::size_t n) {
  const auto m = static_cast<std::size_t>(std::ceil(rate * static_cast<double>(n) - 1e-9));
  return std::clamp<std::size_t>(m, 1, n);
}

struct CenterUpdate {
  DirectionalState state;
  Eigen::RowVectorXd feature;
  bool evidence = false;
};

/// Neighbourhood aggregation and feature update around one point of `prev`.
/// The first layer weights neighbours equally; later layers softmax the
/// pairwise correlations of the previous states.
inline CenterUpdate update_center(const EncoderLevel& prev, std::size_t ctr, bool first_layer, const MatrixD& onehot,
                                  const LatticeBasis& basis, const AfiConfig& cfg) {
  const auto c = onehot.cols();
  const Vec3& p0 = prev.positions[ctr];
  const auto nbrs = spatial::knn(prev.positions, p0, static_cast<std::size_t>(cfg.knn), ctr);
  std::vector<Vec3> nbr_pos;
  nbr_pos.reserve(nbrs.size());
  for (auto k : nbrs) nbr_pos.push_back(prev.positions[k]);

  std::vector<double> corr(nbrs.size(), nbrs.empty() ? 0.0 : 1.0 / static_cast<double>(nbrs.size()));
  if (!first_layer && !nbrs.empty()) {
    Eigen::VectorXd raw(static_cast<Eigen::Index>(nbrs.size()));
    for (std::size_t k = 0; k < nbrs.size(); ++k)
      raw(static_cast<Eigen::Index>(k)) =
          pair_correlation(prev.states[ctr], prev.states[nbrs[k]], p0, nbr_pos[k], cfg.gamma);
    const Eigen::VectorXd w = softmax(raw);
    for (std::size_t k = 0; k < nbrs.size(); ++k) corr[k] = w(static_cast<Eigen::Index>(k));
  }

  CenterUpdate u;
  MatrixD nbr_feat(static_cast<Eigen::Index>(nbrs.size()), c);
  Eigen::RowVectorXd pooled = Eigen::RowVectorXd::Zero(c);
  u.evidence = prev.evidence[ctr];
  for (std::size_t k = 0; k < nbrs.size(); ++k) {
    nbr_feat.row(static_cast<Eigen::Index>(k)) = prev.features.row(static_cast<Eigen::Index>(nbrs[k]));
    pooled = pooled.cwiseMax(onehot.row(static_cast<Eigen::Index>(prev.origin[nbrs[k]])));
    u.evidence = u.evidence || prev.evidence[nbrs[k]];
  }
  const auto ids = direction_cluster(p0, nbr_pos, basis);
  u.state = aggregate(p0, nbr_pos, ids, nbr_feat, corr, basis.size());

  Eigen::RowVectorXd pre = 0.1 * onehot.row(static_cast<Eigen::Index>(prev.origin[ctr])) + 1e-8 * pooled;
  for (const auto i : u.state.occupied)
    pre += u.state.correlations(static_cast<Eigen::Index>(i)) * u.state.features.row(static_cast<Eigen::Index>(i));
  u.feature = softmax(pre);
  return u;
}

}  // namespace detail

/// Runs every encoder layer. The first layer's feature update is evaluated at
/// every input point (not only at the sampled centres); the decoder uses it as
/// the skip feature of the finest level.
inline EncoderOutput encode(std::span<const Vec3> points, const MatrixD& onehot, const AfiConfig& cfg) {
  validate(cfg);
  require(static_cast<std::size_t>(onehot.rows()) == points.size(), "encode: feature rows must match points");
  EncoderOutput out;
  out.basis = fibonacci_lattice(static_cast<std::size_t>(cfg.lattice_m));
  out.onehot = onehot;
  const auto c = onehot.cols();

  EncoderLevel base;
  base.positions.assign(points.begin(), points.end());
  base.origin.resize(points.size());
  base.evidence.resize(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    base.origin[i] = i;
    base.evidence[i] = onehot.row(static_cast<Eigen::Index>(i)).sum() > 0.0;
  }
  base.features = onehot;
  out.levels.push_back(std::move(base));

  for (int layer = 0; layer < cfg.layers; ++layer) {
    const auto& prev = out.levels.back();
    const auto n = prev.positions.size();
    EncoderLevel next;
    next.centers = spatial::farthest_point_sample(prev.positions, detail::keep_count(cfg.rates[layer], n));
    const auto count = next.centers.size();
    next.features.resize(static_cast<Eigen::Index>(count), c);
    next.evidence.resize(count);
    next.states.resize(count);

    std::vector<std::ptrdiff_t> slot(n, -1);
    for (std::size_t r = 0; r < count; ++r) slot[next.centers[r]] = static_cast<std::ptrdiff_t>(r);
    const auto store = [&](std::size_t r, detail::CenterUpdate&& u) {
      next.features.row(static_cast<Eigen::Index>(r)) = u.feature;
      next.evidence[r] = u.evidence;
      next.states[r] = std::move(u.state);
    };
    if (layer == 0) {
      out.input_features.resize(static_cast<Eigen::Index>(n), c);
      for (std::size_t q = 0; q < n; ++q) {
        auto u = detail::update_center(prev, q, true, onehot, out.basis, cfg);
        out.input_features.row(static_cast<Eigen::Index>(q)) = u.feature;
        if (slot[q] >= 0) store(static_cast<std::size_t>(slot[q]), std::move(u));
      }
    } else {
      for (std::size_t r = 0; r < count; ++r)
        store(r, detail::update_center(prev, next.centers[r], false, onehot, out.basis, cfg));
    }
    for (const auto ctr : next.centers) {
      next.positions.push_back(prev.positions[ctr]);
      next.origin.push_back(prev.origin[ctr]);
    }
    out.levels.push_back(std::move(next));
  }
  return out;
}

/// Upsampling weight logit of coarse neighbour `state` for a fine point at
/// offset `link` from it: summed correlation of the directions approximately
/// parallel to the link. A fine point that coincides with the coarse point
/// gets the full correlation mass.
inline double upsample_logit(const DirectionalState& state, const Vec3& link, double gamma) {
  const double gap = link.norm();
  double sum = 0.0;
  for (const auto i : state.occupied) {
    const double l = state.correlations(static_cast<Eigen::Index>(i));
    if (!(gap > 0.0)) {
      sum += l;
      continue;
    }
    const Vec3 d = state.direction(i);
    const double len = d.norm();
    if (len > 0.0 && std::abs(link.dot(d)) > gamma * gap * len) sum += l;
  }
  return sum;
}

struct DecodeResult {
  LabelField labels;
  MatrixD features;  // N x C, final probability rows
};

/// Label of a final feature row: argmax with ties to the lowest class;
/// points that no labeled evidence reached stay UNLABELED.
inline Label label_of(const Eigen::RowVectorXd& f, bool evidence) {
  if (!evidence || f.size() == 0) return kUnlabeled;
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < f.size(); ++k)
    if (f(k) > f(best)) best = k;
  return static_cast<Label>(best);
}

inline DecodeResult decode(const EncoderOutput& enc, const AfiConfig& cfg) {
  validate(cfg);
  require(enc.levels.size() >= 2, "decode: encoder output has no layers");
  const auto c = enc.onehot.cols();

  MatrixD dec = enc.levels.back().features;
  std::vector<char> dec_ev = enc.levels.back().evidence;
  for (std::size_t j = enc.levels.size() - 1; j >= 1; --j) {
    const auto& coarse = enc.levels[j];
    const auto& fine = enc.levels[j - 1];
    const auto nf = fine.positions.size();
    MatrixD next(static_cast<Eigen::Index>(nf), c);
    std::vector<char> next_ev(nf);
    for (std::size_t q = 0; q < nf; ++q) {
      const Vec3& pq = fine.positions[q];
      const auto nbrs = spatial::knn(coarse.positions, pq, static_cast<std::size_t>(cfg.knn_up));
      Eigen::VectorXd logits(static_cast<Eigen::Index>(nbrs.size()));
      for (std::size_t k = 0; k < nbrs.size(); ++k)
        logits(static_cast<Eigen::Index>(k)) =
            upsample_logit(coarse.states[nbrs[k]], pq - coarse.positions[nbrs[k]], cfg.gamma);
      const Eigen::VectorXd w = softmax(logits);

      const MatrixD& skips = j - 1 == 0 ? enc.input_features : fine.features;
      Eigen::RowVectorXd skip = skips.row(static_cast<Eigen::Index>(q));
      Eigen::RowVectorXd pre = skip;
      bool ev = fine.evidence[q];
      for (std::size_t k = 0; k < nbrs.size(); ++k) {
        pre += w(static_cast<Eigen::Index>(k)) * dec.row(static_cast<Eigen::Index>(nbrs[k]));
        ev = ev || dec_ev[nbrs[k]];
      }
      next.row(static_cast<Eigen::Index>(q)) = softmax(pre);
      next_ev[q] = ev;
    }
    dec = std::move(next);
    dec_ev = std::move(next_ev);
  }

  DecodeResult res;
  res.features = std::move(dec);
  res.labels.resize(static_cast<std::size_t>(res.features.rows()));
  for (std::size_t i = 0; i < res.labels.size(); ++i)
    res.labels[i] = label_of(res.features.row(static_cast<Eigen::Index>(i)), dec_ev[i]);
  return res;
}

inline std::size_t infer_num_classes(const LabelField& a, const LabelField* b) {
  std::size_t nc = 0;
  for (auto l : a)
    if (l != kUnlabeled) nc = std::max<std::size_t>(nc, l + 1u);
  if (b)
    for (auto l : *b)
      if (l != kUnlabeled) nc = std::max<std::size_t>(nc, l + 1u);
  return nc;
}

/// Full label refinement: clear out-of-view predictions, optionally mix in
/// pseudo-labels by distance, then encode and decode.
inline LabelField afi(const LabelField& predict, const PointCloud& points, const AfiConfig& cfg,
                      const std::vector<std::uint8_t>* fov = nullptr, const LabelField* pseudo = nullptr) {
  validate(cfg);
  const auto n = predict.size();
  require(static_cast<std::size_t>(points.rows()) == n, "afi: predict and points differ in length");
  require(!fov || fov->size() == n, "afi: fov and points differ in length");
  require(!pseudo || pseudo->size() == n, "afi: pseudo and points differ in length");

  std::vector<Vec3> pos(n);
  for (std::size_t i = 0; i < n; ++i) pos[i] = point_at(points, static_cast<Eigen::Index>(i));
  const auto order = spatial::canonical_order(std::span<const Vec3>(pos), [&](std::size_t i) {
    const std::uint32_t hi = predict[i];
    const std::uint32_t lo = pseudo ? (*pseudo)[i] : 0u;
    const std::uint32_t mid = fov ? (*fov)[i] : 0u;
    return (std::uint64_t{hi} << 32) | (std::uint64_t{mid} << 16) | lo;
  });

  LabelField labels = fov ? clear_confused(predict, *fov) : predict;
  if (cfg.coverage_enabled && pseudo)
    labels = coverage_sample(labels, *pseudo, points, cfg.beta, cfg.s_dist, cfg.seed, order);

  const std::size_t nc =
      cfg.num_classes > 0 ? static_cast<std::size_t>(cfg.num_classes) : infer_num_classes(labels, nullptr);
  if (nc == 0 || n == 0) return LabelField(n, kUnlabeled);

  std::vector<Vec3> sorted(n);
  LabelField sorted_labels(n);
  for (std::size_t k = 0; k < n; ++k) {
    sorted[k] = pos[order[k]];
    sorted_labels[k] = labels[order[k]];
  }
  const auto enc = encode(sorted, one_hot(sorted_labels, nc), cfg);
  const auto dec = decode(enc, cfg);
  LabelField out(n);
  for (std::size_t k = 0; k < n; ++k) out[order[k]] = dec.labels[k];
  return out;
}

}  // namespace afov::afi
