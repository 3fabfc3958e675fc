#pragma once

// Brute-force neighbourhood queries with fully deterministic tie-breaking.
// Ties are resolved by lexicographic coordinate order, never by input index,
// so results do not depend on how the cloud was ordered.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "afov/common.hpp"

namespace afov::spatial {

inline bool lex_less(const Vec3& a, const Vec3& b) {
  if (a.x() != b.x()) return a.x() < b.x();
  if (a.y() != b.y()) return a.y() < b.y();
  return a.z() < b.z();
}

/// The k nearest points of `cloud` to `query`, closest first. `exclude`
/// removes one index (the query itself when it belongs to the cloud).
inline std::vector<std::size_t> knn(std::span<const Vec3> cloud, const Vec3& query, std::size_t k,
                                    std::size_t exclude = std::numeric_limits<std::size_t>::max()) {
  struct Cand {
    double d2;
    std::size_t idx;
  };
  std::vector<Cand> cands;
  cands.reserve(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (i == exclude) continue;
    cands.push_back({(cloud[i] - query).squaredNorm(), i});
  }
  k = std::min(k, cands.size());
  const auto closer = [&](const Cand& a, const Cand& b) {
    if (a.d2 != b.d2) return a.d2 < b.d2;
    if (cloud[a.idx] != cloud[b.idx]) return lex_less(cloud[a.idx], cloud[b.idx]);
    return a.idx < b.idx;
  };
  std::partial_sort(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(k), cands.end(), closer);
  std::vector<std::size_t> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = cands[i].idx;
  return out;
}

/// Farthest point sampling. The first pick is the point farthest from the
/// centroid; every later pick maximises the distance to the picked set.
/// Centroid distances are evaluated on offsets from cloud[0] so that a rigid
/// translation of the cloud cannot change any decision.
inline std::vector<std::size_t> farthest_point_sample(std::span<const Vec3> cloud, std::size_t count) {
  const std::size_t n = cloud.size();
  count = std::min(count, n);
  std::vector<std::size_t> picked;
  if (count == 0) return picked;
  picked.reserve(count);

  Vec3 mean_offset = Vec3::Zero();
  for (const auto& p : cloud) mean_offset += p - cloud[0];
  mean_offset /= static_cast<double>(n);

  const auto better = [&](double da, std::size_t a, double db, std::size_t b) {
    if (da != db) return da > db;
    return lex_less(cloud[a], cloud[b]);
  };

  std::size_t first = 0;
  double best = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = ((cloud[i] - cloud[0]) - mean_offset).squaredNorm();
    if (i == 0 || better(d, i, best, first)) {
      best = d;
      first = i;
    }
  }
  picked.push_back(first);

  std::vector<double> min_d2(n, std::numeric_limits<double>::infinity());
  std::vector<char> taken(n, 0);
  taken[first] = 1;
  std::size_t last = first;
  while (picked.size() < count) {
    std::size_t next = n;
    double next_d = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (taken[i]) continue;
      min_d2[i] = std::min(min_d2[i], (cloud[i] - cloud[last]).squaredNorm());
      if (next == n || better(min_d2[i], i, next_d, next)) {
        next = i;
        next_d = min_d2[i];
      }
    }
    taken[next] = 1;
    picked.push_back(next);
    last = next;
  }
  return picked;
}

/// Permutation that sorts points lexicographically (ties by secondary key).
template <typename Key>
std::vector<std::size_t> canonical_order(std::span<const Vec3> cloud, const Key& key) {
  std::vector<std::size_t> order(cloud.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (cloud[a] != cloud[b]) return lex_less(cloud[a], cloud[b]);
    return key(a) < key(b);
  });
  return order;
}

}  // namespace afov::spatial
