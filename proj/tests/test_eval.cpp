#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace afov;

TEST(Confusion, PerfectPredictionIsDiagonal) {
  const LabelField gt{0, 1, 2, 2, 1, kUnlabeled};
  const auto cm = confusion(gt, gt, 3);
  for (std::size_t t = 0; t < 3; ++t)
    for (std::size_t p = 0; p <= 3; ++p)
      if (t != p) {
        EXPECT_EQ(cm.at(t, p), 0u);
      }
  EXPECT_EQ(cm.at(2, 2), 2u);
  EXPECT_EQ(cm.ignored, 1u);
  EXPECT_DOUBLE_EQ(miou(cm).miou_percent(), 100.0);
}

TEST(Confusion, AllUnlabeledPredictionsLeaveEmptyDiagonal) {
  const LabelField gt{0, 1, 2, 0};
  const auto cm = confusion(gt, LabelField(4, kUnlabeled), 3);
  for (std::size_t c = 0; c < 3; ++c) EXPECT_EQ(cm.at(c, c), 0u);
  EXPECT_EQ(cm.unlabeled_predictions(0), 2u);
  EXPECT_EQ(miou(cm).mean, 0.0);
}

TEST(Confusion, LengthMismatchIsAnError) { EXPECT_THROW(confusion({0, 1}, {0}, 2), Error); }

TEST(Confusion, RandomCasesMatchBruteForceTally) {
  std::mt19937_64 gen(77);
  std::uniform_int_distribution<int> lab(0, 3);
  for (int t = 0; t < 200; ++t) {
    LabelField gt(20), pred(20);
    for (int i = 0; i < 20; ++i) {
      const int g = lab(gen), p = lab(gen);
      gt[static_cast<std::size_t>(i)] = g == 3 ? kUnlabeled : static_cast<Label>(g);
      pred[static_cast<std::size_t>(i)] = p == 3 ? kUnlabeled : static_cast<Label>(p);
    }
    const auto cm = confusion(gt, pred, 3);
    const auto ref = oracle::tally(gt, pred);
    for (int a = 0; a < 3; ++a)
      for (int b = -1; b < 3; ++b) {
        const auto it = ref.find({a, b});
        EXPECT_EQ(cm.at(static_cast<std::size_t>(a), b < 0 ? 3u : static_cast<std::size_t>(b)), it == ref.end() ? 0u : it->second);
      }
    EXPECT_EQ(cm.total(), 20u);
    EXPECT_NEAR(miou(cm).mean, oracle::miou(gt, pred, 3), 1e-15);
  }
}

TEST(Miou, FullySwappedTwoClassesIsZero) {
  const auto rep = miou(confusion({0, 0, 1, 1}, {1, 1, 0, 0}, 2));
  EXPECT_EQ(rep.miou_percent(), 0.0);
  EXPECT_EQ(rep.classes_counted, 2u);
}

TEST(Miou, AbsentClassIsExcludedFromTheMean) {
  const auto rep = miou(confusion({0, 0, 1}, {0, 0, 1}, 5));
  EXPECT_EQ(rep.classes_counted, 2u);
  EXPECT_FALSE(rep.per_class[3].has_value());
  EXPECT_DOUBLE_EQ(rep.miou_percent(), 100.0);
}

TEST(Miou, HandCaseFromCounts) {
  // Per-class IoU from TP/FP/FN, each realised in its own two-class matrix
  // (class c against a filler class), then averaged.
  struct Case { std::uint64_t tp, fp, fn; double iou; };
  const Case cases[] = {{5, 1, 2, 0.625}, {4, 0, 0, 1.0}, {3, 3, 3, 1.0 / 3.0}};
  double sum = 0.0;
  for (const auto& c : cases) {
    ConfusionMatrix cm{2, std::vector<std::uint64_t>(6, 0), 0};
    cm.counts[0 * 3 + 0] = c.tp;
    cm.counts[0 * 3 + 2] = c.fn;  // missed as UNLABELED
    cm.counts[1 * 3 + 0] = c.fp;
    const auto iou = *miou(cm).per_class[0];
    EXPECT_DOUBLE_EQ(iou, c.iou);
    sum += iou;
  }
  EXPECT_NEAR(100.0 * sum / 3.0, 65.27777777777779, 1e-12);
  EXPECT_NEAR(100.0 * sum / 3.0, 65.28, 0.005);
}

TEST(Miou, UnlabeledPredictionCountsInUnionOnly) {
  const auto rep = miou(confusion({0, 0, 0, 0}, {0, 0, 0, kUnlabeled}, 1));
  EXPECT_DOUBLE_EQ(*rep.per_class[0], 0.75);
}

TEST(Miou, PointOrderDoesNotMatter) {
  std::mt19937_64 gen(3);
  std::uniform_int_distribution<int> lab(0, 4);
  LabelField gt(300), pred(300);
  for (std::size_t i = 0; i < 300; ++i) {
    gt[i] = static_cast<Label>(lab(gen));
    pred[i] = static_cast<Label>(lab(gen));
  }
  const auto a = miou(confusion(gt, pred, 5));
  std::vector<std::size_t> perm(300);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), gen);
  LabelField g2(300), p2(300);
  for (std::size_t i = 0; i < 300; ++i) {
    g2[i] = gt[perm[i]];
    p2[i] = pred[perm[i]];
  }
  EXPECT_EQ(miou(confusion(g2, p2, 5)).mean, a.mean);
  for (const auto& v : a.per_class) {
    ASSERT_TRUE(v);
    EXPECT_GE(*v, 0.0);
    EXPECT_LE(*v, 1.0);
  }
}

TEST(Metrics, JsonCarriesNamesAndNulls) {
  const auto dict = default_dictionary();
  const auto j = metrics_json(miou(confusion({0, 1, kUnlabeled}, {0, 1, 1}, 4)), &dict);
  EXPECT_DOUBLE_EQ(j.at("miou").get<double>(), 100.0);
  EXPECT_EQ(j.at("ignored"), 1);
  EXPECT_EQ(j.at("per_class")[1].at("name"), "car");
  EXPECT_TRUE(j.at("per_class")[3].at("iou").is_null());
}
