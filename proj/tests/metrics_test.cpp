#include "fusetrack/metrics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "fusetrack/error.hpp"
#include "test_support.hpp"

namespace fusetrack {
namespace {

const FrameGeometry kFrame{2040, 1086};

std::vector<FramePair> random_instance(std::mt19937_64& rng, int frames) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> jitter(0.0, 8.0);
  std::vector<FramePair> pairs;
  for (int t = 0; t < frames; ++t) {
    FramePair p;
    p.frame_index = t;
    const BBox gt = testing::random_box(rng, 1900.0, 60.0);
    if (unit(rng) < 0.9) p.gt = gt;
    if (unit(rng) < 0.85) {
      p.pred = BBox{gt.x + jitter(rng), gt.y + jitter(rng), gt.w * (0.7 + 0.6 * unit(rng)),
                    gt.h * (0.7 + 0.6 * unit(rng))};
      p.pred_confidence = unit(rng);
    }
    pairs.push_back(p);
  }
  return pairs;
}

// PR integration over distinct recall steps with the max-precision-to-the-right envelope.
double oracle_ap(const std::vector<FramePair>& pairs, double thr) {
  std::vector<std::pair<double, bool>> scored;  // confidence, is_tp
  int positives = 0;
  for (const auto& p : pairs) {
    if (p.gt) ++positives;
    if (p.pred) scored.emplace_back(p.pred_confidence, p.gt && iou(*p.pred, *p.gt) >= thr);
  }
  if (positives == 0) return 0.0;
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<double> prec, rec;
  int tp = 0;
  for (std::size_t k = 0; k < scored.size(); ++k) {
    tp += scored[k].second;
    prec.push_back(static_cast<double>(tp) / static_cast<double>(k + 1));
    rec.push_back(static_cast<double>(tp) / positives);
  }
  double ap = 0.0;
  for (std::size_t k = 0; k < rec.size(); ++k) {
    const double dr = rec[k] - (k == 0 ? 0.0 : rec[k - 1]);
    if (dr == 0.0) continue;
    double best = 0.0;
    for (std::size_t j = k; j < prec.size(); ++j) best = std::max(best, prec[j]);
    ap += dr * best;
  }
  return ap;
}

TEST(Grids, Samples) {
  const auto s = success_thresholds();
  ASSERT_EQ(s.size(), 101u);
  EXPECT_EQ(s.front(), 0.0);
  EXPECT_EQ(s[37], 0.37);
  EXPECT_EQ(s.back(), 1.0);
  const auto p = precision_thresholds(false);
  ASSERT_EQ(p.size(), 51u);
  EXPECT_EQ(p.back(), 50.0);
  EXPECT_EQ(precision_thresholds(true).back(), 0.5);
  const auto coco = coco_iou_thresholds();
  ASSERT_EQ(coco.size(), 10u);
  EXPECT_EQ(coco.front(), 0.5);
  EXPECT_EQ(coco.back(), 0.95);
}

TEST(Metrics, MatchDoubleLoopOracleBitwise) {
  std::mt19937_64 rng(31);
  for (int instance = 0; instance < 50; ++instance) {
    const auto pairs = random_instance(rng, 200);
    const CurveScore s = success_auc(pairs);
    const CurveScore p = precision_auc(pairs, kFrame, false);
    const CurveScore pn = precision_auc(pairs, kFrame, true);
    const auto os = testing::oracle_success_curve(pairs);
    const auto op = testing::oracle_precision_curve(pairs, kFrame, false);
    const auto opn = testing::oracle_precision_curve(pairs, kFrame, true);
    ASSERT_EQ(s.curve.values, os);
    ASSERT_EQ(p.curve.values, op);
    ASSERT_EQ(pn.curve.values, opn);
    ASSERT_EQ(s.score, testing::grid_mean(os));
    ASSERT_EQ(p.score, testing::grid_mean(op));
    ASSERT_EQ(pn.score, testing::grid_mean(opn));
  }
}

TEST(Metrics, CurvesAreMonotoneAndBounded) {
  std::mt19937_64 rng(32);
  const auto pairs = random_instance(rng, 300);
  const auto s = success_auc(pairs).curve.values;
  for (std::size_t i = 1; i < s.size(); ++i) EXPECT_LE(s[i], s[i - 1]);
  for (bool norm : {false, true}) {
    const auto p = precision_auc(pairs, kFrame, norm).curve.values;
    for (std::size_t i = 1; i < p.size(); ++i) EXPECT_GE(p[i], p[i - 1]);
  }
  for (double v : scalars(evaluate(pairs, kFrame))) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(Metrics, PerfectPredictions) {
  std::vector<FramePair> pairs;
  for (int t = 0; t < 20; ++t) {
    const BBox b{10.0 * t, 5.0, 20, 30};
    pairs.push_back({t, b, b, 0.9});
  }
  const MetricReport r = evaluate(pairs, kFrame);
  EXPECT_EQ(r.S, 1.0);
  EXPECT_EQ(r.P, 1.0);
  EXPECT_EQ(r.P_norm, 1.0);
  EXPECT_EQ(r.mAP25, 1.0);
  EXPECT_EQ(r.mAP50, 1.0);
  EXPECT_EQ(r.mAP5095, 1.0);
  EXPECT_EQ(r.FNR, 0.0);
  EXPECT_EQ(r.FDR, 0.0);
}

TEST(Metrics, DisjointPredictionsScoreOneOver101) {
  std::vector<FramePair> pairs;
  for (int t = 0; t < 5; ++t) pairs.push_back({t, BBox{0, 0, 10, 10}, BBox{100, 100, 10, 10}, 0.5});
  const CurveScore s = success_auc(pairs);
  EXPECT_EQ(s.curve.values[0], 1.0);
  EXPECT_EQ(s.curve.values[1], 0.0);
  EXPECT_EQ(s.score, 1.0 / 101.0);
}

TEST(Metrics, SingleFrameAt25PixelsGives26Over51) {
  const std::vector<FramePair> pairs = {{0, BBox{0, 0, 10, 10}, BBox{15, 20, 10, 10}, 1.0}};
  const CurveScore p = precision_auc(pairs, kFrame, false);
  EXPECT_EQ(p.curve.values[24], 0.0);
  EXPECT_EQ(p.curve.values[25], 1.0);
  EXPECT_EQ(p.score, 26.0 / 51.0);
}

TEST(Metrics, SmallNormalizedErrorGives50Over51) {
  // 5 px on the 2040x1086 diagonal is e/d = 0.002164.
  std::vector<FramePair> pairs;
  for (int t = 0; t < 4; ++t) pairs.push_back({t, BBox{100, 100, 10, 10}, BBox{103, 104, 10, 10}, 1.0});
  EXPECT_NEAR(center_distance(*pairs[0].pred, *pairs[0].gt, kFrame), 0.002164, 1e-6);
  EXPECT_EQ(precision_auc(pairs, kFrame, true).score, 50.0 / 51.0);
}

TEST(Metrics, MissingPredictionCountsAsMiss) {
  const std::vector<FramePair> pairs = {{0, BBox{0, 0, 10, 10}, std::nullopt, 0.0},
                                        {1, BBox{0, 0, 10, 10}, BBox{0, 0, 10, 10}, 1.0}};
  EXPECT_EQ(success_auc(pairs).curve.values[0], 1.0);  // IoU 0 still passes tau = 0
  EXPECT_EQ(success_auc(pairs).curve.values[1], 0.5);
  EXPECT_EQ(precision_auc(pairs, kFrame, false).curve.values.back(), 0.5);
}

TEST(Metrics, GtAbsentFramesExcludedFromCurves) {
  std::vector<FramePair> pairs = {{0, BBox{0, 0, 10, 10}, BBox{0, 0, 10, 10}, 1.0}};
  const double s = success_auc(pairs).score;
  pairs.push_back({1, std::nullopt, BBox{500, 500, 10, 10}, 0.9});
  EXPECT_EQ(success_auc(pairs).score, s);
  const DetectionCounts c = count_matches(pairs, 0.5);
  EXPECT_EQ(c.tp, 1);
  EXPECT_EQ(c.fp, 1);
  EXPECT_EQ(c.fn, 0);
}

TEST(Metrics, NoGroundTruthIsUndefined) {
  const std::vector<FramePair> pairs = {{0, std::nullopt, BBox{0, 0, 1, 1}, 0.5}};
  try {
    success_auc(pairs);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUndefinedMetric);
  }
  EXPECT_THROW(precision_auc(pairs, kFrame, true), Error);
  EXPECT_THROW(detection_metrics(pairs, {}), Error);
  EXPECT_THROW(detection_metrics({}, {}), Error);
}

TEST(Metrics, NoPredictionsFlagsFdr) {
  const std::vector<FramePair> pairs = {{0, BBox{0, 0, 10, 10}, std::nullopt, 0.0}};
  const DetectionMetrics m = detection_metrics(pairs, {});
  EXPECT_FALSE(m.fdr_defined);
  EXPECT_EQ(m.fdr, 0.0);
  EXPECT_EQ(m.fnr, 1.0);
  EXPECT_EQ(m.map50, 0.0);
}

TEST(Metrics, MisplacedPredictionIsFpAndFn) {
  const std::vector<FramePair> pairs = {{0, BBox{0, 0, 10, 10}, BBox{8, 0, 10, 10}, 0.9}};
  const DetectionCounts c = count_matches(pairs, 0.5);
  EXPECT_EQ(c.tp, 0);
  EXPECT_EQ(c.fp, 1);
  EXPECT_EQ(c.fn, 1);
}

TEST(Metrics, CountsIdentity) {
  std::mt19937_64 rng(33);
  for (int i = 0; i < 20; ++i) {
    const auto pairs = random_instance(rng, 100);
    std::int64_t gt_frames = 0;
    std::int64_t pred_frames = 0;
    for (const auto& p : pairs) {
      gt_frames += p.gt.has_value();
      pred_frames += p.pred.has_value();
    }
    for (double thr : {0.25, 0.5, 0.75}) {
      const DetectionCounts c = count_matches(pairs, thr);
      EXPECT_EQ(c.tp + c.fn, gt_frames);
      EXPECT_EQ(c.tp + c.fp, pred_frames);
    }
  }
}

TEST(AveragePrecision, MatchesBruteForceOracle) {
  std::mt19937_64 rng(34);
  std::uniform_int_distribution<int> len(1, 40);
  for (int i = 0; i < 300; ++i) {
    auto pairs = random_instance(rng, len(rng));
    if (i % 3 == 0) {
      for (auto& p : pairs) p.pred_confidence = std::round(p.pred_confidence * 4) / 4;  // ties
    }
    for (double thr : {0.25, 0.5, 0.75, 0.95}) {
      ASSERT_NEAR(average_precision(pairs, thr), oracle_ap(pairs, thr), 1e-9);
    }
  }
}

TEST(AveragePrecision, HandWorkedExample) {
  // Ranked: TP, FP, TP over 4 positives -> recall 1/4, 1/4, 1/2.
  // Envelope precision: 1, 2/3, 2/3 -> AP = 1/4 * 1 + 1/4 * 2/3 = 5/12.
  const BBox g{0, 0, 10, 10};
  const BBox miss{50, 50, 10, 10};
  const std::vector<FramePair> pairs = {
      {0, g, g, 0.9}, {1, g, miss, 0.8}, {2, g, g, 0.7}, {3, g, std::nullopt, 0.0}};
  EXPECT_NEAR(average_precision(pairs, 0.5), 5.0 / 12.0, 1e-15);
  // 101-point: r in [0, 0.25] -> 1 (26 samples), (0.25, 0.5] -> 2/3 (25 samples), rest 0.
  EXPECT_NEAR(average_precision(pairs, 0.5, ApInterpolation::k101Point),
              (26.0 + 25.0 * 2.0 / 3.0) / 101.0, 1e-12);
}

TEST(AveragePrecision, NoPositivesIsZero) {
  const std::vector<FramePair> pairs = {{0, std::nullopt, BBox{0, 0, 1, 1}, 0.5}};
  EXPECT_EQ(average_precision(pairs, 0.5), 0.0);
}

TEST(Metrics, NormalizedPrecisionScaleInvariant) {
  std::mt19937_64 rng(35);
  const auto pairs = random_instance(rng, 200);
  const double base = precision_auc(pairs, kFrame, true).score;
  for (double k : {0.25, 0.5, 2.0, 4.0, 8.0}) {
    std::vector<FramePair> scaled = pairs;
    for (auto& p : scaled) {
      if (p.gt) p.gt = BBox{p.gt->x * k, p.gt->y * k, p.gt->w * k, p.gt->h * k};
      if (p.pred) p.pred = BBox{p.pred->x * k, p.pred->y * k, p.pred->w * k, p.pred->h * k};
    }
    EXPECT_EQ(precision_auc(scaled, {kFrame.width * k, kFrame.height * k}, true).score, base) << k;
  }
}

TEST(Metrics, AverageReports) {
  std::mt19937_64 rng(36);
  const MetricReport a = evaluate(random_instance(rng, 50), kFrame);
  const MetricReport b = evaluate(random_instance(rng, 50), kFrame);
  const std::vector<MetricReport> both = {a, b};
  const MetricReport m = average_reports(both);
  EXPECT_DOUBLE_EQ(m.S, 0.5 * (a.S + b.S));
  EXPECT_DOUBLE_EQ(m.FNR, 0.5 * (a.FNR + b.FNR));
  EXPECT_DOUBLE_EQ(m.success.values[50], 0.5 * (a.success.values[50] + b.success.values[50]));
  EXPECT_EQ(m.success.thresholds, a.success.thresholds);
  EXPECT_THROW(average_reports({}), Error);
}

}  // namespace
}  // namespace fusetrack
