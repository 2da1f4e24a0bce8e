#include "fusetrack/metrics.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "fusetrack/error.hpp"

namespace fusetrack {

namespace {

std::vector<const FramePair*> gt_frames(std::span<const FramePair> pairs) {
  std::vector<const FramePair*> out;
  for (const FramePair& p : pairs) {
    if (p.gt) out.push_back(&p);
  }
  if (out.empty()) {
    throw Error(ErrorCode::kUndefinedMetric, "tracking metrics need at least one ground-truth frame");
  }
  return out;
}

double mean(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

}  // namespace

double percent_threshold(int i) { return static_cast<double>(i) / 100.0; }

std::vector<double> success_thresholds() {
  std::vector<double> t(kSuccessSamples);
  for (int i = 0; i < kSuccessSamples; ++i) t[static_cast<std::size_t>(i)] = percent_threshold(i);
  return t;
}

std::vector<double> precision_thresholds(bool normalized) {
  std::vector<double> t(kPrecisionSamples);
  for (int i = 0; i < kPrecisionSamples; ++i) {
    t[static_cast<std::size_t>(i)] = normalized ? percent_threshold(i) : static_cast<double>(i);
  }
  return t;
}

CurveScore success_auc(std::span<const FramePair> pairs) {
  const auto frames = gt_frames(pairs);
  std::vector<double> overlaps;
  overlaps.reserve(frames.size());
  for (const FramePair* p : frames) overlaps.push_back(p->pred ? iou(*p->pred, *p->gt) : 0.0);
  std::ranges::sort(overlaps);

  CurveScore out;
  out.curve.thresholds = success_thresholds();
  const double n = static_cast<double>(overlaps.size());
  for (double tau : out.curve.thresholds) {
    const auto below = std::ranges::lower_bound(overlaps, tau) - overlaps.begin();
    out.curve.values.push_back(static_cast<double>(overlaps.size() - static_cast<std::size_t>(below)) / n);
  }
  out.score = mean(out.curve.values);
  return out;
}

CurveScore precision_auc(std::span<const FramePair> pairs, const FrameGeometry& frame,
                         bool normalized) {
  const auto frames = gt_frames(pairs);
  if (normalized) require_valid(frame);
  std::vector<double> errors;
  errors.reserve(frames.size());
  for (const FramePair* p : frames) {
    if (!p->pred) {
      errors.push_back(std::numeric_limits<double>::infinity());
    } else if (normalized) {
      errors.push_back(center_distance(*p->pred, *p->gt, frame));
    } else {
      errors.push_back(center_distance(*p->pred, *p->gt));
    }
  }
  std::ranges::sort(errors);

  CurveScore out;
  out.curve.thresholds = precision_thresholds(normalized);
  const double n = static_cast<double>(errors.size());
  for (double delta : out.curve.thresholds) {
    const auto within = std::ranges::upper_bound(errors, delta) - errors.begin();
    out.curve.values.push_back(static_cast<double>(within) / n);
  }
  out.score = mean(out.curve.values);
  return out;
}

std::string_view to_string(ApInterpolation v) {
  return v == ApInterpolation::kAllPoint ? "all_point" : "101_point";
}

double average_precision(std::span<const FramePair> pairs, double iou_threshold,
                         ApInterpolation interp) {
  std::int64_t positives = 0;
  std::vector<const FramePair*> ranked;
  for (const FramePair& p : pairs) {
    if (p.gt) ++positives;
    if (p.pred) ranked.push_back(&p);
  }
  if (positives == 0) return 0.0;
  std::ranges::stable_sort(ranked, [](const FramePair* a, const FramePair* b) {
    return a->pred_confidence > b->pred_confidence;
  });

  std::vector<double> precision;
  std::vector<double> recall;
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  for (const FramePair* p : ranked) {
    if (p->gt && iou(*p->pred, *p->gt) >= iou_threshold) {
      ++tp;
    } else {
      ++fp;
    }
    precision.push_back(static_cast<double>(tp) / static_cast<double>(tp + fp));
    recall.push_back(static_cast<double>(tp) / static_cast<double>(positives));
  }
  // Precision envelope: best precision at any equal-or-higher recall.
  for (std::size_t i = precision.size(); i-- > 1;) {
    precision[i - 1] = std::max(precision[i - 1], precision[i]);
  }

  if (interp == ApInterpolation::k101Point) {
    double sum = 0.0;
    for (int i = 0; i < 101; ++i) {
      const double r = percent_threshold(i);
      const auto it = std::ranges::lower_bound(recall, r);
      if (it != recall.end()) sum += precision[static_cast<std::size_t>(it - recall.begin())];
    }
    return sum / 101.0;
  }

  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t i = 0; i < recall.size(); ++i) {
    ap += (recall[i] - prev_recall) * precision[i];
    prev_recall = recall[i];
  }
  return ap;
}

DetectionCounts count_matches(std::span<const FramePair> pairs, double match_threshold) {
  DetectionCounts c;
  for (const FramePair& p : pairs) {
    const bool hit = p.gt && p.pred && iou(*p.pred, *p.gt) >= match_threshold;
    if (hit) {
      ++c.tp;
    } else {
      if (p.pred) ++c.fp;
      if (p.gt) ++c.fn;
    }
  }
  return c;
}

std::vector<double> coco_iou_thresholds() {
  std::vector<double> t;
  for (int i = 0; i < 10; ++i) t.push_back(percent_threshold(50 + 5 * i));
  return t;
}

DetectionMetrics detection_metrics(std::span<const FramePair> pairs,
                                   std::span<const double> iou_thresholds, double match_threshold,
                                   ApInterpolation interp) {
  if (pairs.empty()) throw Error(ErrorCode::kEmptyInput, "no frames to evaluate");
  DetectionMetrics m;
  m.iou_thresholds.assign(iou_thresholds.begin(), iou_thresholds.end());
  for (double t : iou_thresholds) m.ap.push_back(average_precision(pairs, t, interp));

  m.map25 = average_precision(pairs, 0.25, interp);
  m.map50 = average_precision(pairs, 0.5, interp);
  double coco_sum = 0.0;
  const auto coco = coco_iou_thresholds();
  for (double t : coco) coco_sum += average_precision(pairs, t, interp);
  m.map5095 = coco_sum / static_cast<double>(coco.size());

  m.counts = count_matches(pairs, match_threshold);
  const auto& c = m.counts;
  if (c.tp + c.fn == 0) {
    throw Error(ErrorCode::kUndefinedMetric, "FNR undefined without ground-truth frames");
  }
  m.fnr = static_cast<double>(c.fn) / static_cast<double>(c.fn + c.tp);
  if (c.tp + c.fp == 0) {
    m.fdr = 0.0;
    m.fdr_defined = false;
  } else {
    m.fdr = static_cast<double>(c.fp) / static_cast<double>(c.fp + c.tp);
  }
  return m;
}

std::array<double, 8> scalars(const MetricReport& r) {
  return {r.S, r.P, r.P_norm, r.mAP25, r.mAP50, r.mAP5095, r.FNR, r.FDR};
}

MetricReport evaluate(std::span<const FramePair> pairs, const FrameGeometry& frame,
                      const MetricOptions& options) {
  MetricReport r;
  CurveScore s = success_auc(pairs);
  CurveScore p = precision_auc(pairs, frame, false);
  CurveScore pn = precision_auc(pairs, frame, true);
  r.S = s.score;
  r.P = p.score;
  r.P_norm = pn.score;
  r.success = std::move(s.curve);
  r.precision = std::move(p.curve);
  r.precision_norm = std::move(pn.curve);

  const DetectionMetrics d = detection_metrics(pairs, {}, options.match_threshold, options.interpolation);
  r.mAP25 = d.map25;
  r.mAP50 = d.map50;
  r.mAP5095 = d.map5095;
  r.FNR = d.fnr;
  r.FDR = d.fdr;
  return r;
}

MetricReport average_reports(std::span<const MetricReport> reports) {
  if (reports.empty()) throw Error(ErrorCode::kEmptyInput, "no reports to average");
  MetricReport out;
  const double n = static_cast<double>(reports.size());
  auto avg_curve = [&](auto member) {
    Curve c = reports.front().*member;
    for (double& v : c.values) v = 0.0;
    for (const MetricReport& r : reports) {
      const Curve& rc = r.*member;
      if (rc.values.size() != c.values.size()) {
        throw Error(ErrorCode::kIncompatible, "curve grids differ between reports");
      }
      for (std::size_t i = 0; i < c.values.size(); ++i) c.values[i] += rc.values[i];
    }
    for (double& v : c.values) v /= n;
    return c;
  };
  std::array<double, 8> sum{};
  for (const MetricReport& r : reports) {
    const auto s = scalars(r);
    for (std::size_t i = 0; i < s.size(); ++i) sum[i] += s[i];
  }
  out.S = sum[0] / n;
  out.P = sum[1] / n;
  out.P_norm = sum[2] / n;
  out.mAP25 = sum[3] / n;
  out.mAP50 = sum[4] / n;
  out.mAP5095 = sum[5] / n;
  out.FNR = sum[6] / n;
  out.FDR = sum[7] / n;
  out.success = avg_curve(&MetricReport::success);
  out.precision = avg_curve(&MetricReport::precision);
  out.precision_norm = avg_curve(&MetricReport::precision_norm);
  return out;
}

}  // namespace fusetrack
