#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "fusetrack/geometry.hpp"

namespace fusetrack {

struct FramePair {
  std::int64_t frame_index = 0;
  std::optional<BBox> gt;
  std::optional<BBox> pred;
  double pred_confidence = 0.0;
};

inline constexpr int kSuccessSamples = 101;    // tau = 0.00 .. 1.00
inline constexpr int kPrecisionSamples = 51;   // delta = 0 .. 50 px, or 0.00 .. 0.50

/// Sampled threshold curve; `thresholds[i]` pairs with `values[i]`.
struct Curve {
  std::vector<double> thresholds;
  std::vector<double> values;
};

struct CurveScore {
  double score = 0.0;  // mean of the curve samples
  Curve curve;
};

/// Grid value i / 100 for the IoU and normalized-distance grids.
double percent_threshold(int i);

std::vector<double> success_thresholds();
std::vector<double> precision_thresholds(bool normalized);

/// Success curve over IoU thresholds; frames without ground truth are
/// skipped and a missing prediction counts as IoU 0.
CurveScore success_auc(std::span<const FramePair> pairs);

/// Center-error precision curve in pixels, or normalized by the frame
/// diagonal. A missing prediction counts as infinite error.
CurveScore precision_auc(std::span<const FramePair> pairs, const FrameGeometry& frame,
                         bool normalized);

enum class ApInterpolation { kAllPoint, k101Point };

std::string_view to_string(ApInterpolation v);

/// Single-class average precision: predictions ranked by confidence (stable
/// for ties), matched to the frame's ground truth at `iou_threshold`.
double average_precision(std::span<const FramePair> pairs, double iou_threshold,
                         ApInterpolation interp = ApInterpolation::kAllPoint);

struct DetectionCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
};

DetectionCounts count_matches(std::span<const FramePair> pairs, double match_threshold);

struct DetectionMetrics {
  std::vector<double> iou_thresholds;
  std::vector<double> ap;  // one per threshold
  double map25 = 0.0;
  double map50 = 0.0;
  double map5095 = 0.0;
  double fnr = 0.0;
  double fdr = 0.0;
  bool fdr_defined = true;  // false when there were no predictions at all
  DetectionCounts counts;
};

/// AP at each of `iou_thresholds`, plus the fixed 0.25 / 0.5 / 0.5:0.95
/// summaries and FNR/FDR at `match_threshold`.
DetectionMetrics detection_metrics(std::span<const FramePair> pairs,
                                   std::span<const double> iou_thresholds,
                                   double match_threshold = 0.5,
                                   ApInterpolation interp = ApInterpolation::kAllPoint);

/// 0.50, 0.55, ..., 0.95.
std::vector<double> coco_iou_thresholds();

struct MetricOptions {
  double match_threshold = 0.5;
  ApInterpolation interpolation = ApInterpolation::kAllPoint;
};

struct MetricReport {
  double S = 0.0;
  double P = 0.0;
  double P_norm = 0.0;
  double mAP25 = 0.0;
  double mAP50 = 0.0;
  double mAP5095 = 0.0;
  double FNR = 0.0;
  double FDR = 0.0;
  Curve success;
  Curve precision;
  Curve precision_norm;
};

inline constexpr std::array<std::string_view, 8> kMetricKeys{
    "S", "P", "P_norm", "mAP25", "mAP50", "mAP5095", "FNR", "FDR"};

std::array<double, 8> scalars(const MetricReport& r);

MetricReport evaluate(std::span<const FramePair> pairs, const FrameGeometry& frame,
                      const MetricOptions& options = {});

/// Element-wise mean of per-sequence scalars and curves.
MetricReport average_reports(std::span<const MetricReport> reports);

}  // namespace fusetrack
