#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fusetrack/fusion.hpp"
#include "fusetrack/metrics.hpp"
#include "fusetrack/scenario.hpp"

namespace fusetrack {

struct SequenceMeta {
  std::string name;
  double width = 0.0;
  double height = 0.0;
  double fps = 30.0;
  std::int64_t frame_count = 0;

  FrameGeometry frame() const { return {width, height}; }
};

void validate(const SequenceMeta& meta);

SequenceMeta load_meta(const std::string& path);
std::string format_meta(const SequenceMeta& meta);
void write_meta(const std::string& path, const SequenceMeta& meta);

// Ground truth: `frame,x,y,w,h`, strictly increasing frames; a missing frame
// means the target is absent. An optional `frame,...` header line and `#`
// comments are accepted.
BoxStream parse_ground_truth(std::string_view content, std::string_view source);
BoxStream load_ground_truth(const std::string& path);
std::string format_ground_truth(const BoxStream& gt);
void write_ground_truth(const std::string& path, const BoxStream& gt);

// Detections: `frame,x,y,w,h,conf`, any number of lines per frame.
DetectionStream parse_detections(std::string_view content, std::string_view source);
DetectionStream load_detections(const std::string& path);
std::string format_detections(const DetectionStream& dets);
void write_detections(const std::string& path, const DetectionStream& dets);

/// Recorded tracker output in the detection layout, the last column being the
/// objectness. The highest-scoring line of a frame is kept.
std::vector<std::optional<TrackerBox>> load_tracker_stream(const std::string& path);

inline constexpr std::string_view kDecisionsHeader =
    "frame,gate_confidence,gate_alignment,gate_proximity,reliable,prompted,averaged,source,"
    "x,y,w,h,confidence,tracker_x,tracker_y,tracker_w,tracker_h,tracker_score,"
    "det_x,det_y,det_w,det_h,det_conf,frames_since_prompt,cadence_held";

std::string format_decisions(std::span<const FusionDecision> decisions);
std::vector<FusionDecision> parse_decisions(std::string_view content, std::string_view source);
std::vector<FusionDecision> load_decisions(const std::string& path);

struct Prediction {
  BBox box;
  double confidence = 0.0;
};

/// Reads either a decisions.csv or a plain `frame,x,y,w,h,conf` dump (the
/// most confident line per frame wins).
std::vector<std::optional<Prediction>> load_predictions(const std::string& path);

std::string format_summary(const MetricReport& report);
/// Exactly the eight metric keys must be present.
std::array<double, 8> parse_summary(std::string_view content, std::string_view source);

std::string format_curves(const MetricReport& report);

struct CurveRow {
  std::string curve;
  std::string threshold;
  double value = 0.0;
};
std::vector<CurveRow> parse_curves(std::string_view content, std::string_view source);

/// Writes decisions.csv, summary.json and curves.csv into `out_dir`.
void write_results(std::span<const FusionDecision> decisions, const MetricReport& report,
                   const std::string& out_dir);

}  // namespace fusetrack
