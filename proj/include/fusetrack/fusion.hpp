#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "fusetrack/geometry.hpp"

namespace fusetrack {

struct Detection {
  std::int64_t frame_index = 0;
  BBox box;
  double confidence = 0.0;

  friend bool operator==(const Detection&, const Detection&) = default;
};

enum class CenterDistNorm { kDiagonal, kMaxDim };
enum class PromptPolicy { kEager, kCadence };

struct FusionConfig {
  double conf_threshold = 0.75;
  double ciou_threshold = 0.7;
  double proximity_iou = 0.8;
  double proximity_center_dist = 0.05;
  int window = 10;
  int prompt_cadence = 30;
  CenterDistNorm center_dist_norm = CenterDistNorm::kDiagonal;
  PromptPolicy prompt_policy = PromptPolicy::kEager;
  bool average_requires_reliable = false;
};

void validate(const FusionConfig& cfg);

std::string_view to_string(CenterDistNorm v);
std::string_view to_string(PromptPolicy v);

struct GateResults {
  bool confidence = false;
  bool alignment = false;
  bool proximity = false;

  bool any() const { return confidence || alignment || proximity; }
  friend bool operator==(const GateResults&, const GateResults&) = default;
};

/// Output boxes of recent frames, restricted to the last `window` frames.
class TrajectoryHistory {
 public:
  struct Entry {
    std::int64_t frame_index;
    BBox box;
  };

  explicit TrajectoryHistory(int window = 10) : window_(window) {}

  /// Frame indices must be strictly increasing.
  void push(std::int64_t frame_index, const BBox& box);
  /// Drops entries older than `window` frames before `frame_index`.
  void expire(std::int64_t frame_index);
  void clear() { entries_.clear(); }

  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  const Entry& latest() const { return entries_.back(); }
  const std::deque<Entry>& entries() const { return entries_; }
  int window() const { return window_; }

 private:
  int window_;
  std::deque<Entry> entries_;
};

struct Reliability {
  bool reliable = false;
  GateResults gates;
};

/// A detection is reliable when at least one gate passes: confidence above
/// threshold, CIoU with the tracker box above threshold, or proximity to the
/// trajectory history (IoU with the latest entry, or normalized center
/// distance to any entry). All comparisons are strict.
Reliability is_reliable(const Detection& det, const std::optional<BBox>& tracker_box,
                        const TrajectoryHistory& history, const FrameGeometry& frame,
                        const FusionConfig& cfg);

enum class OutputSource { kTracker, kDetectorPrompted, kAveraged, kNone };

std::string_view to_string(OutputSource s);
OutputSource parse_output_source(std::string_view s);

struct TrackerBox {
  BBox box;
  double score = 0.0;  // objectness

  friend bool operator==(const TrackerBox&, const TrackerBox&) = default;
};

struct FusionDecision {
  std::int64_t frame_index = 0;
  GateResults gates;
  bool reliable = false;
  bool prompted = false;
  bool averaged = false;
  std::optional<BBox> output;
  double output_confidence = 0.0;
  OutputSource source = OutputSource::kNone;
  // Inputs retained for auditing.
  std::optional<TrackerBox> tracker;
  std::optional<Detection> detection;
  int frames_since_prompt = 0;
  bool cadence_held = true;

  friend bool operator==(const FusionDecision&, const FusionDecision&) = default;
};

/// Highest-confidence detection of a frame; earliest wins ties.
std::optional<Detection> strongest(std::span<const Detection> detections);

class FusionEngine {
 public:
  FusionEngine(FusionConfig cfg, FrameGeometry frame);

  /// Seeds the trajectory history with the initial prompt at `frame_index`
  /// and returns the decision recorded for that frame. `source` names where
  /// the initial box came from (detector or external ground truth).
  FusionDecision initialize(std::int64_t frame_index, const BBox& init_box, double confidence,
                            OutputSource source);
  bool initialized() const { return initialized_; }

  FusionDecision fuse_frame(std::int64_t frame_index, const std::optional<TrackerBox>& tracker,
                            const std::optional<Detection>& det);

  const TrajectoryHistory& history() const { return history_; }
  const FusionConfig& config() const { return cfg_; }

 private:
  FusionConfig cfg_;
  FrameGeometry frame_;
  TrajectoryHistory history_;
  bool initialized_ = false;
  std::int64_t last_prompt_frame_ = 0;
};

/// Open-loop fusion over recorded per-frame tracker and detector streams
/// covering frames [0, frame_count). The engine is initialized at the first
/// frame carrying a detection, or at `init_box` when supplied. Frames before
/// initialization produce empty decisions.
std::vector<FusionDecision> run_sequence(std::span<const std::optional<TrackerBox>> tracker,
                                         std::span<const std::vector<Detection>> detections,
                                         std::int64_t frame_count, const FusionConfig& cfg,
                                         const FrameGeometry& frame,
                                         const std::optional<Detection>& init_box = std::nullopt);

}  // namespace fusetrack
