#include "fusetrack/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fusetrack/error.hpp"

namespace fusetrack {

namespace {

bool in_unit(double v) { return v >= 0.0 && v <= 1.0; }

double normalized_distance(const BBox& a, const BBox& b, const FrameGeometry& frame,
                           CenterDistNorm norm) {
  if (norm == CenterDistNorm::kDiagonal) return center_distance(a, b, frame);
  return center_distance(a, b) / std::max(frame.width, frame.height);
}

}  // namespace

void validate(const FusionConfig& cfg) {
  auto unit = [](double v, const char* name) {
    if (!in_unit(v)) throw Error(ErrorCode::kValidation, std::string("fusion.") + name + " must be in [0,1]");
  };
  unit(cfg.conf_threshold, "conf_threshold");
  unit(cfg.ciou_threshold, "ciou_threshold");
  unit(cfg.proximity_iou, "proximity_iou");
  unit(cfg.proximity_center_dist, "proximity_center_dist");
  if (cfg.window < 1) throw Error(ErrorCode::kValidation, "fusion.window must be >= 1");
  if (cfg.prompt_cadence < 1) throw Error(ErrorCode::kValidation, "fusion.prompt_cadence must be >= 1");
}

std::string_view to_string(CenterDistNorm v) {
  return v == CenterDistNorm::kDiagonal ? "diagonal" : "maxdim";
}

std::string_view to_string(PromptPolicy v) {
  return v == PromptPolicy::kEager ? "eager" : "cadence";
}

std::string_view to_string(OutputSource s) {
  switch (s) {
    case OutputSource::kTracker: return "tracker";
    case OutputSource::kDetectorPrompted: return "detector_prompted";
    case OutputSource::kAveraged: return "averaged";
    case OutputSource::kNone: return "none";
  }
  return "none";
}

OutputSource parse_output_source(std::string_view s) {
  if (s == "tracker") return OutputSource::kTracker;
  if (s == "detector_prompted") return OutputSource::kDetectorPrompted;
  if (s == "averaged") return OutputSource::kAveraged;
  if (s == "none") return OutputSource::kNone;
  throw Error(ErrorCode::kParse, "unknown output source '" + std::string(s) + "'");
}

void TrajectoryHistory::push(std::int64_t frame_index, const BBox& box) {
  if (!entries_.empty() && frame_index <= entries_.back().frame_index) {
    throw Error(ErrorCode::kValidation, "trajectory history frames must increase");
  }
  entries_.push_back({frame_index, box});
  expire(frame_index + 1);
}

void TrajectoryHistory::expire(std::int64_t frame_index) {
  while (!entries_.empty() && entries_.front().frame_index < frame_index - window_) {
    entries_.pop_front();
  }
}

Reliability is_reliable(const Detection& det, const std::optional<BBox>& tracker_box,
                        const TrajectoryHistory& history, const FrameGeometry& frame,
                        const FusionConfig& cfg) {
  require_valid(det.box);
  Reliability r;
  r.gates.confidence = det.confidence > cfg.conf_threshold;
  r.gates.alignment = tracker_box && ciou(*tracker_box, det.box) > cfg.ciou_threshold;
  if (!history.empty()) {
    const bool overlaps_latest = iou(det.box, history.latest().box) > cfg.proximity_iou;
    double nearest = std::numeric_limits<double>::infinity();
    for (const auto& e : history.entries()) {
      nearest = std::min(nearest, normalized_distance(det.box, e.box, frame, cfg.center_dist_norm));
    }
    r.gates.proximity = overlaps_latest || nearest < cfg.proximity_center_dist;
  }
  r.reliable = r.gates.any();
  return r;
}

std::optional<Detection> strongest(std::span<const Detection> detections) {
  std::optional<Detection> best;
  for (const Detection& d : detections) {
    if (!best || d.confidence > best->confidence) best = d;
  }
  return best;
}

FusionEngine::FusionEngine(FusionConfig cfg, FrameGeometry frame)
    : cfg_(cfg), frame_(frame), history_(cfg.window) {
  validate(cfg_);
  require_valid(frame_);
}

FusionDecision FusionEngine::initialize(std::int64_t frame_index, const BBox& init_box,
                                        double confidence, OutputSource source) {
  require_valid(init_box);
  history_.clear();
  history_.push(frame_index, init_box);
  last_prompt_frame_ = frame_index;
  initialized_ = true;

  FusionDecision d;
  d.frame_index = frame_index;
  d.prompted = true;
  d.output = init_box;
  d.output_confidence = confidence;
  d.source = source;
  return d;
}

FusionDecision FusionEngine::fuse_frame(std::int64_t frame_index,
                                        const std::optional<TrackerBox>& tracker,
                                        const std::optional<Detection>& det) {
  if (!initialized_) throw Error(ErrorCode::kUninitialized, "fusion engine used before initialization");
  history_.expire(frame_index);

  FusionDecision d;
  d.frame_index = frame_index;
  d.tracker = tracker;
  d.detection = det;

  const std::int64_t gap = frame_index - last_prompt_frame_;
  d.frames_since_prompt = static_cast<int>(gap);

  if (det) {
    const std::optional<BBox> tracker_box =
        tracker ? std::optional<BBox>(tracker->box) : std::nullopt;
    const Reliability r = is_reliable(*det, tracker_box, history_, frame_, cfg_);
    d.gates = r.gates;
    d.reliable = r.reliable;
    d.prompted = cfg_.prompt_policy == PromptPolicy::kEager
                     ? r.reliable
                     : r.reliable && gap >= cfg_.prompt_cadence;
  }
  // A due prompt that was available but not issued breaks the cadence bound.
  d.cadence_held = !(d.reliable && !d.prompted && gap >= cfg_.prompt_cadence);

  const bool can_average = det && tracker && encloses(det->box, tracker->box) &&
                           (d.reliable || !cfg_.average_requires_reliable);
  if (can_average) {
    d.averaged = true;
    d.output = mean_box(tracker->box, det->box);
    d.output_confidence = det->confidence;
    d.source = OutputSource::kAveraged;
  } else if (d.prompted) {
    d.output = det->box;
    d.output_confidence = det->confidence;
    d.source = OutputSource::kDetectorPrompted;
  } else if (tracker) {
    d.output = tracker->box;
    d.output_confidence = tracker->score;
    d.source = OutputSource::kTracker;
  }

  if (d.prompted) last_prompt_frame_ = frame_index;
  if (d.output) history_.push(frame_index, *d.output);
  return d;
}

std::vector<FusionDecision> run_sequence(std::span<const std::optional<TrackerBox>> tracker,
                                         std::span<const std::vector<Detection>> detections,
                                         std::int64_t frame_count, const FusionConfig& cfg,
                                         const FrameGeometry& frame,
                                         const std::optional<Detection>& init_box) {
  auto tracker_at = [&](std::int64_t t) -> std::optional<TrackerBox> {
    if (t < static_cast<std::int64_t>(tracker.size())) return tracker[static_cast<std::size_t>(t)];
    return std::nullopt;
  };
  auto detection_at = [&](std::int64_t t) -> std::optional<Detection> {
    if (t < static_cast<std::int64_t>(detections.size())) {
      return strongest(detections[static_cast<std::size_t>(t)]);
    }
    return std::nullopt;
  };

  std::optional<Detection> init = init_box;
  if (!init) {
    for (std::int64_t t = 0; t < frame_count && !init; ++t) init = detection_at(t);
  }
  if (!init) throw Error(ErrorCode::kCannotInitialize, "no detection available to initialize from");
  if (init->frame_index < 0 || init->frame_index >= frame_count) {
    throw Error(ErrorCode::kCannotInitialize, "initialization frame outside the sequence");
  }

  FusionEngine engine(cfg, frame);
  std::vector<FusionDecision> out;
  out.reserve(static_cast<std::size_t>(frame_count));
  for (std::int64_t t = 0; t < frame_count; ++t) {
    if (t < init->frame_index) {
      FusionDecision idle;
      idle.frame_index = t;
      out.push_back(idle);
    } else if (t == init->frame_index) {
      FusionDecision d =
          engine.initialize(t, init->box, init->confidence, OutputSource::kDetectorPrompted);
      d.tracker = tracker_at(t);
      d.detection = *init;
      out.push_back(d);
    } else {
      out.push_back(engine.fuse_frame(t, tracker_at(t), detection_at(t)));
    }
  }
  return out;
}

}  // namespace fusetrack
