#include "fusetrack/pipeline.hpp"

#include <random>
#include <string>

#include "fusetrack/error.hpp"
#include "fusetrack/tracker_sim.hpp"

namespace fusetrack {

namespace {

struct InitPoint {
  std::int64_t frame;
  BBox box;
  double confidence;
  OutputSource source;
  std::optional<Detection> detection;
};

InitPoint find_init(const SequenceInputs& in, InitMode init) {
  for (std::int64_t t = 0; t < in.frame_count; ++t) {
    const auto idx = static_cast<std::size_t>(t);
    if (init == InitMode::kGroundTruth) {
      if (in.gt[idx]) return {t, *in.gt[idx], 1.0, OutputSource::kTracker, std::nullopt};
    } else if (auto det = strongest(in.detections[idx])) {
      return {t, det->box, det->confidence, OutputSource::kDetectorPrompted, det};
    }
  }
  throw Error(ErrorCode::kCannotInitialize, init == InitMode::kGroundTruth
                                                ? "no ground-truth box to initialize from"
                                                : "no detection to initialize from");
}

FusionDecision idle_decision(std::int64_t t) {
  FusionDecision d;
  d.frame_index = t;
  return d;
}

FusionDecision tracker_decision(std::int64_t t, const std::optional<TrackerBox>& tb,
                                std::int64_t init_frame) {
  FusionDecision d;
  d.frame_index = t;
  d.tracker = tb;
  d.frames_since_prompt = static_cast<int>(t - init_frame);
  if (tb) {
    d.output = tb->box;
    d.output_confidence = tb->score;
    d.source = OutputSource::kTracker;
  }
  return d;
}

}  // namespace

RunMode parse_run_mode(std::string_view s) {
  if (s == "tracker-only") return RunMode::kTrackerOnly;
  if (s == "augmented") return RunMode::kAugmented;
  throw Error(ErrorCode::kValidation, "mode must be tracker-only|augmented");
}

InitMode parse_init_mode(std::string_view s) {
  if (s == "gt") return InitMode::kGroundTruth;
  if (s == "detector") return InitMode::kDetector;
  throw Error(ErrorCode::kValidation, "init must be gt|detector");
}

SequenceInputs align_inputs(BoxStream gt, DetectionStream detections, const SequenceMeta& meta) {
  validate(meta);
  const auto n = static_cast<std::size_t>(meta.frame_count);
  if (gt.size() > n) {
    throw Error(ErrorCode::kMisalignment, "ground truth has frames beyond frame_count");
  }
  if (detections.size() > n) {
    throw Error(ErrorCode::kMisalignment, "detections have frames beyond frame_count");
  }
  gt.resize(n);
  detections.resize(n);
  return {std::move(gt), std::move(detections), meta.frame_count, meta.frame()};
}

std::vector<FusionDecision> run_closed_loop(const SequenceInputs& in, const RunConfig& cfg,
                                            RunMode mode, InitMode init, std::uint64_t seed) {
  validate(cfg);
  const InitPoint start = find_init(in, init);

  std::seed_seq seq{seed, std::uint64_t{2}};
  Rng rng(seq);
  SurrogateTracker tracker(cfg.surrogate, cfg.kalman, cfg.selection);
  FusionEngine engine(cfg.fusion, in.frame);

  std::vector<FusionDecision> out;
  out.reserve(static_cast<std::size_t>(in.frame_count));
  std::optional<BBox> pending_prompt;

  for (std::int64_t t = 0; t < in.frame_count; ++t) {
    const auto idx = static_cast<std::size_t>(t);
    if (t < start.frame) {
      out.push_back(idle_decision(t));
      continue;
    }
    if (t == start.frame) {
      tracker.initialize(start.box, t, rng);
      FusionDecision d = engine.initialize(t, start.box, start.confidence, start.source);
      d.detection = start.detection;
      out.push_back(d);
      continue;
    }

    const TrackerOutput step = tracker.step(in.gt[idx], pending_prompt, rng);
    pending_prompt.reset();
    const std::optional<TrackerBox> tb =
        step.box ? std::optional(TrackerBox{*step.box, step.objectness}) : std::nullopt;

    if (mode == RunMode::kTrackerOnly) {
      out.push_back(tracker_decision(t, tb, start.frame));
      continue;
    }
    FusionDecision d = engine.fuse_frame(t, tb, strongest(in.detections[idx]));
    if (d.prompted) pending_prompt = d.detection->box;
    out.push_back(d);
  }
  return out;
}

std::vector<FusionDecision> run_recorded(std::span<const std::optional<TrackerBox>> tracker,
                                         const SequenceInputs& in, const RunConfig& cfg,
                                         RunMode mode, InitMode init) {
  validate(cfg);
  if (tracker.size() > static_cast<std::size_t>(in.frame_count)) {
    throw Error(ErrorCode::kMisalignment, "tracker stream has frames beyond frame_count");
  }
  const InitPoint start = find_init(in, init);
  if (mode == RunMode::kAugmented) {
    Detection init_det{start.frame, start.box, start.confidence};
    auto out = run_sequence(tracker, in.detections, in.frame_count, cfg.fusion, in.frame, init_det);
    if (init == InitMode::kGroundTruth) {
      out[static_cast<std::size_t>(start.frame)].source = OutputSource::kTracker;
      out[static_cast<std::size_t>(start.frame)].detection.reset();
    }
    return out;
  }
  std::vector<FusionDecision> out;
  for (std::int64_t t = 0; t < in.frame_count; ++t) {
    const auto idx = static_cast<std::size_t>(t);
    const std::optional<TrackerBox> tb = idx < tracker.size() ? tracker[idx] : std::nullopt;
    if (t < start.frame) {
      out.push_back(idle_decision(t));
    } else if (t == start.frame) {
      FusionDecision d;
      d.frame_index = t;
      d.prompted = true;
      d.output = start.box;
      d.output_confidence = start.confidence;
      d.source = start.source;
      d.tracker = tb;
      d.detection = start.detection;
      out.push_back(d);
    } else {
      out.push_back(tracker_decision(t, tb, start.frame));
    }
  }
  return out;
}

std::vector<FramePair> make_pairs(const BoxStream& gt,
                                  std::span<const std::optional<Prediction>> predictions,
                                  std::int64_t frame_count) {
  if (gt.size() > static_cast<std::size_t>(frame_count) ||
      predictions.size() > static_cast<std::size_t>(frame_count)) {
    throw Error(ErrorCode::kMisalignment, "streams reach beyond the sequence frame count");
  }
  std::vector<FramePair> pairs(static_cast<std::size_t>(frame_count));
  for (std::size_t t = 0; t < pairs.size(); ++t) {
    pairs[t].frame_index = static_cast<std::int64_t>(t);
    if (t < gt.size()) pairs[t].gt = gt[t];
    if (t < predictions.size() && predictions[t]) {
      pairs[t].pred = predictions[t]->box;
      pairs[t].pred_confidence = predictions[t]->confidence;
    }
  }
  return pairs;
}

std::vector<FramePair> make_pairs(const BoxStream& gt, std::span<const FusionDecision> decisions) {
  std::vector<std::optional<Prediction>> preds;
  preds.reserve(decisions.size());
  for (const FusionDecision& d : decisions) {
    preds.push_back(d.output ? std::optional(Prediction{*d.output, d.output_confidence}) : std::nullopt);
  }
  return make_pairs(gt, preds, static_cast<std::int64_t>(decisions.size()));
}

ExperimentResult run_experiment(const ScenarioSpec& spec, const RunConfig& cfg, RunMode mode,
                                InitMode init, std::uint64_t seed) {
  ScenarioSpec seeded = spec;
  seeded.seed = seed;
  Scenario sc = generate(seeded, cfg.detector);
  SequenceInputs in{std::move(sc.gt), std::move(sc.detections), spec.length, spec.frame};

  ExperimentResult r;
  r.decisions = run_closed_loop(in, cfg, mode, init, seed);
  const auto pairs = make_pairs(in.gt, r.decisions);
  r.report = evaluate(pairs, spec.frame, cfg.metrics);
  return r;
}

}  // namespace fusetrack
