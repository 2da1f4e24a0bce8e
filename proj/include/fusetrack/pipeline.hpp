#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "fusetrack/config.hpp"
#include "fusetrack/fusion.hpp"
#include "fusetrack/io.hpp"
#include "fusetrack/metrics.hpp"
#include "fusetrack/scenario.hpp"

namespace fusetrack {

enum class RunMode { kTrackerOnly, kAugmented };
enum class InitMode { kGroundTruth, kDetector };

RunMode parse_run_mode(std::string_view s);
InitMode parse_init_mode(std::string_view s);

struct SequenceInputs {
  BoxStream gt;
  DetectionStream detections;
  std::int64_t frame_count = 0;
  FrameGeometry frame;
};

/// Rejects streams that reach past `frame_count` and pads them up to it.
SequenceInputs align_inputs(BoxStream gt, DetectionStream detections, const SequenceMeta& meta);

/// Closed loop: the surrogate tracker (driven by the ground truth) runs every
/// frame; in augmented mode the fusion engine's prompts re-seed it on the
/// following frame. Tracker-only mode uses the detector for nothing but the
/// optional initialization.
std::vector<FusionDecision> run_closed_loop(const SequenceInputs& inputs, const RunConfig& cfg,
                                            RunMode mode, InitMode init, std::uint64_t seed);

/// Open loop over a recorded tracker stream.
std::vector<FusionDecision> run_recorded(std::span<const std::optional<TrackerBox>> tracker,
                                         const SequenceInputs& inputs, const RunConfig& cfg,
                                         RunMode mode, InitMode init);

std::vector<FramePair> make_pairs(const BoxStream& gt,
                                  std::span<const std::optional<Prediction>> predictions,
                                  std::int64_t frame_count);
std::vector<FramePair> make_pairs(const BoxStream& gt, std::span<const FusionDecision> decisions);

struct ExperimentResult {
  std::vector<FusionDecision> decisions;
  MetricReport report;
};

/// Generate a scenario, run one configuration over it and score it.
ExperimentResult run_experiment(const ScenarioSpec& spec, const RunConfig& cfg, RunMode mode,
                                InitMode init, std::uint64_t seed);

}  // namespace fusetrack
