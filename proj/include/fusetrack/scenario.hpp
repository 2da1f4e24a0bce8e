#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fusetrack/fusion.hpp"
#include "fusetrack/geometry.hpp"
#include "fusetrack/tracker_sim.hpp"

namespace fusetrack {

using BoxStream = std::vector<std::optional<BBox>>;
using DetectionStream = std::vector<std::vector<Detection>>;

enum class TrajectoryKind { kLinear, kSinusoidal, kWaypoints };

std::string_view to_string(TrajectoryKind k);
TrajectoryKind parse_trajectory_kind(std::string_view s);

/// Half-open frame range [start, end) during which the target is out of view.
struct ExitSegment {
  std::int64_t start = 0;
  std::int64_t end = 0;

  friend bool operator==(const ExitSegment&, const ExitSegment&) = default;
};

struct ScenarioSpec {
  std::string name = "custom";
  FrameGeometry frame{1920.0, 1080.0};
  double fps = 30.0;
  std::int64_t length = 1000;
  TrajectoryKind trajectory = TrajectoryKind::kSinusoidal;
  // Normalized [0,1]^2 positions, traversed cyclically (waypoint trajectories).
  std::vector<std::pair<double, double>> waypoints;
  double speed = 2.0;        // px/frame
  double area_min = 1e-3;    // object area / frame area
  double area_max = 4e-3;
  double scale_period = 600.0;  // frames per full min-max-min area cycle
  double aspect = 1.6;       // width / height
  std::vector<ExitSegment> exit_segments;
  std::uint64_t seed = 0;
};

void validate(const ScenarioSpec& spec);

/// Per-frame detector behaviour. Misses follow a two-state Markov chain whose
/// stationary hit rate is `detect_prob` and whose mean miss-burst length is
/// `dropout_burst`. Confidence is clamp(1 - e / conf_lambda + N(0, conf_noise))
/// for localization error e in pixels. Clutter boxes arrive as a Poisson
/// process with confidence uniform in [0, clutter_conf_max].
struct DetectorModel {
  double detect_prob = 0.85;
  double dropout_burst = 8.0;
  double loc_noise_sigma = 1.5;
  double conf_lambda = 15.0;
  double conf_noise = 0.05;
  double clutter_rate = 0.01;
  double clutter_conf_max = 0.6;
};

void validate(const DetectorModel& model);

struct Scenario {
  BoxStream gt;
  DetectionStream detections;
};

/// Deterministic in `spec.seed`.
Scenario generate(const ScenarioSpec& spec, const DetectorModel& det_model);

struct Preset {
  ScenarioSpec spec;
  DetectorModel detector;
  SurrogateModel surrogate;
};

std::vector<std::string> preset_names();
Preset long_duration_preset(std::string_view name);

}  // namespace fusetrack
