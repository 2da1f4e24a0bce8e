#include "fusetrack/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "fusetrack/error.hpp"

namespace fusetrack {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kValidation, what);
}

double area_ratio_at(const ScenarioSpec& s, std::int64_t t) {
  const double phase = kTwoPi * static_cast<double>(t) / s.scale_period;
  return s.area_min + (s.area_max - s.area_min) * (0.5 - 0.5 * std::cos(phase));
}

std::pair<double, double> extent_for_ratio(const ScenarioSpec& s, double ratio) {
  const double area = ratio * s.frame.width * s.frame.height;
  const double w = std::sqrt(area * s.aspect);
  return {w, w / s.aspect};
}

// Centers keep the largest box of the profile inside the frame.
struct CenterBounds {
  double x_lo, x_hi, y_lo, y_hi;
};

CenterBounds center_bounds(const ScenarioSpec& s) {
  const auto [w, h] = extent_for_ratio(s, s.area_max);
  return {0.5 * w, s.frame.width - 0.5 * w, 0.5 * h, s.frame.height - 0.5 * h};
}

double reflect(double v, double lo, double hi, double& velocity) {
  if (hi <= lo) return lo;
  while (v < lo || v > hi) {
    if (v < lo) v = 2.0 * lo - v;
    if (v > hi) v = 2.0 * hi - v;
    velocity = -velocity;
  }
  return v;
}

std::vector<std::pair<double, double>> trajectory_centers(const ScenarioSpec& s, Rng& rng) {
  const CenterBounds b = center_bounds(s);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::pair<double, double>> out;
  out.reserve(static_cast<std::size_t>(s.length));

  switch (s.trajectory) {
    case TrajectoryKind::kLinear: {
      double x = b.x_lo + unit(rng) * (b.x_hi - b.x_lo);
      double y = b.y_lo + unit(rng) * (b.y_hi - b.y_lo);
      const double heading = kTwoPi * unit(rng);
      double vx = s.speed * std::cos(heading);
      double vy = s.speed * std::sin(heading);
      for (std::int64_t t = 0; t < s.length; ++t) {
        out.emplace_back(x, y);
        x = reflect(x + vx, b.x_lo, b.x_hi, vx);
        y = reflect(y + vy, b.y_lo, b.y_hi, vy);
      }
      break;
    }
    case TrajectoryKind::kSinusoidal: {
      const double ax = 0.5 * (b.x_hi - b.x_lo);
      const double ay = 0.5 * (b.y_hi - b.y_lo);
      const double mx = 0.5 * (b.x_hi + b.x_lo);
      const double my = 0.5 * (b.y_hi + b.y_lo);
      const double wx = ax > 0.0 ? s.speed / ax : 0.0;
      const double wy = ay > 0.0 ? 0.7 * s.speed / ay : 0.0;
      const double px = kTwoPi * unit(rng);
      const double py = kTwoPi * unit(rng);
      for (std::int64_t t = 0; t < s.length; ++t) {
        const double tt = static_cast<double>(t);
        out.emplace_back(mx + ax * std::sin(wx * tt + px), my + ay * std::sin(wy * tt + py));
      }
      break;
    }
    case TrajectoryKind::kWaypoints: {
      std::vector<std::pair<double, double>> pts;
      for (const auto& [u, v] : s.waypoints) {
        pts.emplace_back(b.x_lo + u * (b.x_hi - b.x_lo), b.y_lo + v * (b.y_hi - b.y_lo));
      }
      std::size_t leg = 0;
      double along = 0.0;
      for (std::int64_t t = 0; t < s.length; ++t) {
        const auto& [x0, y0] = pts[leg];
        const auto& [x1, y1] = pts[(leg + 1) % pts.size()];
        const double len = std::hypot(x1 - x0, y1 - y0);
        const double f = len > 0.0 ? along / len : 0.0;
        out.emplace_back(x0 + f * (x1 - x0), y0 + f * (y1 - y0));
        along += s.speed;
        // Advance across as many legs as this step covers.
        for (std::size_t guard = 0; guard < pts.size(); ++guard) {
          const auto& [ax0, ay0] = pts[leg];
          const auto& [ax1, ay1] = pts[(leg + 1) % pts.size()];
          const double l = std::hypot(ax1 - ax0, ay1 - ay0);
          if (along < l) break;
          along -= l;
          leg = (leg + 1) % pts.size();
        }
      }
      break;
    }
  }
  return out;
}

bool in_exit(const ScenarioSpec& s, std::int64_t t) {
  return std::ranges::any_of(s.exit_segments,
                             [t](const ExitSegment& e) { return t >= e.start && t < e.end; });
}

}  // namespace

std::string_view to_string(TrajectoryKind k) {
  switch (k) {
    case TrajectoryKind::kLinear: return "linear";
    case TrajectoryKind::kSinusoidal: return "sinusoidal";
    case TrajectoryKind::kWaypoints: return "waypoints";
  }
  return "linear";
}

TrajectoryKind parse_trajectory_kind(std::string_view s) {
  if (s == "linear") return TrajectoryKind::kLinear;
  if (s == "sinusoidal") return TrajectoryKind::kSinusoidal;
  if (s == "waypoints" || s == "waypoint-list") return TrajectoryKind::kWaypoints;
  throw Error(ErrorCode::kValidation, "unknown trajectory '" + std::string(s) + "'");
}

void validate(const ScenarioSpec& s) {
  require(std::isfinite(s.frame.width) && std::isfinite(s.frame.height) && s.frame.width > 0.0 &&
              s.frame.height > 0.0,
          "scenario frame must have positive size");
  require(s.fps > 0.0, "scenario.fps must be > 0");
  require(s.length >= 1, "scenario.length must be >= 1");
  require(s.speed >= 0.0 && std::isfinite(s.speed), "scenario.speed must be >= 0");
  require(s.area_min > 0.0 && s.area_min < 1.0 && s.area_max > 0.0 && s.area_max < 1.0,
          "scenario area ratios must be in (0,1)");
  require(s.area_min <= s.area_max, "scenario.area_min must not exceed area_max");
  require(s.scale_period > 0.0, "scenario.scale_period must be > 0");
  require(s.aspect > 0.0 && std::isfinite(s.aspect), "scenario.aspect must be > 0");
  const auto [w, h] = extent_for_ratio(s, s.area_max);
  require(w < s.frame.width && h < s.frame.height, "largest object does not fit in the frame");
  for (const ExitSegment& e : s.exit_segments) {
    require(e.start >= 0 && e.start < e.end && e.end <= s.length,
            "exit segments must lie within [0, length) and be non-empty");
  }
  if (s.trajectory == TrajectoryKind::kWaypoints) {
    require(s.waypoints.size() >= 2, "waypoint trajectories need at least two waypoints");
    for (const auto& [u, v] : s.waypoints) {
      require(u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0, "waypoints must be normalized to [0,1]");
    }
  }
}

void validate(const DetectorModel& m) {
  require(m.detect_prob >= 0.0 && m.detect_prob <= 1.0, "detector.detect_prob must be in [0,1]");
  require(m.dropout_burst >= 1.0, "detector.dropout_burst must be >= 1");
  if (m.detect_prob > 0.0 && m.detect_prob < 1.0) {
    require((1.0 - m.detect_prob) / (m.detect_prob * m.dropout_burst) <= 1.0,
            "detector.dropout_burst too short for detect_prob");
  }
  require(m.loc_noise_sigma >= 0.0, "detector.loc_noise_sigma must be >= 0");
  require(m.conf_lambda > 0.0, "detector.conf_lambda must be > 0");
  require(m.conf_noise >= 0.0, "detector.conf_noise must be >= 0");
  require(m.clutter_rate >= 0.0, "detector.clutter_rate must be >= 0");
  require(m.clutter_conf_max >= 0.0 && m.clutter_conf_max <= 1.0,
          "detector.clutter_conf_max must be in [0,1]");
}

Scenario generate(const ScenarioSpec& spec, const DetectorModel& det) {
  validate(spec);
  validate(det);

  std::seed_seq traj_seq{spec.seed, std::uint64_t{0}};
  std::seed_seq det_seq{spec.seed, std::uint64_t{1}};
  Rng traj_rng(traj_seq);
  Rng det_rng(det_seq);

  const auto centers = trajectory_centers(spec, traj_rng);
  Scenario out;
  out.gt.resize(static_cast<std::size_t>(spec.length));
  out.detections.resize(static_cast<std::size_t>(spec.length));

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double miss_to_hit = 1.0 / det.dropout_burst;
  const double hit_to_miss =
      det.detect_prob <= 0.0 ? 1.0 : (1.0 - det.detect_prob) / (det.detect_prob * det.dropout_burst);
  bool hit = unit(det_rng) < det.detect_prob;

  for (std::int64_t t = 0; t < spec.length; ++t) {
    const auto idx = static_cast<std::size_t>(t);
    const auto [w, h] = extent_for_ratio(spec, area_ratio_at(spec, t));
    const auto [cx, cy] = centers[idx];
    const bool visible = !in_exit(spec, t);
    if (visible) out.gt[idx] = BBox::from_center(cx, cy, w, h);

    if (t > 0) {
      const double u = unit(det_rng);
      hit = hit ? u >= hit_to_miss : u < miss_to_hit;
    }
    if (det.detect_prob >= 1.0) hit = true;
    if (det.detect_prob <= 0.0) hit = false;

    std::vector<Detection>& frame_dets = out.detections[idx];
    if (visible && hit) {
      const BBox& g = *out.gt[idx];
      BBox box = g;
      if (det.loc_noise_sigma > 0.0) {
        std::normal_distribution<double> pos(0.0, det.loc_noise_sigma);
        std::normal_distribution<double> ext(0.0, 0.5 * det.loc_noise_sigma);
        const double dcx = g.cx() + pos(det_rng);
        const double dcy = g.cy() + pos(det_rng);
        const double dw = std::max(g.w + ext(det_rng), 0.25 * g.w);
        const double dh = std::max(g.h + ext(det_rng), 0.25 * g.h);
        box = BBox::from_center(dcx, dcy, dw, dh);
      }
      double conf = 1.0 - center_distance(box, g) / det.conf_lambda;
      if (det.conf_noise > 0.0) conf += std::normal_distribution<double>(0.0, det.conf_noise)(det_rng);
      frame_dets.push_back({t, box, std::clamp(conf, 0.0, 1.0)});
    }
    if (det.clutter_rate > 0.0) {
      const int n = std::poisson_distribution<int>(det.clutter_rate)(det_rng);
      for (int k = 0; k < n; ++k) {
        const double ratio = spec.area_min + unit(det_rng) * (spec.area_max - spec.area_min);
        const auto [cw, ch] = extent_for_ratio(spec, ratio);
        const double x = unit(det_rng) * (spec.frame.width - cw);
        const double y = unit(det_rng) * (spec.frame.height - ch);
        frame_dets.push_back({t, {x, y, cw, ch}, det.clutter_conf_max * unit(det_rng)});
      }
    }
  }
  return out;
}

std::vector<std::string> preset_names() {
  return {"r1-pos3-like", "r1-pos7-like", "r2-pos3-like", "r2-pos7-like", "dut-short-like",
          "dut-long-like"};
}

Preset long_duration_preset(std::string_view name) {
  Preset p;
  ScenarioSpec& s = p.spec;
  s.name = std::string(name);
  s.trajectory = TrajectoryKind::kSinusoidal;

  // Custom-camera regime: 2040x1086 at 60 fps, small drone, long sequences
  // with repeated FOV exits of up to ~140 frames.
  auto custom = [&](double area_min, double area_max) {
    s.frame = {2040.0, 1086.0};
    s.fps = 60.0;
    s.speed = 3.0;
    s.area_min = area_min;
    s.area_max = area_max;
    s.scale_period = 1500.0;
  };

  if (name == "r1-pos7-like") {
    custom(3e-4, 1.5e-3);
    s.length = 6327;
    s.exit_segments = {{700, 820}, {1900, 2010}, {3100, 3240}, {4300, 4390}, {5400, 5530}};
    s.seed = 7;
  } else if (name == "r1-pos3-like") {
    custom(3e-4, 1.5e-3);
    s.length = 6213;
    s.exit_segments = {{1000, 1105}, {2500, 2640}, {4100, 4180}, {5200, 5330}};
    s.seed = 3;
  } else if (name == "r2-pos3-like") {
    custom(1e-3, 8e-3);
    s.length = 1484;
    s.exit_segments = {{400, 510}, {1000, 1080}};
    s.seed = 3;
  } else if (name == "r2-pos7-like") {
    custom(1e-3, 8e-3);
    s.length = 4908;
    s.exit_segments = {{800, 930}, {2000, 2090}, {3300, 3420}, {4200, 4310}};
    s.seed = 7;
  } else if (name == "dut-short-like") {
    s.frame = {1280.0, 720.0};
    s.fps = 30.0;
    s.speed = 2.0;
    s.area_min = 2e-3;
    s.area_max = 6e-3;
    s.scale_period = 200.0;
    s.length = 83;
    s.seed = 2;
  } else if (name == "dut-long-like") {
    s.frame = {1280.0, 720.0};
    s.fps = 30.0;
    s.speed = 2.0;
    s.area_min = 1e-3;
    s.area_max = 5e-3;
    s.scale_period = 800.0;
    s.length = 2480;
    s.exit_segments = {{900, 1010}, {1800, 1870}};
    s.seed = 7;
  } else {
    throw Error(ErrorCode::kValidation, "unknown preset '" + std::string(name) + "'");
  }
  validate(s);
  return p;
}

}  // namespace fusetrack
