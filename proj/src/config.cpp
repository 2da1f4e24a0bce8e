#include "fusetrack/config.hpp"

#include <cstdlib>
#include <functional>
#include <sstream>

#include "fusetrack/error.hpp"
#include "fusetrack/text.hpp"

namespace fusetrack {

namespace {

using text::format_number;

template <typename Target>
struct Field {
  std::string key;
  std::function<void(Target&, std::string_view)> set;
  std::function<std::string(const Target&)> get;
};

using RunField = Field<RunConfig>;

template <typename S>
RunField real(std::string key, S RunConfig::*section, double S::*member) {
  return {key,
          [=](RunConfig& c, std::string_view v) { (c.*section).*member = text::parse_double(v, key); },
          [=](const RunConfig& c) { return format_number((c.*section).*member); }};
}

template <typename S>
RunField integer(std::string key, S RunConfig::*section, int S::*member) {
  return {key,
          [=](RunConfig& c, std::string_view v) {
            (c.*section).*member = static_cast<int>(text::parse_int(v, key));
          },
          [=](const RunConfig& c) { return format_number(std::int64_t{(c.*section).*member}); }};
}

const std::vector<RunField>& run_fields() {
  static const std::vector<RunField> fields = [] {
    std::vector<RunField> f;
    using RC = RunConfig;
    f.push_back(real("fusion.conf_threshold", &RC::fusion, &FusionConfig::conf_threshold));
    f.push_back(real("fusion.ciou_threshold", &RC::fusion, &FusionConfig::ciou_threshold));
    f.push_back(real("fusion.proximity_iou", &RC::fusion, &FusionConfig::proximity_iou));
    f.push_back(real("fusion.proximity_center_dist", &RC::fusion, &FusionConfig::proximity_center_dist));
    f.push_back(integer("fusion.window", &RC::fusion, &FusionConfig::window));
    f.push_back(integer("fusion.prompt_cadence", &RC::fusion, &FusionConfig::prompt_cadence));
    f.push_back({"fusion.center_dist_norm",
                 [](RC& c, std::string_view v) {
                   if (v == "diagonal") {
                     c.fusion.center_dist_norm = CenterDistNorm::kDiagonal;
                   } else if (v == "maxdim") {
                     c.fusion.center_dist_norm = CenterDistNorm::kMaxDim;
                   } else {
                     throw Error(ErrorCode::kValidation, "fusion.center_dist_norm must be diagonal|maxdim");
                   }
                 },
                 [](const RC& c) { return std::string(to_string(c.fusion.center_dist_norm)); }});
    f.push_back({"fusion.prompt_policy",
                 [](RC& c, std::string_view v) {
                   if (v == "eager") {
                     c.fusion.prompt_policy = PromptPolicy::kEager;
                   } else if (v == "cadence") {
                     c.fusion.prompt_policy = PromptPolicy::kCadence;
                   } else {
                     throw Error(ErrorCode::kValidation, "fusion.prompt_policy must be eager|cadence");
                   }
                 },
                 [](const RC& c) { return std::string(to_string(c.fusion.prompt_policy)); }});
    f.push_back({"fusion.average_requires_reliable",
                 [](RC& c, std::string_view v) {
                   c.fusion.average_requires_reliable =
                       text::parse_bool(v, "fusion.average_requires_reliable");
                 },
                 [](const RC& c) { return std::string(c.fusion.average_requires_reliable ? "true" : "false"); }});

    f.push_back(real("kalman.process_noise_pos", &RC::kalman, &KalmanConfig::process_noise_pos));
    f.push_back(real("kalman.process_noise_vel", &RC::kalman, &KalmanConfig::process_noise_vel));
    f.push_back(real("kalman.measurement_noise", &RC::kalman, &KalmanConfig::measurement_noise));
    f.push_back(real("kalman.gate_threshold", &RC::kalman, &KalmanConfig::gate_threshold));

    f.push_back(real("selection.alpha_kf", &RC::selection, &SelectionConfig::alpha_kf));
    f.push_back(integer("selection.memory_capacity", &RC::selection, &SelectionConfig::memory_capacity));
    f.push_back({"selection.score_weights",
                 [](RC& c, std::string_view v) {
                   const auto parts = text::split(v, ',');
                   if (parts.size() != 3) {
                     throw Error(ErrorCode::kValidation, "selection.score_weights needs three values");
                   }
                   for (std::size_t i = 0; i < 3; ++i) {
                     c.selection.score_weights[i] = text::parse_double(parts[i], "selection.score_weights");
                   }
                 },
                 [](const RC& c) {
                   const auto& w = c.selection.score_weights;
                   return format_number(w[0]) + "," + format_number(w[1]) + "," + format_number(w[2]);
                 }});

    f.push_back(real("surrogate.noise_sigma", &RC::surrogate, &SurrogateModel::noise_sigma));
    f.push_back(real("surrogate.drift_rate", &RC::surrogate, &SurrogateModel::drift_rate));
    f.push_back(real("surrogate.heading_jitter", &RC::surrogate, &SurrogateModel::heading_jitter));
    f.push_back(integer("surrogate.candidate_count", &RC::surrogate, &SurrogateModel::candidate_count));
    f.push_back(real("surrogate.affinity_scale", &RC::surrogate, &SurrogateModel::affinity_scale));
    f.push_back(real("surrogate.objectness_scale", &RC::surrogate, &SurrogateModel::objectness_scale));
    f.push_back(real("surrogate.lost_threshold", &RC::surrogate, &SurrogateModel::lost_threshold));
    f.push_back(real("surrogate.capture_radius", &RC::surrogate, &SurrogateModel::capture_radius));
    f.push_back(real("surrogate.reacquire_prob", &RC::surrogate, &SurrogateModel::reacquire_prob));

    f.push_back(real("detector.detect_prob", &RC::detector, &DetectorModel::detect_prob));
    f.push_back(real("detector.dropout_burst", &RC::detector, &DetectorModel::dropout_burst));
    f.push_back(real("detector.loc_noise_sigma", &RC::detector, &DetectorModel::loc_noise_sigma));
    f.push_back(real("detector.conf_lambda", &RC::detector, &DetectorModel::conf_lambda));
    f.push_back(real("detector.conf_noise", &RC::detector, &DetectorModel::conf_noise));
    f.push_back(real("detector.clutter_rate", &RC::detector, &DetectorModel::clutter_rate));
    f.push_back(real("detector.clutter_conf_max", &RC::detector, &DetectorModel::clutter_conf_max));

    f.push_back(real("metrics.match_threshold", &RC::metrics, &MetricOptions::match_threshold));
    f.push_back({"metrics.interpolation",
                 [](RC& c, std::string_view v) {
                   if (v == "all_point") {
                     c.metrics.interpolation = ApInterpolation::kAllPoint;
                   } else if (v == "101_point") {
                     c.metrics.interpolation = ApInterpolation::k101Point;
                   } else {
                     throw Error(ErrorCode::kValidation, "metrics.interpolation must be all_point|101_point");
                   }
                 },
                 [](const RC& c) { return std::string(to_string(c.metrics.interpolation)); }});
    return f;
  }();
  return fields;
}

std::string format_exits(const std::vector<ExitSegment>& exits) {
  std::string out;
  for (std::size_t i = 0; i < exits.size(); ++i) {
    if (i) out += ',';
    out += format_number(exits[i].start) + "-" + format_number(exits[i].end);
  }
  return out;
}

std::string format_waypoints(const std::vector<std::pair<double, double>>& pts) {
  std::string out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) out += ',';
    out += format_number(pts[i].first) + ":" + format_number(pts[i].second);
  }
  return out;
}

}  // namespace

void validate(const RunConfig& cfg) {
  validate(cfg.fusion);
  validate(cfg.kalman);
  validate(cfg.selection);
  validate(cfg.surrogate);
  validate(cfg.detector);
  if (!(cfg.metrics.match_threshold >= 0.0 && cfg.metrics.match_threshold <= 1.0)) {
    throw Error(ErrorCode::kValidation, "metrics.match_threshold must be in [0,1]");
  }
}

KeyValues parse_key_values(std::string_view content, std::string_view source) {
  KeyValues out;
  std::size_t line_no = 0;
  for (std::string_view raw : text::split(content, '\n')) {
    ++line_no;
    const std::string_view line = text::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kParse, std::string(source) + ":" + std::to_string(line_no) +
                                         ": expected key=value");
    }
    out.emplace_back(std::string(text::trim(line.substr(0, eq))),
                     std::string(text::trim(line.substr(eq + 1))));
  }
  return out;
}

KeyValues read_key_values(const std::string& path) {
  return parse_key_values(text::read_file(path), path);
}

void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value) {
  for (const RunField& f : run_fields()) {
    if (f.key == key) {
      f.set(cfg, value);
      return;
    }
  }
  throw Error(ErrorCode::kValidation, "unknown config key '" + std::string(key) + "'");
}

void apply_setting(ScenarioSpec& s, std::string_view key, std::string_view v) {
  const std::string k(key);
  if (key == "scenario.name") {
    s.name = std::string(v);
  } else if (key == "scenario.width") {
    s.frame.width = text::parse_double(v, k);
  } else if (key == "scenario.height") {
    s.frame.height = text::parse_double(v, k);
  } else if (key == "scenario.fps") {
    s.fps = text::parse_double(v, k);
  } else if (key == "scenario.length") {
    s.length = text::parse_int(v, k);
  } else if (key == "scenario.trajectory") {
    s.trajectory = parse_trajectory_kind(v);
  } else if (key == "scenario.waypoints") {
    s.waypoints.clear();
    if (!v.empty()) {
      for (auto item : text::split(v, ',')) {
        const auto uv = text::split(item, ':');
        if (uv.size() != 2) throw Error(ErrorCode::kParse, k + ": expected u:v pairs");
        s.waypoints.emplace_back(text::parse_double(uv[0], k), text::parse_double(uv[1], k));
      }
    }
  } else if (key == "scenario.speed") {
    s.speed = text::parse_double(v, k);
  } else if (key == "scenario.area_min") {
    s.area_min = text::parse_double(v, k);
  } else if (key == "scenario.area_max") {
    s.area_max = text::parse_double(v, k);
  } else if (key == "scenario.scale_period") {
    s.scale_period = text::parse_double(v, k);
  } else if (key == "scenario.aspect") {
    s.aspect = text::parse_double(v, k);
  } else if (key == "scenario.exits") {
    s.exit_segments.clear();
    if (!v.empty()) {
      for (auto item : text::split(v, ',')) {
        const auto range = text::split(item, '-');
        if (range.size() != 2) throw Error(ErrorCode::kParse, k + ": expected start-end ranges");
        s.exit_segments.push_back({text::parse_int(range[0], k), text::parse_int(range[1], k)});
      }
    }
  } else if (key == "scenario.seed") {
    const std::int64_t seed = text::parse_int(v, k);
    if (seed < 0) throw Error(ErrorCode::kValidation, "scenario.seed must be >= 0");
    s.seed = static_cast<std::uint64_t>(seed);
  } else {
    throw Error(ErrorCode::kValidation, "unknown config key '" + k + "'");
  }
}

std::vector<std::string> run_config_keys() {
  std::vector<std::string> keys;
  for (const RunField& f : run_fields()) keys.push_back(f.key);
  return keys;
}

RunConfig run_config_from(const KeyValues& kv) {
  RunConfig cfg;
  for (const auto& [k, v] : kv) apply_setting(cfg, k, v);
  validate(cfg);
  return cfg;
}

RunConfig load_run_config(const std::string& path) { return run_config_from(read_key_values(path)); }

std::string format_run_config(const RunConfig& cfg) {
  std::string out;
  for (const RunField& f : run_fields()) out += f.key + "=" + f.get(cfg) + "\n";
  return out;
}

ScenarioFile load_scenario_file(const std::string& path) {
  ScenarioFile file;
  for (const auto& [k, v] : read_key_values(path)) {
    if (k.starts_with("scenario.")) {
      apply_setting(file.spec, k, v);
    } else {
      apply_setting(file.run, k, v);
    }
  }
  validate(file.spec);
  validate(file.run);
  return file;
}

std::string format_scenario_spec(const ScenarioSpec& s) {
  std::ostringstream os;
  os << "scenario.name=" << s.name << "\n"
     << "scenario.width=" << format_number(s.frame.width) << "\n"
     << "scenario.height=" << format_number(s.frame.height) << "\n"
     << "scenario.fps=" << format_number(s.fps) << "\n"
     << "scenario.length=" << format_number(s.length) << "\n"
     << "scenario.trajectory=" << to_string(s.trajectory) << "\n"
     << "scenario.waypoints=" << format_waypoints(s.waypoints) << "\n"
     << "scenario.speed=" << format_number(s.speed) << "\n"
     << "scenario.area_min=" << format_number(s.area_min) << "\n"
     << "scenario.area_max=" << format_number(s.area_max) << "\n"
     << "scenario.scale_period=" << format_number(s.scale_period) << "\n"
     << "scenario.aspect=" << format_number(s.aspect) << "\n"
     << "scenario.exits=" << format_exits(s.exit_segments) << "\n"
     << "scenario.seed=" << s.seed << "\n";
  return os.str();
}

std::optional<std::string> default_config_path() {
  const char* env = std::getenv("FUSETRACK_CONFIG");
  if (env == nullptr || *env == '\0') return std::nullopt;
  return std::string(env);
}

}  // namespace fusetrack
