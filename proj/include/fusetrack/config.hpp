#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fusetrack/fusion.hpp"
#include "fusetrack/metrics.hpp"
#include "fusetrack/motion.hpp"
#include "fusetrack/scenario.hpp"
#include "fusetrack/tracker_sim.hpp"

namespace fusetrack {

struct RunConfig {
  FusionConfig fusion;
  KalmanConfig kalman;
  SelectionConfig selection;
  SurrogateModel surrogate;
  DetectorModel detector;
  MetricOptions metrics;
};

void validate(const RunConfig& cfg);

/// Ordered `key=value` pairs. Blank lines and lines starting with '#' are
/// ignored; surrounding whitespace is trimmed.
using KeyValues = std::vector<std::pair<std::string, std::string>>;

KeyValues parse_key_values(std::string_view text, std::string_view source);
KeyValues read_key_values(const std::string& path);

/// Applies one `section.name` setting. Unknown keys raise a validation error
/// naming the key.
void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value);
void apply_setting(ScenarioSpec& spec, std::string_view key, std::string_view value);

/// Every run-configuration key, in canonical order.
std::vector<std::string> run_config_keys();

RunConfig run_config_from(const KeyValues& kv);
RunConfig load_run_config(const std::string& path);
std::string format_run_config(const RunConfig& cfg);

/// `scenario.*` keys describe the sequence; all other keys go to the run
/// configuration (detector, surrogate, ...).
struct ScenarioFile {
  ScenarioSpec spec;
  RunConfig run;
};

ScenarioFile load_scenario_file(const std::string& path);
std::string format_scenario_spec(const ScenarioSpec& spec);

/// Default config path from FUSETRACK_CONFIG, if set and non-empty.
std::optional<std::string> default_config_path();

}  // namespace fusetrack
