#include "fusetrack/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <map>
#include <ostream>
#include <thread>

#include "fusetrack/config.hpp"
#include "fusetrack/error.hpp"
#include "fusetrack/io.hpp"
#include "fusetrack/pipeline.hpp"
#include "fusetrack/text.hpp"

namespace fusetrack::cli {

namespace {

namespace fs = std::filesystem;

std::string one_line(std::string s) {
  std::ranges::replace(s, '\n', ' ');
  return s;
}

std::string path_in(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

RunConfig resolve_config(const std::string& config_path, RunConfig base = {}) {
  std::string path = config_path;
  if (path.empty()) {
    if (auto env = default_config_path()) path = *env;
  }
  if (!path.empty()) {
    for (const auto& [k, v] : read_key_values(path)) apply_setting(base, k, v);
  }
  validate(base);
  return base;
}

struct ScenarioChoice {
  ScenarioSpec spec;
  RunConfig run;
};

ScenarioChoice resolve_scenario(const std::string& preset, const std::string& spec_path) {
  if (!preset.empty() && !spec_path.empty()) {
    throw Error(ErrorCode::kUsage, "--preset and --spec are mutually exclusive");
  }
  if (!preset.empty()) {
    const Preset p = long_duration_preset(preset);
    ScenarioChoice c{p.spec, {}};
    c.run.detector = p.detector;
    c.run.surrogate = p.surrogate;
    return c;
  }
  if (!spec_path.empty()) {
    ScenarioFile f = load_scenario_file(spec_path);
    return {f.spec, f.run};
  }
  throw Error(ErrorCode::kUsage, "a scenario is required (--preset or --spec)");
}

// -------------------------------------------------------------------------

struct SimulateArgs {
  std::string preset;
  std::string spec;
  std::string out;
  std::optional<std::uint64_t> seed;
};

void cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  ScenarioChoice sc = resolve_scenario(a.preset, a.spec);
  if (a.seed) sc.spec.seed = *a.seed;
  const Scenario generated = generate(sc.spec, sc.run.detector);

  write_ground_truth(path_in(a.out, "gt.csv"), generated.gt);
  write_detections(path_in(a.out, "detections.csv"), generated.detections);
  write_meta(path_in(a.out, "meta.txt"),
             {sc.spec.name, sc.spec.frame.width, sc.spec.frame.height, sc.spec.fps, sc.spec.length});
  text::write_file(path_in(a.out, "config.cfg"), format_run_config(sc.run));
  text::write_file(path_in(a.out, "scenario.cfg"), format_scenario_spec(sc.spec));
  out << "simulated " << sc.spec.name << ": " << sc.spec.length << " frames -> " << a.out << "\n";
}

struct FuseArgs {
  std::string gt;
  std::string det;
  std::string meta;
  std::string config;
  std::string tracker;
  std::string mode = "augmented";
  std::string init = "detector";
  std::string out;
  std::uint64_t seed = 0;
};

void cmd_fuse(const FuseArgs& a, std::ostream& out) {
  const RunMode mode = parse_run_mode(a.mode);
  const InitMode init = parse_init_mode(a.init);
  if (init == InitMode::kGroundTruth && a.gt.empty()) {
    throw Error(ErrorCode::kUsage, "--init gt requires --gt");
  }
  if (a.gt.empty() && a.tracker.empty()) {
    throw Error(ErrorCode::kUsage, "the surrogate tracker needs --gt; pass --tracker for recorded output");
  }
  const RunConfig cfg = resolve_config(a.config);
  const SequenceMeta meta = load_meta(a.meta);
  BoxStream gt = a.gt.empty() ? BoxStream{} : load_ground_truth(a.gt);
  SequenceInputs in = align_inputs(std::move(gt), load_detections(a.det), meta);

  std::vector<FusionDecision> decisions;
  if (!a.tracker.empty()) {
    const auto recorded = load_tracker_stream(a.tracker);
    decisions = run_recorded(recorded, in, cfg, mode, init);
  } else {
    decisions = run_closed_loop(in, cfg, mode, init, a.seed);
  }
  text::write_file(path_in(a.out, "decisions.csv"), format_decisions(decisions));
  out << "fused " << decisions.size() << " frames -> " << path_in(a.out, "decisions.csv") << "\n";
}

struct EvalArgs {
  std::string gt;
  std::string pred;
  std::string meta;
  std::string dataset;
  std::string pred_name = "decisions.csv";
  std::string config;
  std::string out;
};

MetricReport evaluate_files(const std::string& gt_path, const std::string& pred_path,
                            const std::string& meta_path, const MetricOptions& options) {
  const SequenceMeta meta = load_meta(meta_path);
  const BoxStream gt = load_ground_truth(gt_path);
  const auto preds = load_predictions(pred_path);
  if (pred_path.ends_with(".csv") && text::read_file(pred_path).starts_with("frame,gate_confidence") &&
      static_cast<std::int64_t>(preds.size()) != meta.frame_count) {
    throw Error(ErrorCode::kMisalignment, pred_path + ": decision rows do not match frame_count");
  }
  const auto pairs = make_pairs(gt, preds, meta.frame_count);
  return evaluate(pairs, meta.frame(), options);
}

void write_report(const std::string& dir, const MetricReport& r) {
  text::write_file(path_in(dir, "summary.json"), format_summary(r));
  text::write_file(path_in(dir, "curves.csv"), format_curves(r));
}

std::string metric_header() {
  std::string h;
  for (auto k : kMetricKeys) h += "," + std::string(k);
  return h;
}

std::string metric_row(const MetricReport& r) {
  std::string row;
  for (double v : scalars(r)) row += "," + text::format_number(v);
  return row;
}

void cmd_eval(const EvalArgs& a, std::ostream& out) {
  const MetricOptions options = resolve_config(a.config).metrics;
  if (!a.dataset.empty()) {
    std::vector<fs::path> seqs;
    for (const auto& entry : fs::directory_iterator(a.dataset)) {
      if (entry.is_directory() && fs::exists(entry.path() / "gt.csv")) seqs.push_back(entry.path());
    }
    std::ranges::sort(seqs);
    if (seqs.empty()) throw Error(ErrorCode::kEmptyInput, "no sequences under " + a.dataset);
    std::vector<MetricReport> reports;
    std::string table = "sequence" + metric_header() + "\n";
    for (const fs::path& s : seqs) {
      MetricReport r = evaluate_files((s / "gt.csv").string(), (s / a.pred_name).string(),
                                      (s / "meta.txt").string(), options);
      write_report(path_in(a.out, s.filename().string()), r);
      table += s.filename().string() + metric_row(r) + "\n";
      reports.push_back(std::move(r));
    }
    const MetricReport mean = average_reports(reports);
    table += "mean" + metric_row(mean) + "\n";
    write_report(a.out, mean);
    text::write_file(path_in(a.out, "sequences.csv"), table);
    out << "evaluated " << reports.size() << " sequences -> " << a.out << "\n";
    return;
  }
  if (a.gt.empty() || a.pred.empty() || a.meta.empty()) {
    throw Error(ErrorCode::kUsage, "eval needs --gt, --pred and --meta (or --dataset)");
  }
  const MetricReport r = evaluate_files(a.gt, a.pred, a.meta, options);
  write_report(a.out, r);
  out << "S=" << r.S << " P=" << r.P << " P_norm=" << r.P_norm << " FNR=" << r.FNR << " FDR=" << r.FDR
      << "\n";
}

struct SweepArgs {
  std::vector<std::string> params;
  std::string scenario;
  std::string config;
  std::string mode = "augmented";
  std::string init = "detector";
  std::string out;
  std::uint64_t seed = 0;
  int jobs = 0;
};

struct GridAxis {
  std::string key;
  std::vector<std::string> values;
};

std::vector<GridAxis> parse_grid(const std::vector<std::string>& params) {
  std::vector<GridAxis> axes;
  for (const std::string& p : params) {
    const auto eq = p.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::kUsage, "--param expects key=v1,v2,...");
    GridAxis axis{std::string(text::trim(p.substr(0, eq))), {}};
    for (auto v : text::split(std::string_view(p).substr(eq + 1), ',')) {
      if (!v.empty()) axis.values.emplace_back(v);
    }
    if (axis.values.empty()) throw Error(ErrorCode::kEmptyInput, "empty grid for '" + axis.key + "'");
    axes.push_back(std::move(axis));
  }
  if (axes.empty()) throw Error(ErrorCode::kEmptyInput, "sweep needs at least one --param");
  return axes;
}

void cmd_sweep(const SweepArgs& a, std::ostream& out) {
  const auto axes = parse_grid(a.params);
  const RunMode mode = parse_run_mode(a.mode);
  const InitMode init = parse_init_mode(a.init);

  const auto presets = preset_names();
  const bool is_preset = std::ranges::find(presets, a.scenario) != presets.end();
  ScenarioChoice sc = is_preset ? resolve_scenario(a.scenario, "") : resolve_scenario("", a.scenario);
  const RunConfig base = resolve_config(a.config, sc.run);

  // Cartesian product, last axis fastest.
  std::vector<std::vector<std::size_t>> points{{}};
  for (const GridAxis& axis : axes) {
    std::vector<std::vector<std::size_t>> next;
    for (const auto& p : points) {
      for (std::size_t i = 0; i < axis.values.size(); ++i) {
        auto q = p;
        q.push_back(i);
        next.push_back(std::move(q));
      }
    }
    points = std::move(next);
  }

  std::vector<RunConfig> configs;
  for (const auto& p : points) {
    RunConfig c = base;
    for (std::size_t k = 0; k < axes.size(); ++k) apply_setting(c, axes[k].key, axes[k].values[p[k]]);
    validate(c);
    configs.push_back(c);
  }

  std::vector<MetricReport> reports(configs.size());
  std::vector<std::exception_ptr> failures(configs.size());
  std::atomic<std::size_t> next{0};
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned jobs = a.jobs > 0 ? static_cast<unsigned>(a.jobs) : hw;
  std::vector<std::thread> workers;
  for (unsigned w = 0; w < std::min<std::size_t>(jobs, configs.size()); ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < configs.size(); i = next++) {
        try {
          reports[i] = run_experiment(sc.spec, configs[i], mode, init, a.seed).report;
        } catch (...) {
          failures[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }

  std::string csv;
  for (std::size_t k = 0; k < axes.size(); ++k) csv += (k ? "," : "") + axes[k].key;
  csv += metric_header() + "\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t k = 0; k < axes.size(); ++k) csv += (k ? "," : "") + axes[k].values[points[i][k]];
    csv += metric_row(reports[i]) + "\n";
  }
  text::write_file(a.out, csv);
  out << "swept " << points.size() << " grid points -> " << a.out << "\n";
}

struct ReportArgs {
  std::vector<std::string> summaries;
  std::vector<std::string> labels;
  std::string out;
};

void cmd_report(const ReportArgs& a, std::ostream& out) {
  if (a.summaries.empty()) throw Error(ErrorCode::kUsage, "report needs --summary files");
  if (!a.labels.empty() && a.labels.size() != a.summaries.size()) {
    throw Error(ErrorCode::kUsage, "--label count must match --summary count");
  }
  std::vector<std::string> labels;
  std::vector<std::array<double, 8>> rows;
  for (std::size_t i = 0; i < a.summaries.size(); ++i) {
    const std::string& path = a.summaries[i];
    rows.push_back(parse_summary(text::read_file(path), path));
    std::string label = a.labels.empty() ? fs::path(path).parent_path().filename().string() : a.labels[i];
    if (label.empty()) label = "run" + std::to_string(i);
    labels.push_back(label);
  }

  std::string csv = "run" + metric_header() + "\n";
  std::string table;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%-24s", "run");
  table += buf;
  for (auto k : kMetricKeys) {
    std::snprintf(buf, sizeof(buf), " %8s", std::string(k).c_str());
    table += buf;
  }
  table += "\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    csv += labels[i];
    std::snprintf(buf, sizeof(buf), "%-24s", labels[i].c_str());
    table += buf;
    for (double v : rows[i]) {
      csv += "," + text::format_number(v);
      std::snprintf(buf, sizeof(buf), " %8.3f", v);
      table += buf;
    }
    csv += "\n";
    table += "\n";
  }
  text::write_file(path_in(a.out, "comparison.csv"), csv);
  text::write_file(path_in(a.out, "comparison.txt"), table);

  // Curve tables, when every summary has a curves.csv beside it.
  std::vector<std::vector<CurveRow>> curves;
  for (const std::string& path : a.summaries) {
    const fs::path cpath = fs::path(path).parent_path() / "curves.csv";
    if (!fs::exists(cpath)) break;
    curves.push_back(parse_curves(text::read_file(cpath.string()), cpath.string()));
  }
  if (curves.size() == a.summaries.size()) {
    for (const std::string name : {"success", "precision", "precision_norm"}) {
      std::vector<std::vector<const CurveRow*>> per_run;
      for (const auto& c : curves) {
        std::vector<const CurveRow*> sel;
        for (const CurveRow& r : c) {
          if (r.curve == name) sel.push_back(&r);
        }
        per_run.push_back(std::move(sel));
      }
      for (const auto& run : per_run) {
        if (run.size() != per_run.front().size()) {
          throw Error(ErrorCode::kIncompatible, "curve grids differ between runs (" + name + ")");
        }
        for (std::size_t j = 0; j < run.size(); ++j) {
          if (run[j]->threshold != per_run.front()[j]->threshold) {
            throw Error(ErrorCode::kIncompatible, "curve thresholds differ between runs (" + name + ")");
          }
        }
      }
      std::string table_csv = "threshold";
      for (const auto& l : labels) table_csv += "," + l;
      table_csv += "\n";
      for (std::size_t j = 0; j < per_run.front().size(); ++j) {
        table_csv += per_run.front()[j]->threshold;
        for (const auto& run : per_run) table_csv += "," + text::format_number(run[j]->value);
        table_csv += "\n";
      }
      text::write_file(path_in(a.out, "curves_" + name + ".csv"), table_csv);
    }
  }
  out << table;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Detector-augmented single-object tracking: simulate, fuse, evaluate."};
  app.name("fusetrack");
  app.require_subcommand(1, 1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Generate ground-truth and detection streams");
  simulate->add_option("--preset", sim.preset, "Preset scenario name");
  simulate->add_option("--spec", sim.spec, "Scenario spec file (key=value)");
  simulate->add_option("--out", sim.out, "Output directory")->required();
  simulate->add_option("--seed", sim.seed, "Random seed (defaults to the scenario's)");

  FuseArgs fu;
  auto* fuse = app.add_subcommand("fuse", "Run tracker-only or detector-augmented tracking");
  fuse->add_option("--gt", fu.gt, "Ground-truth CSV (drives the surrogate tracker)");
  fuse->add_option("--det", fu.det, "Detections CSV")->required();
  fuse->add_option("--meta", fu.meta, "Sequence metadata file")->required();
  fuse->add_option("--config", fu.config, "Run configuration (key=value)");
  fuse->add_option("--tracker", fu.tracker, "Recorded tracker output CSV (open loop)");
  fuse->add_option("--mode", fu.mode, "tracker-only|augmented");
  fuse->add_option("--init", fu.init, "gt|detector");
  fuse->add_option("--out", fu.out, "Output directory")->required();
  fuse->add_option("--seed", fu.seed, "Surrogate tracker seed");

  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "Score predictions against ground truth");
  eval->add_option("--gt", ev.gt, "Ground-truth CSV");
  eval->add_option("--pred", ev.pred, "decisions.csv or frame,x,y,w,h,conf predictions");
  eval->add_option("--meta", ev.meta, "Sequence metadata file");
  eval->add_option("--dataset", ev.dataset, "Directory of sequence directories");
  eval->add_option("--pred-name", ev.pred_name, "Prediction file name inside each sequence directory");
  eval->add_option("--config", ev.config, "Run configuration (metrics.* keys)");
  eval->add_option("--out", ev.out, "Output directory")->required();

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "Score a parameter grid on a scenario");
  sweep->add_option("--param", sw.params, "key=v1,v2,... (repeatable; cartesian product)")->required();
  sweep->add_option("--scenario", sw.scenario, "Preset name or scenario spec file")->required();
  sweep->add_option("--config", sw.config, "Base run configuration");
  sweep->add_option("--mode", sw.mode, "tracker-only|augmented");
  sweep->add_option("--init", sw.init, "gt|detector");
  sweep->add_option("--out", sw.out, "Output CSV")->required();
  sweep->add_option("--seed", sw.seed, "Seed for scenario and tracker");
  sweep->add_option("--jobs", sw.jobs, "Worker threads (default: hardware concurrency)");

  ReportArgs rep;
  auto* report = app.add_subcommand("report", "Merge summaries into a comparison table");
  report->add_option("--summary", rep.summaries, "summary.json files")->required();
  report->add_option("--label", rep.labels, "Row labels, one per summary");
  report->add_option("--out", rep.out, "Output directory")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error[usage]: " << one_line(e.what()) << "\n";
    return 2;
  }

  try {
    if (simulate->parsed()) cmd_simulate(sim, out);
    if (fuse->parsed()) cmd_fuse(fu, out);
    if (eval->parsed()) cmd_eval(ev, out);
    if (sweep->parsed()) cmd_sweep(sw, out);
    if (report->parsed()) cmd_report(rep, out);
  } catch (const Error& e) {
    err << "error[" << error_code_name(e.code()) << "]: " << one_line(e.what()) << "\n";
    return e.code() == ErrorCode::kUsage ? 2 : 1;
  } catch (const std::exception& e) {
    err << "error[io]: " << one_line(e.what()) << "\n";
    return 1;
  }
  return 0;
}

}  // namespace fusetrack::cli
