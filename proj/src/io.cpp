#include "fusetrack/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <json.hpp>
#include <map>
#include <set>

#include "fusetrack/config.hpp"
#include "fusetrack/error.hpp"
#include "fusetrack/text.hpp"

namespace fusetrack {

namespace {

using text::format_number;

struct CsvLine {
  std::size_t line_no;
  std::vector<std::string_view> fields;
};

// An optional header line is recognised by its first field.
std::vector<CsvLine> csv_lines(std::string_view content, std::string_view header = "frame") {
  std::vector<CsvLine> out;
  std::size_t line_no = 0;
  bool first_data = true;
  for (std::string_view raw : text::split(content, '\n')) {
    ++line_no;
    const std::string_view line = text::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto fields = text::split(line, ',');
    if (first_data && fields.front() == header) {
      first_data = false;
      continue;
    }
    first_data = false;
    out.push_back({line_no, std::move(fields)});
  }
  return out;
}

std::string where(std::string_view source, std::size_t line_no) {
  return std::string(source) + ":" + std::to_string(line_no);
}

std::int64_t parse_frame(std::string_view field, const std::string& ctx) {
  const std::int64_t f = text::parse_int(field, ctx);
  if (f < 0) throw Error(ErrorCode::kParse, ctx + ": negative frame index");
  return f;
}

BBox parse_box(std::span<const std::string_view> f, const std::string& ctx) {
  BBox b{text::parse_double(f[0], ctx), text::parse_double(f[1], ctx),
         text::parse_double(f[2], ctx), text::parse_double(f[3], ctx)};
  if (!is_valid(b)) throw Error(ErrorCode::kParse, ctx + ": box width and height must be > 0");
  return b;
}

std::optional<BBox> parse_optional_box(std::span<const std::string_view> f, const std::string& ctx) {
  const bool blank = f[0].empty() && f[1].empty() && f[2].empty() && f[3].empty();
  if (blank) return std::nullopt;
  return parse_box(f, ctx);
}

double parse_score(std::string_view field, const std::string& ctx) {
  const double c = text::parse_double(field, ctx);
  if (c < 0.0 || c > 1.0) throw Error(ErrorCode::kValidation, ctx + ": confidence outside [0,1]");
  return c;
}

void append_box(std::string& out, const BBox& b) {
  out += format_number(b.x) + "," + format_number(b.y) + "," + format_number(b.w) + "," +
         format_number(b.h);
}

void append_optional_box(std::string& out, const std::optional<BBox>& b) {
  if (b) {
    append_box(out, *b);
  } else {
    out += ",,,";
  }
}

void require_fields(const CsvLine& l, std::size_t n, std::string_view source) {
  if (l.fields.size() != n) {
    throw Error(ErrorCode::kParse, where(source, l.line_no) + ": expected " + std::to_string(n) +
                                       " fields, got " + std::to_string(l.fields.size()));
  }
}

std::string threshold_label(double v, bool integral) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), integral ? "%.0f" : "%.2f", v);
  return buf;
}

}  // namespace

void validate(const SequenceMeta& m) {
  if (!(m.width > 0.0 && m.height > 0.0)) {
    throw Error(ErrorCode::kValidation, "sequence meta needs positive width and height");
  }
  if (!(m.fps > 0.0)) throw Error(ErrorCode::kValidation, "sequence meta needs fps > 0");
  if (m.frame_count < 1) throw Error(ErrorCode::kValidation, "sequence meta needs frame_count >= 1");
}

SequenceMeta load_meta(const std::string& path) {
  SequenceMeta m;
  for (const auto& [k, v] : read_key_values(path)) {
    if (k == "name") {
      m.name = v;
    } else if (k == "width") {
      m.width = text::parse_double(v, path + ": width");
    } else if (k == "height") {
      m.height = text::parse_double(v, path + ": height");
    } else if (k == "fps") {
      m.fps = text::parse_double(v, path + ": fps");
    } else if (k == "frame_count") {
      m.frame_count = text::parse_int(v, path + ": frame_count");
    } else {
      throw Error(ErrorCode::kValidation, path + ": unknown meta key '" + k + "'");
    }
  }
  validate(m);
  return m;
}

std::string format_meta(const SequenceMeta& m) {
  return "name=" + m.name + "\nwidth=" + format_number(m.width) + "\nheight=" +
         format_number(m.height) + "\nfps=" + format_number(m.fps) + "\nframe_count=" +
         format_number(m.frame_count) + "\n";
}

void write_meta(const std::string& path, const SequenceMeta& meta) {
  text::write_file(path, format_meta(meta));
}

BoxStream parse_ground_truth(std::string_view content, std::string_view source) {
  BoxStream out;
  std::int64_t last = -1;
  for (const CsvLine& l : csv_lines(content)) {
    const std::string ctx = where(source, l.line_no);
    require_fields(l, 5, source);
    const std::int64_t frame = parse_frame(l.fields[0], ctx);
    if (frame <= last) {
      throw Error(ErrorCode::kValidation,
                  ctx + (frame == last ? ": duplicate frame " : ": frame out of order ") +
                      std::to_string(frame));
    }
    last = frame;
    const BBox box = parse_box(std::span(l.fields).subspan(1, 4), ctx);
    out.resize(static_cast<std::size_t>(frame) + 1);
    out[static_cast<std::size_t>(frame)] = box;
  }
  return out;
}

BoxStream load_ground_truth(const std::string& path) {
  return parse_ground_truth(text::read_file(path), path);
}

std::string format_ground_truth(const BoxStream& gt) {
  std::string out = "frame,x,y,w,h\n";
  for (std::size_t t = 0; t < gt.size(); ++t) {
    if (!gt[t]) continue;
    out += std::to_string(t) + ",";
    append_box(out, *gt[t]);
    out += "\n";
  }
  return out;
}

void write_ground_truth(const std::string& path, const BoxStream& gt) {
  text::write_file(path, format_ground_truth(gt));
}

DetectionStream parse_detections(std::string_view content, std::string_view source) {
  DetectionStream out;
  for (const CsvLine& l : csv_lines(content)) {
    const std::string ctx = where(source, l.line_no);
    require_fields(l, 6, source);
    const std::int64_t frame = parse_frame(l.fields[0], ctx);
    const BBox box = parse_box(std::span(l.fields).subspan(1, 4), ctx);
    const double conf = parse_score(l.fields[5], ctx);
    if (out.size() <= static_cast<std::size_t>(frame)) out.resize(static_cast<std::size_t>(frame) + 1);
    out[static_cast<std::size_t>(frame)].push_back({frame, box, conf});
  }
  return out;
}

DetectionStream load_detections(const std::string& path) {
  return parse_detections(text::read_file(path), path);
}

std::string format_detections(const DetectionStream& dets) {
  std::string out = "frame,x,y,w,h,conf\n";
  for (std::size_t t = 0; t < dets.size(); ++t) {
    for (const Detection& d : dets[t]) {
      out += std::to_string(t) + ",";
      append_box(out, d.box);
      out += "," + format_number(d.confidence) + "\n";
    }
  }
  return out;
}

void write_detections(const std::string& path, const DetectionStream& dets) {
  text::write_file(path, format_detections(dets));
}

std::vector<std::optional<TrackerBox>> load_tracker_stream(const std::string& path) {
  const DetectionStream raw = load_detections(path);
  std::vector<std::optional<TrackerBox>> out(raw.size());
  for (std::size_t t = 0; t < raw.size(); ++t) {
    if (auto best = strongest(raw[t])) out[t] = TrackerBox{best->box, best->confidence};
  }
  return out;
}

std::string format_decisions(std::span<const FusionDecision> decisions) {
  std::string out(kDecisionsHeader);
  out += "\n";
  auto flag = [](bool b) { return b ? "1" : "0"; };
  for (const FusionDecision& d : decisions) {
    out += std::to_string(d.frame_index) + "," + flag(d.gates.confidence) + "," +
           flag(d.gates.alignment) + "," + flag(d.gates.proximity) + "," + flag(d.reliable) + "," +
           flag(d.prompted) + "," + flag(d.averaged) + "," + std::string(to_string(d.source)) + ",";
    append_optional_box(out, d.output);
    out += "," + format_number(d.output_confidence) + ",";
    if (d.tracker) {
      append_box(out, d.tracker->box);
      out += "," + format_number(d.tracker->score);
    } else {
      out += ",,,,";
    }
    out += ",";
    if (d.detection) {
      append_box(out, d.detection->box);
      out += "," + format_number(d.detection->confidence);
    } else {
      out += ",,,,";
    }
    out += "," + std::to_string(d.frames_since_prompt) + "," + flag(d.cadence_held) + "\n";
  }
  return out;
}

std::vector<FusionDecision> parse_decisions(std::string_view content, std::string_view source) {
  std::vector<FusionDecision> out;
  for (const CsvLine& l : csv_lines(content)) {
    const std::string ctx = where(source, l.line_no);
    require_fields(l, 25, source);
    const auto& f = l.fields;
    const std::span<const std::string_view> all(f);
    FusionDecision d;
    d.frame_index = parse_frame(f[0], ctx);
    d.gates.confidence = text::parse_bool(f[1], ctx);
    d.gates.alignment = text::parse_bool(f[2], ctx);
    d.gates.proximity = text::parse_bool(f[3], ctx);
    d.reliable = text::parse_bool(f[4], ctx);
    d.prompted = text::parse_bool(f[5], ctx);
    d.averaged = text::parse_bool(f[6], ctx);
    d.source = parse_output_source(f[7]);
    d.output = parse_optional_box(all.subspan(8, 4), ctx);
    d.output_confidence = parse_score(f[12], ctx);
    if (auto tb = parse_optional_box(all.subspan(13, 4), ctx)) {
      d.tracker = TrackerBox{*tb, parse_score(f[17], ctx)};
    }
    if (auto db = parse_optional_box(all.subspan(18, 4), ctx)) {
      d.detection = Detection{d.frame_index, *db, parse_score(f[22], ctx)};
    }
    d.frames_since_prompt = static_cast<int>(text::parse_int(f[23], ctx));
    d.cadence_held = text::parse_bool(f[24], ctx);
    out.push_back(d);
  }
  return out;
}

std::vector<FusionDecision> load_decisions(const std::string& path) {
  return parse_decisions(text::read_file(path), path);
}

std::vector<std::optional<Prediction>> load_predictions(const std::string& path) {
  const std::string content = text::read_file(path);
  std::vector<std::optional<Prediction>> out;
  if (content.starts_with("frame,gate_confidence")) {
    const auto decisions = parse_decisions(content, path);
    std::int64_t expected = 0;
    for (const FusionDecision& d : decisions) {
      if (d.frame_index != expected++) {
        throw Error(ErrorCode::kMisalignment, path + ": decision frames must be contiguous from 0");
      }
      out.push_back(d.output ? std::optional(Prediction{*d.output, d.output_confidence}) : std::nullopt);
    }
    return out;
  }
  const DetectionStream raw = parse_detections(content, path);
  out.resize(raw.size());
  for (std::size_t t = 0; t < raw.size(); ++t) {
    if (auto best = strongest(raw[t])) out[t] = Prediction{best->box, best->confidence};
  }
  return out;
}

std::string format_summary(const MetricReport& report) {
  nlohmann::ordered_json j;
  const auto values = scalars(report);
  for (std::size_t i = 0; i < kMetricKeys.size(); ++i) j[std::string(kMetricKeys[i])] = values[i];
  return j.dump(2) + "\n";
}

std::array<double, 8> parse_summary(std::string_view content, std::string_view source) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(content);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string(source) + ": " + e.what());
  }
  if (!j.is_object() || j.size() != kMetricKeys.size()) {
    throw Error(ErrorCode::kIncompatible,
                std::string(source) + ": summary must hold exactly the eight metric keys");
  }
  std::array<double, 8> out{};
  for (std::size_t i = 0; i < kMetricKeys.size(); ++i) {
    const std::string key(kMetricKeys[i]);
    if (!j.contains(key) || !j[key].is_number()) {
      throw Error(ErrorCode::kIncompatible, std::string(source) + ": missing metric '" + key + "'");
    }
    out[i] = j[key].get<double>();
  }
  return out;
}

std::string format_curves(const MetricReport& report) {
  std::string out = "curve,threshold,value\n";
  auto emit = [&](std::string_view name, const Curve& c, bool integral) {
    for (std::size_t i = 0; i < c.values.size(); ++i) {
      out += std::string(name) + "," + threshold_label(c.thresholds[i], integral) + "," +
             format_number(c.values[i]) + "\n";
    }
  };
  emit("success", report.success, false);
  emit("precision", report.precision, true);
  emit("precision_norm", report.precision_norm, false);
  return out;
}

std::vector<CurveRow> parse_curves(std::string_view content, std::string_view source) {
  std::vector<CurveRow> rows;
  for (const CsvLine& l : csv_lines(content, "curve")) {
    require_fields(l, 3, source);
    rows.push_back({std::string(l.fields[0]), std::string(l.fields[1]),
                    text::parse_double(l.fields[2], where(source, l.line_no))});
  }
  return rows;
}

void write_results(std::span<const FusionDecision> decisions, const MetricReport& report,
                   const std::string& out_dir) {
  const std::filesystem::path dir(out_dir);
  text::write_file((dir / "decisions.csv").string(), format_decisions(decisions));
  text::write_file((dir / "summary.json").string(), format_summary(report));
  text::write_file((dir / "curves.csv").string(), format_curves(report));
}

}  // namespace fusetrack
