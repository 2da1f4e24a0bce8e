#include "fusetrack/tracker_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fusetrack/error.hpp"

namespace fusetrack {

namespace {

bool in_unit(double v) { return v >= 0.0 && v <= 1.0; }

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kValidation, what);
}

double target_size(const BBox& b) { return std::sqrt(b.area()); }

}  // namespace

void validate(const SelectionConfig& cfg) {
  require(in_unit(cfg.alpha_kf), "selection.alpha_kf must be in [0,1]");
  require(cfg.memory_capacity > 0, "selection.memory_capacity must be > 0");
  double sum = 0.0;
  for (double w : cfg.score_weights) {
    require(std::isfinite(w) && w >= 0.0, "selection.score_weights must be non-negative");
    sum += w;
  }
  require(sum > 0.0, "selection.score_weights must not sum to zero");
}

void validate(const SurrogateModel& m) {
  require(std::isfinite(m.noise_sigma) && m.noise_sigma >= 0.0, "surrogate.noise_sigma must be >= 0");
  require(std::isfinite(m.drift_rate) && m.drift_rate >= 0.0, "surrogate.drift_rate must be >= 0");
  require(std::isfinite(m.heading_jitter) && m.heading_jitter >= 0.0,
          "surrogate.heading_jitter must be >= 0");
  require(m.candidate_count >= 1, "surrogate.candidate_count must be >= 1");
  require(m.affinity_scale > 0.0, "surrogate.affinity_scale must be > 0");
  require(m.objectness_scale > 0.0, "surrogate.objectness_scale must be > 0");
  require(m.lost_threshold > 0.0 && m.lost_threshold <= 1.0,
          "surrogate.lost_threshold must be in (0,1]");
  require(m.capture_radius >= 0.0, "surrogate.capture_radius must be >= 0");
  require(in_unit(m.reacquire_prob), "surrogate.reacquire_prob must be in [0,1]");
}

std::vector<Candidate> generate_candidates(const std::optional<BBox>& gt, const BBox& belief,
                                           const SurrogateModel& model, Rng& rng) {
  require_valid(belief);
  std::vector<Candidate> out;
  out.reserve(static_cast<std::size_t>(model.candidate_count));

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < model.candidate_count; ++i) {
    Candidate c;
    c.box = belief;
    if (model.noise_sigma > 0.0) {
      std::normal_distribution<double> pos(0.0, model.noise_sigma);
      std::normal_distribution<double> ext(0.0, 0.5 * model.noise_sigma);
      const double cx = belief.cx() + pos(rng);
      const double cy = belief.cy() + pos(rng);
      const double w = std::max(belief.w + ext(rng), 0.25 * belief.w);
      const double h = std::max(belief.h + ext(rng), 0.25 * belief.h);
      c.box = BBox::from_center(cx, cy, w, h);
    }
    if (gt) {
      const double err = center_distance(c.box, *gt) / target_size(*gt);
      c.affinity = std::exp(-err / model.affinity_scale);
      c.objectness = std::exp(-err / model.objectness_scale);
    } else {
      c.affinity = 0.5 * unit(rng);
      c.objectness = 0.5 * model.lost_threshold * unit(rng);
    }
    out.push_back(c);
  }
  return out;
}

Selection select_candidate(std::span<const Candidate> candidates, const KalmanState& kf,
                           const SelectionConfig& cfg) {
  if (candidates.empty()) throw Error(ErrorCode::kEmptyInput, "no candidates to select from");
  Selection best;
  bool have = false;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const Candidate& c = candidates[i];
    const double score = cfg.alpha_kf * kf_iou(kf, c.box) + (1.0 - cfg.alpha_kf) * c.affinity;
    if (!have || score > best.score) {
      best = {i, c, score};
      have = true;
    }
  }
  return best;
}

double composite_score(double affinity, double objectness, double kf_iou,
                       const SelectionConfig& cfg) {
  const auto& w = cfg.score_weights;
  return (w[0] * affinity + w[1] * objectness + w[2] * kf_iou) / (w[0] + w[1] + w[2]);
}

MemoryEntry make_memory_entry(std::int64_t frame_index, const Candidate& c, double kf_iou,
                              const SelectionConfig& cfg) {
  return {frame_index, c.box, c.affinity, c.objectness, kf_iou,
          composite_score(c.affinity, c.objectness, kf_iou, cfg)};
}

MemoryBank::MemoryBank(int capacity) : capacity_(capacity) {
  if (capacity <= 0) throw Error(ErrorCode::kValidation, "memory capacity must be > 0");
  entries_.reserve(static_cast<std::size_t>(capacity) + 1);
}

void MemoryBank::offer(const MemoryEntry& entry) {
  // Ranking: higher score first, newer frame first among equal scores.
  auto better = [](const MemoryEntry& a, const MemoryEntry& b) {
    if (a.composite_score != b.composite_score) return a.composite_score > b.composite_score;
    return a.frame_index > b.frame_index;
  };
  entries_.insert(std::upper_bound(entries_.begin(), entries_.end(), entry, better), entry);
  if (entries_.size() > static_cast<std::size_t>(capacity_)) entries_.pop_back();
}

SurrogateTracker::SurrogateTracker(SurrogateModel model, KalmanConfig kalman,
                                   SelectionConfig selection)
    : model_(model),
      kalman_cfg_(kalman),
      selection_cfg_(selection),
      memory_(selection.memory_capacity) {
  validate(model_);
  validate(kalman_cfg_);
  validate(selection_cfg_);
}

void SurrogateTracker::reseed(const BBox& box, Rng& rng) {
  require_valid(box);
  belief_ = box;
  drift_x_ = 0.0;
  drift_y_ = 0.0;
  heading_ = std::uniform_real_distribution<double>(0.0, 2.0 * std::numbers::pi)(rng);
  kf_ = kf_init(box, kalman_cfg_);
}

void SurrogateTracker::initialize(const BBox& box, std::int64_t frame_index, Rng& rng) {
  reseed(box, rng);
  memory_.reset();
  frame_index_ = frame_index + 1;
  initialized_ = true;
}

TrackerOutput SurrogateTracker::step(const std::optional<BBox>& gt,
                                     const std::optional<BBox>& prompt, Rng& rng) {
  if (!initialized_) throw Error(ErrorCode::kUninitialized, "tracker stepped before initialization");

  if (prompt) {
    reseed(*prompt, rng);
  } else if (model_.drift_rate > 0.0) {
    if (model_.heading_jitter > 0.0) {
      heading_ += std::normal_distribution<double>(0.0, model_.heading_jitter)(rng);
    }
    drift_x_ += model_.drift_rate * std::cos(heading_);
    drift_y_ += model_.drift_rate * std::sin(heading_);
  }

  kf_ = kf_predict(kf_, kalman_cfg_);

  bool captured = false;
  if (gt) {
    captured = center_distance(belief_, *gt) <= model_.capture_radius * target_size(*gt);
    if (!captured && model_.reacquire_prob > 0.0 &&
        std::uniform_real_distribution<double>(0.0, 1.0)(rng) < model_.reacquire_prob) {
      captured = true;
      drift_x_ = 0.0;
      drift_y_ = 0.0;
    }
  }
  const BBox hypothesis =
      captured ? BBox::from_center(gt->cx() + drift_x_, gt->cy() + drift_y_, gt->w, gt->h)
               : belief_;

  const std::vector<Candidate> candidates = generate_candidates(gt, hypothesis, model_, rng);
  TrackerOutput out;
  out.selection = select_candidate(candidates, kf_, selection_cfg_);
  const Candidate& chosen = out.selection.candidate;
  const double motion_score = kf_iou(kf_, chosen.box);
  out.objectness = chosen.objectness;

  if (chosen.objectness >= model_.lost_threshold) {
    kf_ = kf_correct(kf_, chosen.box, kalman_cfg_);
    out.box = chosen.box;
    belief_ = chosen.box;
  } else {
    belief_ = hypothesis;
  }

  memory_.offer(make_memory_entry(frame_index_, chosen, motion_score, selection_cfg_));
  ++frame_index_;
  return out;
}

}  // namespace fusetrack
