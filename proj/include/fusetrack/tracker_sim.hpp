#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "fusetrack/geometry.hpp"
#include "fusetrack/motion.hpp"

namespace fusetrack {

using Rng = std::mt19937_64;

struct Candidate {
  BBox box;
  double affinity = 0.0;
  double objectness = 0.0;
};

struct SelectionConfig {
  double alpha_kf = 0.15;
  int memory_capacity = 7;
  // Weights of (affinity, objectness, kf_iou) in the memory score.
  std::array<double, 3> score_weights{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
};

void validate(const SelectionConfig& cfg);

/// Stand-in for the mask decoder. Candidate boxes are jittered copies of the
/// tracker's current hypothesis; scores are computed against the true box.
struct SurrogateModel {
  double noise_sigma = 1.0;       // px, candidate center jitter
  double drift_rate = 0.05;       // px/frame growth of the un-prompted offset
  double heading_jitter = 0.05;   // rad/frame random walk of the drift direction
  int candidate_count = 3;
  double affinity_scale = 0.5;    // affinity = exp(-err / (scale * size))
  double objectness_scale = 1.0;  // objectness = exp(-err / (scale * size))
  double lost_threshold = 0.5;
  double capture_radius = 1.5;    // in target sizes, see SurrogateTracker
  double reacquire_prob = 0.002;  // per-frame chance of re-locking a visible target
};

void validate(const SurrogateModel& model);

std::vector<Candidate> generate_candidates(const std::optional<BBox>& gt, const BBox& belief,
                                           const SurrogateModel& model, Rng& rng);

struct Selection {
  std::size_t index = 0;
  Candidate candidate;
  double score = 0.0;
};

/// Argmax of alpha_kf * KF-IoU + (1 - alpha_kf) * affinity; the first
/// maximum wins.
Selection select_candidate(std::span<const Candidate> candidates, const KalmanState& kf,
                           const SelectionConfig& cfg);

struct MemoryEntry {
  std::int64_t frame_index = 0;
  BBox box;
  double affinity = 0.0;
  double objectness = 0.0;
  double kf_iou = 0.0;
  double composite_score = 0.0;
};

double composite_score(double affinity, double objectness, double kf_iou,
                       const SelectionConfig& cfg);

MemoryEntry make_memory_entry(std::int64_t frame_index, const Candidate& c, double kf_iou,
                              const SelectionConfig& cfg);

/// Keeps the `capacity` highest-scoring entries offered since the last reset.
/// Equal scores favour the newer frame.
class MemoryBank {
 public:
  explicit MemoryBank(int capacity = 7);

  void offer(const MemoryEntry& entry);
  void reset() { entries_.clear(); }

  int capacity() const { return capacity_; }
  /// Best first.
  const std::vector<MemoryEntry>& entries() const { return entries_; }

 private:
  int capacity_;
  std::vector<MemoryEntry> entries_;
};

struct TrackerOutput {
  std::optional<BBox> box;
  double objectness = 0.0;
  Selection selection;
};

/// Surrogate single-object tracker.
///
/// The tracker holds a belief box and an accumulated drift offset. While the
/// target is visible and within `capture_radius` target sizes of the belief,
/// the hypothesis follows the target displaced by the drift; otherwise it
/// stays at the belief. Drift grows by `drift_rate` per frame along a slowly
/// wandering heading until a prompt (or a random re-lock) resets it. Frames
/// whose selected candidate has objectness below `lost_threshold` produce no
/// output.
class SurrogateTracker {
 public:
  SurrogateTracker(SurrogateModel model, KalmanConfig kalman, SelectionConfig selection);

  void initialize(const BBox& box, std::int64_t frame_index, Rng& rng);
  bool initialized() const { return initialized_; }

  /// Processes frame next_frame(); initializing at frame f makes f + 1 the
  /// next frame. A prompt re-seeds belief and filter before candidate
  /// generation.
  TrackerOutput step(const std::optional<BBox>& gt, const std::optional<BBox>& prompt, Rng& rng);

  const KalmanState& kalman() const { return kf_; }
  const MemoryBank& memory() const { return memory_; }
  const BBox& belief() const { return belief_; }
  std::int64_t next_frame() const { return frame_index_; }

 private:
  void reseed(const BBox& box, Rng& rng);

  SurrogateModel model_;
  KalmanConfig kalman_cfg_;
  SelectionConfig selection_cfg_;
  bool initialized_ = false;
  BBox belief_;
  double drift_x_ = 0.0;
  double drift_y_ = 0.0;
  double heading_ = 0.0;
  KalmanState kf_;
  MemoryBank memory_;
  std::int64_t frame_index_ = 0;
};

}  // namespace fusetrack
