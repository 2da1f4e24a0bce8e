#include "fusetrack/tracker_sim.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "fusetrack/error.hpp"
#include "test_support.hpp"

namespace fusetrack {
namespace {

std::vector<MemoryEntry> oracle_top_k(std::vector<MemoryEntry> offered, int k) {
  // Full sort of every offer ever made; keep the k best.
  std::sort(offered.begin(), offered.end(), [](const MemoryEntry& a, const MemoryEntry& b) {
    if (a.composite_score != b.composite_score) return a.composite_score > b.composite_score;
    return a.frame_index > b.frame_index;
  });
  if (offered.size() > static_cast<std::size_t>(k)) offered.resize(static_cast<std::size_t>(k));
  return offered;
}

TEST(MemoryBank, MatchesTopKOracle) {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> cap_dist(1, 10);
  std::uniform_int_distribution<int> len_dist(0, 200);
  std::uniform_int_distribution<int> coarse(0, 8);  // forces score ties
  for (int trial = 0; trial < 300; ++trial) {
    const int cap = cap_dist(rng);
    MemoryBank bank(cap);
    std::vector<MemoryEntry> offered;
    const int len = len_dist(rng);
    for (int f = 0; f < len; ++f) {
      MemoryEntry e;
      e.frame_index = f;
      e.composite_score = coarse(rng) / 8.0;
      bank.offer(e);
      offered.push_back(e);
      const auto expect = oracle_top_k(offered, cap);
      ASSERT_EQ(bank.entries().size(), expect.size());
      for (std::size_t i = 0; i < expect.size(); ++i) {
        ASSERT_EQ(bank.entries()[i].frame_index, expect[i].frame_index);
      }
    }
  }
}

TEST(MemoryBank, TiesPreferNewerAndResetClears) {
  MemoryBank bank(2);
  for (int f = 0; f < 5; ++f) {
    MemoryEntry e;
    e.frame_index = f;
    e.composite_score = 0.5;
    bank.offer(e);
  }
  ASSERT_EQ(bank.entries().size(), 2u);
  EXPECT_EQ(bank.entries()[0].frame_index, 4);
  EXPECT_EQ(bank.entries()[1].frame_index, 3);
  bank.reset();
  EXPECT_TRUE(bank.entries().empty());
  EXPECT_THROW(MemoryBank(0), Error);
}

TEST(CompositeScore, WeightedMean) {
  SelectionConfig cfg;
  EXPECT_NEAR(composite_score(0.3, 0.6, 0.9, cfg), 0.6, 1e-15);
  cfg.score_weights = {2.0, 0.0, 0.0};
  EXPECT_EQ(composite_score(0.3, 0.6, 0.9, cfg), 0.3);
  const MemoryEntry e = make_memory_entry(4, {{0, 0, 1, 1}, 0.3, 0.6}, 0.9, cfg);
  EXPECT_EQ(e.frame_index, 4);
  EXPECT_EQ(e.composite_score, 0.3);
}

TEST(SelectCandidate, MatchesBruteForce) {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> count(1, 8);
  const KalmanConfig kcfg;
  for (int trial = 0; trial < 1000; ++trial) {
    SelectionConfig cfg;
    cfg.alpha_kf = unit(rng);
    const KalmanState kf = kf_init(testing::random_box(rng, 30.0, 30.0), kcfg);
    std::vector<Candidate> cands(static_cast<std::size_t>(count(rng)));
    for (auto& c : cands) {
      c.box = testing::random_box(rng, 30.0, 30.0);
      c.affinity = unit(rng);
      c.objectness = unit(rng);
    }
    if (trial % 5 == 0 && cands.size() > 1) cands.back() = cands.front();  // exact tie
    std::size_t best = 0;
    double best_score = -1.0;
    for (std::size_t i = 0; i < cands.size(); ++i) {
      const double s = cfg.alpha_kf * iou(kf.box(), cands[i].box) + (1 - cfg.alpha_kf) * cands[i].affinity;
      if (s > best_score) {
        best_score = s;
        best = i;
      }
    }
    const Selection sel = select_candidate(cands, kf, cfg);
    ASSERT_EQ(sel.index, best);
    ASSERT_EQ(sel.score, best_score);
  }
}

TEST(SelectCandidate, AlphaExtremes) {
  const KalmanState kf = kf_init({0, 0, 10, 10}, KalmanConfig{});
  const std::vector<Candidate> cands = {{{0, 0, 10, 10}, 0.1, 0.9}, {{40, 40, 10, 10}, 0.9, 0.9}};
  SelectionConfig cfg;
  cfg.alpha_kf = 0.0;
  EXPECT_EQ(select_candidate(cands, kf, cfg).index, 1u);
  cfg.alpha_kf = 1.0;
  EXPECT_EQ(select_candidate(cands, kf, cfg).index, 0u);
}

TEST(SelectCandidate, EmptyThrows) {
  try {
    select_candidate({}, KalmanState{}, SelectionConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyInput);
  }
}

TEST(Candidates, NoiseFreeCopiesHypothesis) {
  SurrogateModel model;
  model.noise_sigma = 0.0;
  Rng rng(1);
  const BBox gt{10, 10, 20, 20};
  const auto cands = generate_candidates(gt, gt, model, rng);
  ASSERT_EQ(cands.size(), 3u);
  for (const auto& c : cands) {
    EXPECT_EQ(c.box, gt);
    EXPECT_EQ(c.affinity, 1.0);
    EXPECT_EQ(c.objectness, 1.0);
  }
}

TEST(Candidates, AbsentTargetIsBelowLostThreshold) {
  const SurrogateModel model;
  Rng rng(2);
  for (int i = 0; i < 200; ++i) {
    for (const auto& c : generate_candidates(std::nullopt, {0, 0, 5, 5}, model, rng)) {
      EXPECT_LT(c.objectness, model.lost_threshold);
      EXPECT_GE(c.objectness, 0.0);
    }
  }
}

TEST(Candidates, ScoresDecayWithError) {
  SurrogateModel model;
  model.noise_sigma = 0.0;
  Rng rng(3);
  const BBox gt{0, 0, 10, 10};
  const auto near = generate_candidates(gt, {1, 0, 10, 10}, model, rng);
  const auto far = generate_candidates(gt, {8, 0, 10, 10}, model, rng);
  EXPECT_GT(near[0].affinity, far[0].affinity);
  EXPECT_GT(near[0].objectness, far[0].objectness);
  EXPECT_NEAR(near[0].affinity, std::exp(-0.1 / 0.5), 1e-12);
}

TEST(SurrogateTracker, StepBeforeInitThrows) {
  SurrogateTracker tracker({}, {}, {});
  Rng rng(4);
  try {
    tracker.step(BBox{0, 0, 1, 1}, std::nullopt, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUninitialized);
  }
}

TEST(SurrogateTracker, PerfectModelFollowsTarget) {
  SurrogateModel model;
  model.noise_sigma = 0.0;
  model.drift_rate = 0.0;
  SurrogateTracker tracker(model, {}, {});
  Rng rng(5);
  tracker.initialize({0, 0, 20, 20}, 0, rng);
  for (int t = 1; t < 100; ++t) {
    const BBox gt{2.0 * t, 1.0 * t, 20, 20};
    const TrackerOutput out = tracker.step(gt, std::nullopt, rng);
    ASSERT_TRUE(out.box);
    EXPECT_EQ(*out.box, gt);
  }
  EXPECT_EQ(tracker.next_frame(), 100);
  EXPECT_EQ(tracker.memory().entries().size(), 7u);
}

TEST(SurrogateTracker, AbsentTargetGivesNoOutput) {
  SurrogateTracker tracker({}, {}, {});
  Rng rng(6);
  tracker.initialize({0, 0, 20, 20}, 0, rng);
  for (int t = 1; t < 50; ++t) EXPECT_FALSE(tracker.step(std::nullopt, std::nullopt, rng).box);
}

std::vector<std::optional<BBox>> run_tracker(std::uint64_t seed, int frames) {
  SurrogateTracker tracker({}, {}, {});
  Rng rng(seed);
  tracker.initialize({100, 100, 20, 20}, 0, rng);
  std::vector<std::optional<BBox>> out;
  for (int t = 1; t < frames; ++t) {
    const std::optional<BBox> gt =
        (t % 200 > 150) ? std::nullopt : std::optional<BBox>(BBox{100.0 + t * 0.5, 100.0, 20, 20});
    out.push_back(tracker.step(gt, t == 300 ? gt : std::nullopt, rng).box);
  }
  return out;
}

TEST(SurrogateTracker, DeterministicReplay) {
  EXPECT_EQ(run_tracker(77, 600), run_tracker(77, 600));
  EXPECT_NE(run_tracker(77, 600), run_tracker(78, 600));
}

TEST(SurrogateTracker, DriftGrowsWithoutPrompts) {
  // Mean center error over an early and a late window, across seeds.
  SurrogateModel model;
  model.reacquire_prob = 0.0;
  int grew = 0;
  const int seeds = 30;
  double early_total = 0.0;
  double late_total = 0.0;
  for (int seed = 0; seed < seeds; ++seed) {
    SurrogateTracker tracker(model, {}, {});
    Rng rng(static_cast<std::uint64_t>(seed));
    const BBox gt{500, 500, 40, 40};
    tracker.initialize(gt, 0, rng);
    double early = 0.0;
    double late = 0.0;
    for (int t = 1; t <= 400; ++t) {
      const TrackerOutput out = tracker.step(gt, std::nullopt, rng);
      const double err = out.box ? center_distance(*out.box, gt) : center_distance(tracker.belief(), gt);
      if (t <= 50) early += err;
      if (t > 350) late += err;
    }
    early_total += early;
    late_total += late;
    if (late > early) ++grew;
  }
  EXPECT_GE(grew, 25);
  EXPECT_GT(late_total, 2.0 * early_total);
}

TEST(SurrogateTracker, PromptResetsDrift) {
  SurrogateModel model;
  model.noise_sigma = 0.0;
  model.reacquire_prob = 0.0;
  SurrogateTracker tracker(model, {}, {});
  Rng rng(8);
  const BBox gt{500, 500, 40, 40};
  tracker.initialize(gt, 0, rng);
  for (int t = 1; t < 200; ++t) tracker.step(gt, std::nullopt, rng);
  EXPECT_GT(center_distance(tracker.belief(), gt), 5.0);
  const TrackerOutput out = tracker.step(gt, gt, rng);
  ASSERT_TRUE(out.box);
  EXPECT_EQ(*out.box, gt);
}

TEST(SurrogateTracker, PromptAfterDriftReturnsWithinNoise) {
  const SurrogateModel model;
  int worst_ok = 0;
  for (int seed = 0; seed < 20; ++seed) {
    SurrogateTracker tracker(model, {}, {});
    Rng rng(static_cast<std::uint64_t>(seed));
    const BBox gt{500, 500, 40, 40};
    tracker.initialize(gt, 0, rng);
    for (int t = 1; t <= 100; ++t) tracker.step(gt, std::nullopt, rng);
    const TrackerOutput out = tracker.step(gt, gt, rng);
    ASSERT_TRUE(out.box);
    worst_ok += center_distance(*out.box, gt) <= 3.0 * model.noise_sigma;
  }
  EXPECT_GE(worst_ok, 19);
}

TEST(SurrogateTracker, ValidatesConfig) {
  SurrogateModel model;
  model.candidate_count = 0;
  EXPECT_THROW(SurrogateTracker(model, {}, {}), Error);
  SelectionConfig sel;
  sel.alpha_kf = 1.5;
  EXPECT_THROW(SurrogateTracker({}, {}, sel), Error);
  sel = {};
  sel.score_weights = {0, 0, 0};
  EXPECT_THROW(validate(sel), Error);
}

}  // namespace
}  // namespace fusetrack
