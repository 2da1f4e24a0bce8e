#include "fusetrack/geometry.hpp"

#include <gtest/gtest.h>

#include <random>

#include "fusetrack/error.hpp"
#include "test_support.hpp"

namespace fusetrack {
namespace {

using testing::oracle_ciou;
using testing::oracle_iou;
using testing::random_box;

TEST(Iou, IdenticalBoxesGiveOne) {
  const BBox b{3.0, 4.0, 10.0, 7.5};
  EXPECT_DOUBLE_EQ(iou(b, b), 1.0);
}

TEST(Iou, IdenticalArbitraryBoxesGiveExactlyOne) {
  std::mt19937_64 rng(10);
  for (int i = 0; i < 10000; ++i) {
    const BBox b = random_box(rng, 2000.0, 80.0);
    ASSERT_EQ(iou(b, b), 1.0);
    ASSERT_EQ(ciou(b, b), 1.0);
  }
}

TEST(Iou, DisjointBoxesGiveZero) {
  EXPECT_EQ(iou({0, 0, 10, 10}, {20, 20, 5, 5}), 0.0);
}

TEST(Iou, HalfShiftedSquare) {
  // intersection 50, union 150
  EXPECT_DOUBLE_EQ(iou({0, 0, 10, 10}, {5, 0, 10, 10}), 1.0 / 3.0);
}

TEST(Iou, TouchingEdgesGiveZero) {
  EXPECT_EQ(iou({0, 0, 10, 10}, {10, 0, 10, 10}), 0.0);
}

TEST(Iou, DegenerateBoxThrows) {
  try {
    iou({0, 0, 0, 10}, {0, 0, 10, 10});
    FAIL() << "expected a geometry error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kGeometry);
  }
  EXPECT_THROW(iou({0, 0, 10, -1}, {0, 0, 10, 10}), Error);
  EXPECT_THROW(iou({0, 0, 10, 10}, {std::nan(""), 0, 10, 10}), Error);
}

TEST(Iou, SymmetricBoundedAndMatchesOracle) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 2000; ++i) {
    const BBox a = random_box(rng);
    const BBox b = random_box(rng);
    const double ab = iou(a, b);
    EXPECT_EQ(ab, iou(b, a));
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, 1.0);
    EXPECT_NEAR(ab, oracle_iou(a, b), 1e-12);
  }
}

TEST(Ciou, IdenticalBoxesGiveOne) {
  const BBox b{1.0, 2.0, 8.0, 3.0};
  EXPECT_DOUBLE_EQ(ciou(b, b), 1.0);
}

TEST(Ciou, ConcentricSameAspectEqualsIou) {
  const BBox a{0, 0, 10, 10};
  const BBox b{2.5, 2.5, 5, 5};
  EXPECT_EQ(ciou(a, b), iou(a, b));
  EXPECT_EQ(ciou(a, b), 0.25);
}

TEST(Ciou, DiagonalNeighbourMatchesOracle) {
  const BBox a{0, 0, 10, 10};
  const BBox b{10, 10, 10, 10};
  // Touching corners: IoU 0, center distance^2 200, enclosing diagonal^2 800.
  EXPECT_NEAR(ciou(a, b), oracle_ciou(a, b), 1e-12);
  EXPECT_NEAR(ciou(a, b), -0.25, 1e-12);
}

TEST(Ciou, NeverExceedsIouAndMatchesOracle) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 2000; ++i) {
    const BBox a = random_box(rng);
    const BBox b = random_box(rng);
    const double c = ciou(a, b);
    EXPECT_LE(c, iou(a, b) + 1e-15);
    EXPECT_GT(c, -2.0);
    EXPECT_NEAR(c, oracle_ciou(a, b), 1e-12);
  }
}

TEST(Ciou, ShiftedCenterFallsBelowIou) {
  const BBox a{0, 0, 10, 10};
  const BBox b{1, 0, 10, 10};
  EXPECT_LT(ciou(a, b), iou(a, b));
  const BBox tall{2.5, 0, 5, 10};  // concentric, different aspect
  EXPECT_LT(ciou(a, tall), iou(a, tall));
}

TEST(CenterDistance, PixelsAndNormalized) {
  const BBox a = BBox::from_center(0, 0, 4, 4);
  const BBox b = BBox::from_center(3, 4, 4, 4);
  EXPECT_EQ(center_distance(a, a), 0.0);
  EXPECT_DOUBLE_EQ(center_distance(a, b), 5.0);
  const FrameGeometry frame{2040, 1086};
  EXPECT_NEAR(frame.diagonal(), 2311.0595, 1e-4);
  EXPECT_NEAR(center_distance(a, b, frame), 0.002164, 1e-6);
  EXPECT_DOUBLE_EQ(center_distance(a, b, frame), 5.0 / std::hypot(2040.0, 1086.0));
}

TEST(CenterDistance, RejectsDegenerateFrame) {
  const BBox a{0, 0, 1, 1};
  EXPECT_THROW(center_distance(a, a, FrameGeometry{0, 10}), Error);
}

TEST(Encloses, ClosedContainment) {
  const BBox b{1, 2, 3, 4};
  EXPECT_TRUE(encloses(b, b));
  EXPECT_TRUE(encloses({0, 0, 100, 100}, {10, 10, 20, 20}));
  EXPECT_FALSE(encloses({0, 0, 100, 100}, {95, 95, 20, 20}));
  EXPECT_FALSE(encloses({10, 10, 20, 20}, {0, 0, 100, 100}));
}

TEST(Encloses, ImpliesAreaRatioIou) {
  std::mt19937_64 rng(13);
  int checked = 0;
  for (int i = 0; i < 5000; ++i) {
    const BBox o = random_box(rng, 50.0, 80.0);
    const BBox in = random_box(rng, 100.0, 20.0);
    if (!encloses(o, in)) continue;
    ++checked;
    EXPECT_NEAR(iou(o, in), in.area() / o.area(), 1e-12);
    if (encloses(in, o)) EXPECT_EQ(in, o);
  }
  EXPECT_GT(checked, 50);
}

TEST(MeanBox, ComponentwiseAverage) {
  const BBox b{1, 2, 3, 4};
  EXPECT_EQ(mean_box(b, b), b);
  EXPECT_EQ(mean_box({0, 0, 10, 10}, {10, 10, 20, 20}), (BBox{5, 5, 15, 15}));
}

TEST(MeanBox, CommutativeAndCentered) {
  std::mt19937_64 rng(14);
  for (int i = 0; i < 1000; ++i) {
    const BBox a = random_box(rng);
    const BBox b = random_box(rng);
    const BBox m = mean_box(a, b);
    EXPECT_EQ(m, mean_box(b, a));
    EXPECT_NEAR(m.cx(), 0.5 * (a.cx() + b.cx()), 1e-12);
    EXPECT_NEAR(m.cy(), 0.5 * (a.cy() + b.cy()), 1e-12);
  }
}

}  // namespace
}  // namespace fusetrack
