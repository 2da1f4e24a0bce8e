#pragma once

#include <optional>

namespace fusetrack {

/// Axis-aligned box: top-left corner plus extent, continuous pixel coordinates.
struct BBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double cx() const { return x + 0.5 * w; }
  double cy() const { return y + 0.5 * h; }
  double right() const { return x + w; }
  double bottom() const { return y + h; }
  double area() const { return w * h; }

  static BBox from_center(double cx, double cy, double w, double h) {
    return {cx - 0.5 * w, cy - 0.5 * h, w, h};
  }

  friend bool operator==(const BBox&, const BBox&) = default;
};

/// Finite fields and strictly positive extent.
bool is_valid(const BBox& box);

/// Throws Error(kGeometry) when the box is not valid.
void require_valid(const BBox& box);

struct FrameGeometry {
  double width = 0.0;
  double height = 0.0;

  double diagonal() const;
};

void require_valid(const FrameGeometry& frame);

double iou(const BBox& a, const BBox& b);

/// Complete IoU: IoU minus the center-distance penalty (squared center offset
/// over squared enclosing diagonal) and the aspect-ratio consistency term.
/// `a` is the reference (tracker) box and `b` the detection; the value itself
/// is symmetric because the aspect term enters squared.
double ciou(const BBox& a, const BBox& b);

/// Center-to-center Euclidean distance, divided by the frame diagonal when a
/// frame is supplied.
double center_distance(const BBox& a, const BBox& b,
                       const std::optional<FrameGeometry>& norm = std::nullopt);

/// Closed containment: every edge of `inner` lies within or on `outer`.
bool encloses(const BBox& outer, const BBox& inner);

BBox mean_box(const BBox& a, const BBox& b);

}  // namespace fusetrack
