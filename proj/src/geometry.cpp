#include "fusetrack/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fusetrack/error.hpp"

namespace fusetrack {

namespace {

constexpr double kEnclosingDiagonalEps = 1e-12;

std::string describe(const BBox& b) {
  std::ostringstream os;
  os << "(" << b.x << ", " << b.y << ", " << b.w << ", " << b.h << ")";
  return os.str();
}

double intersection_area(const BBox& a, const BBox& b) {
  const double iw = std::min(a.right(), b.right()) - std::max(a.x, b.x);
  const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  return iw * ih;
}

}  // namespace

bool is_valid(const BBox& box) {
  return std::isfinite(box.x) && std::isfinite(box.y) && std::isfinite(box.w) &&
         std::isfinite(box.h) && box.w > 0.0 && box.h > 0.0;
}

void require_valid(const BBox& box) {
  if (!is_valid(box)) {
    throw Error(ErrorCode::kGeometry, "invalid box " + describe(box));
  }
}

double FrameGeometry::diagonal() const { return std::hypot(width, height); }

void require_valid(const FrameGeometry& frame) {
  if (!(std::isfinite(frame.width) && std::isfinite(frame.height) &&
        frame.width > 0.0 && frame.height > 0.0)) {
    throw Error(ErrorCode::kGeometry, "frame geometry must have positive size");
  }
}

double iou(const BBox& a, const BBox& b) {
  require_valid(a);
  require_valid(b);
  const double inter = intersection_area(a, b);
  if (inter == 0.0) return 0.0;
  // Areas from the same corner differences as the intersection, so that
  // identical boxes score exactly 1.
  const auto corner_area = [](const BBox& r) { return (r.right() - r.x) * (r.bottom() - r.y); };
  return inter / (corner_area(a) + corner_area(b) - inter);
}

double ciou(const BBox& a, const BBox& b) {
  const double overlap = iou(a, b);

  const double dx = a.cx() - b.cx();
  const double dy = a.cy() - b.cy();
  const double center_sq = dx * dx + dy * dy;

  const double ew = std::max(a.right(), b.right()) - std::min(a.x, b.x);
  const double eh = std::max(a.bottom(), b.bottom()) - std::min(a.y, b.y);
  const double diag_sq = std::max(ew * ew + eh * eh, kEnclosingDiagonalEps);

  const double angle_gap = std::atan(b.w / b.h) - std::atan(a.w / a.h);
  const double aspect = 4.0 / (std::numbers::pi * std::numbers::pi) * angle_gap * angle_gap;
  // v == 0 covers identical boxes, where the trade-off weight would be 0/0.
  const double weight = aspect == 0.0 ? 0.0 : aspect / ((1.0 - overlap) + aspect);

  return overlap - center_sq / diag_sq - weight * aspect;
}

double center_distance(const BBox& a, const BBox& b, const std::optional<FrameGeometry>& norm) {
  require_valid(a);
  require_valid(b);
  const double d = std::hypot(a.cx() - b.cx(), a.cy() - b.cy());
  if (!norm) return d;
  require_valid(*norm);
  return d / norm->diagonal();
}

bool encloses(const BBox& outer, const BBox& inner) {
  require_valid(outer);
  require_valid(inner);
  return inner.x >= outer.x && inner.y >= outer.y && inner.right() <= outer.right() &&
         inner.bottom() <= outer.bottom();
}

BBox mean_box(const BBox& a, const BBox& b) {
  require_valid(a);
  require_valid(b);
  return {0.5 * (a.x + b.x), 0.5 * (a.y + b.y), 0.5 * (a.w + b.w), 0.5 * (a.h + b.h)};
}

}  // namespace fusetrack
