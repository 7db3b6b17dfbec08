#pragma once

// Planar primitives used by line-break detection. Coordinates are meters,
// x along the pitch length (attacking axis), y across the width.

#include <algorithm>
#include <cmath>
#include <span>

#include "lbp/error.hpp"

namespace lbp {

/// Absolute tolerance for every geometric comparison, in meters.
inline constexpr double kGeomEps = 1e-9;

/// Passes shorter than this are treated as degenerate.
inline constexpr double kMinPassLength = 0.1;

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

inline double distance(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

/// Straight ball path from the passer (start) to the receiver (end).
struct PassVector {
  Point2 start;
  Point2 end;

  double length() const { return distance(start, end); }
  bool is_valid() const {
    return std::isfinite(start.x) && std::isfinite(start.y) && std::isfinite(end.x) &&
           std::isfinite(end.y) && length() > kMinPassLength;
  }

  friend bool operator==(const PassVector&, const PassVector&) = default;
};

/// True iff x_centroid lies strictly inside the open x-interval spanned by the
/// pass and the pass crosses x = x_centroid at some y in [y_min, y_max]
/// (inclusive). Symmetric in the pass endpoints.
inline bool segment_intersects_band(const PassVector& pass, double x_centroid, double y_min,
                                    double y_max) {
  // Canonical left-to-right ordering keeps the result bit-identical under
  // endpoint swap.
  Point2 left = pass.start;
  Point2 right = pass.end;
  if (right.x < left.x || (right.x == left.x && right.y < left.y)) std::swap(left, right);

  if (!(x_centroid > left.x + kGeomEps && x_centroid < right.x - kGeomEps)) return false;
  const double t = (x_centroid - left.x) / (right.x - left.x);
  const double y_cross = left.y + (right.y - left.y) * t;
  return y_cross >= y_min - kGeomEps && y_cross <= y_max + kGeomEps;
}

/// Euclidean distance from p to the closest point of the closed segment.
inline double point_to_segment_distance(Point2 p, const PassVector& seg) {
  const double dx = seg.end.x - seg.start.x;
  const double dy = seg.end.y - seg.start.y;
  const double len2 = dx * dx + dy * dy;
  if (len2 == 0.0) return distance(p, seg.start);
  double t = ((p.x - seg.start.x) * dx + (p.y - seg.start.y) * dy) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return distance(p, Point2{seg.start.x + t * dx, seg.start.y + t * dy});
}

inline double nearest_opponent_distance(Point2 p, std::span<const Point2> opponents) {
  if (opponents.empty()) throw EmptyOpponentsError("nearest_opponent_distance: no opponents");
  double best = distance(p, opponents.front());
  for (const Point2& o : opponents.subspan(1)) best = std::min(best, distance(p, o));
  return best;
}

}  // namespace lbp
