#pragma once

// Per-pass spatial metrics: space build-up ratio, verticality, distance.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "lbp/geometry.hpp"
#include "lbp/ingestion.hpp"

namespace lbp {

/// Passer free-space radius below which the ratio is clamped and flagged.
inline constexpr double kMinPasserSpaceM = 0.1;

struct SpaceEstimate {
  double d_p = 0.0;  // passer to nearest opponent at release (after clamping)
  double d_r = 0.0;  // receiver to nearest opponent at reception
  double a_p = 0.0;
  double a_r = 0.0;
  double sbr = 0.0;
  bool clamped = false;

  friend bool operator==(const SpaceEstimate&, const SpaceEstimate&) = default;
};

/// Space build-up ratio from the two free-space radii: relative change of the
/// circular area pi*d^2 from passer to receiver.
inline SpaceEstimate space_from_distances(double d_p, double d_r) {
  SpaceEstimate est;
  est.clamped = d_p < kMinPasserSpaceM;
  est.d_p = std::max(d_p, kMinPasserSpaceM);
  est.d_r = d_r;
  est.a_p = std::numbers::pi * est.d_p * est.d_p;
  est.a_r = std::numbers::pi * est.d_r * est.d_r;
  est.sbr = (est.d_r * est.d_r) / (est.d_p * est.d_p) - 1.0;
  return est;
}

/// Uses every opponent, goalkeeper included.
inline SpaceEstimate compute_sbr(const PassSnapshot& snap) {
  auto points = [](const std::vector<PlayerPoint>& players) {
    std::vector<Point2> out;
    out.reserve(players.size());
    for (const auto& p : players) out.push_back(p.pos);
    return out;
  };
  const double d_p = nearest_opponent_distance(snap.s, points(snap.opponents));
  const double d_r = nearest_opponent_distance(snap.r, points(snap.opponents_at_reception));
  return space_from_distances(d_p, d_r);
}

/// Forward share of the pass length, 0 for backward passes.
inline double compute_verticality(const PassVector& pass) {
  const double len = pass.length();
  if (len == 0.0) return 0.0;
  return std::clamp(std::max(0.0, pass.end.x - pass.start.x) / len, 0.0, 1.0);
}

inline double pass_distance(const PassVector& pass) { return pass.length(); }

}  // namespace lbp
