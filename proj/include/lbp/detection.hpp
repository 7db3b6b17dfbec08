#pragma once

// Line-breaking pass classification.
//
// A completed pass is line-breaking when it
//   * crosses the x-centroid of at least one opponent band inside that band's
//     y-span (count_lines_crossed >= 1),
//   * bypasses at least two opponents lying between passer and receiver in x
//     and within bypass_radius_m of the pass segment,
//   * moves the ball forward by more than min_forward_m, and
//   * is played in open play.

#include <atomic>
#include <thread>
#include <vector>

#include "lbp/ingestion.hpp"
#include "lbp/metrics.hpp"
#include "lbp/team_shape.hpp"

namespace lbp {

inline constexpr int kMinBypassedOpponents = 2;

struct DetectConfig {
  double bypass_radius_m = 10.0;
  double min_forward_m = 0.0;
  int open_play_guard_events = kDefaultOpenPlayGuardEvents;
  ShapeConfig shape;

  friend bool operator==(const DetectConfig&, const DetectConfig&) = default;
};

struct LbpRecord {
  std::string match_id;
  std::string pass_event_id;
  std::string team_id;
  std::string passer_id;
  std::string receiver_id;
  FrameId frame_id = 0;
  FrameId reception_frame = 0;
  int period = 1;
  Point2 s;
  Point2 r;
  bool is_open_play = false;
  bool is_lbp = false;
  int lines_crossed = 0;
  int bypassed_count = 0;
  std::vector<int> crossed_cluster_ids;
  TeamShape shape;
  SpaceEstimate space;
  double verticality = 0.0;
  double pass_distance = 0.0;
  bool valid = true;
  std::string error;  // error kind and message when !valid

  friend bool operator==(const LbpRecord&, const LbpRecord&) = default;
};

inline int count_bypassed_opponents(const PassVector& pass, std::span<const Point2> opponents,
                                    double radius_m) {
  const double lo = std::min(pass.start.x, pass.end.x);
  const double hi = std::max(pass.start.x, pass.end.x);
  int n = 0;
  for (const Point2& o : opponents) {
    if (!(o.x > lo + kGeomEps && o.x < hi - kGeomEps)) continue;
    if (point_to_segment_distance(o, pass) <= radius_m + kGeomEps) ++n;
  }
  return n;
}

/// Opponents that form the defensive shape under `config`.
inline std::vector<PlayerPoint> shape_candidates(const PassSnapshot& snap, const ShapeConfig& config) {
  std::vector<PlayerPoint> out;
  out.reserve(snap.opponents.size());
  for (const auto& p : snap.opponents)
    if (!(config.exclude_goalkeeper && p.goalkeeper)) out.push_back(p);
  return out;
}

/// Geometric verdict and counts for one snapshot; SBR and verticality are
/// filled separately (see evaluate_pass).
inline LbpRecord detect_lbp(const PassSnapshot& snap, const DetectConfig& config) {
  LbpRecord rec;
  rec.pass_event_id = snap.pass_event_id;
  rec.team_id = snap.team_id;
  rec.passer_id = snap.passer_id;
  rec.receiver_id = snap.receiver_id;
  rec.frame_id = snap.t_frame;
  rec.reception_frame = snap.reception_frame;
  rec.period = snap.period;
  rec.s = snap.s;
  rec.r = snap.r;
  rec.is_open_play = snap.is_open_play;

  const PassVector pass = snap.pass();
  const std::vector<PlayerPoint> candidates = shape_candidates(snap, config.shape);
  rec.shape = cluster_team_shape(candidates, config.shape);
  for (const auto& line : rec.shape.lines) {
    if (segment_intersects_band(pass, line.x_centroid, line.y_min, line.y_max))
      rec.crossed_cluster_ids.push_back(line.cluster_id);
  }
  rec.lines_crossed = static_cast<int>(rec.crossed_cluster_ids.size());

  std::vector<Point2> all;
  all.reserve(snap.opponents.size());
  for (const auto& p : snap.opponents) all.push_back(p.pos);
  rec.bypassed_count = count_bypassed_opponents(pass, all, config.bypass_radius_m);

  const bool forward = snap.r.x > snap.s.x + config.min_forward_m;
  rec.is_lbp = snap.is_open_play && forward && rec.bypassed_count >= kMinBypassedOpponents &&
               rec.lines_crossed >= 1;
  return rec;
}

/// detect_lbp plus the per-pass metrics.
inline LbpRecord evaluate_pass(const PassSnapshot& snap, const DetectConfig& config) {
  if (!snap.pass().is_valid())
    throw DegeneratePassError("pass " + snap.pass_event_id + " shorter than 0.1 m");
  LbpRecord rec = detect_lbp(snap, config);
  rec.space = compute_sbr(snap);
  rec.verticality = compute_verticality(snap.pass());
  rec.pass_distance = pass_distance(snap.pass());
  return rec;
}

/// One record per completed pass, in event order. A pass that cannot be
/// evaluated yields a record with valid = false instead of aborting.
inline std::vector<LbpRecord> detect_all(const NormalizedMatch& match, const DetectConfig& config,
                                         std::size_t jobs = 1) {
  std::vector<std::size_t> pass_indices;
  for (std::size_t i = 0; i < match.events.size(); ++i)
    if (is_completed_pass(match.events[i])) pass_indices.push_back(i);
  std::vector<LbpRecord> records(pass_indices.size());
  if (pass_indices.empty()) return records;

  const AttackDirections dirs = resolve_attack_directions(match);
  auto run_one = [&](std::size_t k) {
    const MatchEvent& e = match.events[pass_indices[k]];
    LbpRecord rec;
    try {
      rec = evaluate_pass(snapshot_pass(match, pass_indices[k], dirs, config.open_play_guard_events),
                          config);
    } catch (const Error& err) {
      rec = LbpRecord{};
      rec.pass_event_id = e.event_id;
      rec.team_id = e.team_id;
      rec.passer_id = e.player_id;
      rec.receiver_id = e.receiver_id.value_or("");
      rec.frame_id = e.frame_id;
      rec.period = match.period_of(e.frame_id);
      rec.valid = false;
      rec.error = err.kind() + ": " + err.what();
    }
    rec.match_id = match.match_id;
    records[k] = std::move(rec);
  };

  jobs = std::max<std::size_t>(1, std::min(jobs, pass_indices.size()));
  if (jobs == 1) {
    for (std::size_t k = 0; k < pass_indices.size(); ++k) run_one(k);
    return records;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> workers;
  for (std::size_t w = 0; w < jobs; ++w)
    workers.emplace_back([&] {
      for (std::size_t k = next++; k < pass_indices.size(); k = next++) run_one(k);
    });
  workers.clear();  // joins
  return records;
}

}  // namespace lbp
