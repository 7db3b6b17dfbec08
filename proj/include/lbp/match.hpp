#pragma once

// In-memory model of one match after ingestion.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lbp/error.hpp"
#include "lbp/geometry.hpp"

namespace lbp {

using FrameId = std::int64_t;

struct PitchMeta {
  double length_m = 105.0;
  double width_m = 68.0;
  double frame_rate_hz = 29.97;

  friend bool operator==(const PitchMeta&, const PitchMeta&) = default;
};

enum class AttackDirection { PositiveX, NegativeX };

struct Period {
  int id = 1;
  FrameId start_frame = 0;
  FrameId end_frame = 0;
  /// Direction per team id as declared in the metadata; may be partial.
  std::map<std::string, AttackDirection> attack_direction;

  friend bool operator==(const Period&, const Period&) = default;
};

/// One player sample. `player` and `team` index the interned id tables of the
/// owning NormalizedMatch.
struct PlayerPosition {
  std::uint32_t player = 0;
  std::uint32_t team = 0;
  Point2 pos;

  friend bool operator==(const PlayerPosition&, const PlayerPosition&) = default;
};

struct TrackingFrame {
  FrameId frame_id = 0;
  double timestamp_s = 0.0;
  std::vector<PlayerPosition> players;
  std::optional<Point2> ball;

  friend bool operator==(const TrackingFrame&, const TrackingFrame&) = default;
};

enum class EventType {
  Pass,
  Shot,
  Reception,
  Interception,
  Clearance,
  Kickoff,
  ThrowIn,
  FreeKick,
  Corner,
  GoalKick,
  Penalty,
  Other,
};

enum class EventOutcome { None, Complete, Incomplete, Goal, Saved, OffTarget, Disallowed };

struct MatchEvent {
  std::string event_id;
  EventType type = EventType::Other;
  std::string team_id;
  std::string player_id;
  std::optional<std::string> receiver_id;
  FrameId frame_id = 0;
  std::optional<FrameId> end_frame_id;
  std::optional<double> timestamp_s;
  EventOutcome outcome = EventOutcome::None;
  std::vector<std::string> tags;  // sorted, unique
  std::optional<double> xg;

  friend bool operator==(const MatchEvent&, const MatchEvent&) = default;
};

enum class PlayerRole { Goalkeeper, Outfield };

struct RosterEntry {
  std::string player_id;
  std::string team_id;
  int jersey = 0;
  PlayerRole role = PlayerRole::Outfield;
  std::string name;

  friend bool operator==(const RosterEntry&, const RosterEntry&) = default;
};

struct Roster {
  std::vector<RosterEntry> players;

  const RosterEntry* find(std::string_view player_id) const {
    for (const auto& p : players)
      if (p.player_id == player_id) return &p;
    return nullptr;
  }
  bool is_goalkeeper(std::string_view player_id) const {
    const RosterEntry* e = find(player_id);
    return e != nullptr && e->role == PlayerRole::Goalkeeper;
  }
  std::vector<std::string> team_ids() const {
    std::vector<std::string> out;
    for (const auto& p : players)
      if (std::find(out.begin(), out.end(), p.team_id) == out.end()) out.push_back(p.team_id);
    std::sort(out.begin(), out.end());
    return out;
  }

  friend bool operator==(const Roster&, const Roster&) = default;
};

struct NormalizedMatch {
  std::string match_id;
  PitchMeta meta;
  std::vector<Period> periods;
  std::vector<TrackingFrame> frames;
  std::vector<MatchEvent> events;
  Roster roster;
  std::vector<std::string> player_ids;  // interned, index = PlayerPosition::player
  std::vector<std::string> team_ids;    // interned, index = PlayerPosition::team

  friend bool operator==(const NormalizedMatch&, const NormalizedMatch&) = default;

  /// Index of the frame with exactly this id, if any.
  std::optional<std::size_t> frame_index(FrameId id) const {
    auto it = std::lower_bound(frames.begin(), frames.end(), id,
                               [](const TrackingFrame& f, FrameId v) { return f.frame_id < v; });
    if (it == frames.end() || it->frame_id != id) return std::nullopt;
    return static_cast<std::size_t>(it - frames.begin());
  }

  /// Index of the first frame with frame_id >= id, if any.
  std::optional<std::size_t> frame_index_at_or_after(FrameId id) const {
    auto it = std::lower_bound(frames.begin(), frames.end(), id,
                               [](const TrackingFrame& f, FrameId v) { return f.frame_id < v; });
    if (it == frames.end()) return std::nullopt;
    return static_cast<std::size_t>(it - frames.begin());
  }

  /// Period id containing the frame; frames outside every declared period
  /// belong to the latest period starting at or before them.
  int period_of(FrameId frame) const {
    if (periods.empty()) return 1;
    int id = periods.front().id;
    for (const auto& p : periods) {
      if (frame >= p.start_frame && frame <= p.end_frame) return p.id;
      if (p.start_frame <= frame) id = p.id;
    }
    return id;
  }

  const Period* find_period(int id) const {
    for (const auto& p : periods)
      if (p.id == id) return &p;
    return nullptr;
  }

  std::optional<std::uint32_t> player_index(std::string_view id) const {
    for (std::size_t i = 0; i < player_ids.size(); ++i)
      if (player_ids[i] == id) return static_cast<std::uint32_t>(i);
    return std::nullopt;
  }
};

// ---- enum <-> text -------------------------------------------------------

inline std::string_view to_string(EventType t) {
  switch (t) {
    case EventType::Pass: return "pass";
    case EventType::Shot: return "shot";
    case EventType::Reception: return "reception";
    case EventType::Interception: return "interception";
    case EventType::Clearance: return "clearance";
    case EventType::Kickoff: return "kickoff";
    case EventType::ThrowIn: return "throw_in";
    case EventType::FreeKick: return "free_kick";
    case EventType::Corner: return "corner";
    case EventType::GoalKick: return "goal_kick";
    case EventType::Penalty: return "penalty";
    case EventType::Other: return "other";
  }
  return "other";
}

inline std::optional<EventType> parse_event_type(std::string_view s) {
  static constexpr EventType kAll[] = {
      EventType::Pass,     EventType::Shot,   EventType::Reception, EventType::Interception,
      EventType::Clearance, EventType::Kickoff, EventType::ThrowIn,  EventType::FreeKick,
      EventType::Corner,   EventType::GoalKick, EventType::Penalty,  EventType::Other};
  for (EventType t : kAll)
    if (to_string(t) == s) return t;
  return std::nullopt;
}

inline bool is_set_piece_type(EventType t) {
  switch (t) {
    case EventType::Kickoff:
    case EventType::ThrowIn:
    case EventType::FreeKick:
    case EventType::Corner:
    case EventType::GoalKick:
    case EventType::Penalty: return true;
    default: return false;
  }
}

/// A restart either by type or by a restart-kind tag on another event type.
inline bool is_set_piece(const MatchEvent& e) {
  if (is_set_piece_type(e.type)) return true;
  for (const auto& tag : e.tags) {
    auto t = parse_event_type(tag);
    if (t && is_set_piece_type(*t)) return true;
  }
  return false;
}

inline std::string_view to_string(EventOutcome o) {
  switch (o) {
    case EventOutcome::None: return "none";
    case EventOutcome::Complete: return "complete";
    case EventOutcome::Incomplete: return "incomplete";
    case EventOutcome::Goal: return "goal";
    case EventOutcome::Saved: return "saved";
    case EventOutcome::OffTarget: return "off_target";
    case EventOutcome::Disallowed: return "disallowed";
  }
  return "none";
}

inline std::optional<EventOutcome> parse_event_outcome(std::string_view s) {
  static constexpr EventOutcome kAll[] = {EventOutcome::None,     EventOutcome::Complete,
                                          EventOutcome::Incomplete, EventOutcome::Goal,
                                          EventOutcome::Saved,    EventOutcome::OffTarget,
                                          EventOutcome::Disallowed};
  for (EventOutcome o : kAll)
    if (to_string(o) == s) return o;
  return std::nullopt;
}

inline std::string_view to_string(AttackDirection d) {
  return d == AttackDirection::PositiveX ? "+x" : "-x";
}

inline std::optional<AttackDirection> parse_attack_direction(std::string_view s) {
  if (s == "+x") return AttackDirection::PositiveX;
  if (s == "-x") return AttackDirection::NegativeX;
  return std::nullopt;
}

inline bool is_completed_pass(const MatchEvent& e) {
  return e.type == EventType::Pass && e.outcome == EventOutcome::Complete;
}

}  // namespace lbp
