#pragma once

// Shared fixtures for the test executables.

#include <fstream>
#include <random>
#include <string>

#include "lbp/lbp.hpp"

namespace lbp::test {

/// Scratch directory removed on destruction.
class TempDir {
public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("lbp_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

private:
  fs::path path_;
};

inline void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream(path, std::ios::binary) << text;
}

inline std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Two frames, one completed pass A1 -> A2. Each team has a goalkeeper and
/// one outfielder.
inline void write_minimal_match(const fs::path& dir) {
  write_text(dir / "meta.json", R"({"pitch_length_m": 105, "pitch_width_m": 68, "frame_rate_hz": 29.97,
 "periods": [{"id": 1, "start_frame": 0, "end_frame": 1, "attack_direction": {"A": "+x", "B": "-x"}}]})");
  write_text(dir / "roster.json", R"([
 {"player_id": "A0", "team_id": "A", "jersey": 1, "role": "goalkeeper"},
 {"player_id": "A1", "team_id": "A", "jersey": 7, "role": "outfield"},
 {"player_id": "A2", "team_id": "A", "jersey": 9, "role": "outfield"},
 {"player_id": "B0", "team_id": "B", "jersey": 1, "role": "goalkeeper"},
 {"player_id": "B1", "team_id": "B", "jersey": 4, "role": "outfield"}
])");
  const std::string players_0 =
      R"([{"pid":"A0","tid":"A","x":5,"y":34},{"pid":"A1","tid":"A","x":40,"y":30},{"pid":"A2","tid":"A","x":60,"y":40},)"
      R"({"pid":"B0","tid":"B","x":100,"y":34},{"pid":"B1","tid":"B","x":50,"y":34}])";
  const std::string players_1 =
      R"([{"pid":"A0","tid":"A","x":5,"y":34},{"pid":"A1","tid":"A","x":41,"y":30},{"pid":"A2","tid":"A","x":61,"y":40},)"
      R"({"pid":"B0","tid":"B","x":100,"y":34},{"pid":"B1","tid":"B","x":50,"y":35}])";
  write_text(dir / "tracking.jsonl", "{\"frame_id\":0,\"t\":0,\"players\":" + players_0 +
                                         ",\"ball\":{\"x\":40,\"y\":30}}\n"
                                         "{\"frame_id\":1,\"t\":0.0333667,\"players\":" +
                                         players_1 + ",\"ball\":null}\n");
  write_text(dir / "events.json", R"([
 {"event_id": "e1", "type": "pass", "team_id": "A", "player_id": "A1", "receiver_id": "A2",
  "frame_id": 0, "end_frame_id": 1, "outcome": "complete", "tags": []}
])");
}

inline MatchEvent make_event(std::string id, EventType type, std::string team, std::string player,
                             FrameId frame, EventOutcome outcome = EventOutcome::None,
                             std::optional<std::string> receiver = std::nullopt) {
  MatchEvent e;
  e.event_id = std::move(id);
  e.type = type;
  e.team_id = std::move(team);
  e.player_id = std::move(player);
  e.frame_id = frame;
  e.outcome = outcome;
  e.receiver_id = std::move(receiver);
  if (type == EventType::Pass && outcome == EventOutcome::Complete) e.end_frame_id = frame + 1;
  return e;
}

inline MatchEvent make_pass(std::string id, std::string team, std::string from, std::string to, FrameId frame) {
  return make_event(std::move(id), EventType::Pass, std::move(team), std::move(from), frame,
                    EventOutcome::Complete, std::move(to));
}

inline LbpRecord make_record(const MatchEvent& pass, bool is_lbp, double sbr = 1.0, int lines = 1) {
  LbpRecord r;
  r.match_id = "m";
  r.pass_event_id = pass.event_id;
  r.team_id = pass.team_id;
  r.passer_id = pass.player_id;
  r.receiver_id = pass.receiver_id.value_or("");
  r.frame_id = pass.frame_id;
  r.is_open_play = true;
  r.is_lbp = is_lbp;
  r.lines_crossed = lines;
  r.bypassed_count = is_lbp ? 2 : 0;
  r.space.sbr = sbr;
  r.verticality = 1.0;
  r.pass_distance = 10.0;
  return r;
}

/// Match with only events: one period covering every frame.
inline NormalizedMatch events_only(std::vector<MatchEvent> events) {
  NormalizedMatch m;
  m.match_id = "m";
  m.periods.push_back(Period{1, 0, 100000, {}});
  m.events = std::move(events);
  return m;
}

inline PlayerPoint opp(const std::string& id, double x, double y, bool gk = false) {
  return PlayerPoint{id, {x, y}, gk};
}

}  // namespace lbp::test
