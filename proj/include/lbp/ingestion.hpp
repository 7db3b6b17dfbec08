#pragma once

// Loading, writing, smoothing and orientation of normalized match files, and
// extraction of per-pass snapshots.
//
// Directory layout of one match:
//   meta.json       {pitch_length_m, pitch_width_m, frame_rate_hz,
//                    periods:[{id, start_frame, end_frame,
//                              attack_direction:{team_id:"+x"|"-x"}}]}
//   tracking.jsonl  one frame per line:
//                   {frame_id, t, players:[{pid, tid, x, y}], ball:{x, y}|null}
//   events.json     array of events (see parse_event)
//   roster.json     array of {player_id, team_id, jersey, role, name?}

#include <rapidjson/document.h>
#include <rapidjson/error/en.h>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include "json.hpp"
#include <sstream>
#include <string>
#include <vector>

#include "lbp/match.hpp"

namespace lbp {

namespace fs = std::filesystem;

/// Events further than this from every tracking frame cannot be synchronized.
inline constexpr double kSyncToleranceS = 1.0;
/// Positions may exceed the pitch by this much before they are rejected.
inline constexpr double kBoundsPaddingM = 5.0;
/// Receiver-to-ball distance that marks a reception when no end frame is given.
inline constexpr double kReceptionBallRadiusM = 1.5;
/// Assumed ball speed for the last-resort reception frame estimate.
inline constexpr double kAssumedPassSpeedMps = 15.0;

inline constexpr int kDefaultSmoothingWindow = 7;

struct LoadDiagnostics {
  std::size_t dropped_events = 0;
  std::vector<std::string> warnings;
};

struct MatchPaths {
  fs::path events;
  fs::path tracking;
  fs::path meta;
  fs::path roster;

  static MatchPaths in_directory(const fs::path& dir) {
    return {dir / "events.json", dir / "tracking.jsonl", dir / "meta.json", dir / "roster.json"};
  }
};

namespace detail {

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open " + path.string());
  std::string data;
  in.seekg(0, std::ios::end);
  data.resize(static_cast<std::size_t>(in.tellg()));
  in.seekg(0);
  in.read(data.data(), static_cast<std::streamsize>(data.size()));
  return data;
}

inline nlohmann::json read_json(const fs::path& path) {
  const std::string text = read_file(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(path.filename().string() + ": " + e.what());
  }
}

inline const nlohmann::json& require(const nlohmann::json& obj, const char* key,
                                     const std::string& where) {
  if (!obj.is_object() || !obj.contains(key) || obj.at(key).is_null())
    throw SchemaError(where + ": missing required field '" + key + "'");
  return obj.at(key);
}

/// Ids may be written as strings or integers.
inline std::string id_string(const nlohmann::json& v, const std::string& where) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  throw SchemaError(where + ": id must be a string or integer");
}

inline double number(const nlohmann::json& v, const std::string& where) {
  if (!v.is_number()) throw SchemaError(where + ": expected a number");
  return v.get<double>();
}

inline std::int64_t integer(const nlohmann::json& v, const std::string& where) {
  if (!v.is_number_integer()) throw SchemaError(where + ": expected an integer");
  return v.get<std::int64_t>();
}

inline void append_double(std::string& out, double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

inline void append_quoted(std::string& out, std::string_view s) {
  out.push_back('"');
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out.push_back(c);
        }
    }
  }
  out.push_back('"');
}

inline bool in_padded_bounds(Point2 p, const PitchMeta& meta) {
  return p.x >= -kBoundsPaddingM && p.x <= meta.length_m + kBoundsPaddingM &&
         p.y >= -kBoundsPaddingM && p.y <= meta.width_m + kBoundsPaddingM;
}

struct Interner {
  std::vector<std::string>& table;
  std::map<std::string, std::uint32_t, std::less<>> index;

  std::uint32_t operator()(std::string_view id) {
    auto it = index.find(id);
    if (it != index.end()) return it->second;
    const auto next = static_cast<std::uint32_t>(table.size());
    table.emplace_back(id);
    index.emplace(std::string(id), next);
    return next;
  }
};

inline std::string rj_id(const rapidjson::Value& v, const std::string& where) {
  if (v.IsString()) return std::string(v.GetString(), v.GetStringLength());
  if (v.IsInt64()) return std::to_string(v.GetInt64());
  throw SchemaError(where + ": id must be a string or integer");
}

inline const rapidjson::Value& rj_member(const rapidjson::Value& obj, const char* key,
                                         const std::string& where) {
  auto it = obj.FindMember(key);
  if (it == obj.MemberEnd() || it->value.IsNull())
    throw SchemaError(where + ": missing required field '" + key + "'");
  return it->value;
}

inline double rj_number(const rapidjson::Value& v, const std::string& where) {
  if (!v.IsNumber()) throw SchemaError(where + ": expected a number");
  return v.GetDouble();
}

}  // namespace detail

// ---- parsing ---------------------------------------------------------------

inline PitchMeta parse_pitch_meta(const nlohmann::json& j, std::vector<Period>& periods) {
  const std::string where = "meta.json";
  PitchMeta meta;
  meta.length_m = detail::number(detail::require(j, "pitch_length_m", where), where);
  meta.width_m = detail::number(detail::require(j, "pitch_width_m", where), where);
  meta.frame_rate_hz = detail::number(detail::require(j, "frame_rate_hz", where), where);
  if (meta.length_m < 90.0 || meta.length_m > 120.0)
    throw SchemaError(where + ": pitch_length_m outside [90, 120]");
  if (meta.width_m < 45.0 || meta.width_m > 90.0)
    throw SchemaError(where + ": pitch_width_m outside [45, 90]");
  if (!(meta.frame_rate_hz > 0.0)) throw SchemaError(where + ": frame_rate_hz must be > 0");

  periods.clear();
  if (j.contains("periods")) {
    for (const auto& pj : j.at("periods")) {
      Period p;
      p.id = static_cast<int>(detail::integer(detail::require(pj, "id", where), where));
      p.start_frame = detail::integer(detail::require(pj, "start_frame", where), where);
      p.end_frame = detail::integer(detail::require(pj, "end_frame", where), where);
      if (pj.contains("attack_direction") && !pj.at("attack_direction").is_null()) {
        for (const auto& [team, dir] : pj.at("attack_direction").items()) {
          auto d = dir.is_string() ? parse_attack_direction(dir.get<std::string>()) : std::nullopt;
          if (!d) throw SchemaError(where + ": attack_direction must be \"+x\" or \"-x\"");
          p.attack_direction[team] = *d;
        }
      }
      periods.push_back(std::move(p));
    }
  }
  return meta;
}

inline Roster parse_roster(const nlohmann::json& j) {
  const nlohmann::json& arr = j.is_object() && j.contains("players") ? j.at("players") : j;
  if (!arr.is_array()) throw SchemaError("roster.json: expected an array of players");
  Roster roster;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string where = "roster.json[" + std::to_string(i) + "]";
    const auto& pj = arr[i];
    RosterEntry e;
    e.player_id = detail::id_string(detail::require(pj, "player_id", where), where);
    e.team_id = detail::id_string(detail::require(pj, "team_id", where), where);
    if (pj.contains("jersey") && !pj.at("jersey").is_null())
      e.jersey = static_cast<int>(detail::integer(pj.at("jersey"), where));
    const auto& role = detail::require(pj, "role", where);
    if (role == "goalkeeper") {
      e.role = PlayerRole::Goalkeeper;
    } else if (role == "outfield") {
      e.role = PlayerRole::Outfield;
    } else {
      throw SchemaError(where + ": role must be \"goalkeeper\" or \"outfield\"");
    }
    if (pj.contains("name") && pj.at("name").is_string()) e.name = pj.at("name").get<std::string>();
    roster.players.push_back(std::move(e));
  }
  return roster;
}

/// Parses one event object. `frame_id` may be absent when `t` is given; the
/// caller synchronizes it against the tracking frames.
inline MatchEvent parse_event(const nlohmann::json& ej, const std::string& where,
                              bool& has_frame) {
  MatchEvent e;
  e.event_id = detail::id_string(detail::require(ej, "event_id", where), where);
  const auto& type = detail::require(ej, "type", where);
  auto t = type.is_string() ? parse_event_type(type.get<std::string>()) : std::nullopt;
  if (!t) throw SchemaError(where + ": unknown event type");
  e.type = *t;
  e.team_id = detail::id_string(detail::require(ej, "team_id", where), where);
  e.player_id = detail::id_string(detail::require(ej, "player_id", where), where);
  if (ej.contains("receiver_id") && !ej.at("receiver_id").is_null())
    e.receiver_id = detail::id_string(ej.at("receiver_id"), where);
  has_frame = ej.contains("frame_id") && !ej.at("frame_id").is_null();
  if (has_frame) e.frame_id = detail::integer(ej.at("frame_id"), where);
  if (ej.contains("end_frame_id") && !ej.at("end_frame_id").is_null())
    e.end_frame_id = detail::integer(ej.at("end_frame_id"), where);
  if (ej.contains("t") && !ej.at("t").is_null()) e.timestamp_s = detail::number(ej.at("t"), where);
  if (!has_frame && !e.timestamp_s)
    throw SchemaError(where + ": event needs 'frame_id' or 't'");
  if (ej.contains("outcome") && !ej.at("outcome").is_null()) {
    const auto& o = ej.at("outcome");
    auto parsed = o.is_string() ? parse_event_outcome(o.get<std::string>()) : std::nullopt;
    if (!parsed) throw SchemaError(where + ": unknown outcome");
    e.outcome = *parsed;
  }
  if (ej.contains("tags") && ej.at("tags").is_array()) {
    for (const auto& tag : ej.at("tags")) {
      if (!tag.is_string()) throw SchemaError(where + ": tags must be strings");
      e.tags.push_back(tag.get<std::string>());
    }
    std::sort(e.tags.begin(), e.tags.end());
    e.tags.erase(std::unique(e.tags.begin(), e.tags.end()), e.tags.end());
  }
  if (ej.contains("xg") && !ej.at("xg").is_null()) {
    e.xg = detail::number(ej.at("xg"), where);
  } else {
    for (const auto& tag : e.tags) {
      if (tag.rfind("xg:", 0) == 0) {
        try {
          e.xg = std::stod(tag.substr(3));
        } catch (const std::exception&) {
          throw SchemaError(where + ": malformed xg tag '" + tag + "'");
        }
      }
    }
  }
  if (is_completed_pass(e) && !e.receiver_id)
    throw SchemaError(where + ": completed pass without receiver_id");
  return e;
}

/// Parses tracking.jsonl text into frames, interning ids into the match tables.
inline void parse_tracking(std::string& text, NormalizedMatch& match) {
  detail::Interner players{match.player_ids, {}};
  detail::Interner teams{match.team_ids, {}};
  for (std::size_t i = 0; i < match.player_ids.size(); ++i)
    players.index.emplace(match.player_ids[i], static_cast<std::uint32_t>(i));
  for (std::size_t i = 0; i < match.team_ids.size(); ++i)
    teams.index.emplace(match.team_ids[i], static_cast<std::uint32_t>(i));

  match.frames.reserve(text.size() / 900 + 1);
  std::size_t pos = 0;
  std::size_t line_no = 0;
  // Per-line documents and a reused pool: a long-lived Document never
  // returns memory from its allocator.
  char parse_buffer[16384];
  rapidjson::MemoryPoolAllocator<> pool(parse_buffer, sizeof parse_buffer);
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    ++line_no;
    char* begin = text.data() + pos;
    const std::size_t len = nl - pos;
    pos = nl + 1;
    if (len == 0 || std::all_of(begin, begin + len, [](char c) { return std::isspace(static_cast<unsigned char>(c)); }))
      continue;
    if (begin + len < text.data() + text.size()) begin[len] = '\0';

    const std::string where = "tracking.jsonl:" + std::to_string(line_no);
    pool.Clear();
    rapidjson::Document doc(&pool);
    doc.ParseInsitu<rapidjson::kParseFullPrecisionFlag>(begin);
    if (doc.HasParseError())
      throw SchemaError(where + ": " + rapidjson::GetParseError_En(doc.GetParseError()));
    if (!doc.IsObject()) throw SchemaError(where + ": expected an object");

    TrackingFrame frame;
    const auto& fid = detail::rj_member(doc, "frame_id", where);
    if (!fid.IsInt64()) throw SchemaError(where + ": frame_id must be an integer");
    frame.frame_id = fid.GetInt64();
    frame.timestamp_s = detail::rj_number(detail::rj_member(doc, "t", where), where);
    if (!match.frames.empty() && frame.frame_id <= match.frames.back().frame_id)
      throw SchemaError(where + ": frame_id not strictly increasing");

    const auto& plist = detail::rj_member(doc, "players", where);
    if (!plist.IsArray()) throw SchemaError(where + ": players must be an array");
    frame.players.reserve(plist.Size());
    for (const auto& pj : plist.GetArray()) {
      PlayerPosition pp;
      pp.player = players(detail::rj_id(detail::rj_member(pj, "pid", where), where));
      pp.team = teams(detail::rj_id(detail::rj_member(pj, "tid", where), where));
      pp.pos.x = detail::rj_number(detail::rj_member(pj, "x", where), where);
      pp.pos.y = detail::rj_number(detail::rj_member(pj, "y", where), where);
      if (!detail::in_padded_bounds(pp.pos, match.meta))
        throw BoundsError(where + ": player position outside pitch bounds");
      frame.players.push_back(pp);
    }
    auto ball = doc.FindMember("ball");
    if (ball != doc.MemberEnd() && !ball->value.IsNull()) {
      Point2 b{detail::rj_number(detail::rj_member(ball->value, "x", where), where),
               detail::rj_number(detail::rj_member(ball->value, "y", where), where)};
      if (!detail::in_padded_bounds(b, match.meta))
        throw BoundsError(where + ": ball position outside pitch bounds");
      frame.ball = b;
    }
    match.frames.push_back(std::move(frame));
  }
}

namespace detail {

/// Nearest frame by timestamp; frames are ordered by frame_id and time.
inline std::optional<std::size_t> nearest_frame_by_time(const NormalizedMatch& m, double t) {
  if (m.frames.empty()) return std::nullopt;
  auto it = std::lower_bound(m.frames.begin(), m.frames.end(), t,
                             [](const TrackingFrame& f, double v) { return f.timestamp_s < v; });
  std::size_t best;
  if (it == m.frames.end()) {
    best = m.frames.size() - 1;
  } else if (it == m.frames.begin()) {
    best = 0;
  } else {
    const auto hi = static_cast<std::size_t>(it - m.frames.begin());
    best = (t - m.frames[hi - 1].timestamp_s <= it->timestamp_s - t) ? hi - 1 : hi;
  }
  return best;
}

inline void check_goalkeepers(const NormalizedMatch& m, LoadDiagnostics& diag) {
  std::vector<bool> is_gk(m.player_ids.size(), false);
  for (std::size_t i = 0; i < m.player_ids.size(); ++i) is_gk[i] = m.roster.is_goalkeeper(m.player_ids[i]);
  std::vector<std::size_t> violations(m.team_ids.size(), 0);
  std::vector<int> count(m.team_ids.size());
  for (const auto& f : m.frames) {
    std::fill(count.begin(), count.end(), 0);
    for (const auto& p : f.players)
      if (is_gk[p.player]) ++count[p.team];
    for (std::size_t t = 0; t < count.size(); ++t)
      if (count[t] != 1) ++violations[t];
  }
  for (std::size_t t = 0; t < violations.size(); ++t)
    if (violations[t] > 0)
      diag.warnings.push_back("team " + m.team_ids[t] + ": " + std::to_string(violations[t]) +
                              " frame(s) without exactly one goalkeeper");
}

}  // namespace detail

/// Loads and synchronizes one match. Events whose frame cannot be resolved
/// (unknown frame_id and no timestamp) are dropped and counted in `diag`.
inline NormalizedMatch load_match(const MatchPaths& paths, LoadDiagnostics* diag_out = nullptr) {
  LoadDiagnostics diag;
  NormalizedMatch match;
  match.match_id = paths.events.parent_path().filename().string();

  match.meta = parse_pitch_meta(detail::read_json(paths.meta), match.periods);
  match.roster = parse_roster(detail::read_json(paths.roster));
  {
    std::string tracking = detail::read_file(paths.tracking);
    parse_tracking(tracking, match);
  }

  const nlohmann::json events = detail::read_json(paths.events);
  if (!events.is_array()) throw SchemaError("events.json: expected an array");
  match.events.reserve(events.size());
  for (std::size_t i = 0; i < events.size(); ++i) {
    const std::string where = "events.json[" + std::to_string(i) + "]";
    bool has_frame = false;
    MatchEvent e = parse_event(events[i], where, has_frame);
    if (!has_frame || !match.frame_index(e.frame_id)) {
      if (e.timestamp_s) {
        auto idx = detail::nearest_frame_by_time(match, *e.timestamp_s);
        if (!idx || std::abs(match.frames[*idx].timestamp_s - *e.timestamp_s) > kSyncToleranceS)
          throw SyncError(where + ": no tracking frame within 1 s of t=" +
                          std::to_string(*e.timestamp_s));
        e.frame_id = match.frames[*idx].frame_id;
      } else {
        ++diag.dropped_events;
        continue;
      }
    }
    match.events.push_back(std::move(e));
  }
  std::stable_sort(match.events.begin(), match.events.end(),
                   [](const MatchEvent& a, const MatchEvent& b) { return a.frame_id < b.frame_id; });
  if (diag.dropped_events > 0)
    diag.warnings.push_back(std::to_string(diag.dropped_events) +
                            " event(s) dropped: frame not resolvable");
  detail::check_goalkeepers(match, diag);
  if (diag_out) *diag_out = std::move(diag);
  return match;
}

inline NormalizedMatch load_match_dir(const fs::path& dir, LoadDiagnostics* diag = nullptr) {
  NormalizedMatch m = load_match(MatchPaths::in_directory(dir), diag);
  m.match_id = dir.filename().string();
  if (m.match_id.empty()) m.match_id = dir.parent_path().filename().string();
  return m;
}

// ---- writing ---------------------------------------------------------------

inline nlohmann::json event_to_json(const MatchEvent& e) {
  nlohmann::json j;
  j["event_id"] = e.event_id;
  j["type"] = to_string(e.type);
  j["team_id"] = e.team_id;
  j["player_id"] = e.player_id;
  j["receiver_id"] = e.receiver_id ? nlohmann::json(*e.receiver_id) : nlohmann::json(nullptr);
  j["frame_id"] = e.frame_id;
  j["end_frame_id"] = e.end_frame_id ? nlohmann::json(*e.end_frame_id) : nlohmann::json(nullptr);
  if (e.timestamp_s) j["t"] = *e.timestamp_s;
  j["outcome"] = to_string(e.outcome);
  j["tags"] = e.tags;
  if (e.xg) j["xg"] = *e.xg;
  return j;
}

inline std::string tracking_line(const NormalizedMatch& m, const TrackingFrame& f) {
  std::string out;
  out.reserve(64 + f.players.size() * 48);
  out += "{\"frame_id\":";
  out += std::to_string(f.frame_id);
  out += ",\"t\":";
  detail::append_double(out, f.timestamp_s);
  out += ",\"players\":[";
  for (std::size_t i = 0; i < f.players.size(); ++i) {
    const auto& p = f.players[i];
    if (i) out.push_back(',');
    out += "{\"pid\":";
    detail::append_quoted(out, m.player_ids[p.player]);
    out += ",\"tid\":";
    detail::append_quoted(out, m.team_ids[p.team]);
    out += ",\"x\":";
    detail::append_double(out, p.pos.x);
    out += ",\"y\":";
    detail::append_double(out, p.pos.y);
    out.push_back('}');
  }
  out += "],\"ball\":";
  if (f.ball) {
    out += "{\"x\":";
    detail::append_double(out, f.ball->x);
    out += ",\"y\":";
    detail::append_double(out, f.ball->y);
    out.push_back('}');
  } else {
    out += "null";
  }
  out.push_back('}');
  return out;
}

/// Writes the four normalized files into `dir` (created if needed).
inline void write_match(const NormalizedMatch& m, const fs::path& dir) {
  fs::create_directories(dir);

  nlohmann::json meta;
  meta["pitch_length_m"] = m.meta.length_m;
  meta["pitch_width_m"] = m.meta.width_m;
  meta["frame_rate_hz"] = m.meta.frame_rate_hz;
  meta["periods"] = nlohmann::json::array();
  for (const auto& p : m.periods) {
    nlohmann::json pj{{"id", p.id}, {"start_frame", p.start_frame}, {"end_frame", p.end_frame}};
    pj["attack_direction"] = nlohmann::json::object();
    for (const auto& [team, dir_] : p.attack_direction) pj["attack_direction"][team] = to_string(dir_);
    meta["periods"].push_back(std::move(pj));
  }
  std::ofstream(dir / "meta.json") << meta.dump(2) << '\n';

  nlohmann::json roster = nlohmann::json::array();
  for (const auto& e : m.roster.players) {
    nlohmann::json pj{{"player_id", e.player_id},
                      {"team_id", e.team_id},
                      {"jersey", e.jersey},
                      {"role", e.role == PlayerRole::Goalkeeper ? "goalkeeper" : "outfield"}};
    if (!e.name.empty()) pj["name"] = e.name;
    roster.push_back(std::move(pj));
  }
  std::ofstream(dir / "roster.json") << roster.dump(2) << '\n';

  nlohmann::json events = nlohmann::json::array();
  for (const auto& e : m.events) events.push_back(event_to_json(e));
  std::ofstream(dir / "events.json") << events.dump(1) << '\n';

  std::ofstream tracking(dir / "tracking.jsonl", std::ios::binary);
  std::string buffer;
  buffer.reserve(1 << 20);
  for (const auto& f : m.frames) {
    buffer += tracking_line(m, f);
    buffer.push_back('\n');
    if (buffer.size() > (1u << 20)) {
      tracking.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
      buffer.clear();
    }
  }
  tracking.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
}

// ---- smoothing ---------------------------------------------------------------

namespace detail {

/// Moving average over `values`, window truncated at the run edges.
inline void moving_average_run(std::span<Point2* const> values, int half, std::vector<Point2>& scratch) {
  const auto n = static_cast<std::ptrdiff_t>(values.size());
  scratch.resize(values.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - half);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n - 1, i + half);
    double sx = 0.0, sy = 0.0;
    for (std::ptrdiff_t j = lo; j <= hi; ++j) {
      sx += values[j]->x;
      sy += values[j]->y;
    }
    const auto count = static_cast<double>(hi - lo + 1);
    scratch[i] = Point2{sx / count, sy / count};
  }
  for (std::ptrdiff_t i = 0; i < n; ++i) *values[i] = scratch[i];
}

}  // namespace detail

/// Replaces every player and ball trajectory with a centered moving average
/// of `window_frames` samples. A trajectory is split wherever the player (or
/// ball) is missing from a frame; windows are truncated at those edges.
inline NormalizedMatch smooth_positions(const NormalizedMatch& match, int window_frames) {
  if (window_frames < 1 || window_frames % 2 == 0)
    throw ConfigError("smoothing window must be an odd positive integer");
  NormalizedMatch out = match;
  if (window_frames == 1) return out;
  const int half = window_frames / 2;

  std::vector<std::vector<Point2*>> tracks(out.player_ids.size());
  std::vector<std::size_t> last_frame(out.player_ids.size(), std::size_t(-1));
  std::vector<Point2> scratch;
  auto flush = [&](std::vector<Point2*>& run) {
    if (!run.empty()) detail::moving_average_run(run, half, scratch);
    run.clear();
  };

  for (std::size_t fi = 0; fi < out.frames.size(); ++fi) {
    for (auto& p : out.frames[fi].players) {
      auto& run = tracks[p.player];
      if (last_frame[p.player] + 1 != fi) flush(run);
      run.push_back(&p.pos);
      last_frame[p.player] = fi;
    }
  }
  for (auto& run : tracks) flush(run);

  std::vector<Point2*> ball_run;
  for (auto& f : out.frames) {
    if (f.ball) {
      ball_run.push_back(&*f.ball);
    } else {
      flush(ball_run);
    }
  }
  flush(ball_run);
  return out;
}

// ---- orientation -----------------------------------------------------------

/// Resolved attack direction per (team id, period id).
using AttackDirections = std::map<std::pair<std::string, int>, AttackDirection>;

/// Point reflection through the pitch center; its own inverse.
inline Point2 reflect_point(Point2 p, const PitchMeta& meta) {
  return Point2{meta.length_m - p.x, meta.width_m - p.y};
}

inline Point2 orient_point(Point2 p, const PitchMeta& meta, AttackDirection dir) {
  return dir == AttackDirection::PositiveX ? p : reflect_point(p, meta);
}

/// Infers a team's direction in one period from its goalkeeper: the team
/// attacks +x when its outfield players sit, on average, at larger x than
/// its goalkeeper.
inline std::optional<AttackDirection> infer_attack_direction(const NormalizedMatch& m,
                                                             const std::string& team_id,
                                                             const Period& period) {
  double gk_sum = 0.0, of_sum = 0.0;
  std::size_t gk_n = 0, of_n = 0;
  std::vector<int> role(m.player_ids.size(), -1);
  for (std::size_t i = 0; i < m.player_ids.size(); ++i) {
    const RosterEntry* e = m.roster.find(m.player_ids[i]);
    if (e) role[i] = e->role == PlayerRole::Goalkeeper ? 1 : 0;
  }
  for (const auto& f : m.frames) {
    if (f.frame_id < period.start_frame || f.frame_id > period.end_frame) continue;
    for (const auto& p : f.players) {
      if (m.team_ids[p.team] != team_id || role[p.player] < 0) continue;
      if (role[p.player] == 1) {
        gk_sum += p.pos.x;
        ++gk_n;
      } else {
        of_sum += p.pos.x;
        ++of_n;
      }
    }
  }
  if (gk_n == 0 || of_n == 0) return std::nullopt;
  const double diff = of_sum / static_cast<double>(of_n) - gk_sum / static_cast<double>(gk_n);
  if (diff == 0.0) return std::nullopt;
  return diff > 0.0 ? AttackDirection::PositiveX : AttackDirection::NegativeX;
}

/// Resolves every (team, period) direction: declared value first, then the
/// opposite of the other team's declared value, then goalkeeper inference.
inline AttackDirections resolve_attack_directions(const NormalizedMatch& m) {
  AttackDirections out;
  std::vector<std::string> teams = m.roster.team_ids();
  for (const auto& t : m.team_ids)
    if (std::find(teams.begin(), teams.end(), t) == teams.end()) teams.push_back(t);
  std::vector<Period> periods = m.periods;
  if (periods.empty() && !m.frames.empty())
    periods.push_back(Period{1, m.frames.front().frame_id, m.frames.back().frame_id, {}});

  for (const auto& p : periods) {
    for (const auto& team : teams) {
      if (auto it = p.attack_direction.find(team); it != p.attack_direction.end()) {
        out[{team, p.id}] = it->second;
        continue;
      }
      std::optional<AttackDirection> from_other;
      if (teams.size() == 2) {
        const std::string& other = teams[0] == team ? teams[1] : teams[0];
        if (auto it = p.attack_direction.find(other); it != p.attack_direction.end())
          from_other = it->second == AttackDirection::PositiveX ? AttackDirection::NegativeX
                                                                : AttackDirection::PositiveX;
      }
      auto dir = from_other ? from_other : infer_attack_direction(m, team, p);
      if (!dir)
        throw OrientationError("cannot resolve attack direction of team " + team + " in period " +
                               std::to_string(p.id));
      out[{team, p.id}] = *dir;
    }
  }
  return out;
}

inline AttackDirection direction_of(const AttackDirections& dirs, const std::string& team,
                                    int period) {
  auto it = dirs.find({team, period});
  if (it == dirs.end())
    throw OrientationError("no attack direction for team " + team + " in period " +
                           std::to_string(period));
  return it->second;
}

/// The match as seen by `team_id`'s analysis: every period in which the team
/// attacks -x is reflected so that the team always attacks +x.
inline NormalizedMatch normalize_orientation(const NormalizedMatch& match,
                                             const std::string& team_id) {
  const AttackDirections dirs = resolve_attack_directions(match);
  NormalizedMatch out = match;
  for (auto& f : out.frames) {
    const int period = out.period_of(f.frame_id);
    if (direction_of(dirs, team_id, period) == AttackDirection::PositiveX) continue;
    for (auto& p : f.players) p.pos = reflect_point(p.pos, out.meta);
    if (f.ball) f.ball = reflect_point(*f.ball, out.meta);
  }
  if (out.periods.empty() && !out.frames.empty())
    out.periods.push_back(Period{1, out.frames.front().frame_id, out.frames.back().frame_id, {}});
  for (auto& p : out.periods) {
    const bool flipped = direction_of(dirs, team_id, p.id) == AttackDirection::NegativeX;
    p.attack_direction.clear();
    for (const auto& [key, d] : dirs) {
      if (key.second != p.id) continue;
      const bool pos = (d == AttackDirection::PositiveX) != flipped;
      p.attack_direction[key.first] = pos ? AttackDirection::PositiveX : AttackDirection::NegativeX;
    }
  }
  return out;
}

// ---- pass snapshots -----------------------------------------------------------

inline constexpr int kDefaultOpenPlayGuardEvents = 2;

struct PlayerPoint {
  std::string id;
  Point2 pos;
  bool goalkeeper = false;

  friend bool operator==(const PlayerPoint&, const PlayerPoint&) = default;
};

/// One completed pass with everything detection needs, in the passing team's
/// attacking frame (attack = +x).
struct PassSnapshot {
  std::string pass_event_id;
  std::string team_id;
  std::string passer_id;
  std::string receiver_id;
  FrameId t_frame = 0;
  FrameId reception_frame = 0;
  int period = 1;
  Point2 s;
  Point2 r;
  std::vector<PlayerPoint> opponents;
  std::vector<PlayerPoint> opponents_at_reception;
  bool is_open_play = true;

  PassVector pass() const { return PassVector{s, r}; }
};

/// True when neither the event nor any of the `guard` preceding events of the
/// same period is a restart.
inline bool is_open_play_at(const NormalizedMatch& m, std::size_t event_index, int guard) {
  const MatchEvent& e = m.events.at(event_index);
  if (is_set_piece(e)) return false;
  const int period = m.period_of(e.frame_id);
  for (int back = 1; back <= guard && back <= static_cast<int>(event_index); ++back) {
    const MatchEvent& prev = m.events[event_index - static_cast<std::size_t>(back)];
    if (m.period_of(prev.frame_id) != period) break;
    if (is_set_piece(prev)) return false;
  }
  return true;
}

namespace detail {

inline const PlayerPosition* find_in_frame(const TrackingFrame& f, std::uint32_t player) {
  for (const auto& p : f.players)
    if (p.player == player) return &p;
  return nullptr;
}

/// Reception frame: end_frame_id when present, else the first frame where the
/// receiver is within 1.5 m of the ball, else a constant-speed estimate.
inline std::size_t reception_frame_index(const NormalizedMatch& m, const MatchEvent& e,
                                         std::size_t release_idx, std::uint32_t receiver,
                                         Point2 passer_pos) {
  if (e.end_frame_id) {
    auto idx = m.frame_index_at_or_after(*e.end_frame_id);
    return idx ? *idx : m.frames.size() - 1;
  }
  const auto limit = std::min(m.frames.size(),
                              release_idx + static_cast<std::size_t>(10.0 * m.meta.frame_rate_hz));
  for (std::size_t i = release_idx; i < limit; ++i) {
    const auto& f = m.frames[i];
    const PlayerPosition* rp = find_in_frame(f, receiver);
    if (f.ball && rp && distance(*f.ball, rp->pos) <= kReceptionBallRadiusM) return i;
  }
  const PlayerPosition* rp = find_in_frame(m.frames[release_idx], receiver);
  const double length = rp ? distance(passer_pos, rp->pos) : 0.0;
  const auto offset =
      static_cast<FrameId>(std::llround(length / kAssumedPassSpeedMps * m.meta.frame_rate_hz));
  auto idx = m.frame_index_at_or_after(m.frames[release_idx].frame_id + offset);
  return idx ? *idx : m.frames.size() - 1;
}

}  // namespace detail

/// Builds the snapshot of the completed pass at `event_index`. Opponents are
/// frozen at the release frame; goalkeeper exclusion happens downstream.
inline PassSnapshot snapshot_pass(const NormalizedMatch& m, std::size_t event_index,
                                  const AttackDirections& dirs,
                                  int open_play_guard_events = kDefaultOpenPlayGuardEvents) {
  const MatchEvent& e = m.events.at(event_index);
  if (!is_completed_pass(e) || !e.receiver_id)
    throw SchemaError("event " + e.event_id + " is not a completed pass");

  PassSnapshot snap;
  snap.pass_event_id = e.event_id;
  snap.team_id = e.team_id;
  snap.passer_id = e.player_id;
  snap.receiver_id = *e.receiver_id;
  snap.period = m.period_of(e.frame_id);
  snap.is_open_play = is_open_play_at(m, event_index, open_play_guard_events);
  const AttackDirection dir = direction_of(dirs, e.team_id, snap.period);

  const auto release_idx = m.frame_index(e.frame_id);
  if (!release_idx) throw SyncError("event " + e.event_id + ": frame not in tracking data");
  const TrackingFrame& release = m.frames[*release_idx];
  snap.t_frame = release.frame_id;

  const auto passer = m.player_index(e.player_id);
  const auto receiver = m.player_index(*e.receiver_id);
  const PlayerPosition* pp = passer ? detail::find_in_frame(release, *passer) : nullptr;
  if (!pp) throw MissingPlayerError("passer " + e.player_id + " absent at frame " +
                                    std::to_string(release.frame_id));
  if (!receiver) throw MissingPlayerError("receiver " + *e.receiver_id + " not tracked");

  const std::size_t recv_idx = detail::reception_frame_index(m, e, *release_idx, *receiver, pp->pos);
  const TrackingFrame& reception = m.frames[recv_idx];
  snap.reception_frame = reception.frame_id;
  const PlayerPosition* rp = detail::find_in_frame(reception, *receiver);
  if (!rp) throw MissingPlayerError("receiver " + *e.receiver_id + " absent at frame " +
                                    std::to_string(reception.frame_id));

  snap.s = orient_point(pp->pos, m.meta, dir);
  snap.r = orient_point(rp->pos, m.meta, dir);

  const std::uint32_t own_team = pp->team;
  auto collect = [&](const TrackingFrame& f, std::vector<PlayerPoint>& out) {
    for (const auto& p : f.players) {
      if (p.team == own_team) continue;
      const std::string& id = m.player_ids[p.player];
      out.push_back(PlayerPoint{id, orient_point(p.pos, m.meta, dir), m.roster.is_goalkeeper(id)});
    }
  };
  collect(release, snap.opponents);
  collect(reception, snap.opponents_at_reception);
  return snap;
}

inline PassSnapshot snapshot_pass(const NormalizedMatch& m, const MatchEvent& event,
                                  int open_play_guard_events = kDefaultOpenPlayGuardEvents) {
  for (std::size_t i = 0; i < m.events.size(); ++i)
    if (m.events[i].event_id == event.event_id)
      return snapshot_pass(m, i, resolve_attack_directions(m), open_play_guard_events);
  throw SchemaError("event " + event.event_id + " not in match");
}

}  // namespace lbp
