#pragma once

// Input linting. Unlike load_match, which stops at the first problem, this
// collects every finding with its file and line so a data provider can fix
// a match in one pass.

#include <rapidjson/document.h>
#include <rapidjson/error/en.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "lbp/ingestion.hpp"

namespace lbp {

enum class Severity { Warning, Error };

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string file;
  std::size_t line = 0;  // 1-based; 0 when not tied to a line
  std::string message;

  std::string to_string() const {
    std::string out = file;
    if (line > 0) out += ":" + std::to_string(line);
    out += severity == Severity::Error ? ": error: " : ": warning: ";
    return out + message;
  }
};

struct ValidationReport {
  std::vector<Diagnostic> diagnostics;

  bool clean() const {
    for (const auto& d : diagnostics)
      if (d.severity == Severity::Error) return false;
    return true;
  }
  std::size_t error_count() const {
    std::size_t n = 0;
    for (const auto& d : diagnostics) n += d.severity == Severity::Error ? 1 : 0;
    return n;
  }
};

namespace detail {

/// 1-based line of the n-th occurrence of `needle`, or 0.
inline std::size_t line_of_occurrence(const std::string& text, std::string_view needle, std::size_t n) {
  std::size_t pos = 0;
  for (std::size_t k = 0;; ++k) {
    pos = text.find(needle, pos);
    if (pos == std::string::npos) return 0;
    if (k == n) return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
    pos += needle.size();
  }
}

inline std::size_t json_error_line(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

inline std::optional<nlohmann::json> lint_json_file(const fs::path& path, ValidationReport& rep,
                                                    std::string* text_out = nullptr) {
  const std::string name = path.filename().string();
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    rep.diagnostics.push_back({Severity::Error, name, 0, e.what()});
    return std::nullopt;
  }
  try {
    auto j = nlohmann::json::parse(text);
    if (text_out) *text_out = std::move(text);
    return j;
  } catch (const nlohmann::json::parse_error& e) {
    rep.diagnostics.push_back({Severity::Error, name, json_error_line(text, e.byte), "malformed JSON"});
    return std::nullopt;
  }
}

}  // namespace detail

/// Lints the four normalized files of one match directory.
inline ValidationReport validate_match_dir(const fs::path& dir) {
  ValidationReport rep;
  auto error = [&](std::string file, std::size_t line, std::string msg) {
    rep.diagnostics.push_back({Severity::Error, std::move(file), line, std::move(msg)});
  };
  auto warn = [&](std::string file, std::size_t line, std::string msg) {
    rep.diagnostics.push_back({Severity::Warning, std::move(file), line, std::move(msg)});
  };
  const MatchPaths paths = MatchPaths::in_directory(dir);

  // meta.json
  PitchMeta meta;
  std::vector<Period> periods;
  if (auto j = detail::lint_json_file(paths.meta, rep)) {
    try {
      meta = parse_pitch_meta(*j, periods);
    } catch (const Error& e) {
      error("meta.json", 0, e.what());
    }
  }

  // roster.json
  Roster roster;
  std::string roster_text;
  if (auto j = detail::lint_json_file(paths.roster, rep, &roster_text)) {
    try {
      roster = parse_roster(*j);
      std::set<std::string> seen;
      for (std::size_t i = 0; i < roster.players.size(); ++i)
        if (!seen.insert(roster.players[i].player_id).second)
          error("roster.json", detail::line_of_occurrence(roster_text, "\"player_id\"", i),
                "duplicate player_id '" + roster.players[i].player_id + "'");
    } catch (const Error& e) {
      error("roster.json", 0, e.what());
    }
  }
  std::set<std::string> known_players;
  for (const auto& p : roster.players) known_players.insert(p.player_id);

  // tracking.jsonl
  std::set<FrameId> frame_ids;
  std::vector<double> frame_times;
  std::set<std::string> tracked_players;
  {
    std::string text;
    try {
      text = detail::read_file(paths.tracking);
    } catch (const Error& e) {
      error("tracking.jsonl", 0, e.what());
    }
    std::optional<FrameId> prev;
    std::set<std::string> reported_unknown;
    std::size_t line_no = 0, pos = 0;
    while (pos < text.size()) {
      std::size_t nl = text.find('\n', pos);
      if (nl == std::string::npos) nl = text.size();
      ++line_no;
      const std::string line = text.substr(pos, nl - pos);
      pos = nl + 1;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      rapidjson::Document doc;
      doc.Parse<rapidjson::kParseFullPrecisionFlag>(line.c_str());
      if (doc.HasParseError()) {
        error("tracking.jsonl", line_no, std::string("malformed JSON: ") + rapidjson::GetParseError_En(doc.GetParseError()));
        continue;
      }
      if (!doc.IsObject()) {
        error("tracking.jsonl", line_no, "expected an object");
        continue;
      }
      auto fid = doc.FindMember("frame_id");
      if (fid == doc.MemberEnd() || !fid->value.IsInt64()) {
        error("tracking.jsonl", line_no, "missing or non-integer frame_id");
        continue;
      }
      const FrameId id = fid->value.GetInt64();
      if (prev && id <= *prev)
        error("tracking.jsonl", line_no,
              "frame_id regression: " + std::to_string(id) + " after " + std::to_string(*prev));
      prev = id;
      frame_ids.insert(id);
      auto t = doc.FindMember("t");
      if (t == doc.MemberEnd() || !t->value.IsNumber())
        error("tracking.jsonl", line_no, "missing or non-numeric t");
      else
        frame_times.push_back(t->value.GetDouble());

      auto players = doc.FindMember("players");
      if (players == doc.MemberEnd() || !players->value.IsArray()) {
        error("tracking.jsonl", line_no, "missing players array");
        continue;
      }
      for (const auto& pj : players->value.GetArray()) {
        auto pid = pj.IsObject() ? pj.FindMember("pid") : pj.MemberEnd();
        auto tid = pj.IsObject() ? pj.FindMember("tid") : pj.MemberEnd();
        auto x = pj.IsObject() ? pj.FindMember("x") : pj.MemberEnd();
        auto y = pj.IsObject() ? pj.FindMember("y") : pj.MemberEnd();
        if (!pj.IsObject() || pid == pj.MemberEnd() || tid == pj.MemberEnd() || x == pj.MemberEnd() ||
            y == pj.MemberEnd() || !x->value.IsNumber() || !y->value.IsNumber()) {
          error("tracking.jsonl", line_no, "player entry needs pid, tid, x, y");
          continue;
        }
        std::string id_str;
        try {
          id_str = detail::rj_id(pid->value, "pid");
        } catch (const Error&) {
          error("tracking.jsonl", line_no, "pid must be a string or integer");
          continue;
        }
        tracked_players.insert(id_str);
        if (!roster.players.empty() && !known_players.count(id_str) && reported_unknown.insert(id_str).second)
          error("tracking.jsonl", line_no, "unknown player_id '" + id_str + "' (not in roster)");
        if (!detail::in_padded_bounds({x->value.GetDouble(), y->value.GetDouble()}, meta))
          error("tracking.jsonl", line_no, "position of '" + id_str + "' outside pitch bounds + 5 m");
      }
      auto ball = doc.FindMember("ball");
      if (ball != doc.MemberEnd() && !ball->value.IsNull()) {
        auto bx = ball->value.IsObject() ? ball->value.FindMember("x") : ball->value.MemberEnd();
        auto by = ball->value.IsObject() ? ball->value.FindMember("y") : ball->value.MemberEnd();
        if (!ball->value.IsObject() || bx == ball->value.MemberEnd() || by == ball->value.MemberEnd() ||
            !bx->value.IsNumber() || !by->value.IsNumber())
          error("tracking.jsonl", line_no, "ball must be null or {x, y}");
        else if (!detail::in_padded_bounds({bx->value.GetDouble(), by->value.GetDouble()}, meta))
          error("tracking.jsonl", line_no, "ball outside pitch bounds + 5 m");
      }
    }
    if (!text.empty() && frame_ids.empty()) error("tracking.jsonl", 0, "no frames");
  }

  // events.json
  std::sort(frame_times.begin(), frame_times.end());
  std::string events_text;
  if (auto j = detail::lint_json_file(paths.events, rep, &events_text)) {
    if (!j->is_array()) {
      error("events.json", 1, "expected an array of events");
    } else {
      std::set<std::string> ids;
      for (std::size_t i = 0; i < j->size(); ++i) {
        const std::size_t line = detail::line_of_occurrence(events_text, "\"event_id\"", i);
        bool has_frame = false;
        MatchEvent e;
        try {
          e = parse_event((*j)[i], "event " + std::to_string(i), has_frame);
        } catch (const Error& err) {
          error("events.json", line, err.what());
          continue;
        }
        if (!ids.insert(e.event_id).second) error("events.json", line, "duplicate event_id '" + e.event_id + "'");
        auto check_player = [&](const std::string& pid, const char* field) {
          if (pid.empty()) return;
          if (!roster.players.empty() && !known_players.count(pid))
            error("events.json", line, std::string(field) + " '" + pid + "' is not in the roster");
          else if (!tracked_players.empty() && !tracked_players.count(pid))
            warn("events.json", line, std::string(field) + " '" + pid + "' never appears in tracking");
        };
        check_player(e.player_id, "player_id");
        if (e.receiver_id) check_player(*e.receiver_id, "receiver_id");
        if (has_frame && !frame_ids.empty() && !frame_ids.count(e.frame_id)) {
          if (!e.timestamp_s)
            warn("events.json", line, "frame_id " + std::to_string(e.frame_id) + " not in tracking; event will be dropped");
        }
        if (e.timestamp_s && (!has_frame || !frame_ids.count(e.frame_id)) && !frame_times.empty()) {
          auto it = std::lower_bound(frame_times.begin(), frame_times.end(), *e.timestamp_s);
          double best = std::numeric_limits<double>::infinity();
          if (it != frame_times.end()) best = *it - *e.timestamp_s;
          if (it != frame_times.begin()) best = std::min(best, *e.timestamp_s - *std::prev(it));
          if (best > kSyncToleranceS) error("events.json", line, "no tracking frame within 1 s of t");
        }
        if (is_completed_pass(e) && !e.end_frame_id)
          error("events.json", line, "completed pass without end_frame_id");
      }
    }
  }

  // Orientation must be resolvable once the files are individually sound.
  if (rep.clean()) {
    try {
      LoadDiagnostics diag;
      const NormalizedMatch m = load_match(paths, &diag);
      resolve_attack_directions(m);
      for (const auto& w : diag.warnings) warn("match", 0, w);
    } catch (const Error& e) {
      error("match", 0, e.what());
    }
  }
  return rep;
}

}  // namespace lbp
