#pragma once

// Serialization of detection output and aggregate tables.
//
// CSV: UTF-8, '.' decimal separator, header row, RFC 4180 quoting, floats
// with 6 significant digits. JSON floats use the shortest round-trip form.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include "json.hpp"
#include <sstream>
#include <string>
#include <vector>

#include "lbp/aggregation.hpp"
#include "lbp/chains.hpp"
#include "lbp/detection.hpp"

namespace lbp {

namespace fs = std::filesystem;

inline std::string format_float(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// ---- CSV ---------------------------------------------------------------------

class CsvWriter {
public:
  explicit CsvWriter(std::vector<std::string> header) : columns_(header.size()) { row(header); }

  void row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out_.push_back(',');
      append_field(fields[i]);
    }
    out_ += "\r\n";
  }

  const std::string& str() const { return out_; }
  std::size_t columns() const { return columns_; }

  void save(const fs::path& path) const {
    std::ofstream f(path, std::ios::binary);
    f.write(out_.data(), static_cast<std::streamsize>(out_.size()));
    if (!f) throw std::runtime_error("cannot write " + path.string());
  }

private:
  void append_field(const std::string& f) {
    if (f.find_first_of(",\"\r\n") == std::string::npos) {
      out_ += f;
      return;
    }
    out_.push_back('"');
    for (char c : f) {
      if (c == '"') out_.push_back('"');
      out_.push_back(c);
    }
    out_.push_back('"');
  }

  std::size_t columns_;
  std::string out_;
};

/// Rows of an RFC 4180 document, header included.
inline std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\r' || c == '\n') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      field.clear();
      row.clear();
      any = false;
    } else {
      field.push_back(c);
      any = true;
    }
  }
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace detail {

inline std::string join(const std::vector<std::string>& items, char sep = ';') {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out.push_back(sep);
    out += items[i];
  }
  return out;
}

inline std::vector<std::string> split(const std::string& s, char sep = ';') {
  std::vector<std::string> out;
  if (s.empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

inline std::string b2s(bool b) { return b ? "true" : "false"; }

inline std::string opt_float(const std::optional<double>& v) { return v ? format_float(*v) : ""; }

inline std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingInputError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void save_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw std::runtime_error("cannot write " + path.string());
}

/// Header-indexed access to parsed CSV rows.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  static CsvTable load(const fs::path& path) {
    auto all = parse_csv(slurp(path));
    CsvTable t;
    if (all.empty()) return t;
    t.header = std::move(all.front());
    t.rows.assign(std::make_move_iterator(all.begin() + 1), std::make_move_iterator(all.end()));
    return t;
  }

  const std::string& get(const std::vector<std::string>& row, std::string_view col) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == col && i < row.size()) return row[i];
    throw SchemaError("CSV column '" + std::string(col) + "' missing");
  }
};

inline double to_double(const std::string& s) { return s.empty() ? 0.0 : std::stod(s); }
inline std::optional<double> to_opt_double(const std::string& s) {
  return s.empty() ? std::nullopt : std::optional<double>(std::stod(s));
}

}  // namespace detail

// ---- LBP records ---------------------------------------------------------------

inline nlohmann::json to_json(const TeamShape& shape) {
  nlohmann::json j;
  j["k"] = shape.k;
  j["silhouette"] = shape.silhouette ? nlohmann::json(*shape.silhouette) : nlohmann::json(nullptr);
  j["lines"] = nlohmann::json::array();
  for (const auto& l : shape.lines)
    j["lines"].push_back({{"cluster_id", l.cluster_id},
                          {"x_centroid", l.x_centroid},
                          {"y_min", l.y_min},
                          {"y_max", l.y_max},
                          {"member_ids", l.member_ids}});
  return j;
}

inline TeamShape shape_from_json(const nlohmann::json& j) {
  TeamShape s;
  s.k = j.at("k").get<int>();
  if (!j.at("silhouette").is_null()) s.silhouette = j.at("silhouette").get<double>();
  for (const auto& lj : j.at("lines"))
    s.lines.push_back(ClusterLine{lj.at("cluster_id").get<int>(), lj.at("x_centroid").get<double>(),
                                  lj.at("y_min").get<double>(), lj.at("y_max").get<double>(),
                                  lj.at("member_ids").get<std::vector<std::string>>()});
  return s;
}

inline nlohmann::json to_json(const LbpRecord& r) {
  return nlohmann::json{{"match_id", r.match_id},
                        {"event_id", r.pass_event_id},
                        {"team_id", r.team_id},
                        {"passer_id", r.passer_id},
                        {"receiver_id", r.receiver_id},
                        {"period", r.period},
                        {"frame_id", r.frame_id},
                        {"reception_frame", r.reception_frame},
                        {"s", {{"x", r.s.x}, {"y", r.s.y}}},
                        {"r", {{"x", r.r.x}, {"y", r.r.y}}},
                        {"is_open_play", r.is_open_play},
                        {"is_lbp", r.is_lbp},
                        {"lines_crossed", r.lines_crossed},
                        {"bypassed_count", r.bypassed_count},
                        {"crossed_cluster_ids", r.crossed_cluster_ids},
                        {"shape", to_json(r.shape)},
                        {"d_p", r.space.d_p},
                        {"d_r", r.space.d_r},
                        {"a_p", r.space.a_p},
                        {"a_r", r.space.a_r},
                        {"sbr", r.space.sbr},
                        {"sbr_clamped", r.space.clamped},
                        {"verticality", r.verticality},
                        {"pass_distance", r.pass_distance},
                        {"valid", r.valid},
                        {"error", r.error}};
}

inline LbpRecord lbp_record_from_json(const nlohmann::json& j) {
  LbpRecord r;
  r.match_id = j.at("match_id").get<std::string>();
  r.pass_event_id = j.at("event_id").get<std::string>();
  r.team_id = j.at("team_id").get<std::string>();
  r.passer_id = j.at("passer_id").get<std::string>();
  r.receiver_id = j.at("receiver_id").get<std::string>();
  r.period = j.at("period").get<int>();
  r.frame_id = j.at("frame_id").get<FrameId>();
  r.reception_frame = j.at("reception_frame").get<FrameId>();
  r.s = {j.at("s").at("x").get<double>(), j.at("s").at("y").get<double>()};
  r.r = {j.at("r").at("x").get<double>(), j.at("r").at("y").get<double>()};
  r.is_open_play = j.at("is_open_play").get<bool>();
  r.is_lbp = j.at("is_lbp").get<bool>();
  r.lines_crossed = j.at("lines_crossed").get<int>();
  r.bypassed_count = j.at("bypassed_count").get<int>();
  r.crossed_cluster_ids = j.at("crossed_cluster_ids").get<std::vector<int>>();
  r.shape = shape_from_json(j.at("shape"));
  r.space.d_p = j.at("d_p").get<double>();
  r.space.d_r = j.at("d_r").get<double>();
  r.space.a_p = j.at("a_p").get<double>();
  r.space.a_r = j.at("a_r").get<double>();
  r.space.sbr = j.at("sbr").get<double>();
  r.space.clamped = j.at("sbr_clamped").get<bool>();
  r.verticality = j.at("verticality").get<double>();
  r.pass_distance = j.at("pass_distance").get<double>();
  r.valid = j.at("valid").get<bool>();
  r.error = j.at("error").get<std::string>();
  return r;
}

inline std::string lbp_records_csv(const std::vector<LbpRecord>& records) {
  CsvWriter w({"match_id", "event_id", "team_id", "passer_id", "receiver_id", "period", "frame_id",
               "reception_frame", "s_x", "s_y", "r_x", "r_y", "is_open_play", "is_lbp", "lines_crossed",
               "bypassed_count", "crossed_cluster_ids", "k", "silhouette", "centroids", "d_p", "d_r",
               "sbr", "sbr_clamped", "verticality", "pass_distance", "valid", "error"});
  for (const auto& r : records) {
    std::vector<std::string> ids, centroids;
    for (int c : r.crossed_cluster_ids) ids.push_back(std::to_string(c));
    for (const auto& l : r.shape.lines) centroids.push_back(format_float(l.x_centroid));
    w.row({r.match_id, r.pass_event_id, r.team_id, r.passer_id, r.receiver_id,
           std::to_string(r.period), std::to_string(r.frame_id), std::to_string(r.reception_frame),
           format_float(r.s.x), format_float(r.s.y), format_float(r.r.x), format_float(r.r.y),
           detail::b2s(r.is_open_play), detail::b2s(r.is_lbp), std::to_string(r.lines_crossed),
           std::to_string(r.bypassed_count), detail::join(ids), std::to_string(r.shape.k),
           detail::opt_float(r.shape.silhouette), detail::join(centroids), format_float(r.space.d_p),
           format_float(r.space.d_r), format_float(r.space.sbr), detail::b2s(r.space.clamped),
           format_float(r.verticality), format_float(r.pass_distance), detail::b2s(r.valid), r.error});
  }
  return w.str();
}

/// Line centroids come back; spans and members are not in the CSV.
inline std::vector<LbpRecord> lbp_records_from_csv(const fs::path& path) {
  const auto t = detail::CsvTable::load(path);
  std::vector<LbpRecord> out;
  for (const auto& row : t.rows) {
    LbpRecord r;
    r.match_id = t.get(row, "match_id");
    r.pass_event_id = t.get(row, "event_id");
    r.team_id = t.get(row, "team_id");
    r.passer_id = t.get(row, "passer_id");
    r.receiver_id = t.get(row, "receiver_id");
    r.period = std::stoi(t.get(row, "period"));
    r.frame_id = std::stoll(t.get(row, "frame_id"));
    r.reception_frame = std::stoll(t.get(row, "reception_frame"));
    r.s = {detail::to_double(t.get(row, "s_x")), detail::to_double(t.get(row, "s_y"))};
    r.r = {detail::to_double(t.get(row, "r_x")), detail::to_double(t.get(row, "r_y"))};
    r.is_open_play = t.get(row, "is_open_play") == "true";
    r.is_lbp = t.get(row, "is_lbp") == "true";
    r.lines_crossed = std::stoi(t.get(row, "lines_crossed"));
    r.bypassed_count = std::stoi(t.get(row, "bypassed_count"));
    for (const auto& id : detail::split(t.get(row, "crossed_cluster_ids"))) r.crossed_cluster_ids.push_back(std::stoi(id));
    r.shape.k = std::stoi(t.get(row, "k"));
    r.shape.silhouette = detail::to_opt_double(t.get(row, "silhouette"));
    int cluster = 0;
    for (const auto& c : detail::split(t.get(row, "centroids"))) {
      ClusterLine line;
      line.cluster_id = cluster++;
      line.x_centroid = detail::to_double(c);
      r.shape.lines.push_back(std::move(line));
    }
    r.space.d_p = detail::to_double(t.get(row, "d_p"));
    r.space.d_r = detail::to_double(t.get(row, "d_r"));
    r.space.sbr = detail::to_double(t.get(row, "sbr"));
    r.space.clamped = t.get(row, "sbr_clamped") == "true";
    r.verticality = detail::to_double(t.get(row, "verticality"));
    r.pass_distance = detail::to_double(t.get(row, "pass_distance"));
    r.valid = t.get(row, "valid") == "true";
    r.error = t.get(row, "error");
    out.push_back(std::move(r));
  }
  return out;
}

// ---- chains ---------------------------------------------------------------------

inline nlohmann::json to_json(const ChainRecord& c) {
  return nlohmann::json{
      {"kind", to_string(c.kind)},
      {"match_id", c.match_id},
      {"possession_id", c.possession_id},
      {"team_id", c.team_id},
      {"lbp_event_ids", c.lbp_event_ids},
      {"initiator_id", c.initiator_id},
      {"connector_id", c.connector_id ? nlohmann::json(*c.connector_id) : nlohmann::json(nullptr)},
      {"finisher_id", c.finisher_id},
      {"shot_event_id", c.shot_event_id},
      {"outcome", to_string(c.outcome)},
      {"xg", c.xg ? nlohmann::json(*c.xg) : nlohmann::json(nullptr)},
      {"cumulative_sbr", c.cumulative_sbr},
      {"verticality", c.verticality},
      {"flagged", c.flagged}};
}

inline ChainRecord chain_from_json(const nlohmann::json& j) {
  ChainRecord c;
  auto kind = parse_chain_kind(j.at("kind").get<std::string>());
  auto outcome = parse_chain_outcome(j.at("outcome").get<std::string>());
  if (!kind || !outcome) throw SchemaError("chains: bad kind or outcome");
  c.kind = *kind;
  c.outcome = *outcome;
  c.match_id = j.at("match_id").get<std::string>();
  c.possession_id = j.at("possession_id").get<int>();
  c.team_id = j.at("team_id").get<std::string>();
  c.lbp_event_ids = j.at("lbp_event_ids").get<std::vector<std::string>>();
  c.initiator_id = j.at("initiator_id").get<std::string>();
  if (!j.at("connector_id").is_null()) c.connector_id = j.at("connector_id").get<std::string>();
  c.finisher_id = j.at("finisher_id").get<std::string>();
  c.shot_event_id = j.at("shot_event_id").get<std::string>();
  if (!j.at("xg").is_null()) c.xg = j.at("xg").get<double>();
  c.cumulative_sbr = j.at("cumulative_sbr").get<double>();
  c.verticality = j.at("verticality").get<double>();
  c.flagged = j.at("flagged").get<bool>();
  return c;
}

inline std::string chains_csv(const std::vector<ChainRecord>& chains) {
  CsvWriter w({"kind", "match_id", "possession_id", "team_id", "lbp_event_ids", "initiator_id",
               "connector_id", "finisher_id", "shot_event_id", "outcome", "xg", "cumulative_sbr",
               "verticality", "flagged"});
  for (const auto& c : chains)
    w.row({std::string(to_string(c.kind)), c.match_id, std::to_string(c.possession_id), c.team_id,
           detail::join(c.lbp_event_ids), c.initiator_id, c.connector_id.value_or(""), c.finisher_id,
           c.shot_event_id, std::string(to_string(c.outcome)), detail::opt_float(c.xg),
           format_float(c.cumulative_sbr), format_float(c.verticality), detail::b2s(c.flagged)});
  return w.str();
}

inline std::vector<ChainRecord> chains_from_csv(const fs::path& path) {
  const auto t = detail::CsvTable::load(path);
  std::vector<ChainRecord> out;
  for (const auto& row : t.rows) {
    ChainRecord c;
    auto kind = parse_chain_kind(t.get(row, "kind"));
    auto outcome = parse_chain_outcome(t.get(row, "outcome"));
    if (!kind || !outcome) throw SchemaError(path.string() + ": bad kind or outcome");
    c.kind = *kind;
    c.outcome = *outcome;
    c.match_id = t.get(row, "match_id");
    c.possession_id = std::stoi(t.get(row, "possession_id"));
    c.team_id = t.get(row, "team_id");
    c.lbp_event_ids = detail::split(t.get(row, "lbp_event_ids"));
    c.initiator_id = t.get(row, "initiator_id");
    if (!t.get(row, "connector_id").empty()) c.connector_id = t.get(row, "connector_id");
    c.finisher_id = t.get(row, "finisher_id");
    c.shot_event_id = t.get(row, "shot_event_id");
    c.xg = detail::to_opt_double(t.get(row, "xg"));
    c.cumulative_sbr = detail::to_double(t.get(row, "cumulative_sbr"));
    c.verticality = detail::to_double(t.get(row, "verticality"));
    c.flagged = t.get(row, "flagged") == "true";
    out.push_back(std::move(c));
  }
  return out;
}

// ---- per-match support table: minutes on the pitch ----------------------------

struct EntityMinutes {
  EntityKind kind = EntityKind::Player;
  std::string id;
  std::string team_id;
  std::string name;
  double minutes = 0.0;
};

inline std::vector<EntityMinutes> minutes_played(const NormalizedMatch& m) {
  std::vector<std::size_t> frames_present(m.player_ids.size(), 0);
  std::vector<std::string> team_of(m.player_ids.size());
  for (const auto& f : m.frames)
    for (const auto& p : f.players) {
      ++frames_present[p.player];
      team_of[p.player] = m.team_ids[p.team];
    }
  const double per_frame_min = 1.0 / (m.meta.frame_rate_hz * 60.0);
  std::vector<EntityMinutes> out;
  for (const auto& team : m.team_ids)
    out.push_back({EntityKind::Team, team, team, "", static_cast<double>(m.frames.size()) * per_frame_min});
  std::vector<std::size_t> order(m.player_ids.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return m.player_ids[a] < m.player_ids[b]; });
  for (std::size_t i : order) {
    const RosterEntry* e = m.roster.find(m.player_ids[i]);
    out.push_back({EntityKind::Player, m.player_ids[i], team_of[i], e ? e->name : "",
                   static_cast<double>(frames_present[i]) * per_frame_min});
  }
  return out;
}

inline std::string minutes_csv(const std::vector<EntityMinutes>& rows) {
  CsvWriter w({"kind", "id", "team_id", "name", "minutes_played"});
  for (const auto& r : rows)
    w.row({r.kind == EntityKind::Team ? "team" : "player", r.id, r.team_id, r.name, format_float(r.minutes)});
  return w.str();
}

inline std::vector<EntityMinutes> minutes_from_csv(const fs::path& path) {
  const auto t = detail::CsvTable::load(path);
  std::vector<EntityMinutes> out;
  for (const auto& row : t.rows)
    out.push_back({t.get(row, "kind") == "team" ? EntityKind::Team : EntityKind::Player, t.get(row, "id"),
                   t.get(row, "team_id"), t.get(row, "name"), detail::to_double(t.get(row, "minutes_played"))});
  return out;
}

// ---- aggregate tables -------------------------------------------------------------

inline std::vector<std::string> stats_header(bool per90) {
  std::vector<std::string> h{"entity_kind",      "id",           "team_id",       "name",
                             "lbp_count",        "lines_broken_total", "cumulative_sbr", "positive_sbr_pct",
                             "avg_pass_distance", "avg_verticality", "lbpch1_count", "lbpch2_count",
                             "flagged_count"};
  if (per90)
    for (const char* c : {"minutes_played", "lbp_per90", "lines_broken_per90", "lbpch1_per90", "lbpch2_per90"})
      h.push_back(c);
  return h;
}

inline std::string stats_csv(const StatsTable& table, const std::map<std::string, std::string>& names,
                             bool per90) {
  CsvWriter w(stats_header(per90));
  for (const auto& s : table) {
    auto name = names.find(s.id);
    std::vector<std::string> row{s.kind == EntityKind::Team ? "team" : "player",
                                 s.id,
                                 s.team_id,
                                 name != names.end() ? name->second : "",
                                 std::to_string(s.lbp_count),
                                 std::to_string(s.lines_broken_total),
                                 format_float(s.cumulative_sbr),
                                 format_float(s.positive_sbr_pct),
                                 format_float(s.avg_pass_distance),
                                 format_float(s.avg_verticality),
                                 std::to_string(s.lbpch1_count),
                                 std::to_string(s.lbpch2_count),
                                 std::to_string(s.flagged_count)};
    if (per90)
      for (const auto& v : {s.minutes_played, s.lbp_per90, s.lines_broken_per90, s.lbpch1_per90, s.lbpch2_per90})
        row.push_back(detail::opt_float(v));
    w.row(row);
  }
  return w.str();
}

inline nlohmann::json to_json(const EntityStats& s) {
  nlohmann::json j{{"entity_kind", s.kind == EntityKind::Team ? "team" : "player"},
                   {"id", s.id},
                   {"team_id", s.team_id},
                   {"lbp_count", s.lbp_count},
                   {"lines_broken_total", s.lines_broken_total},
                   {"cumulative_sbr", s.cumulative_sbr},
                   {"positive_sbr_pct", s.positive_sbr_pct},
                   {"avg_pass_distance", s.avg_pass_distance},
                   {"avg_verticality", s.avg_verticality},
                   {"lbpch1_count", s.lbpch1_count},
                   {"lbpch2_count", s.lbpch2_count},
                   {"flagged_count", s.flagged_count}};
  if (s.minutes_played) {
    j["minutes_played"] = *s.minutes_played;
    j["lbp_per90"] = *s.lbp_per90;
    j["lines_broken_per90"] = *s.lines_broken_per90;
    j["lbpch1_per90"] = *s.lbpch1_per90;
    j["lbpch2_per90"] = *s.lbpch2_per90;
  }
  return j;
}

}  // namespace lbp
