#pragma once

// Batch driver behind the CLI: detect over match directories, report over
// detect outputs, validate inputs, and the defaults self-test.

#include <atomic>
#include <filesystem>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "lbp/aggregation.hpp"
#include "lbp/chains.hpp"
#include "lbp/config.hpp"
#include "lbp/detection.hpp"
#include "lbp/ingestion.hpp"
#include "lbp/report.hpp"
#include "lbp/validate.hpp"

namespace lbp {

inline constexpr int kExitOk = 0;
inline constexpr int kExitPartialFailure = 1;
inline constexpr int kExitInvalidInvocation = 2;

inline constexpr std::size_t kPlotTopPlayers = 50;

struct MatchResult {
  std::string match_id;
  std::vector<LbpRecord> records;
  std::vector<ChainRecord> chains;
  std::vector<EntityMinutes> minutes;
  std::vector<std::string> warnings;

  std::size_t lbp_count() const {
    std::size_t n = 0;
    for (const auto& r : records) n += r.valid && r.is_lbp ? 1 : 0;
    return n;
  }
};

/// smooth -> detect -> chains for one loaded match.
inline MatchResult process_match(const NormalizedMatch& match, const RunConfig& config,
                                 std::size_t jobs = 1) {
  MatchResult out;
  out.match_id = match.match_id;
  const NormalizedMatch smoothed = smooth_positions(match, config.smoothing_window);
  out.records = detect_all(smoothed, config.detect, jobs);
  out.chains = detect_chains(smoothed, out.records, config.chain);
  out.minutes = minutes_played(match);
  return out;
}

inline void write_match_outputs(const MatchResult& result, const fs::path& dir, const RunConfig& config) {
  fs::create_directories(dir);
  if (config.writes_csv()) {
    detail::save_text(dir / "lbp_records.csv", lbp_records_csv(result.records));
    detail::save_text(dir / "chains.csv", chains_csv(result.chains));
  }
  if (config.writes_json()) {
    nlohmann::json records = nlohmann::json::array();
    for (const auto& r : result.records) records.push_back(to_json(r));
    detail::save_text(dir / "lbp_records.json", records.dump(1) + "\n");
    nlohmann::json chains = nlohmann::json::array();
    for (const auto& c : result.chains) chains.push_back(to_json(c));
    detail::save_text(dir / "chains.json", chains.dump(1) + "\n");
  }
  detail::save_text(dir / "minutes.csv", minutes_csv(result.minutes));
}

/// Subdirectories holding match input, sorted by name. A directory that
/// itself holds match files is treated as a single match.
inline std::vector<fs::path> discover_match_dirs(const fs::path& input_dir) {
  if (!fs::is_directory(input_dir)) throw MissingInputError("input directory not found: " + input_dir.string());
  auto is_match = [](const fs::path& d) {
    return fs::exists(d / "events.json") || fs::exists(d / "tracking.jsonl") || fs::exists(d / "meta.json");
  };
  if (is_match(input_dir)) return {input_dir};
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(input_dir))
    if (entry.is_directory() && is_match(entry.path())) out.push_back(entry.path());
  std::sort(out.begin(), out.end());
  return out;
}

struct MatchOutcome {
  std::string match_id;
  bool ok = false;
  std::string error_kind;
  std::string error_message;
  std::size_t n_events = 0;
  std::size_t n_passes = 0;
  std::size_t n_invalid = 0;
  std::size_t n_lbps = 0;
  std::size_t n_lbpch1 = 0;
  std::size_t n_lbpch2 = 0;
  std::vector<std::string> warnings;
};

inline nlohmann::json to_json(const MatchOutcome& o) {
  if (!o.ok)
    return nlohmann::json{{"match_id", o.match_id}, {"status", "error"}, {"kind", o.error_kind},
                          {"message", o.error_message}};
  return nlohmann::json{{"match_id", o.match_id},   {"status", "ok"},          {"events", o.n_events},
                        {"completed_passes", o.n_passes}, {"invalid_passes", o.n_invalid},
                        {"lbps", o.n_lbps},         {"lbpch1", o.n_lbpch1},    {"lbpch2", o.n_lbpch2},
                        {"warnings", o.warnings}};
}

/// Runs detection over every match under `input_dir`. A failing match is
/// recorded in summary.json and does not stop the others. Returns 0 when
/// every match succeeded, 1 otherwise.
inline int cmd_detect(const fs::path& input_dir, const fs::path& out_dir, const RunConfig& config,
                      std::ostream* log = nullptr) {
  validate(config);
  const auto dirs = discover_match_dirs(input_dir);
  fs::create_directories(out_dir);

  std::vector<MatchOutcome> outcomes(dirs.size());
  const std::size_t workers = std::max<std::size_t>(1, std::min(config.worker_count(), dirs.size()));
  // With a single match the pool size goes to per-pass parallelism instead.
  const std::size_t inner_jobs = dirs.size() == 1 ? config.worker_count() : 1;

  auto run_one = [&](std::size_t i) {
    MatchOutcome& o = outcomes[i];
    o.match_id = dirs[i].filename().string();
    try {
      LoadDiagnostics diag;
      NormalizedMatch m = load_match_dir(dirs[i], &diag);
      o.match_id = m.match_id;
      MatchResult r = process_match(m, config, inner_jobs);
      write_match_outputs(r, out_dir / m.match_id, config);
      o.ok = true;
      o.n_events = m.events.size();
      o.n_passes = r.records.size();
      for (const auto& rec : r.records) o.n_invalid += rec.valid ? 0 : 1;
      o.n_lbps = r.lbp_count();
      for (const auto& c : r.chains) (c.kind == ChainKind::LBPCh1 ? o.n_lbpch1 : o.n_lbpch2)++;
      o.warnings = diag.warnings;
    } catch (const Error& e) {
      o.ok = false;
      o.error_kind = e.kind();
      o.error_message = e.what();
    } catch (const std::exception& e) {
      o.ok = false;
      o.error_kind = "InternalError";
      o.error_message = e.what();
    }
  };

  if (workers <= 1) {
    for (std::size_t i = 0; i < dirs.size(); ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < dirs.size(); i = next++) run_one(i);
      });
    pool.clear();
  }

  std::sort(outcomes.begin(), outcomes.end(),
            [](const MatchOutcome& a, const MatchOutcome& b) { return a.match_id < b.match_id; });
  nlohmann::json summary{{"matches", nlohmann::json::array()}, {"errors", nlohmann::json::array()}};
  std::size_t failed = 0;
  for (const auto& o : outcomes) {
    summary[o.ok ? "matches" : "errors"].push_back(to_json(o));
    failed += o.ok ? 0 : 1;
    if (log) {
      if (o.ok)
        *log << o.match_id << ": " << o.n_passes << " completed passes, " << o.n_lbps << " LBPs, "
             << o.n_lbpch1 << " LBPCh1, " << o.n_lbpch2 << " LBPCh2\n";
      else
        *log << o.match_id << ": " << o.error_kind << ": " << o.error_message << "\n";
    }
  }
  summary["processed"] = outcomes.size() - failed;
  summary["failed"] = failed;
  detail::save_text(out_dir / "summary.json", summary.dump(2) + "\n");
  return failed == 0 ? kExitOk : kExitPartialFailure;
}

// ---- report ---------------------------------------------------------------------

struct LoadedOutputs {
  std::vector<LbpRecord> records;
  std::vector<ChainRecord> chains;
  std::vector<EntityMinutes> minutes;
};

/// Reads detect outputs, preferring JSON and falling back to CSV.
inline LoadedOutputs load_detect_outputs(const fs::path& records_dir) {
  if (!fs::is_directory(records_dir))
    throw MissingInputError("records directory not found: " + records_dir.string());
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(records_dir))
    if (entry.is_directory() &&
        (fs::exists(entry.path() / "lbp_records.json") || fs::exists(entry.path() / "lbp_records.csv")))
      dirs.push_back(entry.path());
  std::sort(dirs.begin(), dirs.end());
  if (dirs.empty() && !fs::exists(records_dir / "summary.json"))
    throw MissingInputError("no detect outputs under " + records_dir.string());

  LoadedOutputs out;
  for (const auto& d : dirs) {
    if (fs::exists(d / "lbp_records.json")) {
      for (const auto& j : nlohmann::json::parse(detail::slurp(d / "lbp_records.json")))
        out.records.push_back(lbp_record_from_json(j));
    } else {
      auto rs = lbp_records_from_csv(d / "lbp_records.csv");
      out.records.insert(out.records.end(), rs.begin(), rs.end());
    }
    if (fs::exists(d / "chains.json")) {
      for (const auto& j : nlohmann::json::parse(detail::slurp(d / "chains.json")))
        out.chains.push_back(chain_from_json(j));
    } else if (fs::exists(d / "chains.csv")) {
      auto cs = chains_from_csv(d / "chains.csv");
      out.chains.insert(out.chains.end(), cs.begin(), cs.end());
    } else {
      throw MissingInputError("chains output missing in " + d.string());
    }
    if (fs::exists(d / "minutes.csv")) {
      auto ms = minutes_from_csv(d / "minutes.csv");
      out.minutes.insert(out.minutes.end(), ms.begin(), ms.end());
    }
  }
  return out;
}

namespace detail {

inline std::string chain_table_csv(const std::vector<const ChainRecord*>& chains,
                                   const std::map<std::string, std::string>& names) {
  auto name_of = [&](const std::string& id) {
    auto it = names.find(id);
    return it == names.end() ? std::string() : it->second;
  };
  CsvWriter w({"initiator", "connector", "finisher", "match", "outcome", "xg", "cumulative_sbr",
               "initiator_name", "connector_name", "finisher_name", "team_id", "possession_id",
               "lbp_event_ids", "shot_event_id", "verticality", "flagged"});
  for (const ChainRecord* c : chains) {
    const std::string connector = c->connector_id.value_or("");
    w.row({c->initiator_id, connector, c->finisher_id, c->match_id, std::string(to_string(c->outcome)),
           opt_float(c->xg), format_float(c->cumulative_sbr), name_of(c->initiator_id),
           connector.empty() ? "" : name_of(connector), name_of(c->finisher_id), c->team_id,
           std::to_string(c->possession_id), join(c->lbp_event_ids), c->shot_event_id,
           format_float(c->verticality), b2s(c->flagged)});
  }
  return w.str();
}

inline nlohmann::json plot_points(const StatsTable& rows, const std::map<std::string, std::string>& names,
                                  const char* x, const char* y, const char* size, const char* color) {
  auto value = [](const EntityStats& s, const std::string& field) -> nlohmann::json {
    if (field == "id") return s.id;
    if (field == "team_id") return s.team_id;
    return metric_value(s, field);
  };
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& s : rows) {
    auto it = names.find(s.id);
    pts.push_back({{"id", s.id},
                   {"name", it == names.end() ? s.id : it->second},
                   {"team_id", s.team_id},
                   {"x", value(s, x)},
                   {"y", value(s, y)},
                   {"size", value(s, size)},
                   {"color", value(s, color)}});
  }
  return {{"encoding", {{"x", x}, {"y", y}, {"size", size}, {"color", color}}}, {"points", pts}};
}

inline StatsTable with_positive(const StatsTable& t, const std::string& metric) {
  StatsTable out;
  for (const auto& s : t)
    if (metric_value(s, metric) > 0) out.push_back(s);
  return top_n(out, metric, out.size());
}

}  // namespace detail

struct ReportTables {
  AggregateResult stats;
  std::vector<const ChainRecord*> lbpch1;
  std::vector<const ChainRecord*> lbpch2;
};

inline nlohmann::json plot_data(const AggregateResult& stats, const std::vector<ChainRecord>& chains,
                                const std::map<std::string, std::string>& names) {
  nlohmann::json j;
  const StatsTable top_players = top_n(stats.players, "lbp_count", kPlotTopPlayers);
  j["lbp_volume"] = {
      {"teams", detail::plot_points(stats.teams, names, "id", "lbp_count", "lines_broken_total", "team_id")},
      {"players", detail::plot_points(top_players, names, "id", "lbp_count", "lines_broken_total", "team_id")}};
  j["sbr_space"] = detail::plot_points(top_players, names, "positive_sbr_pct", "cumulative_sbr",
                                       "avg_pass_distance", "avg_verticality");
  j["lbpch1"] = {
      {"teams", detail::plot_points(detail::with_positive(stats.teams, "lbpch1_count"), names, "id",
                                    "lbpch1_count", "lbp_count", "team_id")},
      {"players", detail::plot_points(detail::with_positive(stats.players, "lbpch1_count"), names, "id",
                                      "lbpch1_count", "lbp_count", "team_id")}};
  nlohmann::json ch2 = nlohmann::json::array();
  for (const auto& c : chains) {
    if (c.kind != ChainKind::LBPCh2) continue;
    ch2.push_back({{"initiator", c.initiator_id},
                   {"connector", c.connector_id.value_or("")},
                   {"finisher", c.finisher_id},
                   {"match", c.match_id},
                   {"team_id", c.team_id},
                   {"outcome", to_string(c.outcome)},
                   {"xg", c.xg ? nlohmann::json(*c.xg) : nlohmann::json(nullptr)},
                   {"cumulative_sbr", c.cumulative_sbr}});
  }
  j["lbpch2"] = {{"chains", ch2}};
  return j;
}

/// Aggregates detect outputs into the report tables under `out_dir`.
inline int cmd_report(const fs::path& records_dir, const fs::path& out_dir, const RunConfig& config,
                      std::ostream* log = nullptr) {
  validate(config);
  LoadedOutputs in = load_detect_outputs(records_dir);

  std::sort(in.chains.begin(), in.chains.end(), [](const ChainRecord& a, const ChainRecord& b) {
    if (a.match_id != b.match_id) return a.match_id < b.match_id;
    if (a.possession_id != b.possession_id) return a.possession_id < b.possession_id;
    if (a.kind != b.kind) return a.kind < b.kind;
    return a.lbp_event_ids < b.lbp_event_ids;
  });

  AggregateOptions opts;
  opts.per90 = config.per90;
  std::map<std::string, std::string> names;
  for (const auto& m : in.minutes) {
    (m.kind == EntityKind::Team ? opts.team_minutes : opts.player_minutes)[m.id] += m.minutes;
    if (!m.name.empty()) names[m.id] = m.name;
  }
  const AggregateResult stats = aggregate(in.records, in.chains, opts);

  fs::create_directories(out_dir);
  detail::save_text(out_dir / "team_stats.csv", stats_csv(stats.teams, names, config.per90));
  detail::save_text(out_dir / "player_stats.csv", stats_csv(stats.players, names, config.per90));
  if (config.writes_json()) {
    for (const auto& [file, table] : {std::pair{"team_stats.json", &stats.teams},
                                      std::pair{"player_stats.json", &stats.players}}) {
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& s : *table) arr.push_back(to_json(s));
      detail::save_text(out_dir / file, arr.dump(1) + "\n");
    }
  }
  std::vector<const ChainRecord*> ch1, ch2;
  for (const auto& c : in.chains) (c.kind == ChainKind::LBPCh1 ? ch1 : ch2).push_back(&c);
  detail::save_text(out_dir / "lbpch1.csv", detail::chain_table_csv(ch1, names));
  detail::save_text(out_dir / "lbpch2.csv", detail::chain_table_csv(ch2, names));
  detail::save_text(out_dir / "plot_data.json", plot_data(stats, in.chains, names).dump(1) + "\n");

  if (log)
    *log << stats.teams.size() << " teams, " << stats.players.size() << " players, " << ch1.size()
         << " LBPCh1, " << ch2.size() << " LBPCh2\n";
  return kExitOk;
}

// ---- validate -------------------------------------------------------------------

/// Lints every match under `input_dir`; 0 iff no errors were found.
inline int cmd_validate(const fs::path& input_dir, std::ostream& out) {
  std::vector<fs::path> dirs;
  try {
    dirs = discover_match_dirs(input_dir);
  } catch (const Error& e) {
    out << input_dir.string() << ": error: " << e.what() << "\n";
    return kExitPartialFailure;
  }
  std::size_t errors = 0;
  for (const auto& d : dirs) {
    const ValidationReport rep = validate_match_dir(d);
    for (const auto& diag : rep.diagnostics) out << d.filename().string() << "/" << diag.to_string() << "\n";
    errors += rep.error_count();
  }
  out << dirs.size() << " match(es), " << errors << " error(s)\n";
  return errors == 0 ? kExitOk : kExitPartialFailure;
}

// ---- selftest ---------------------------------------------------------------------

struct SelfTestCheck {
  std::string name;
  bool ok = false;
};

/// The documented defaults, checked against the module structs and the
/// default config text.
inline std::vector<SelfTestCheck> selftest_checks() {
  const RunConfig def;
  std::vector<SelfTestCheck> out;
  auto check = [&](std::string name, bool ok) { out.push_back({std::move(name), ok}); };
  check("config text parses to defaults", parse_config(kDefaultConfigText, "defaults") == def);
  check("smoothing_window = 7", def.smoothing_window == 7 && kDefaultSmoothingWindow == 7);
  check("shape.exclude_goalkeeper = true", ShapeConfig{}.exclude_goalkeeper);
  check("shape.k_candidates = 2,3,4", ShapeConfig{}.k_candidates == std::vector<int>{2, 3, 4});
  check("shape.min_spread_m = 1.0", ShapeConfig{}.min_spread_m == 1.0);
  check("shape.linkage = ward", ShapeConfig{}.linkage == "ward");
  check("detect.bypass_radius_m = 10.0", DetectConfig{}.bypass_radius_m == 10.0);
  check("detect.min_forward_m = 0.0", DetectConfig{}.min_forward_m == 0.0);
  check("detect.open_play_guard_events = 2", DetectConfig{}.open_play_guard_events == 2);
  check("detect.min_bypassed = 2", kMinBypassedOpponents == 2);
  check("chain.conclusion_lookahead_events = 1", ChainConfig{}.conclusion_lookahead_events == 1);
  check("metrics.min_passer_space_m = 0.1", kMinPasserSpaceM == 0.1);
  check("ingestion.sync_tolerance_s = 1.0", kSyncToleranceS == 1.0);
  check("ingestion.bounds_padding_m = 5.0", kBoundsPaddingM == 5.0);
  check("output.format = both", def.format == OutputFormat::Both);
  check("output.per90 = false", !def.per90);
  check("jobs = 0 (logical cores)", def.jobs == 0);
  try {
    validate(def);
    check("defaults validate", true);
  } catch (const Error&) {
    check("defaults validate", false);
  }
  return out;
}

}  // namespace lbp
