#pragma once

// Team and player roll-ups of LBP and chain records.

#include <algorithm>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lbp/chains.hpp"
#include "lbp/detection.hpp"

namespace lbp {

enum class EntityKind { Team, Player };

struct EntityStats {
  EntityKind kind = EntityKind::Team;
  std::string id;
  std::string team_id;  // owning team for players, == id for teams
  int lbp_count = 0;
  int lines_broken_total = 0;
  double cumulative_sbr = 0.0;
  double positive_sbr_pct = 0.0;
  double avg_pass_distance = 0.0;
  double avg_verticality = 0.0;
  int lbpch1_count = 0;
  int lbpch2_count = 0;
  int flagged_count = 0;
  std::optional<double> minutes_played;
  std::optional<double> lbp_per90;
  std::optional<double> lines_broken_per90;
  std::optional<double> lbpch1_per90;
  std::optional<double> lbpch2_per90;

  friend bool operator==(const EntityStats&, const EntityStats&) = default;
};

using StatsTable = std::vector<EntityStats>;

struct AggregateOptions {
  bool per90 = false;
  /// Minutes on the pitch, summed over matches.
  std::map<std::string, double> team_minutes;
  std::map<std::string, double> player_minutes;
};

struct AggregateResult {
  StatsTable teams;
  StatsTable players;
};

namespace detail {

struct Accumulator {
  std::string team_id;
  int lbp = 0;
  int lines = 0;
  int positive = 0;
  int flagged = 0;
  double sbr = 0.0;
  double dist = 0.0;
  double vert = 0.0;
  int ch1 = 0;
  int ch2 = 0;
};

inline EntityStats finish(EntityKind kind, const std::string& id, const Accumulator& acc,
                          const AggregateOptions& opts) {
  EntityStats s;
  s.kind = kind;
  s.id = id;
  s.team_id = acc.team_id;
  s.lbp_count = acc.lbp;
  s.lines_broken_total = acc.lines;
  s.cumulative_sbr = acc.sbr;
  s.flagged_count = acc.flagged;
  s.lbpch1_count = acc.ch1;
  s.lbpch2_count = acc.ch2;
  if (acc.lbp > 0) {
    s.positive_sbr_pct = 100.0 * acc.positive / acc.lbp;
    s.avg_pass_distance = acc.dist / acc.lbp;
    s.avg_verticality = acc.vert / acc.lbp;
  }
  if (opts.per90) {
    const auto& minutes = kind == EntityKind::Team ? opts.team_minutes : opts.player_minutes;
    auto it = minutes.find(id);
    if (it != minutes.end() && it->second > 0.0) {
      const double f = 90.0 / it->second;
      s.minutes_played = it->second;
      s.lbp_per90 = acc.lbp * f;
      s.lines_broken_per90 = acc.lines * f;
      s.lbpch1_per90 = acc.ch1 * f;
      s.lbpch2_per90 = acc.ch2 * f;
    }
  }
  return s;
}

inline void sort_table(StatsTable& t) {
  std::sort(t.begin(), t.end(), [](const EntityStats& a, const EntityStats& b) {
    if (a.lbp_count != b.lbp_count) return a.lbp_count > b.lbp_count;
    return a.id < b.id;
  });
}

}  // namespace detail

/// One row per team and per player with at least one LBP. Records are summed
/// in (match, event) order so the result does not depend on input order.
/// Player LBPCh2 counts credit both passers of the chain.
inline AggregateResult aggregate(std::span<const LbpRecord> records, std::span<const ChainRecord> chains,
                                 const AggregateOptions& opts = {}) {
  std::vector<const LbpRecord*> lbps;
  for (const auto& r : records)
    if (r.valid && r.is_lbp) lbps.push_back(&r);
  std::sort(lbps.begin(), lbps.end(), [](const LbpRecord* a, const LbpRecord* b) {
    if (a->match_id != b->match_id) return a->match_id < b->match_id;
    return a->pass_event_id < b->pass_event_id;
  });

  std::map<std::string, detail::Accumulator> teams, players;
  for (const LbpRecord* r : lbps) {
    for (auto* acc : {&teams[r->team_id], &players[r->passer_id]}) {
      acc->team_id = r->team_id;
      ++acc->lbp;
      acc->lines += r->lines_crossed;
      acc->sbr += r->space.sbr;
      acc->positive += r->space.sbr > 0.0 ? 1 : 0;
      acc->flagged += r->space.clamped ? 1 : 0;
      acc->dist += r->pass_distance;
      acc->vert += r->verticality;
    }
  }

  // Chains credit the passers who made the member LBPs.
  std::map<std::pair<std::string, std::string>, const LbpRecord*> by_event;
  for (const LbpRecord* r : lbps) by_event[{r->match_id, r->pass_event_id}] = r;
  for (const auto& c : chains) {
    auto team = teams.find(c.team_id);
    if (team == teams.end()) continue;
    (c.kind == ChainKind::LBPCh1 ? team->second.ch1 : team->second.ch2)++;
    std::vector<std::string> credited;
    for (const auto& ev : c.lbp_event_ids) {
      auto it = by_event.find({c.match_id, ev});
      if (it == by_event.end()) continue;
      const std::string& passer = it->second->passer_id;
      if (std::find(credited.begin(), credited.end(), passer) != credited.end()) continue;
      credited.push_back(passer);
      auto& acc = players[passer];
      (c.kind == ChainKind::LBPCh1 ? acc.ch1 : acc.ch2)++;
    }
  }

  AggregateResult out;
  for (const auto& [id, acc] : teams) out.teams.push_back(detail::finish(EntityKind::Team, id, acc, opts));
  for (const auto& [id, acc] : players)
    out.players.push_back(detail::finish(EntityKind::Player, id, acc, opts));
  detail::sort_table(out.teams);
  detail::sort_table(out.players);
  return out;
}

inline const std::vector<std::string>& stats_metric_names() {
  static const std::vector<std::string> names{
      "lbp_count",       "lines_broken_total", "cumulative_sbr", "positive_sbr_pct",
      "avg_pass_distance", "avg_verticality",  "lbpch1_count",   "lbpch2_count",
      "flagged_count"};
  return names;
}

inline double metric_value(const EntityStats& s, const std::string& metric) {
  if (metric == "lbp_count") return s.lbp_count;
  if (metric == "lines_broken_total") return s.lines_broken_total;
  if (metric == "cumulative_sbr") return s.cumulative_sbr;
  if (metric == "positive_sbr_pct") return s.positive_sbr_pct;
  if (metric == "avg_pass_distance") return s.avg_pass_distance;
  if (metric == "avg_verticality") return s.avg_verticality;
  if (metric == "lbpch1_count") return s.lbpch1_count;
  if (metric == "lbpch2_count") return s.lbpch2_count;
  if (metric == "flagged_count") return s.flagged_count;
  throw UnknownMetricError("unknown metric '" + metric + "'");
}

/// First n rows by descending metric, ties by id.
inline StatsTable top_n(const StatsTable& table, const std::string& metric, std::size_t n) {
  metric_value(EntityStats{}, metric);  // validates the name
  StatsTable sorted = table;
  std::sort(sorted.begin(), sorted.end(), [&](const EntityStats& a, const EntityStats& b) {
    const double va = metric_value(a, metric);
    const double vb = metric_value(b, metric);
    if (va != vb) return va > vb;
    return a.id < b.id;
  });
  if (sorted.size() > n) sorted.resize(n);
  return sorted;
}

}  // namespace lbp
