#pragma once

// Possession segmentation and line-break chains:
//   LBPCh1  an LBP that directly precedes a shot (the receiver shoots next, or
//           the LBP is the last pass before the shot);
//   LBPCh2  two LBPs where the first receiver's very next action is the
//           second LBP, concluded by a shot within the lookahead window.
// A shot is credited to the longest chain that reaches it.

#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "lbp/detection.hpp"
#include "lbp/match.hpp"

namespace lbp {

struct ChainConfig {
  int conclusion_lookahead_events = 1;

  friend bool operator==(const ChainConfig&, const ChainConfig&) = default;
};

struct Possession {
  int possession_id = 0;
  std::string team_id;
  int period = 1;
  std::vector<std::size_t> event_indices;  // into NormalizedMatch::events
  std::vector<std::string> event_ids;
  FrameId start_frame = 0;
  FrameId end_frame = 0;
  bool open_play = true;
};

enum class ChainKind { LBPCh1, LBPCh2 };
enum class ChainOutcome { Goal, ShotOnTarget, ShotOffTarget, Disallowed };

inline std::string_view to_string(ChainKind k) { return k == ChainKind::LBPCh1 ? "LBPCh1" : "LBPCh2"; }

inline std::string_view to_string(ChainOutcome o) {
  switch (o) {
    case ChainOutcome::Goal: return "goal";
    case ChainOutcome::ShotOnTarget: return "shot_on_target";
    case ChainOutcome::ShotOffTarget: return "shot_off_target";
    case ChainOutcome::Disallowed: return "disallowed";
  }
  return "shot_off_target";
}

inline std::optional<ChainKind> parse_chain_kind(std::string_view s) {
  if (s == "LBPCh1") return ChainKind::LBPCh1;
  if (s == "LBPCh2") return ChainKind::LBPCh2;
  return std::nullopt;
}

inline std::optional<ChainOutcome> parse_chain_outcome(std::string_view s) {
  for (ChainOutcome o : {ChainOutcome::Goal, ChainOutcome::ShotOnTarget, ChainOutcome::ShotOffTarget,
                         ChainOutcome::Disallowed})
    if (to_string(o) == s) return o;
  return std::nullopt;
}

inline ChainOutcome chain_outcome_of_shot(const MatchEvent& shot) {
  switch (shot.outcome) {
    case EventOutcome::Goal: return ChainOutcome::Goal;
    case EventOutcome::Disallowed: return ChainOutcome::Disallowed;
    case EventOutcome::Saved:
    case EventOutcome::Complete: return ChainOutcome::ShotOnTarget;
    default: return ChainOutcome::ShotOffTarget;
  }
}

struct ChainRecord {
  ChainKind kind = ChainKind::LBPCh1;
  std::string match_id;
  int possession_id = 0;
  std::string team_id;
  std::vector<std::string> lbp_event_ids;
  std::string initiator_id;
  std::optional<std::string> connector_id;
  std::string finisher_id;
  std::string shot_event_id;
  ChainOutcome outcome = ChainOutcome::ShotOffTarget;
  std::optional<double> xg;
  double cumulative_sbr = 0.0;
  double verticality = 0.0;  // mean over member LBPs
  bool flagged = false;      // some member SBR was clamped

  friend bool operator==(const ChainRecord&, const ChainRecord&) = default;
};

/// Maximal same-team runs of on-ball events, broken by an opponent event, a
/// restart (which opens the next possession) or a period change. Events
/// without a team are not on-ball and are skipped.
inline std::vector<Possession> segment_possessions(const NormalizedMatch& match) {
  std::vector<Possession> out;
  for (std::size_t i = 0; i < match.events.size(); ++i) {
    const MatchEvent& e = match.events[i];
    if (e.team_id.empty()) continue;
    const int period = match.period_of(e.frame_id);
    const bool restart = is_set_piece(e);
    if (out.empty() || restart || out.back().team_id != e.team_id || out.back().period != period) {
      Possession p;
      p.possession_id = static_cast<int>(out.size());
      p.team_id = e.team_id;
      p.period = period;
      p.start_frame = e.frame_id;
      p.open_play = !restart;
      out.push_back(std::move(p));
    }
    Possession& cur = out.back();
    cur.event_indices.push_back(i);
    cur.event_ids.push_back(e.event_id);
    cur.end_frame = e.frame_id;
  }
  return out;
}

namespace detail {

using RecordIndex = std::unordered_map<std::string, const LbpRecord*>;

inline RecordIndex index_records(std::span<const LbpRecord> records) {
  RecordIndex idx;
  for (const auto& r : records) idx.emplace(r.pass_event_id, &r);
  return idx;
}

inline const LbpRecord* lbp_at(const RecordIndex& idx, const MatchEvent& e) {
  if (!is_completed_pass(e)) return nullptr;
  auto it = idx.find(e.event_id);
  return it != idx.end() && it->second->valid && it->second->is_lbp ? it->second : nullptr;
}

/// Possession events that are actions (receptions are not).
inline std::vector<std::size_t> possession_actions(const Possession& p,
                                                   std::span<const MatchEvent> events) {
  std::vector<std::size_t> out;
  for (std::size_t i : p.event_indices)
    if (events[i].type != EventType::Reception) out.push_back(i);
  return out;
}

inline void fill_chain_metrics(ChainRecord& chain, const RecordIndex& idx) {
  chain.cumulative_sbr = 0.0;
  double vert = 0.0;
  for (const auto& id : chain.lbp_event_ids) {
    const LbpRecord* r = idx.at(id);
    chain.cumulative_sbr += r->space.sbr;
    chain.flagged = chain.flagged || r->space.clamped;
    vert += r->verticality;
  }
  chain.verticality = vert / static_cast<double>(chain.lbp_event_ids.size());
}

inline void fill_shot(ChainRecord& chain, const MatchEvent& shot) {
  chain.finisher_id = shot.player_id;
  chain.shot_event_id = shot.event_id;
  chain.outcome = chain_outcome_of_shot(shot);
  chain.xg = shot.xg;
}

}  // namespace detail

/// Sum of the member LBPs' SBR values.
inline double cumulative_sbr(const ChainRecord& chain, std::span<const LbpRecord> records) {
  double total = 0.0;
  for (const auto& id : chain.lbp_event_ids)
    for (const auto& r : records)
      if (r.pass_event_id == id) {
        total += r.space.sbr;
        break;
      }
  return total;
}

inline std::vector<ChainRecord> detect_lbpch1(std::span<const Possession> possessions,
                                              std::span<const LbpRecord> records,
                                              std::span<const MatchEvent> events) {
  const auto idx = detail::index_records(records);
  std::vector<ChainRecord> out;
  for (const Possession& pos : possessions) {
    const auto actions = detail::possession_actions(pos, events);
    for (std::size_t a = 0; a < actions.size(); ++a) {
      const LbpRecord* lbp = detail::lbp_at(idx, events[actions[a]]);
      if (!lbp) continue;

      const MatchEvent* shot = nullptr;
      // Receiver shoots as the next action.
      if (a + 1 < actions.size()) {
        const MatchEvent& next = events[actions[a + 1]];
        if (next.type == EventType::Shot && next.player_id == lbp->receiver_id) shot = &next;
      }
      // Last pass before a shot (assist).
      if (!shot) {
        for (std::size_t b = a + 1; b < actions.size(); ++b) {
          const MatchEvent& ev = events[actions[b]];
          if (ev.type == EventType::Pass) break;
          if (ev.type == EventType::Shot) {
            shot = &ev;
            break;
          }
        }
      }
      if (!shot) continue;

      ChainRecord chain;
      chain.kind = ChainKind::LBPCh1;
      chain.match_id = lbp->match_id;
      chain.possession_id = pos.possession_id;
      chain.team_id = pos.team_id;
      chain.lbp_event_ids = {lbp->pass_event_id};
      chain.initiator_id = lbp->passer_id;
      detail::fill_shot(chain, *shot);
      detail::fill_chain_metrics(chain, idx);
      out.push_back(std::move(chain));
    }
  }
  return out;
}

inline std::vector<ChainRecord> detect_lbpch2(std::span<const Possession> possessions,
                                              std::span<const LbpRecord> records,
                                              std::span<const MatchEvent> events,
                                              const ChainConfig& config = {}) {
  const auto idx = detail::index_records(records);
  std::vector<ChainRecord> out;
  for (const Possession& pos : possessions) {
    const auto actions = detail::possession_actions(pos, events);
    for (std::size_t a = 0; a + 1 < actions.size(); ++a) {
      const LbpRecord* first = detail::lbp_at(idx, events[actions[a]]);
      const LbpRecord* second = first ? detail::lbp_at(idx, events[actions[a + 1]]) : nullptr;
      if (!second || second->passer_id != first->receiver_id) continue;

      const MatchEvent* shot = nullptr;
      bool pass_between = false;
      const std::size_t end =
          std::min(actions.size(), a + 2 + static_cast<std::size_t>(std::max(0, config.conclusion_lookahead_events)));
      for (std::size_t b = a + 2; b < end; ++b) {
        const MatchEvent& ev = events[actions[b]];
        if (ev.type == EventType::Shot) {
          if (ev.player_id == second->receiver_id || !pass_between) shot = &ev;
          break;
        }
        if (ev.type == EventType::Pass) pass_between = true;
      }
      if (!shot) continue;

      ChainRecord chain;
      chain.kind = ChainKind::LBPCh2;
      chain.match_id = first->match_id;
      chain.possession_id = pos.possession_id;
      chain.team_id = pos.team_id;
      chain.lbp_event_ids = {first->pass_event_id, second->pass_event_id};
      chain.initiator_id = first->passer_id;
      chain.connector_id = first->receiver_id;
      detail::fill_shot(chain, *shot);
      detail::fill_chain_metrics(chain, idx);
      out.push_back(std::move(chain));
    }
  }
  return out;
}

/// LBPCh2 chains followed by the LBPCh1 chains whose shot is not already
/// credited to an LBPCh2.
inline std::vector<ChainRecord> detect_chains(const NormalizedMatch& match,
                                              std::span<const LbpRecord> records,
                                              const ChainConfig& config = {}) {
  const auto possessions = segment_possessions(match);
  auto twos = detect_lbpch2(possessions, records, match.events, config);
  auto ones = detect_lbpch1(possessions, records, match.events);
  std::vector<ChainRecord> out = std::move(twos);
  for (auto& c : ones) {
    const bool claimed = std::any_of(out.begin(), out.end(), [&](const ChainRecord& o) {
      return o.kind == ChainKind::LBPCh2 && o.shot_event_id == c.shot_event_id;
    });
    if (!claimed) out.push_back(std::move(c));
  }
  std::stable_sort(out.begin(), out.end(), [](const ChainRecord& a, const ChainRecord& b) {
    if (a.possession_id != b.possession_id) return a.possession_id < b.possession_id;
    return a.kind < b.kind;
  });
  return out;
}

}  // namespace lbp
