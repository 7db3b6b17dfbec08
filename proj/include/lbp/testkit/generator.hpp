#pragma once

// Synthetic matches with known ground truth.
//
// Every action occupies one slot of the timeline. A slot holds a pose for all
// 22 players from four frames before the action until four frames after the
// reception (release + 30), so the default 7-frame smoothing never mixes two
// poses at a frame that detection reads. Poses are built in the attacking
// team's frame (attack = +x) and mapped to pitch coordinates per period.
//
// The defending outfielders stand in three lines of 2, 4 and 4 players,
// 16-20 m apart. Planted passes keep clean margins: crossings sit at least
// 2 m inside a band, bypassed opponents lie within 8 m of the pass and the
// others at least 12 m away.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "lbp/chains.hpp"
#include "lbp/match.hpp"

namespace lbp::testkit {

inline constexpr int kPlayersPerTeam = 11;
inline constexpr FrameId kReceptionOffsetFrames = 30;
inline constexpr FrameId kHoldBeforeFrames = 4;
inline constexpr FrameId kHoldAfterFrames = 34;
inline constexpr FrameId kMinSlotFrames = 45;
inline constexpr double kMaxNoiseSigmaM = 0.3;

struct PlantedLbpSpec {
  int lines_to_cross = 1;
  int bypass_count = 2;
  double forward_margin_m = 5.0;
};

struct PlantedChainSpec {
  ChainKind kind = ChainKind::LBPCh1;
  ChainOutcome outcome = ChainOutcome::ShotOnTarget;
  std::optional<double> xg;
};

struct SyntheticPlan {
  std::uint64_t seed = 1;
  int n_passes = 40;  // minimum number of pass events
  std::vector<PlantedLbpSpec> planted_lbp_specs;
  std::vector<PlantedChainSpec> planted_chain_specs;
  double noise_sigma_m = 0.1;
  int n_decoys = 0;
  double duration_s = 600.0;
  std::string match_id = "synthetic";
  std::array<std::string, 2> teams{"home", "away"};
};

struct ExpectedPass {
  std::string event_id;
  std::string team_id;
  std::string passer_id;
  std::string receiver_id;
  bool is_lbp = false;
  std::optional<int> lines_crossed;
  std::optional<int> bypassed_count;
  std::string role;  // planted, chain, filler, decoy:<kind>
};

struct ExpectedChain {
  ChainKind kind = ChainKind::LBPCh1;
  std::string team_id;
  std::vector<std::string> lbp_event_ids;
  std::string initiator_id;
  std::optional<std::string> connector_id;
  std::string finisher_id;
  std::string shot_event_id;
  ChainOutcome outcome = ChainOutcome::ShotOnTarget;
  std::optional<double> xg;
};

struct GroundTruthLedger {
  std::string match_id;
  std::uint64_t seed = 0;
  std::size_t n_frames = 0;
  std::vector<ExpectedPass> passes;
  std::vector<ExpectedChain> chains;

  std::vector<std::string> lbp_event_ids() const {
    std::vector<std::string> out;
    for (const auto& p : passes)
      if (p.is_lbp) out.push_back(p.event_id);
    return out;
  }

  nlohmann::json to_json() const {
    nlohmann::json j{{"match_id", match_id}, {"seed", seed}, {"n_frames", n_frames}};
    j["passes"] = nlohmann::json::array();
    for (const auto& p : passes) {
      nlohmann::json pj{{"event_id", p.event_id}, {"team_id", p.team_id},   {"passer_id", p.passer_id},
                        {"receiver_id", p.receiver_id}, {"is_lbp", p.is_lbp}, {"role", p.role}};
      pj["lines_crossed"] = p.lines_crossed ? nlohmann::json(*p.lines_crossed) : nlohmann::json(nullptr);
      pj["bypassed_count"] = p.bypassed_count ? nlohmann::json(*p.bypassed_count) : nlohmann::json(nullptr);
      j["passes"].push_back(std::move(pj));
    }
    j["chains"] = nlohmann::json::array();
    for (const auto& c : chains)
      j["chains"].push_back({{"kind", to_string(c.kind)},
                             {"team_id", c.team_id},
                             {"lbp_event_ids", c.lbp_event_ids},
                             {"initiator_id", c.initiator_id},
                             {"connector_id", c.connector_id ? nlohmann::json(*c.connector_id) : nlohmann::json(nullptr)},
                             {"finisher_id", c.finisher_id},
                             {"shot_event_id", c.shot_event_id},
                             {"outcome", to_string(c.outcome)},
                             {"xg", c.xg ? nlohmann::json(*c.xg) : nlohmann::json(nullptr)}});
    return j;
  }
};

enum class DecoyKind { OutsideSpan, Backward, SparseLine, ShortForward, SetPiece, NonDirect };
inline constexpr std::array<DecoyKind, 6> kAllDecoys{DecoyKind::OutsideSpan, DecoyKind::Backward,
                                                     DecoyKind::SparseLine,  DecoyKind::ShortForward,
                                                     DecoyKind::SetPiece,    DecoyKind::NonDirect};

inline std::string_view to_string(DecoyKind k) {
  switch (k) {
    case DecoyKind::OutsideSpan: return "outside_span";
    case DecoyKind::Backward: return "backward";
    case DecoyKind::SparseLine: return "sparse_line";
    case DecoyKind::ShortForward: return "short_forward";
    case DecoyKind::SetPiece: return "set_piece";
    case DecoyKind::NonDirect: return "non_direct";
  }
  return "?";
}

namespace detail {

inline constexpr std::array<int, 3> kLineSizes{2, 4, 4};
inline constexpr std::array<int, 3> kLineFirstPlayer{1, 3, 7};  // outfield indices 1..10

/// Vertical offsets of a line's members from the pass, by line size and the
/// number of members that are bypassed (within 8 m of the pass).
inline std::vector<double> near_offsets(int size, int n_near) {
  if (size == 2) {
    static const std::vector<double> t2[3] = {{-16, 16}, {-4.5, 16}, {-4.5, 4.5}};
    return t2[n_near];
  }
  static const std::vector<double> t4[5] = {
      {-20, -16, 16, 20}, {-20, -16, 4.5, 16}, {-16, -4.5, 4.5, 16}, {-16, -4.5, 2.5, 6.5}, {-6, -2.5, 2.5, 6}};
  return t4[n_near];
}

/// One side only: the pass misses the band by 4 m.
inline std::vector<double> outside_offsets(int size) {
  return size == 2 ? std::vector<double>{4, 16} : std::vector<double>{4, 16, 22, 28};
}

inline std::vector<double> sparse_offsets(int size) {
  return size == 2 ? std::vector<double>{-14, 14} : std::vector<double>{-20, -14, 14, 20};
}

/// Pose in the attacking team's frame. Index: team * 11 + n, n = 0 is the
/// goalkeeper.
struct Pose {
  std::array<Point2, 2 * kPlayersPerTeam> players{};
  Point2 ball_from;
  Point2 ball_to;
  bool flight = false;
};

struct DefShape {
  std::array<double, 3> line_x{};    // nominal
  std::array<double, 10> member_x{};  // outfield 1..10 -> [0..9]
  std::array<double, 10> member_y{};
  std::array<double, 3> centroid{};
};

struct PassGeometry {
  Point2 s;
  Point2 r;
  int lines_crossed = 0;
  int bypassed = 0;
};

struct PendingEvent {
  MatchEvent event;  // frame fields filled at layout
  std::size_t slot = 0;
  FrameId offset = 0;
};

struct Slot {
  int team = 0;  // frame of reference: this team attacks +x
  Pose pose;
};

/// Reference to an event before ids are assigned: (period index, position).
struct EvRef {
  int period = 0;
  std::size_t index = 0;
};

struct PendingPass {
  EvRef ref;
  int team = 0;
  int passer = 0;
  int receiver = 0;
  bool is_lbp = false;
  std::optional<int> lines;
  std::optional<int> bypassed;
  std::string role;
};

struct PendingChain {
  ChainKind kind;
  int team = 0;
  std::vector<EvRef> lbps;
  int initiator = 0;
  std::optional<int> connector;
  int finisher = 0;
  EvRef shot;
  ChainOutcome outcome;
  std::optional<double> xg;
};

enum class UnitKind { Planted, Chain, Decoy, Filler };

struct Unit {
  UnitKind kind = UnitKind::Filler;
  int team = 0;
  PlantedLbpSpec lbp;
  PlantedChainSpec chain;
  DecoyKind decoy = DecoyKind::OutsideSpan;
  int index = 0;  // ordinal among units of the same kind
};

class Generator {
public:
  explicit Generator(const SyntheticPlan& plan) : plan_(plan), rng_(plan.seed) {}

  std::pair<NormalizedMatch, GroundTruthLedger> run() {
    check_plan();
    std::vector<Unit> units = make_units();
    std::shuffle(units.begin(), units.end(), rng_);

    const std::size_t half = (units.size() + 1) / 2;
    for (int p = 0; p < 2; ++p) {
      start_period(p);
      const std::size_t lo = p == 0 ? 0 : half;
      const std::size_t hi = p == 0 ? half : units.size();
      for (std::size_t u = lo; u < hi; ++u) realize(p, units[u]);
    }
    // Top up with filler passes, alternating periods.
    for (int p = 0; pass_count_ < plan_.n_passes; p ^= 1) {
      Unit f;
      f.kind = UnitKind::Filler;
      f.team = coin() ? 0 : 1;
      realize(p, f);
    }
    return finish();
  }

private:
  // ---- randomness -------------------------------------------------------------
  double uni(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin() { return pick(0, 1) == 1; }

  [[noreturn]] static void infeasible(const std::string& why) { throw PlanInfeasibleError(why); }

  void check_plan() const {
    if (!(plan_.noise_sigma_m >= 0.0) || plan_.noise_sigma_m > kMaxNoiseSigmaM)
      infeasible("noise_sigma_m must lie in [0, 0.3]");
    if (plan_.duration_s <= 0.0) infeasible("duration_s must be > 0");
    if (plan_.n_passes < 0 || plan_.n_decoys < 0) infeasible("counts must be >= 0");
    if (plan_.teams[0] == plan_.teams[1] || plan_.teams[0].empty()) infeasible("team ids must differ");
    for (const auto& s : plan_.planted_lbp_specs) {
      if (s.lines_to_cross < 1 || s.lines_to_cross > 3) infeasible("lines_to_cross must be 1..3");
      if (s.bypass_count < kMinBypassedOpponentsForPlan) infeasible("bypass_count below 2 cannot be an LBP");
      if (s.forward_margin_m < 5.0) infeasible("forward_margin_m must be >= 5 m");
    }
  }
  static constexpr int kMinBypassedOpponentsForPlan = 2;

  std::vector<Unit> make_units() {
    std::vector<Unit> units;
    for (std::size_t i = 0; i < plan_.planted_lbp_specs.size(); ++i) {
      Unit u;
      u.kind = UnitKind::Planted;
      u.lbp = plan_.planted_lbp_specs[i];
      u.team = static_cast<int>(i % 2);
      u.index = static_cast<int>(i);
      units.push_back(u);
    }
    for (std::size_t i = 0; i < plan_.planted_chain_specs.size(); ++i) {
      Unit u;
      u.kind = UnitKind::Chain;
      u.chain = plan_.planted_chain_specs[i];
      u.team = static_cast<int>((i + 1) % 2);
      u.index = static_cast<int>(i);
      units.push_back(u);
    }
    for (int i = 0; i < plan_.n_decoys; ++i) {
      Unit u;
      u.kind = UnitKind::Decoy;
      u.decoy = kAllDecoys[static_cast<std::size_t>(i) % kAllDecoys.size()];
      u.team = i % 2;
      u.index = i;
      units.push_back(u);
    }
    return units;
  }

  // ---- ids --------------------------------------------------------------------
  std::string player_id(int team, int n) const {
    return plan_.teams[static_cast<std::size_t>(team)] + "_" + std::to_string(n + 1);
  }
  const std::string& team_id(int team) const { return plan_.teams[static_cast<std::size_t>(team)]; }

  int other_outfield(int exclude_a, int exclude_b = -1) {
    for (;;) {
      const int n = pick(1, 10);
      if (n != exclude_a && n != exclude_b) return n;
    }
  }

  // ---- defensive shapes ---------------------------------------------------------
  DefShape make_shape() {
    DefShape d;
    d.line_x[2] = uni(70.0, 86.0);
    d.line_x[1] = d.line_x[2] - uni(16.0, 20.0);
    d.line_x[0] = d.line_x[1] - uni(16.0, 20.0);
    static const std::array<double, 10> default_y{26, 42, 12, 27, 41, 56, 10, 26, 42, 58};
    for (int line = 0; line < 3; ++line) {
      double sum = 0.0;
      // Evenly spaced depths: two tight pairs would tempt the silhouette into
      // splitting a line once noise is added.
      std::array<double, 4> depth{-0.9, -0.3, 0.3, 0.9};
      if (kLineSizes[line] == 2) depth = {-0.3, 0.3, 0.0, 0.0};
      std::shuffle(depth.begin(), depth.begin() + kLineSizes[line], rng_);
      for (int m = 0; m < kLineSizes[line]; ++m) {
        const int idx = kLineFirstPlayer[line] - 1 + m;
        d.member_x[idx] = d.line_x[line] + depth[static_cast<std::size_t>(m)] + uni(-0.05, 0.05);
        d.member_y[idx] = default_y[idx] + uni(-1.5, 1.5);
        sum += d.member_x[idx];
      }
      d.centroid[line] = sum / kLineSizes[line];
    }
    return d;
  }

  /// Places the members of `line` at the given offsets from the pass line
  /// y(x) = y0 + slope * (x - x0).
  static void place_line(DefShape& d, int line, std::vector<double> offsets, double y0, double x0,
                         double slope, bool mirror) {
    if (mirror)
      for (auto& o : offsets) o = -o;
    for (int m = 0; m < kLineSizes[line]; ++m) {
      const int idx = kLineFirstPlayer[line] - 1 + m;
      d.member_y[idx] = y0 + slope * (d.member_x[idx] - x0) + offsets[static_cast<std::size_t>(m)];
    }
  }

  /// Start and end x for a pass crossing lines [first, last], extended to the
  /// requested forward margin without reaching a neighbouring line.
  std::pair<double, double> crossing_span(const DefShape& d, int first, int last, double min_forward) {
    double sx = d.centroid[first] - uni(5.0, 8.0);
    double rx = d.centroid[last] + uni(5.0, 8.0);
    const double left_limit = first > 0 ? d.centroid[first - 1] + 4.0 : 8.0;
    const double right_limit = last < 2 ? d.centroid[last + 1] - 4.0 : 94.0;
    double need = min_forward - (rx - sx);
    if (need > 0) {
      const double right = std::min(need, right_limit - rx);
      rx += right;
      need -= right;
    }
    if (need > 0) {
      const double left = std::min(need, sx - left_limit);
      sx -= left;
      need -= left;
    }
    if (need > 1e-9) infeasible("forward margin does not fit between the defensive lines");
    return {sx, rx};
  }

  /// Pass line through the crossed lines with every crossing inside y in [22, 46].
  std::pair<double, double> pass_line(double span) {
    const double max_slope = span > 0 ? std::min(0.35, 20.0 / span) : 0.35;
    const double slope = uni(-max_slope, max_slope);
    const double lo = std::max(22.0, 22.0 - slope * span);
    const double hi = std::min(46.0, 46.0 - slope * span);
    return {uni(lo, hi), slope};
  }

  /// A line-breaking pass crossing `lines` consecutive lines with `bypass`
  /// opponents within 8 m of the path.
  PassGeometry lbp_geometry(DefShape& d, int lines, int bypass, double min_forward) {
    std::vector<int> starts;
    for (int i = 0; i + lines <= 3; ++i) {
      int cap = 0;
      for (int j = i; j < i + lines; ++j) cap += kLineSizes[j];
      if (cap >= bypass) starts.push_back(i);
    }
    if (starts.empty()) infeasible("bypass_count exceeds the players of the crossed lines");
    const int first = starts[static_cast<std::size_t>(pick(0, static_cast<int>(starts.size()) - 1))];
    const int last = first + lines - 1;

    const auto [sx, rx] = crossing_span(d, first, last, min_forward);
    const double x0 = d.centroid[first];
    const auto [y0, slope] = pass_line(d.centroid[last] - x0);

    std::vector<int> near(static_cast<std::size_t>(lines), 0);
    for (int left = bypass; left > 0;) {
      const int j = pick(0, lines - 1);
      if (near[static_cast<std::size_t>(j)] < kLineSizes[first + j]) {
        ++near[static_cast<std::size_t>(j)];
        --left;
      }
    }
    for (int j = 0; j < lines; ++j)
      place_line(d, first + j, near_offsets(kLineSizes[first + j], near[static_cast<std::size_t>(j)]), y0, x0,
                 slope, coin());
    return {{sx, y0 + slope * (sx - x0)}, {rx, y0 + slope * (rx - x0)}, lines, bypass};
  }

  PassGeometry random_lbp_geometry(DefShape& d) {
    const int lines = pick(1, 2);
    return lbp_geometry(d, lines, pick(2, lines == 1 ? 2 : 4), 5.0);
  }

  PassGeometry outside_span_geometry(DefShape& d) {
    const int lines = pick(1, 2);
    const int first = pick(0, 3 - lines);
    const int last = first + lines - 1;
    const auto [sx, rx] = crossing_span(d, first, last, 5.0);
    const double x0 = d.centroid[first];
    const auto [y0, slope] = pass_line(d.centroid[last] - x0);
    for (int j = first; j <= last; ++j) {
      const double y_here = y0 + slope * (d.centroid[j] - x0);
      place_line(d, j, outside_offsets(kLineSizes[j]), y0, x0, slope, y_here > 38.0);
    }
    return {{sx, y0 + slope * (sx - x0)}, {rx, y0 + slope * (rx - x0)}, 0, lines};
  }

  PassGeometry sparse_geometry(DefShape& d) {
    const int line = pick(0, 2);
    const auto [sx, rx] = crossing_span(d, line, line, 5.0);
    const double x0 = d.centroid[line];
    const auto [y0, slope] = pass_line(0.0);
    place_line(d, line, sparse_offsets(kLineSizes[line]), y0, x0, slope, false);
    return {{sx, y0 + slope * (sx - x0)}, {rx, y0 + slope * (rx - x0)}, 1, 0};
  }

  PassGeometry short_forward_geometry(const DefShape& d) {
    const int j = pick(0, 1);
    const double sx = d.centroid[j] + uni(4.0, 5.0);
    const double rx = d.centroid[j + 1] - uni(4.0, 5.0);
    const double sy = uni(20.0, 48.0);
    return {{sx, sy}, {rx, sy + uni(-3.0, 3.0)}, 0, 0};
  }

  PassGeometry filler_geometry() {
    const Point2 s{uni(20.0, 85.0), uni(10.0, 58.0)};
    return {s, {s.x - uni(1.5, 3.0), s.y + uni(-5.0, 5.0)}, 0, 0};
  }

  /// Full pose for team `att` in possession with the defending shape `d`.
  Pose make_pose(int att, const DefShape& d) {
    Pose pose;
    const int def = 1 - att;
    pose.players[static_cast<std::size_t>(att * kPlayersPerTeam)] = {6.0, 34.0 + uni(-2.0, 2.0)};
    pose.players[static_cast<std::size_t>(def * kPlayersPerTeam)] = {101.0, 34.0 + uni(-2.0, 2.0)};
    for (int n = 1; n <= 10; ++n) {
      pose.players[static_cast<std::size_t>(def * kPlayersPerTeam + n)] = {d.member_x[n - 1], d.member_y[n - 1]};
      pose.players[static_cast<std::size_t>(att * kPlayersPerTeam + n)] = {10.0 + 8.0 * n, n % 2 ? 2.5 : 65.5};
    }
    return pose;
  }

  // ---- slots and events ---------------------------------------------------------
  struct PeriodState {
    std::vector<Slot> slots;
    std::vector<PendingEvent> events;
    int poss_team = -1;
    int holder = -1;
  };

  EvRef add_event(int p, MatchEvent e, FrameId offset = 0) {
    auto& st = periods_[static_cast<std::size_t>(p)];
    st.events.push_back({std::move(e), st.slots.size() - 1, offset});
    return {p, st.events.size() - 1};
  }

  MatchEvent base_event(EventType type, int team, int player) const {
    MatchEvent e;
    e.type = type;
    e.team_id = team_id(team);
    e.player_id = player_id(team, player);
    return e;
  }

  /// Pass slot; returns the pass event reference.
  EvRef pass_slot(int p, int team, int passer, int receiver, const PassGeometry& g, const DefShape& d) {
    Slot slot;
    slot.team = team;
    slot.pose = make_pose(team, d);
    slot.pose.players[static_cast<std::size_t>(team * kPlayersPerTeam + passer)] = g.s;
    slot.pose.players[static_cast<std::size_t>(team * kPlayersPerTeam + receiver)] = g.r;
    slot.pose.ball_from = g.s;
    slot.pose.ball_to = g.r;
    slot.pose.flight = true;
    periods_[static_cast<std::size_t>(p)].slots.push_back(slot);

    MatchEvent e = base_event(EventType::Pass, team, passer);
    e.receiver_id = player_id(team, receiver);
    e.outcome = EventOutcome::Complete;
    const EvRef ref = add_event(p, e, 0);
    add_event(p, base_event(EventType::Reception, team, receiver), kReceptionOffsetFrames);
    auto& st = periods_[static_cast<std::size_t>(p)];
    st.poss_team = team;
    st.holder = receiver;
    ++pass_count_;
    return ref;
  }

  /// Single-event slot (shot, restart, interception, carry).
  EvRef action_slot(int p, MatchEvent e, int team, int actor, Point2 where) {
    Slot slot;
    slot.team = team;
    slot.pose = make_pose(team, make_shape());
    slot.pose.players[static_cast<std::size_t>(team * kPlayersPerTeam + actor)] = where;
    slot.pose.ball_from = slot.pose.ball_to = where;
    periods_[static_cast<std::size_t>(p)].slots.push_back(slot);
    return add_event(p, std::move(e), 0);
  }

  void filler(int p, int team, int passer, int receiver) {
    const DefShape d = make_shape();
    const PassGeometry g = filler_geometry();
    const EvRef ref = pass_slot(p, team, passer, receiver, g, d);
    pending_passes_.push_back({ref, team, passer, receiver, false, std::nullopt, std::nullopt, "filler"});
  }

  /// Restart by `team` followed by two filler passes.
  void restart(int p, EventType type, int team) {
    const int taker = type == EventType::GoalKick ? 0 : pick(1, 10);
    Point2 where{uni(30.0, 70.0), uni(15.0, 53.0)};
    if (type == EventType::Kickoff) where = {52.5, 34.0};
    if (type == EventType::GoalKick) where = {6.0, 34.0};
    action_slot(p, base_event(type, team, taker), team, taker, where);
    auto& st = periods_[static_cast<std::size_t>(p)];
    st.poss_team = team;
    st.holder = taker;
    const int a = other_outfield(taker);
    filler(p, team, taker, a);
    filler(p, team, a, other_outfield(a));
  }

  /// Gives the ball to `player` of `team`, either through an interception or
  /// with filler passes, so that no planted item touches the previous one.
  void lead_in(int p, int team, int player) {
    auto& st = periods_[static_cast<std::size_t>(p)];
    if (st.poss_team != team) {
      action_slot(p, base_event(EventType::Interception, team, player), team, player,
                  {uni(30.0, 60.0), uni(15.0, 53.0)});
      st.poss_team = team;
      st.holder = player;
      return;
    }
    if (st.holder == player) {
      const int q = other_outfield(player);
      filler(p, team, player, q);
      filler(p, team, q, player);
    } else {
      filler(p, team, st.holder, player);
    }
  }

  EvRef lbp_pass(int p, int team, int passer, int receiver, DefShape& d, const PassGeometry& g,
                 const std::string& role, bool expected_lbp = true) {
    const EvRef ref = pass_slot(p, team, passer, receiver, g, d);
    pending_passes_.push_back({ref, team, passer, receiver, expected_lbp, g.lines_crossed, g.bypassed, role});
    return ref;
  }

  EvRef shot(int p, int team, int shooter, ChainOutcome outcome, std::optional<double> xg) {
    MatchEvent e = base_event(EventType::Shot, team, shooter);
    switch (outcome) {
      case ChainOutcome::Goal: e.outcome = EventOutcome::Goal; break;
      case ChainOutcome::ShotOnTarget: e.outcome = EventOutcome::Saved; break;
      case ChainOutcome::ShotOffTarget: e.outcome = EventOutcome::OffTarget; break;
      case ChainOutcome::Disallowed: e.outcome = EventOutcome::Disallowed; break;
    }
    e.xg = xg;
    const EvRef ref = action_slot(p, std::move(e), team, shooter, {uni(86.0, 92.0), uni(26.0, 42.0)});
    const int other = 1 - team;
    switch (outcome) {
      case ChainOutcome::Goal: restart(p, EventType::Kickoff, other); break;
      case ChainOutcome::Disallowed: restart(p, EventType::FreeKick, other); break;
      case ChainOutcome::ShotOffTarget: restart(p, EventType::GoalKick, other); break;
      case ChainOutcome::ShotOnTarget: {
        action_slot(p, base_event(EventType::Clearance, other, 0), other, 0, {8.0, 34.0});
        auto& st = periods_[static_cast<std::size_t>(p)];
        st.poss_team = other;
        st.holder = 0;
        const int a = pick(1, 10);
        filler(p, other, 0, a);
        filler(p, other, a, other_outfield(a));
        break;
      }
    }
    return ref;
  }

  void start_period(int p) { restart(p, EventType::Kickoff, p); }

  void realize(int p, const Unit& u) {
    const int t = u.team;
    switch (u.kind) {
      case UnitKind::Filler: {
        auto& st = periods_[static_cast<std::size_t>(p)];
        const int n = pick(1, 3);
        if (st.poss_team != t) {
          lead_in(p, t, pick(1, 10));
        }
        for (int i = 0; i < n; ++i) {
          const int from = periods_[static_cast<std::size_t>(p)].holder;
          filler(p, t, from, other_outfield(from));
        }
        break;
      }
      case UnitKind::Planted: {
        const int passer = pick(1, 10);
        const int receiver = other_outfield(passer);
        lead_in(p, t, passer);
        DefShape d = make_shape();
        const PassGeometry g = lbp_geometry(d, u.lbp.lines_to_cross, u.lbp.bypass_count, u.lbp.forward_margin_m);
        lbp_pass(p, t, passer, receiver, d, g, "planted");
        break;
      }
      case UnitKind::Chain: {
        const int initiator = pick(1, 10);
        const int second = other_outfield(initiator);
        lead_in(p, t, initiator);
        PendingChain chain{u.chain.kind, t, {}, initiator, std::nullopt, second, {}, u.chain.outcome, u.chain.xg};
        DefShape d1 = make_shape();
        chain.lbps.push_back(lbp_pass(p, t, initiator, second, d1, random_lbp_geometry(d1), "chain"));
        int finisher = second;
        if (u.chain.kind == ChainKind::LBPCh2) {
          finisher = other_outfield(initiator, second);
          DefShape d2 = make_shape();
          chain.lbps.push_back(lbp_pass(p, t, second, finisher, d2, random_lbp_geometry(d2), "chain"));
          chain.connector = second;
        } else if (u.index % 2 == 1) {
          // The receiver carries before shooting: the LBP is the last pass.
          action_slot(p, base_event(EventType::Other, t, second), t, second, {uni(75.0, 85.0), uni(20.0, 48.0)});
        }
        chain.finisher = finisher;
        chain.shot = shot(p, t, finisher, u.chain.outcome, u.chain.xg);
        pending_chains_.push_back(std::move(chain));
        break;
      }
      case UnitKind::Decoy: realize_decoy(p, u); break;
    }
  }

  void realize_decoy(int p, const Unit& u) {
    const int t = u.team;
    const int passer = pick(1, 10);
    const int receiver = other_outfield(passer);
    const std::string role = "decoy:" + std::string(to_string(u.decoy));
    DefShape d = make_shape();
    switch (u.decoy) {
      case DecoyKind::OutsideSpan:
        lead_in(p, t, passer);
        lbp_pass(p, t, passer, receiver, d, outside_span_geometry(d), role, false);
        break;
      case DecoyKind::Backward: {
        lead_in(p, t, passer);
        PassGeometry g = random_lbp_geometry(d);
        std::swap(g.s, g.r);
        lbp_pass(p, t, passer, receiver, d, g, role, false);
        break;
      }
      case DecoyKind::SparseLine:
        lead_in(p, t, passer);
        lbp_pass(p, t, passer, receiver, d, sparse_geometry(d), role, false);
        break;
      case DecoyKind::ShortForward:
        lead_in(p, t, passer);
        lbp_pass(p, t, passer, receiver, d, short_forward_geometry(d), role, false);
        break;
      case DecoyKind::SetPiece: {
        action_slot(p, base_event(EventType::FreeKick, t, passer), t, passer, {uni(30.0, 50.0), uni(20.0, 48.0)});
        auto& st = periods_[static_cast<std::size_t>(p)];
        st.poss_team = t;
        st.holder = passer;
        lbp_pass(p, t, passer, receiver, d, random_lbp_geometry(d), role, false);
        const int a = other_outfield(receiver);
        filler(p, t, receiver, a);
        filler(p, t, a, other_outfield(a));
        break;
      }
      case DecoyKind::NonDirect: {
        // A genuine LBP whose receiver passes on before the shot: no chain.
        lead_in(p, t, passer);
        lbp_pass(p, t, passer, receiver, d, random_lbp_geometry(d), role, true);
        const int shooter = other_outfield(receiver, passer);
        filler(p, t, receiver, shooter);
        shot(p, t, shooter, ChainOutcome::ShotOffTarget, 0.05);
        break;
      }
    }
  }

  // ---- layout -------------------------------------------------------------------
  static Point2 to_pitch(Point2 p, bool attacks_positive, const PitchMeta& meta) {
    return attacks_positive ? p : Point2{meta.length_m - p.x, meta.width_m - p.y};
  }

  static Point2 lerp(Point2 a, Point2 b, double w) { return {a.x + (b.x - a.x) * w, a.y + (b.y - a.y) * w}; }

  double quantize(double v) { return std::round(v * 100.0) / 100.0; }

  std::pair<NormalizedMatch, GroundTruthLedger> finish() {
    NormalizedMatch m;
    m.match_id = plan_.match_id;
    const double rate = m.meta.frame_rate_hz;
    const auto n_frames = static_cast<FrameId>(std::ceil(plan_.duration_s * rate - 1e-9));
    const FrameId half = n_frames / 2;
    const std::array<std::pair<FrameId, FrameId>, 2> bounds{{{0, half - 1}, {half, n_frames - 1}}};

    for (int t = 0; t < 2; ++t) {
      m.team_ids.push_back(team_id(t));
      for (int n = 0; n < kPlayersPerTeam; ++n) {
        m.player_ids.push_back(player_id(t, n));
        m.roster.players.push_back(RosterEntry{player_id(t, n), team_id(t), n + 1,
                                               n == 0 ? PlayerRole::Goalkeeper : PlayerRole::Outfield,
                                               team_id(t) + " " + std::to_string(n + 1)});
      }
    }
    for (int p = 0; p < 2; ++p) {
      Period period{p + 1, bounds[static_cast<std::size_t>(p)].first, bounds[static_cast<std::size_t>(p)].second, {}};
      for (int t = 0; t < 2; ++t)
        period.attack_direction[team_id(t)] = attacks_positive(t, p) ? AttackDirection::PositiveX : AttackDirection::NegativeX;
      m.periods.push_back(std::move(period));
    }

    std::normal_distribution<double> noise(0.0, plan_.noise_sigma_m > 0 ? plan_.noise_sigma_m : 1.0);
    const bool noisy = plan_.noise_sigma_m > 0.0;
    m.frames.reserve(static_cast<std::size_t>(n_frames));
    std::array<std::vector<FrameId>, 2> slot_frames;

    for (int p = 0; p < 2; ++p) {
      const auto& st = periods_[static_cast<std::size_t>(p)];
      const auto [start, end] = bounds[static_cast<std::size_t>(p)];
      const FrameId len = end - start + 1;
      const auto n = static_cast<FrameId>(st.slots.size());
      const FrameId slot_len = n > 0 ? (len - 2 * kHoldBeforeFrames) / n : len;
      if (slot_len < kMinSlotFrames)
        infeasible("plan needs " + std::to_string(periods_[0].slots.size() + periods_[1].slots.size()) +
                   " action slots of 45 frames; duration_s is too short");
      auto& fr = slot_frames[static_cast<std::size_t>(p)];
      for (FrameId k = 0; k < n; ++k) fr.push_back(start + kHoldBeforeFrames + k * slot_len);

      // Poses in pitch coordinates.
      struct RawPose {
        std::array<Point2, 2 * kPlayersPerTeam> players;
        Point2 ball_from, ball_to;
        bool flight;
      };
      std::vector<RawPose> raw;
      raw.reserve(st.slots.size());
      for (const auto& slot : st.slots) {
        const bool pos = attacks_positive(slot.team, p);
        RawPose rp;
        for (std::size_t i = 0; i < rp.players.size(); ++i) rp.players[i] = to_pitch(slot.pose.players[i], pos, m.meta);
        rp.ball_from = to_pitch(slot.pose.ball_from, pos, m.meta);
        rp.ball_to = to_pitch(slot.pose.ball_to, pos, m.meta);
        rp.flight = slot.pose.flight;
        raw.push_back(rp);
      }

      std::size_t k = 0;
      for (FrameId f = start; f <= end; ++f) {
        while (k + 1 < raw.size() && f >= fr[k + 1] - kHoldBeforeFrames) ++k;
        TrackingFrame frame;
        frame.frame_id = f;
        frame.timestamp_s = static_cast<double>(f) / rate;
        std::array<Point2, 2 * kPlayersPerTeam> pos{};
        Point2 ball{52.5, 34.0};
        if (!raw.empty()) {
          const RawPose& cur = raw[k];
          const FrameId f0 = fr[k];
          if (f <= f0 + kHoldAfterFrames || k + 1 >= raw.size() || f < f0 - kHoldBeforeFrames) {
            pos = cur.players;
            if (!cur.flight || f <= f0) {
              ball = cur.ball_from;
            } else if (f >= f0 + kReceptionOffsetFrames) {
              ball = cur.ball_to;
            } else {
              ball = lerp(cur.ball_from, cur.ball_to,
                          static_cast<double>(f - f0) / static_cast<double>(kReceptionOffsetFrames));
            }
            if (f > f0 + kHoldAfterFrames) ball = cur.flight ? cur.ball_to : cur.ball_from;
          } else {
            const RawPose& next = raw[k + 1];
            const FrameId a = f0 + kHoldAfterFrames;
            const FrameId b = fr[k + 1] - kHoldBeforeFrames;
            const double w = static_cast<double>(f - a) / static_cast<double>(b - a);
            for (std::size_t i = 0; i < pos.size(); ++i) pos[i] = lerp(cur.players[i], next.players[i], w);
            ball = lerp(cur.flight ? cur.ball_to : cur.ball_from, next.ball_from, w);
          }
        }
        frame.players.reserve(pos.size());
        for (std::size_t i = 0; i < pos.size(); ++i) {
          Point2 q = pos[i];
          if (noisy) {
            q.x += noise(rng_);
            q.y += noise(rng_);
          }
          frame.players.push_back(PlayerPosition{static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i / kPlayersPerTeam),
                                                 {quantize(q.x), quantize(q.y)}});
        }
        frame.ball = Point2{quantize(ball.x), quantize(ball.y)};
        m.frames.push_back(std::move(frame));
      }
    }

    // Events: ids in chronological order.
    std::array<std::vector<std::string>, 2> ids;
    std::size_t serial = 0;
    for (int p = 0; p < 2; ++p) {
      for (const auto& pe : periods_[static_cast<std::size_t>(p)].events) {
        MatchEvent e = pe.event;
        char buf[16];
        std::snprintf(buf, sizeof buf, "e%05zu", ++serial);
        e.event_id = buf;
        e.frame_id = slot_frames[static_cast<std::size_t>(p)][pe.slot] + pe.offset;
        if (e.type == EventType::Pass) e.end_frame_id = e.frame_id + kReceptionOffsetFrames;
        e.timestamp_s = static_cast<double>(e.frame_id) / rate;
        ids[static_cast<std::size_t>(p)].push_back(e.event_id);
        m.events.push_back(std::move(e));
      }
    }
    std::stable_sort(m.events.begin(), m.events.end(),
                     [](const MatchEvent& a, const MatchEvent& b) { return a.frame_id < b.frame_id; });

    auto id_of = [&](const EvRef& r) { return ids[static_cast<std::size_t>(r.period)][r.index]; };
    GroundTruthLedger ledger;
    ledger.match_id = plan_.match_id;
    ledger.seed = plan_.seed;
    ledger.n_frames = m.frames.size();
    for (const auto& pp : pending_passes_)
      ledger.passes.push_back({id_of(pp.ref), team_id(pp.team), player_id(pp.team, pp.passer),
                               player_id(pp.team, pp.receiver), pp.is_lbp, pp.lines, pp.bypassed, pp.role});
    std::sort(ledger.passes.begin(), ledger.passes.end(),
              [](const ExpectedPass& a, const ExpectedPass& b) { return a.event_id < b.event_id; });
    for (const auto& pc : pending_chains_) {
      ExpectedChain c;
      c.kind = pc.kind;
      c.team_id = team_id(pc.team);
      for (const auto& r : pc.lbps) c.lbp_event_ids.push_back(id_of(r));
      c.initiator_id = player_id(pc.team, pc.initiator);
      if (pc.connector) c.connector_id = player_id(pc.team, *pc.connector);
      c.finisher_id = player_id(pc.team, pc.finisher);
      c.shot_event_id = id_of(pc.shot);
      c.outcome = pc.outcome;
      c.xg = pc.xg;
      ledger.chains.push_back(std::move(c));
    }
    std::sort(ledger.chains.begin(), ledger.chains.end(),
              [](const ExpectedChain& a, const ExpectedChain& b) { return a.shot_event_id < b.shot_event_id; });
    return {std::move(m), std::move(ledger)};
  }

  /// Home attacks +x in the first period, away in the second.
  static bool attacks_positive(int team, int period) { return (team == 0) == (period == 0); }

  const SyntheticPlan& plan_;
  std::mt19937_64 rng_;
  std::array<PeriodState, 2> periods_;
  std::vector<PendingPass> pending_passes_;
  std::vector<PendingChain> pending_chains_;
  int pass_count_ = 0;
};

}  // namespace detail

/// Builds a schema-valid match and its ledger. Same plan, same bytes.
inline std::pair<NormalizedMatch, GroundTruthLedger> generate_match(const SyntheticPlan& plan) {
  return detail::Generator(plan).run();
}

/// Plan file keys mirror the struct; every key is optional.
inline SyntheticPlan plan_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("plan must be a JSON object");
  SyntheticPlan plan;
  try {
    plan.seed = j.value("seed", plan.seed);
    plan.n_passes = j.value("n_passes", plan.n_passes);
    plan.noise_sigma_m = j.value("noise_sigma_m", plan.noise_sigma_m);
    plan.n_decoys = j.value("n_decoys", plan.n_decoys);
    plan.duration_s = j.value("duration_s", plan.duration_s);
    plan.match_id = j.value("match_id", plan.match_id);
    if (j.contains("teams")) plan.teams = j.at("teams").get<std::array<std::string, 2>>();
    for (const auto& l : j.value("planted_lbp_specs", nlohmann::json::array()))
      plan.planted_lbp_specs.push_back({l.value("lines_to_cross", 1), l.value("bypass_count", 2),
                                        l.value("forward_margin_m", 5.0)});
    for (const auto& c : j.value("planted_chain_specs", nlohmann::json::array())) {
      PlantedChainSpec spec;
      const auto kind = parse_chain_kind(c.value("kind", std::string("LBPCh1")));
      const auto outcome = parse_chain_outcome(c.value("outcome", std::string("shot_on_target")));
      if (!kind || !outcome) throw ConfigError("unknown chain kind or outcome in plan");
      spec.kind = *kind;
      spec.outcome = *outcome;
      if (c.contains("xg") && !c.at("xg").is_null()) spec.xg = c.at("xg").get<double>();
      plan.planted_chain_specs.push_back(spec);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad plan: ") + e.what());
  }
  return plan;
}

inline nlohmann::json to_json(const SyntheticPlan& plan) {
  nlohmann::json j{{"seed", plan.seed},         {"n_passes", plan.n_passes},     {"noise_sigma_m", plan.noise_sigma_m},
                   {"n_decoys", plan.n_decoys}, {"duration_s", plan.duration_s}, {"match_id", plan.match_id},
                   {"teams", plan.teams}};
  j["planted_lbp_specs"] = nlohmann::json::array();
  for (const auto& l : plan.planted_lbp_specs)
    j["planted_lbp_specs"].push_back(
        {{"lines_to_cross", l.lines_to_cross}, {"bypass_count", l.bypass_count}, {"forward_margin_m", l.forward_margin_m}});
  j["planted_chain_specs"] = nlohmann::json::array();
  for (const auto& c : plan.planted_chain_specs)
    j["planted_chain_specs"].push_back({{"kind", to_string(c.kind)},
                                        {"outcome", to_string(c.outcome)},
                                        {"xg", c.xg ? nlohmann::json(*c.xg) : nlohmann::json(nullptr)}});
  return j;
}

/// Plan used by the end-to-end checks: every planted kind, both teams, all
/// chain outcomes, all decoy kinds.
inline SyntheticPlan tournament_plan(std::uint64_t seed, int match_index) {
  SyntheticPlan plan;
  plan.seed = seed * 1000 + static_cast<std::uint64_t>(match_index);
  plan.match_id = "m" + std::to_string(match_index + 1);
  plan.n_passes = 120;
  plan.duration_s = 1200.0;
  plan.noise_sigma_m = 0.2;
  plan.n_decoys = 6;
  for (int i = 0; i < 5; ++i)
    plan.planted_lbp_specs.push_back({1 + i % 3, 2 + i % 3, 5.0 + i});
  const ChainOutcome outcomes[] = {ChainOutcome::Goal, ChainOutcome::ShotOnTarget, ChainOutcome::ShotOffTarget,
                                   ChainOutcome::Disallowed};
  plan.planted_chain_specs.push_back({ChainKind::LBPCh1, outcomes[match_index % 4], 0.1 + 0.01 * match_index});
  if (match_index % 2 == 0)
    plan.planted_chain_specs.push_back({ChainKind::LBPCh1, outcomes[(match_index + 1) % 4], std::nullopt});
  if (match_index < 4)
    plan.planted_chain_specs.push_back({ChainKind::LBPCh2, outcomes[match_index], 0.3});
  return plan;
}

}  // namespace lbp::testkit
