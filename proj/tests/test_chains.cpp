#include <catch_amalgamated.hpp>

#include "support.hpp"

using namespace lbp;
using namespace lbp::test;
using Catch::Approx;

namespace {

MatchEvent shot(std::string id, std::string team, std::string player, FrameId f,
                EventOutcome outcome = EventOutcome::Saved, std::optional<double> xg = std::nullopt) {
  MatchEvent e = make_event(std::move(id), EventType::Shot, std::move(team), std::move(player), f, outcome);
  e.xg = xg;
  return e;
}

MatchEvent reception(std::string id, std::string team, std::string player, FrameId f) {
  return make_event(std::move(id), EventType::Reception, std::move(team), std::move(player), f);
}

}  // namespace

TEST_CASE("possession segmentation") {
  SECTION("alternating teams") {
    const auto m = events_only({make_pass("1", "A", "a1", "a2", 1), make_pass("2", "B", "b1", "b2", 2),
                                make_pass("3", "A", "a1", "a2", 3), make_pass("4", "B", "b1", "b2", 4)});
    const auto p = segment_possessions(m);
    REQUIRE(p.size() == 4);
    for (const auto& pos : p) CHECK(pos.event_ids.size() == 1);
  }
  SECTION("one team ending in a shot") {
    const auto m = events_only({make_pass("1", "A", "a1", "a2", 1), make_pass("2", "A", "a2", "a3", 2),
                                make_pass("3", "A", "a3", "a4", 3), shot("4", "A", "a4", 4)});
    const auto p = segment_possessions(m);
    REQUIRE(p.size() == 1);
    CHECK(p[0].event_ids.size() == 4);
  }
  SECTION("set piece breaks a possession") {
    const auto m = events_only({make_pass("1", "A", "a1", "a2", 1), make_pass("2", "A", "a2", "a3", 2),
                                make_event("3", EventType::ThrowIn, "A", "a3", 3), make_pass("4", "A", "a3", "a4", 4),
                                make_pass("5", "A", "a4", "a5", 5)});
    const auto p = segment_possessions(m);
    REQUIRE(p.size() == 2);
    CHECK(p[0].event_ids == std::vector<std::string>{"1", "2"});
    CHECK(p[1].event_ids == std::vector<std::string>{"3", "4", "5"});
    CHECK_FALSE(p[1].open_play);
  }
  SECTION("period change breaks a possession") {
    auto m = events_only({make_pass("1", "A", "a1", "a2", 10), make_pass("2", "A", "a2", "a3", 60)});
    m.periods = {Period{1, 0, 49, {}}, Period{2, 50, 100, {}}};
    CHECK(segment_possessions(m).size() == 2);
  }
}

TEST_CASE("LBPCh1: receiver shoots next") {
  const auto lbp = make_pass("p", "A", "a1", "a2", 1);
  const auto m = events_only({lbp, reception("r", "A", "a2", 2), shot("s", "A", "a2", 3, EventOutcome::Goal, 0.4)});
  const std::vector<LbpRecord> recs{make_record(lbp, true, 3.0)};
  const auto chains = detect_chains(m, recs);
  REQUIRE(chains.size() == 1);
  CHECK(chains[0].kind == ChainKind::LBPCh1);
  CHECK(chains[0].initiator_id == "a1");
  CHECK(chains[0].finisher_id == "a2");
  CHECK(chains[0].outcome == ChainOutcome::Goal);
  CHECK(chains[0].xg == 0.4);
  CHECK(chains[0].cumulative_sbr == 3.0);
}

TEST_CASE("LBPCh1: receiver passes on") {
  const auto lbp = make_pass("p", "A", "a1", "a2", 1);
  const auto onward = make_pass("q", "A", "a2", "a3", 3);
  const auto m = events_only({lbp, reception("r", "A", "a2", 2), onward, shot("s", "A", "a3", 5)});

  SECTION("onward pass is not an LBP") {
    const std::vector<LbpRecord> recs{make_record(lbp, true), make_record(onward, false)};
    CHECK(detect_chains(m, recs).empty());
  }
  SECTION("onward pass is itself an LBP assist") {
    const std::vector<LbpRecord> recs{make_record(lbp, false), make_record(onward, true)};
    const auto chains = detect_chains(m, recs);
    REQUIRE(chains.size() == 1);
    CHECK(chains[0].lbp_event_ids == std::vector<std::string>{"q"});
    CHECK(chains[0].finisher_id == "a3");
  }
}

TEST_CASE("LBPCh1: carry before the shot still counts") {
  const auto lbp = make_pass("p", "A", "a1", "a2", 1);
  const auto m = events_only({lbp, make_event("c", EventType::Other, "A", "a2", 2), shot("s", "A", "a2", 3)});
  CHECK(detect_chains(m, std::vector<LbpRecord>{make_record(lbp, true)}).size() == 1);
}

TEST_CASE("LBPCh1 does not cross a turnover") {
  const auto lbp = make_pass("p", "A", "a1", "a2", 1);
  const auto m = events_only({lbp, make_event("i", EventType::Interception, "B", "b1", 2), shot("s", "B", "b1", 3)});
  CHECK(detect_chains(m, std::vector<LbpRecord>{make_record(lbp, true)}).empty());
}

TEST_CASE("LBPCh2: two-pass chain ending in a goal") {
  const auto p1 = make_pass("p1", "MAR", "aguerd", "hakimi", 10);
  const auto p2 = make_pass("p2", "MAR", "hakimi", "en_nesyri", 20);
  const auto m = events_only({p1, reception("r1", "MAR", "hakimi", 15), p2, reception("r2", "MAR", "en_nesyri", 25),
                              shot("g", "MAR", "en_nesyri", 30, EventOutcome::Goal, 0.21)});
  const std::vector<LbpRecord> recs{make_record(p1, true, 2.0), make_record(p2, true, 5.5)};
  const auto chains = detect_chains(m, recs);
  REQUIRE(chains.size() == 1);  // the LBPCh1 on p2 is absorbed
  const ChainRecord& c = chains[0];
  CHECK(c.kind == ChainKind::LBPCh2);
  CHECK(c.initiator_id == "aguerd");
  CHECK(c.connector_id == "hakimi");
  CHECK(c.finisher_id == "en_nesyri");
  CHECK(c.outcome == ChainOutcome::Goal);
  CHECK(c.cumulative_sbr == Approx(7.5));
  CHECK(cumulative_sbr(c, recs) == Approx(7.5));
  CHECK(c.lbp_event_ids == std::vector<std::string>{"p1", "p2"});
}

TEST_CASE("LBPCh2: intervening pass by the connector breaks the chain") {
  const auto p1 = make_pass("p1", "A", "a1", "a2", 10);
  const auto mid = make_pass("m", "A", "a2", "a5", 12);
  const auto back = make_pass("b", "A", "a5", "a2", 14);
  const auto p2 = make_pass("p2", "A", "a2", "a3", 20);
  const auto m = events_only({p1, mid, back, p2, shot("s", "A", "a3", 30)});
  const std::vector<LbpRecord> recs{make_record(p1, true), make_record(mid, false), make_record(back, false),
                                    make_record(p2, true)};
  const auto chains = detect_chains(m, recs);
  REQUIRE(chains.size() == 1);
  CHECK(chains[0].kind == ChainKind::LBPCh1);
  CHECK(chains[0].lbp_event_ids == std::vector<std::string>{"p2"});
}

TEST_CASE("LBPCh2: second LBP must start from the first receiver") {
  const auto p1 = make_pass("p1", "A", "a1", "a2", 10);
  const auto p2 = make_pass("p2", "A", "a4", "a3", 20);
  const auto m = events_only({p1, p2, shot("s", "A", "a3", 30)});
  const auto chains = detect_chains(m, std::vector<LbpRecord>{make_record(p1, true), make_record(p2, true)});
  REQUIRE(chains.size() == 1);
  CHECK(chains[0].kind == ChainKind::LBPCh1);
}

TEST_CASE("LBPCh2: disallowed goal still forms a chain") {
  const auto p1 = make_pass("p1", "A", "a1", "a2", 10);
  const auto p2 = make_pass("p2", "A", "a2", "a3", 20);
  const auto m = events_only({p1, p2, shot("s", "A", "a3", 30, EventOutcome::Disallowed)});
  const auto chains = detect_chains(m, std::vector<LbpRecord>{make_record(p1, true), make_record(p2, true)});
  REQUIRE(chains.size() == 1);
  CHECK(chains[0].kind == ChainKind::LBPCh2);
  CHECK(chains[0].outcome == ChainOutcome::Disallowed);
}

TEST_CASE("LBPCh2: conclusion lookahead") {
  const auto p1 = make_pass("p1", "A", "a1", "a2", 10);
  const auto p2 = make_pass("p2", "A", "a2", "a3", 20);
  const auto m = events_only({p1, p2, make_event("c", EventType::Other, "A", "a3", 25), shot("s", "A", "a3", 30)});
  const std::vector<LbpRecord> recs{make_record(p1, true), make_record(p2, true)};
  // Default lookahead of one action misses the shot after the carry.
  auto chains = detect_chains(m, recs);
  REQUIRE(chains.size() == 1);
  CHECK(chains[0].kind == ChainKind::LBPCh1);

  chains = detect_chains(m, recs, ChainConfig{2});
  REQUIRE(chains.size() == 1);
  CHECK(chains[0].kind == ChainKind::LBPCh2);
}

TEST_CASE("chain metrics and flags") {
  const auto p1 = make_pass("p1", "A", "a1", "a2", 10);
  const auto p2 = make_pass("p2", "A", "a2", "a3", 20);
  const auto m = events_only({p1, p2, shot("s", "A", "a3", 30)});
  std::vector<LbpRecord> recs{make_record(p1, true, 2.0), make_record(p2, true, 5.5)};
  recs[0].space.clamped = true;
  recs[0].verticality = 0.5;
  const auto chains = detect_chains(m, recs);
  REQUIRE(chains.size() == 1);
  CHECK(chains[0].flagged);
  CHECK(chains[0].cumulative_sbr == Approx(7.5));
  CHECK(chains[0].verticality == Approx(0.75));
}

TEST_CASE("invalid records never start chains") {
  const auto lbp = make_pass("p", "A", "a1", "a2", 1);
  auto rec = make_record(lbp, true);
  rec.valid = false;
  const auto m = events_only({lbp, shot("s", "A", "a2", 3)});
  CHECK(detect_chains(m, std::vector<LbpRecord>{rec}).empty());
}

TEST_CASE("shot outcomes map to chain outcomes") {
  CHECK(chain_outcome_of_shot(shot("s", "A", "a", 1, EventOutcome::Goal)) == ChainOutcome::Goal);
  CHECK(chain_outcome_of_shot(shot("s", "A", "a", 1, EventOutcome::Saved)) == ChainOutcome::ShotOnTarget);
  CHECK(chain_outcome_of_shot(shot("s", "A", "a", 1, EventOutcome::OffTarget)) == ChainOutcome::ShotOffTarget);
  CHECK(chain_outcome_of_shot(shot("s", "A", "a", 1, EventOutcome::Disallowed)) == ChainOutcome::Disallowed);
}
