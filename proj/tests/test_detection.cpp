#include <catch_amalgamated.hpp>

#include <cmath>

#include "lbp/testkit/oracles.hpp"
#include "support.hpp"

using namespace lbp;
using namespace lbp::test;
using Catch::Approx;

namespace {

/// Forward line (2) at x~40, midfield (4) at x~58, defence (4) at x~76 and a
/// goalkeeper at 100. Attack is +x.
PassSnapshot three_line_snapshot(Point2 s, Point2 r) {
  PassSnapshot snap;
  snap.pass_event_id = "p";
  snap.team_id = "A";
  snap.passer_id = "A7";
  snap.receiver_id = "A9";
  snap.s = s;
  snap.r = r;
  snap.opponents = {opp("f1", 40, 28), opp("f2", 40.5, 40),                                   //
                    opp("m1", 58, 14), opp("m2", 58.5, 30), opp("m3", 57.5, 38), opp("m4", 58, 54),  //
                    opp("d1", 76, 12), opp("d2", 76.5, 28), opp("d3", 75.5, 40), opp("d4", 76, 56),  //
                    opp("gk", 100, 34, true)};
  snap.opponents_at_reception = snap.opponents;
  return snap;
}

}  // namespace

TEST_CASE("bypassed opponents") {
  const PassVector pass{{25, 30}, {40, 35}};
  const std::vector<Point2> near{{30, 30}, {32, 33}};
  CHECK(count_bypassed_opponents(pass, near, 10.0) == 2);
  // Distances from the exact formula; the dense-sampling oracle agrees.
  CHECK(point_to_segment_distance({30, 30}, pass) == Approx(1.5811).margin(1e-4));
  CHECK(point_to_segment_distance({32, 33}, pass) == Approx(0.6325).margin(1e-4));
  CHECK(testkit::oracle_segment_distance({30, 30}, pass.start, pass.end) == Approx(1.5811).margin(1e-3));

  const std::vector<Point2> far{{30, 55}};
  CHECK(count_bypassed_opponents(pass, far, 10.0) == 0);
  CHECK(point_to_segment_distance({30, 55}, pass) == Approx(22.136).margin(1e-3));

  const std::vector<Point2> on_edge{{25, 30}};
  CHECK(count_bypassed_opponents(pass, on_edge, 10.0) == 0);
}

TEST_CASE("three-line shape: pass breaks the forward and midfield lines") {
  const auto snap = three_line_snapshot({32, 33}, {66, 35});
  const LbpRecord rec = detect_lbp(snap, DetectConfig{});
  REQUIRE(rec.shape.k == 3);
  CHECK(rec.lines_crossed == 2);
  CHECK(rec.crossed_cluster_ids == std::vector<int>{0, 1});
  CHECK(rec.bypassed_count >= 2);
  CHECK(rec.is_lbp);

  const auto oracle = testkit::oracle_lbp(snap);
  CHECK(oracle.is_lbp);
  CHECK(oracle.lines_crossed == 2);
  CHECK(oracle.bypassed == rec.bypassed_count);
}

TEST_CASE("backward pass through a dense block is not an LBP") {
  const auto snap = three_line_snapshot({66, 35}, {32, 33});
  const LbpRecord rec = detect_lbp(snap, DetectConfig{});
  CHECK(rec.lines_crossed == 2);
  CHECK_FALSE(rec.is_lbp);
}

TEST_CASE("forward pass outside the band span is not an LBP") {
  PassSnapshot snap;
  snap.s = {30, 60};
  snap.r = {50, 62};
  // Near line centroid 41.25 spanning y in [20, 57]; the pass crosses it at
  // y = 61.1, with b, c and g all within 10 m of the path.
  snap.opponents = {opp("a", 39.5, 20), opp("b", 40.5, 52), opp("c", 40, 55), opp("g", 45, 57),
                    opp("d", 80, 30),   opp("e", 80.5, 40), opp("f", 79.5, 50)};
  const LbpRecord rec = detect_lbp(snap, DetectConfig{});
  REQUIRE(rec.shape.k == 2);
  CHECK(rec.lines_crossed == 0);
  CHECK(rec.bypassed_count == 3);
  CHECK_FALSE(rec.is_lbp);
  CHECK_FALSE(testkit::oracle_lbp(snap).is_lbp);
}

TEST_CASE("set pieces and short forward passes") {
  auto snap = three_line_snapshot({32, 33}, {66, 35});
  snap.is_open_play = false;
  CHECK_FALSE(detect_lbp(snap, DetectConfig{}).is_lbp);

  snap.is_open_play = true;
  DetectConfig strict;
  strict.min_forward_m = 40.0;
  CHECK_FALSE(detect_lbp(snap, strict).is_lbp);
}

TEST_CASE("bypass threshold") {
  // The same crossing with the radius shrunk until one opponent remains.
  auto snap = three_line_snapshot({32, 33}, {66, 35});
  DetectConfig cfg;
  cfg.bypass_radius_m = 4.0;
  const LbpRecord rec = detect_lbp(snap, cfg);
  CHECK(rec.bypassed_count == 1);  // m3 at (57.5, 38), 3.49 m away
  CHECK_FALSE(rec.is_lbp);
}

TEST_CASE("goalkeeper inclusion in the shape is configurable") {
  auto snap = three_line_snapshot({32, 33}, {66, 35});
  DetectConfig cfg;
  cfg.shape.exclude_goalkeeper = false;
  cfg.shape.k_candidates = {2, 3, 4};
  const LbpRecord rec = detect_lbp(snap, cfg);
  CHECK(rec.shape.k >= 3);
  int members = 0;
  for (const auto& l : rec.shape.lines) members += static_cast<int>(l.member_ids.size());
  CHECK(members == 11);
}

TEST_CASE("SBR from free-space radii") {
  CHECK(space_from_distances(3.0, 3.0).sbr == 0.0);
  CHECK(space_from_distances(1.0, 2.0).sbr == 3.0);
  CHECK(space_from_distances(1.0, std::sqrt(17.52)).sbr == Approx(16.52).margin(1e-9));
  for (double lambda : {0.5, 2.0, 10.0})
    CHECK(space_from_distances(1.3 * lambda, 4.1 * lambda).sbr ==
          Approx(space_from_distances(1.3, 4.1).sbr).margin(1e-9));

  const auto clamped = space_from_distances(0.0, 2.0);
  CHECK(clamped.clamped);
  CHECK(clamped.d_p == kMinPasserSpaceM);
  CHECK(clamped.sbr == Approx(399.0));
  CHECK(space_from_distances(-1.0, 0.0).sbr == -1.0);
}

TEST_CASE("SBR reads opponents at release for the passer and at reception for the receiver") {
  PassSnapshot snap;
  snap.s = {10, 10};
  snap.r = {50, 10};
  snap.opponents = {opp("x", 11, 10), opp("y", 50, 40)};
  snap.opponents_at_reception = {opp("x", 50, 12), opp("y", 90, 40)};
  const SpaceEstimate est = compute_sbr(snap);
  CHECK(est.d_p == Approx(1.0));
  CHECK(est.d_r == Approx(2.0));
  CHECK(est.sbr == Approx(3.0));
}

TEST_CASE("evaluate_pass rejects degenerate passes") {
  auto snap = three_line_snapshot({40, 30}, {40.05, 30});
  CHECK_THROWS_AS(evaluate_pass(snap, DetectConfig{}), DegeneratePassError);
}

TEST_CASE("detect_all keeps failures as invalid records") {
  TempDir dir("detect_all");
  write_minimal_match(dir.path());
  NormalizedMatch m = load_match_dir(dir.path());
  auto records = detect_all(m, DetectConfig{});
  REQUIRE(records.size() == 1);
  CHECK(records[0].valid);
  CHECK(records[0].match_id == m.match_id);

  m.frames[0].players.erase(m.frames[0].players.begin() + 1);  // passer A1 gone
  records = detect_all(m, DetectConfig{});
  REQUIRE(records.size() == 1);
  CHECK_FALSE(records[0].valid);
  CHECK_FALSE(records[0].is_lbp);
  CHECK(records[0].error.find("MissingPlayerError") != std::string::npos);

  m.events.clear();
  CHECK(detect_all(m, DetectConfig{}).empty());
}
