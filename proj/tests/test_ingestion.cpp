#include <catch_amalgamated.hpp>

#include "lbp/testkit/generator.hpp"
#include "support.hpp"

using namespace lbp;
using namespace lbp::test;
using Catch::Approx;

namespace {

/// One player, one coordinate per frame.
NormalizedMatch trajectory(const std::vector<double>& xs) {
  NormalizedMatch m;
  m.player_ids = {"p"};
  m.team_ids = {"t"};
  for (std::size_t i = 0; i < xs.size(); ++i) {
    TrackingFrame f;
    f.frame_id = static_cast<FrameId>(i);
    f.timestamp_s = static_cast<double>(i) / 29.97;
    f.players.push_back({0, 0, {xs[i], 34.0}});
    m.frames.push_back(f);
  }
  return m;
}

std::vector<double> xs_of(const NormalizedMatch& m) {
  std::vector<double> out;
  for (const auto& f : m.frames) out.push_back(f.players.at(0).pos.x);
  return out;
}

}  // namespace

TEST_CASE("minimal fixture loads") {
  TempDir dir("ingest");
  write_minimal_match(dir.path());
  LoadDiagnostics diag;
  const NormalizedMatch m = load_match_dir(dir.path(), &diag);
  CHECK(m.frames.size() == 2);
  REQUIRE(m.events.size() == 1);
  CHECK(m.events[0].receiver_id == "A2");
  CHECK(m.events[0].end_frame_id == 1);
  CHECK_FALSE(m.frames[1].ball.has_value());
  CHECK(m.roster.is_goalkeeper("B0"));
  CHECK(diag.warnings.empty());
}

TEST_CASE("event 5 s after the last frame is a sync error") {
  TempDir dir("sync");
  write_minimal_match(dir.path());
  write_text(dir / "events.json", R"([{"event_id": "late", "type": "shot", "team_id": "A", "player_id": "A2",
    "t": 5.04, "outcome": "saved"}])");
  CHECK_THROWS_AS(load_match_dir(dir.path()), SyncError);
}

TEST_CASE("timestamp-only events snap to the nearest frame") {
  TempDir dir("snap");
  write_minimal_match(dir.path());
  write_text(dir / "events.json", R"([{"event_id": "s", "type": "shot", "team_id": "A", "player_id": "A2",
    "t": 0.9, "outcome": "saved"}])");
  const NormalizedMatch m = load_match_dir(dir.path());
  REQUIRE(m.events.size() == 1);
  CHECK(m.events[0].frame_id == 1);
}

TEST_CASE("schema violations are rejected") {
  TempDir dir("schema");
  write_minimal_match(dir.path());

  SECTION("frame ids must increase") {
    const std::string line = R"({"frame_id":0,"t":0,"players":[],"ball":null})";
    write_text(dir / "tracking.jsonl", line + "\n" + line + "\n");
    CHECK_THROWS_AS(load_match_dir(dir.path()), SchemaError);
  }
  SECTION("positions outside the padded pitch") {
    write_text(dir / "tracking.jsonl", R"({"frame_id":0,"t":0,"players":[{"pid":"A1","tid":"A","x":111,"y":3}],"ball":null})"
                                       "\n");
    CHECK_THROWS_AS(load_match_dir(dir.path()), BoundsError);
  }
  SECTION("completed pass needs a receiver") {
    write_text(dir / "events.json", R"([{"event_id":"e","type":"pass","team_id":"A","player_id":"A1","frame_id":0,"outcome":"complete"}])");
    CHECK_THROWS_AS(load_match_dir(dir.path()), SchemaError);
  }
  SECTION("pitch dimensions are range checked") {
    write_text(dir / "meta.json", R"({"pitch_length_m": 130, "pitch_width_m": 68, "frame_rate_hz": 25})");
    CHECK_THROWS_AS(load_match_dir(dir.path()), SchemaError);
  }
  SECTION("missing file") {
    fs::remove(dir / "roster.json");
    CHECK_THROWS_AS(load_match_dir(dir.path()), Error);
  }
}

TEST_CASE("load, write, load is bit-exact") {
  testkit::SyntheticPlan plan;
  plan.seed = 77;
  plan.match_id = "rt";
  plan.duration_s = 120;
  plan.n_passes = 10;
  plan.planted_lbp_specs = {{2, 3, 6.0}};
  const NormalizedMatch original = testkit::generate_match(plan).first;

  TempDir dir("roundtrip");
  write_match(original, dir / "rt");
  const NormalizedMatch once = load_match_dir(dir / "rt");
  CHECK(once == original);
  write_match(once, dir / "rt2");
  NormalizedMatch twice = load_match_dir(dir / "rt2");
  twice.match_id = once.match_id;
  CHECK(twice == once);
  CHECK(read_text(dir / "rt" / "tracking.jsonl") == read_text(dir / "rt2" / "tracking.jsonl"));
}

TEST_CASE("full-length synthetic match loads without warnings") {
  testkit::SyntheticPlan plan;
  plan.match_id = "full";
  plan.duration_s = 5400;
  plan.n_passes = 200;
  const NormalizedMatch m = testkit::generate_match(plan).first;
  CHECK(m.frames.size() == 161838);

  TempDir dir("full");
  write_match(m, dir / "full");
  LoadDiagnostics diag;
  const NormalizedMatch loaded = load_match_dir(dir / "full", &diag);
  CHECK(loaded.frames.size() == 161838);
  CHECK(diag.warnings.empty());
  CHECK(diag.dropped_events == 0);
}

TEST_CASE("smoothing: closed-form cases") {
  CHECK(smooth_positions(trajectory({1, 5, 2, 8}), 1) == trajectory({1, 5, 2, 8}));

  const auto constant = xs_of(smooth_positions(trajectory(std::vector<double>(20, 30.0)), 7));
  for (double x : constant) CHECK(x == Approx(30.0));

  const auto zigzag = xs_of(smooth_positions(trajectory({0, 10, 0, 10, 0}), 3));
  REQUIRE(zigzag.size() == 5);
  CHECK(zigzag[0] == Approx(5.0));
  CHECK(zigzag[1] == Approx(10.0 / 3));
  CHECK(zigzag[2] == Approx(20.0 / 3));
  CHECK(zigzag[3] == Approx(10.0 / 3));
  CHECK(zigzag[4] == Approx(5.0));

  CHECK_THROWS_AS(smooth_positions(trajectory({1, 2}), 4), ConfigError);
  CHECK_THROWS_AS(smooth_positions(trajectory({1, 2}), 0), ConfigError);
}

TEST_CASE("smoothing is shift-equivariant on interior frames") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 100);
  std::vector<double> xs(60);
  for (auto& x : xs) x = u(rng);
  const int shift = 5, window = 7, half = 3;
  std::vector<double> shifted(xs.begin() + shift, xs.end());
  const auto a = xs_of(smooth_positions(trajectory(xs), window));
  const auto b = xs_of(smooth_positions(trajectory(shifted), window));
  for (std::size_t i = half; i + half < b.size(); ++i) CHECK(b[i] == Approx(a[i + shift]).margin(1e-12));
}

TEST_CASE("smoothing restarts where a player is missing") {
  NormalizedMatch m = trajectory({0, 0, 0, 90, 90, 90});
  m.frames[2].players.clear();  // gap splits the run into [0,0] and [90,90,90]
  const auto out = smooth_positions(m, 3);
  CHECK(out.frames[1].players[0].pos.x == Approx(0.0));
  CHECK(out.frames[3].players[0].pos.x == Approx(90.0));
}

TEST_CASE("orientation: reflection") {
  const PitchMeta meta;
  const Point2 p = reflect_point({80, 30}, meta);
  CHECK(p.x == Approx(25.0));
  CHECK(p.y == Approx(38.0));
  const Point2 back = reflect_point(p, meta);
  CHECK(back.x == 80.0);
  CHECK(back.y == 30.0);
}

TEST_CASE("orientation: team already attacking +x is unchanged") {
  TempDir dir("orient");
  write_minimal_match(dir.path());
  const NormalizedMatch m = load_match_dir(dir.path());
  const NormalizedMatch a = normalize_orientation(m, "A");
  CHECK(a.frames == m.frames);
  const NormalizedMatch b = normalize_orientation(m, "B");
  CHECK(b.frames[0].players[1].pos == reflect_point(m.frames[0].players[1].pos, m.meta));
  CHECK(normalize_orientation(b, "B").frames == b.frames);
}

TEST_CASE("orientation: goalkeeper inference") {
  TempDir dir("infer");
  write_minimal_match(dir.path());
  write_text(dir / "meta.json", R"({"pitch_length_m": 105, "pitch_width_m": 68, "frame_rate_hz": 29.97,
    "periods": [{"id": 1, "start_frame": 0, "end_frame": 1}]})");
  write_text(dir / "tracking.jsonl",
             R"({"frame_id":0,"t":0,"players":[{"pid":"A0","tid":"A","x":8,"y":34},{"pid":"A1","tid":"A","x":40,"y":30},{"pid":"A2","tid":"A","x":60,"y":40},{"pid":"B0","tid":"B","x":97,"y":34},{"pid":"B1","tid":"B","x":50,"y":34}],"ball":null})"
             "\n"
             R"({"frame_id":1,"t":0.0333,"players":[{"pid":"A0","tid":"A","x":8,"y":34},{"pid":"A1","tid":"A","x":41,"y":30},{"pid":"A2","tid":"A","x":61,"y":40},{"pid":"B0","tid":"B","x":97,"y":34},{"pid":"B1","tid":"B","x":50,"y":35}],"ball":null})"
             "\n");
  const NormalizedMatch m = load_match_dir(dir.path());
  const auto dirs = resolve_attack_directions(m);
  CHECK(direction_of(dirs, "A", 1) == AttackDirection::PositiveX);
  CHECK(direction_of(dirs, "B", 1) == AttackDirection::NegativeX);
}

TEST_CASE("snapshot reads release and reception frames") {
  testkit::SyntheticPlan plan;
  plan.seed = 19;
  plan.duration_s = 200;
  plan.n_passes = 12;
  plan.noise_sigma_m = 0.0;
  const auto [m, ledger] = testkit::generate_match(plan);
  const auto dirs = resolve_attack_directions(m);
  for (std::size_t i = 0; i < m.events.size(); ++i) {
    const MatchEvent& e = m.events[i];
    if (!is_completed_pass(e)) continue;
    const PassSnapshot snap = snapshot_pass(m, i, dirs);
    CHECK(snap.t_frame == e.frame_id);
    CHECK(snap.reception_frame == e.frame_id + 30);
    CHECK(snap.opponents.size() == 11);
    const auto release = m.frame_index(e.frame_id);
    const auto passer = m.player_index(e.player_id);
    REQUIRE(release);
    for (const auto& p : m.frames[*release].players)
      if (p.player == *passer) CHECK(snap.s == orient_point(p.pos, m.meta, direction_of(dirs, e.team_id, snap.period)));
    for (const auto& o : snap.opponents) {
      CHECK(o.pos.x >= -5.0);
      CHECK(o.pos.x <= 110.0);
    }
  }
}

TEST_CASE("snapshot: absent receiver") {
  TempDir dir("absent");
  write_minimal_match(dir.path());
  NormalizedMatch m = load_match_dir(dir.path());
  const auto a2 = *m.player_index("A2");
  auto& players = m.frames[1].players;
  players.erase(std::remove_if(players.begin(), players.end(), [&](const PlayerPosition& p) { return p.player == a2; }),
                players.end());
  CHECK_THROWS_AS(snapshot_pass(m, 0, resolve_attack_directions(m)), MissingPlayerError);
}

TEST_CASE("snapshot: reception fallback without end_frame_id") {
  TempDir dir("fallback");
  write_minimal_match(dir.path());
  NormalizedMatch m = load_match_dir(dir.path());
  m.events[0].end_frame_id.reset();
  // Ball at the passer in frame 0, receiver 20 m away: constant-speed estimate
  // lands beyond the last frame and clamps to it.
  const PassSnapshot snap = snapshot_pass(m, 0, resolve_attack_directions(m));
  CHECK(snap.reception_frame == 1);
}
