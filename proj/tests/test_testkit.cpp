#include <catch_amalgamated.hpp>

#include "lbp/testkit/generator.hpp"
#include "lbp/testkit/oracles.hpp"
#include "lbp/testkit/scoring.hpp"
#include "support.hpp"

using namespace lbp;
using namespace lbp::test;
using Catch::Approx;

namespace {

testkit::LedgerScore run_and_score(const testkit::SyntheticPlan& plan) {
  const auto [m, ledger] = testkit::generate_match(plan);
  const auto result = process_match(m, RunConfig{});
  return testkit::score_against_ledger(ledger, result.records, result.chains);
}

void require_exact(const testkit::LedgerScore& s) {
  for (const auto& n : s.notes) UNSCOPED_INFO(n);
  CHECK(s.exact());
}

}  // namespace

TEST_CASE("plan with filler only has no LBPs") {
  testkit::SyntheticPlan plan;
  plan.seed = 3;
  plan.n_passes = 30;
  const auto [m, ledger] = testkit::generate_match(plan);
  CHECK(ledger.lbp_event_ids().empty());
  CHECK(ledger.passes.size() >= 30);
  const auto s = run_and_score(plan);
  require_exact(s);
  CHECK(s.true_positives == 0);
}

TEST_CASE("planted LBPs among decoys are found exactly") {
  testkit::SyntheticPlan plan;
  plan.seed = 8;
  plan.n_passes = 40;
  plan.n_decoys = 5;
  plan.planted_lbp_specs = {{1, 2, 5.0}, {2, 2, 6.0}, {3, 3, 5.0}, {1, 4, 7.0}, {2, 5, 5.0}};
  const auto [m, ledger] = testkit::generate_match(plan);
  CHECK(ledger.lbp_event_ids().size() == 5);
  std::size_t decoys = 0;
  for (const auto& p : ledger.passes) decoys += p.role.starts_with("decoy:") ? 1 : 0;
  CHECK(decoys == 5);
  const auto s = run_and_score(plan);
  require_exact(s);
  CHECK(s.true_positives == 5);
}

TEST_CASE("decoys are rejected or stay out of chains") {
  testkit::SyntheticPlan plan;
  plan.seed = 12;
  plan.n_decoys = 24;
  const auto [m, ledger] = testkit::generate_match(plan);
  std::size_t non_direct = 0;
  for (const auto& p : ledger.passes) {
    if (!p.role.starts_with("decoy:")) continue;
    // A non-direct decoy is a real LBP whose receiver passes on before the shot.
    const bool lbp_decoy = p.role == "decoy:non_direct";
    non_direct += lbp_decoy ? 1 : 0;
    CHECK(p.is_lbp == lbp_decoy);
  }
  CHECK(non_direct == 4);
  CHECK(ledger.chains.empty());
  const auto s = run_and_score(plan);
  require_exact(s);
  CHECK(s.true_positives == non_direct);
  CHECK(s.chains_unexpected == 0);
}

TEST_CASE("chain plans") {
  testkit::SyntheticPlan plan;
  plan.seed = 14;
  plan.planted_chain_specs = {{ChainKind::LBPCh1, ChainOutcome::Goal, 0.4},
                              {ChainKind::LBPCh2, ChainOutcome::Disallowed, std::nullopt},
                              {ChainKind::LBPCh2, ChainOutcome::ShotOffTarget, 0.05}};
  const auto [m, ledger] = testkit::generate_match(plan);
  REQUIRE(ledger.chains.size() == 3);
  CHECK(ledger.chains[1].connector_id.has_value());
  const auto s = run_and_score(plan);
  require_exact(s);
  CHECK(s.chains_matched == 3);
}

TEST_CASE("generation is deterministic in the seed") {
  const auto plan = testkit::tournament_plan(5, 2);
  const auto a = testkit::generate_match(plan);
  const auto b = testkit::generate_match(plan);
  CHECK(a.first == b.first);
  CHECK(a.second.to_json() == b.second.to_json());

  auto other = plan;
  other.seed += 1;
  CHECK_FALSE(testkit::generate_match(other).first == a.first);
}

TEST_CASE("infeasible plans are rejected") {
  testkit::SyntheticPlan plan;
  SECTION("noise") { plan.noise_sigma_m = 0.5; }
  SECTION("too few bypassed") { plan.planted_lbp_specs = {{1, 1, 5.0}}; }
  SECTION("four lines") { plan.planted_lbp_specs = {{4, 2, 5.0}}; }
  SECTION("more bypassed than players in the crossed lines") { plan.planted_lbp_specs = {{1, 5, 5.0}}; }
  SECTION("not enough time") {
    plan.duration_s = 5.0;
    plan.n_passes = 50;
  }
  SECTION("same team twice") { plan.teams = {"x", "x"}; }
  CHECK_THROWS_AS(testkit::generate_match(plan), PlanInfeasibleError);
}

TEST_CASE("plan JSON round trip") {
  const auto plan = testkit::tournament_plan(9, 3);
  const auto back = testkit::plan_from_json(testkit::to_json(plan));
  CHECK(testkit::to_json(back) == testkit::to_json(plan));
  CHECK_THROWS_AS(testkit::plan_from_json(nlohmann::json::array()), ConfigError);
  CHECK_THROWS_AS(testkit::plan_from_json({{"planted_chain_specs", {{{"kind", "LBPCh9"}}}}}), ConfigError);
  CHECK_THROWS_AS(testkit::plan_from_json({{"n_passes", "many"}}), ConfigError);
}

TEST_CASE("generated matches survive disk") {
  const auto [m, ledger] = testkit::generate_match(testkit::tournament_plan(2, 0));
  TempDir dir("gen");
  // The loader takes the match id from the directory name.
  write_match(m, dir / m.match_id);
  CHECK(validate_match_dir(dir / m.match_id).clean());
  CHECK(load_match_dir(dir / m.match_id) == m);
}

TEST_CASE("oracles on hand-checked inputs") {
  const testkit::OracleBand band{50, 20, 40};
  CHECK(testkit::oracle_crosses_band({40, 30}, {60, 30}, band));
  CHECK_FALSE(testkit::oracle_crosses_band({40, 10}, {60, 10}, band));
  CHECK_FALSE(testkit::oracle_crosses_band({40, 30}, {45, 30}, band));
  CHECK(testkit::oracle_segment_distance({5, 3}, {0, 0}, {10, 0}) == Approx(3.0).margin(1e-6));
  CHECK(testkit::oracle_segment_distance({13, 4}, {0, 0}, {10, 0}) == Approx(5.0).margin(1e-6));

  const auto c = testkit::oracle_cluster_1d({10, 10, 10, 40, 40, 40}, {2, 3, 4});
  CHECK(c.k == 2);
  const auto flat = testkit::oracle_cluster_1d({30, 30.2, 30.4}, {2, 3, 4});
  CHECK(flat.k == 1);
}
