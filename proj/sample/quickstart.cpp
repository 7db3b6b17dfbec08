// Library walkthrough: load (or synthesize) a match, detect line-breaking
// passes, build chains and print the top passers.
//
//   lbp_sample [match_dir]

#include <iostream>

#include "lbp/lbp.hpp"
#include "lbp/testkit/generator.hpp"

int main(int argc, char** argv) {
  lbp::NormalizedMatch match;
  if (argc > 1) {
    match = lbp::load_match_dir(argv[1]);
  } else {
    lbp::testkit::SyntheticPlan plan;
    plan.seed = 42;
    plan.planted_lbp_specs = {{1, 2, 6.0}, {2, 3, 8.0}, {3, 4, 10.0}};
    plan.planted_chain_specs = {{lbp::ChainKind::LBPCh2, lbp::ChainOutcome::Goal, 0.35}};
    match = lbp::testkit::generate_match(plan).first;
  }

  const lbp::RunConfig config;  // documented defaults
  const lbp::MatchResult result = lbp::process_match(match, config, 1);
  std::cout << match.match_id << ": " << result.records.size() << " completed passes, " << result.lbp_count()
            << " line-breaking\n";

  for (const auto& r : result.records) {
    if (!r.is_lbp) continue;
    std::cout << "  " << r.pass_event_id << " " << r.passer_id << " -> " << r.receiver_id << "  lines "
              << r.lines_crossed << "  bypassed " << r.bypassed_count << "  SBR " << lbp::format_float(r.space.sbr)
              << "\n";
  }
  for (const auto& c : result.chains)
    std::cout << "  " << lbp::to_string(c.kind) << " ending in " << lbp::to_string(c.outcome) << " by "
              << c.finisher_id << "\n";

  const auto stats = lbp::aggregate(result.records, result.chains, {});
  for (const auto& s : lbp::top_n(stats.players, "lbp_count", 3))
    std::cout << "  top: " << s.id << " with " << s.lbp_count << " LBPs\n";
}
