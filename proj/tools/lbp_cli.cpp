// lbp: line-breaking pass detection over normalized tracking + event data.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lbp/lbp.hpp"
#include "lbp/testkit/generator.hpp"

namespace {

struct CommonOptions {
  std::string config_path;
  std::optional<int> jobs;
  std::string format;
  bool per90 = false;
};

lbp::RunConfig resolve_config(const CommonOptions& o) {
  lbp::RunConfig cfg = o.config_path.empty() ? lbp::RunConfig{} : lbp::load_config(o.config_path);
  if (o.jobs) cfg.jobs = *o.jobs;
  if (!o.format.empty()) {
    const auto f = lbp::parse_output_format(o.format);
    if (!f) throw lbp::ConfigError("--format must be csv, json or both");
    cfg.format = *f;
  }
  if (o.per90) cfg.per90 = true;
  lbp::validate(cfg);
  return cfg;
}

void add_common(CLI::App* cmd, CommonOptions& o, bool with_jobs) {
  cmd->add_option("--config", o.config_path, "Flat key=value config file")->check(CLI::ExistingFile);
  if (with_jobs) cmd->add_option("--jobs", o.jobs, "Worker threads (0 = logical cores)");
  cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json", "both"}));
}

struct GenerateOptions {
  std::string out;
  std::string plan_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> n_passes;
  std::optional<double> noise;
  std::optional<int> decoys;
  std::optional<double> duration;
  std::string match_id;
  std::vector<std::string> lbps;    // "lines,bypass[,forward]"
  std::vector<std::string> chains;  // "KIND:outcome[:xg]"
  int tournament = 0;
};

lbp::testkit::PlantedLbpSpec parse_lbp_flag(const std::string& s) {
  std::vector<double> v;
  std::size_t pos = 0;
  try {
    while (pos <= s.size()) {
      const std::size_t comma = std::min(s.find(',', pos), s.size());
      v.push_back(std::stod(s.substr(pos, comma - pos)));
      pos = comma + 1;
    }
  } catch (const std::exception&) {
    throw lbp::ConfigError("--lbp expects lines,bypass[,forward_margin_m]: '" + s + "'");
  }
  if (v.size() < 2 || v.size() > 3) throw lbp::ConfigError("--lbp expects lines,bypass[,forward_margin_m]");
  return {static_cast<int>(v[0]), static_cast<int>(v[1]), v.size() == 3 ? v[2] : 5.0};
}

lbp::testkit::PlantedChainSpec parse_chain_flag(const std::string& s) {
  const auto a = s.find(':');
  if (a == std::string::npos) throw lbp::ConfigError("--chain expects KIND:outcome[:xg]: '" + s + "'");
  const auto b = s.find(':', a + 1);
  const auto kind = lbp::parse_chain_kind(s.substr(0, a));
  const auto outcome = lbp::parse_chain_outcome(s.substr(a + 1, b == std::string::npos ? std::string::npos : b - a - 1));
  if (!kind || !outcome) throw lbp::ConfigError("--chain: unknown kind or outcome in '" + s + "'");
  lbp::testkit::PlantedChainSpec spec{*kind, *outcome, std::nullopt};
  if (b != std::string::npos) {
    try {
      spec.xg = std::stod(s.substr(b + 1));
    } catch (const std::exception&) {
      throw lbp::ConfigError("--chain: bad xg in '" + s + "'");
    }
  }
  return spec;
}

void write_generated(const lbp::testkit::SyntheticPlan& plan, const lbp::fs::path& dir) {
  const auto [match, ledger] = lbp::testkit::generate_match(plan);
  lbp::write_match(match, dir);
  lbp::detail::save_text(dir / "ledger.json", ledger.to_json().dump(2) + "\n");
  std::cout << plan.match_id << ": " << match.frames.size() << " frames, " << match.events.size() << " events, "
            << ledger.lbp_event_ids().size() << " expected LBPs, " << ledger.chains.size() << " expected chains\n";
}

int run_generate(const GenerateOptions& g) {
  if (g.tournament > 0) {
    for (int i = 0; i < g.tournament; ++i) {
      const auto plan = lbp::testkit::tournament_plan(g.seed.value_or(1), i);
      write_generated(plan, lbp::fs::path(g.out) / plan.match_id);
    }
    return lbp::kExitOk;
  }
  lbp::testkit::SyntheticPlan plan;
  if (!g.plan_path.empty()) {
    try {
      plan = lbp::testkit::plan_from_json(nlohmann::json::parse(lbp::detail::slurp(g.plan_path)));
    } catch (const nlohmann::json::parse_error& e) {
      throw lbp::ConfigError(std::string("plan file: ") + e.what());
    }
  }
  if (g.seed) plan.seed = *g.seed;
  if (g.n_passes) plan.n_passes = *g.n_passes;
  if (g.noise) plan.noise_sigma_m = *g.noise;
  if (g.decoys) plan.n_decoys = *g.decoys;
  if (g.duration) plan.duration_s = *g.duration;
  if (!g.match_id.empty()) plan.match_id = g.match_id;
  for (const auto& s : g.lbps) plan.planted_lbp_specs.push_back(parse_lbp_flag(s));
  for (const auto& s : g.chains) plan.planted_chain_specs.push_back(parse_chain_flag(s));
  write_generated(plan, g.out);
  return lbp::kExitOk;
}

int run_selftest() {
  bool ok = true;
  for (const auto& c : lbp::selftest_checks()) {
    std::cout << (c.ok ? "PASS " : "FAIL ") << c.name << "\n";
    ok = ok && c.ok;
  }
  return ok ? lbp::kExitOk : lbp::kExitPartialFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Line-breaking pass detection and reporting"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "lbp 1.0.0");

  CommonOptions detect_opts, report_opts;
  std::string detect_in, detect_out, report_in, report_out, validate_in;
  GenerateOptions gen;

  auto* detect = app.add_subcommand("detect", "Detect LBPs and chains in every match under a directory");
  detect->add_option("input_dir", detect_in, "Match directory or directory of match directories")->required();
  detect->add_option("--out", detect_out, "Output directory")->required();
  add_common(detect, detect_opts, true);

  auto* report = app.add_subcommand("report", "Aggregate detect outputs into team/player tables and plot data");
  report->add_option("records_dir", report_in, "Output directory of a detect run")->required();
  report->add_option("--out", report_out, "Output directory")->required();
  add_common(report, report_opts, false);
  report->add_flag("--per90", report_opts.per90, "Add per-90 normalized columns");

  auto* validate = app.add_subcommand("validate", "Lint normalized input files");
  validate->add_option("input_dir", validate_in, "Match directory or directory of match directories")->required();

  auto* generate = app.add_subcommand("generate", "Write a synthetic match with its ground-truth ledger");
  generate->add_option("--out", gen.out, "Output match directory (or parent with --tournament)")->required();
  generate->add_option("--plan", gen.plan_path, "Plan JSON file")->check(CLI::ExistingFile);
  generate->add_option("--seed", gen.seed, "RNG seed");
  generate->add_option("--n-passes", gen.n_passes, "Minimum number of passes");
  generate->add_option("--noise", gen.noise, "Position noise sigma in metres (<= 0.3)");
  generate->add_option("--decoys", gen.decoys, "Number of near-miss passes");
  generate->add_option("--duration", gen.duration, "Match duration in seconds");
  generate->add_option("--match-id", gen.match_id, "Match id");
  generate->add_option("--lbp", gen.lbps, "Planted LBP as lines,bypass[,forward_margin_m]; repeatable");
  generate->add_option("--chain", gen.chains, "Planted chain as LBPCh1|LBPCh2:outcome[:xg]; repeatable");
  generate->add_option("--tournament", gen.tournament, "Write N matches of the built-in tournament plan");

  auto* selftest = app.add_subcommand("selftest", "Check that config defaults equal the module defaults");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? lbp::kExitOk : lbp::kExitInvalidInvocation;
  }

  try {
    if (*detect) return lbp::cmd_detect(detect_in, detect_out, resolve_config(detect_opts), &std::cout);
    if (*report) return lbp::cmd_report(report_in, report_out, resolve_config(report_opts), &std::cout);
    if (*validate) return lbp::cmd_validate(validate_in, std::cout);
    if (*generate) return run_generate(gen);
    if (*selftest) return run_selftest();
  } catch (const lbp::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return lbp::kExitInvalidInvocation;
  } catch (const lbp::MissingInputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return lbp::kExitInvalidInvocation;
  } catch (const lbp::PlanInfeasibleError& e) {
    std::cerr << "error: infeasible plan: " << e.what() << "\n";
    return lbp::kExitInvalidInvocation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return lbp::kExitPartialFailure;
  }
  return lbp::kExitInvalidInvocation;
}
