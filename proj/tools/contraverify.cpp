// contraverify command-line front end.

#include <CLI11.hpp>
#include <iostream>

#include "contraverify/driver.hpp"

using namespace contraverify;

namespace {

struct Flags
{
  std::optional<std::string> solver;
  std::optional<double> timeout;
  std::optional<std::string> seeds;
  std::optional<std::string> coverage;
  std::optional<int> unroll;
  std::optional<int> min_budget;
  std::optional<int> workers;
  std::optional<std::string> out;
  bool keep_smt = false;
  bool trace    = false;
  bool json     = false;
};

void
add_common(CLI::App* cmd, Flags& f)
{
  cmd->add_option("--solver", f.solver, "SMT solver executable");
  cmd->add_option("--timeout", f.timeout, "Per-query timeout in seconds");
  cmd->add_option("--seeds", f.seeds, "Comma-separated solver seeds");
  cmd->add_option("--coverage", f.coverage, "Coverage goal: branch or mcdc");
  cmd->add_option("--unroll", f.unroll, "Loop unrolling depth for test seeding");
  cmd->add_option("--min-budget", f.min_budget, "Re-verification budget for minimization");
  cmd->add_option("--workers", f.workers, "Worker threads");
  cmd->add_option("--out", f.out, "Output directory (empty string disables writing)");
  cmd->add_flag("--keep-smt", f.keep_smt, "Keep SMT-LIB scripts under <out>/smt");
  cmd->add_flag("--trace", f.trace, "Progress on stderr; execution traces for run-tests");
  cmd->add_flag("--json", f.json, "Print the machine-readable report instead of the summary");
}

RunConfig
resolve(const Flags& f)
{
  RunConfig cfg = default_config();
  apply_config_file(cfg, kConfigFileName);
  apply_environment(cfg);
  std::string text;
  if (f.solver) text += "solver = \"" + *f.solver + "\"\n";
  if (f.seeds) text += "seeds = " + *f.seeds + "\n";
  apply_config_text(cfg, text);
  if (f.timeout) cfg.solver.timeout_seconds = *f.timeout;
  if (f.coverage) cfg.coverage = *f.coverage;
  if (f.unroll) cfg.unroll = *f.unroll;
  if (f.min_budget) cfg.min_budget = *f.min_budget;
  if (f.workers) cfg.workers = *f.workers;
  if (f.out) cfg.out_dir = *f.out;
  if (f.keep_smt) cfg.keep_smt = true;
  if (f.trace) cfg.trace = true;
  check_config(cfg);
  return cfg;
}

}  // namespace

int
main(int argc, char** argv)
{
  CLI::App app{"Contract verification, proof-driven testing and fixing"};
  app.require_subcommand(1);

  Flags flags;
  std::vector<std::string> files;
  std::string manifest;

  auto* verify = app.add_subcommand("verify", "Prove every routine; emit tests for failures");
  auto* testgen = app.add_subcommand("testgen", "Generate a coverage suite with the prover");
  auto* run = app.add_subcommand("run-tests", "Execute a test manifest against programs");
  auto* fix = app.add_subcommand("fix", "Propose and validate fixes for failed proofs");
  for (auto* cmd : {verify, testgen, run, fix})
  {
    add_common(cmd, flags);
    cmd->add_option("files", files, "Program files")->required();
  }
  run->add_option("--manifest", manifest, "Test manifest (manifest.json)")->required();

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError& e)
  {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInput;
  }

  RunConfig cfg;
  try
  {
    cfg = resolve(flags);
  }
  catch (const ConfigError& e)
  {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitInput;
  }

  RunReport report;
  try
  {
    if (*verify)
      report = cmd_verify(files, cfg);
    else if (*testgen)
      report = cmd_testgen(files, cfg);
    else if (*run)
      report = cmd_runtests(files, manifest, cfg);
    else
      report = cmd_fix(files, cfg);
  }
  catch (const std::exception& e)
  {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  }

  if (flags.json)
    std::cout << report.serialize();
  else
    std::cout << report.text;
  return report.exit_code;
}
