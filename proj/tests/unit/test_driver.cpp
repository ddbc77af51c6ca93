#include <gtest/gtest.h>

#include <cstdlib>

#include "../support.hpp"
#include "contraverify/driver.hpp"

using namespace contraverify;
using namespace testsupport;
namespace fs = std::filesystem;

namespace {

RunConfig
config(const std::string& out = "")
{
  RunConfig c = default_config();
  c.out_dir   = out;
  return c;
}

/// Runs the CLI in `dir` and returns its exit status.
int
cli(const fs::path& dir, const std::string& args, const std::string& env = "")
{
  std::string cmd = "cd '" + dir.string() + "' && " + env + " '" + CONTRAVERIFY_CLI + "' " + args + " > out.txt 2>&1";
  int rc          = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST(Config, ParsesKeyValueText)
{
  RunConfig c = default_config();
  apply_config_text(c, R"(
# comment
solver = "/opt/z3"   # trailing comment
timeout = 7
seeds = 3, 5
workers = 2
coverage = mcdc
unroll = 4
keep_smt = true
)");
  EXPECT_EQ(c.solver.executable, "/opt/z3");
  EXPECT_EQ(c.solver.timeout_seconds, 7.0);
  EXPECT_EQ(c.solver.seeds, (std::vector<unsigned>{3, 5}));
  EXPECT_EQ(c.workers, 2);
  EXPECT_EQ(c.coverage, "mcdc");
  EXPECT_EQ(c.unroll, 4);
  EXPECT_TRUE(c.keep_smt);
}

TEST(Config, RejectsUnknownKeysAndBadValues)
{
  RunConfig c = default_config();
  EXPECT_THROW(apply_config_text(c, "colour = red"), ConfigError);
  EXPECT_THROW(apply_config_text(c, "workers = many"), ConfigError);
  EXPECT_THROW(apply_config_text(c, "just text"), ConfigError);
}

TEST(Config, Invariants)
{
  EXPECT_NO_THROW(check_config(default_config()));
  for (auto bad : {std::function<void(RunConfig&)>([](RunConfig& c) { c.workers = 0; }),
                   std::function<void(RunConfig&)>([](RunConfig& c) { c.unroll = kMaxUnrollDepth + 1; }),
                   std::function<void(RunConfig&)>([](RunConfig& c) { c.solver.timeout_seconds = 0; }),
                   std::function<void(RunConfig&)>([](RunConfig& c) { c.coverage = "path"; })})
  {
    RunConfig c = default_config();
    bad(c);
    EXPECT_THROW(check_config(c), ConfigError);
  }
}

TEST(Report, RoundTripsLosslessly)
{
  RunReport r = cmd_verify({corpus("max.ec")}, config());
  RunReport back = RunReport::parse(r.serialize());
  EXPECT_EQ(back.doc, r.doc);
  EXPECT_EQ(back.exit_code, r.exit_code);
  EXPECT_EQ(back.text, r.text);
  EXPECT_TRUE(r.doc.contains("timings"));
  EXPECT_FALSE(r.comparable().contains("timings"));
}

TEST(Report, BindingJsonRoundTrip)
{
  ArgBinding b{{"a", Value::of_array({1, -2})}, {"f", Value::of_bool(true)}, {"x", Value::of_int(-9)}};
  EXPECT_EQ(binding_from_json(binding_json(b)), b);
}

TEST(ExitCodes, Matrix)
{
  auto dir = scratch("exit-codes");
  { std::ofstream(dir / "bad.ec") << "class X feature f do x := end end"; }
  EXPECT_EQ(cmd_verify({corpus("max.ec")}, config()).exit_code, kExitFailures);
  EXPECT_EQ(cmd_verify({corpus("max_fixed.ec")}, config()).exit_code, kExitOk);
  EXPECT_EQ(cmd_verify({(dir / "bad.ec").string()}, config()).exit_code, kExitInput);
  EXPECT_EQ(cmd_verify({(dir / "missing.ec").string()}, config()).exit_code, kExitInput);
  EXPECT_EQ(cmd_fix({corpus("max_fixed.ec")}, config()).exit_code, kExitOk);
  RunConfig broken    = config();
  broken.solver.executable = "/nonexistent/solver";
  EXPECT_EQ(cmd_verify({corpus("max.ec")}, broken).exit_code, kExitSolver);
  // Input errors are reported before any solver is started.
  EXPECT_EQ(cmd_verify({(dir / "bad.ec").string()}, broken).exit_code, kExitInput);
}

TEST(ExitCodes, RunTestsMissingFile)
{
  auto dir = scratch("missing-test");
  { std::ofstream(dir / "manifest.json") << R"({"tests":[{"file":"tests/nope.ec","program":"MAX"}]})"; }
  EXPECT_EQ(cmd_runtests({corpus("max.ec")}, (dir / "manifest.json").string(), config()).exit_code, kExitInput);
}

TEST(Commands, VerifyWritesTestsAndManifest)
{
  auto dir    = scratch("verify-out");
  RunReport r = cmd_verify({corpus("max.ec")}, config(dir.string()));
  EXPECT_TRUE(fs::exists(dir / "report.json"));
  EXPECT_TRUE(fs::exists(dir / "tests" / "t_max_proof_1.ec"));
  auto manifest = nlohmann::json::parse(slurp((dir / "manifest.json").string()));
  ASSERT_EQ(manifest["tests"].size(), 1u);
  EXPECT_EQ(manifest["tests"][0]["expected"], "violation is_max");
  EXPECT_EQ(manifest["tests"][0]["origin"], "proof");

  EXPECT_EQ(cmd_runtests({corpus("max_fixed.ec")}, (dir / "manifest.json").string(), config()).exit_code, kExitOk);
  EXPECT_EQ(cmd_runtests({corpus("max.ec")}, (dir / "manifest.json").string(), config()).exit_code, kExitFailures);
}

TEST(Commands, TestgenUnrollDrivesIterationCounts)
{
  RunConfig c = config();
  c.unroll    = 3;
  RunReport r = cmd_testgen({corpus("max_fixed.ec")}, c);
  EXPECT_EQ(r.exit_code, kExitOk);
  std::set<std::int64_t> its;
  for (const auto& l : r.doc["files"][0]["coverage"]["loops"])
    for (auto k : l["iterations"]) its.insert(k.get<std::int64_t>());
  // One element means zero iterations of the `max` loop.
  for (std::int64_t j = 0; j <= 3; ++j) EXPECT_TRUE(its.count(j)) << j;
}

TEST(Commands, FixReportHeadedByExpectedFix)
{
  RunReport r = cmd_fix({corpus("max.ec")}, config());
  const auto& f = r.doc["files"][0]["failures"][0];
  EXPECT_EQ(f["label"], "is_max");
  ASSERT_FALSE(f["ranked"].empty());
  EXPECT_NE(f["ranked"][0]["edit"].get<std::string>().find("i > a.count"), std::string::npos);
}

TEST(Cli, PrecedenceFlagOverEnvOverFile)
{
  auto dir = scratch("precedence");
  fs::copy_file(corpus("max_fixed.ec"), dir / "max.ec");
  { std::ofstream(dir / kConfigFileName) << "solver = \"/nonexistent/from-file\"\n"; }
  std::string real = default_solver_path();
  EXPECT_EQ(cli(dir, "verify max.ec --out ''"), kExitSolver);
  EXPECT_EQ(cli(dir, "verify max.ec --out ''", "CONTRAVERIFY_SOLVER='" + real + "'"), kExitOk);
  EXPECT_EQ(cli(dir, "verify max.ec --out '' --solver /nonexistent/flag", "CONTRAVERIFY_SOLVER='" + real + "'"),
            kExitSolver);
  EXPECT_EQ(cli(dir, "verify max.ec --out '' --solver '" + real + "'"), kExitOk);
}

TEST(Cli, BadConfigAndUsageAreInputErrors)
{
  auto dir = scratch("bad-config");
  fs::copy_file(corpus("max_fixed.ec"), dir / "max.ec");
  EXPECT_EQ(cli(dir, "verify max.ec --unroll 99"), kExitInput);
  EXPECT_EQ(cli(dir, "frobnicate max.ec"), kExitInput);
  { std::ofstream(dir / kConfigFileName) << "colour = red\n"; }
  EXPECT_EQ(cli(dir, "verify max.ec"), kExitInput);
}

TEST(Cli, EndToEndRegression)
{
  auto dir = scratch("cli-e2e");
  fs::copy_file(corpus("max.ec"), dir / "max.ec");
  fs::copy_file(corpus("max_fixed.ec"), dir / "fixed.ec");
  EXPECT_EQ(cli(dir, "verify max.ec --out out"), kExitFailures);
  EXPECT_EQ(cli(dir, "run-tests fixed.ec --manifest out/manifest.json --out rt --trace"), kExitOk);
  EXPECT_TRUE(fs::exists(dir / "rt" / "traces" / "t_max_proof_1.trace"));
  EXPECT_EQ(cli(dir, "run-tests max.ec --manifest out/manifest.json --out ''"), kExitFailures);
}
