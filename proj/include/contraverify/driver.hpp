#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "contraverify/seeding.hpp"
#include "contraverify/smt.hpp"

namespace contraverify {

enum ExitCode
{
  kExitOk = 0,
  kExitFailures = 1,
  kExitInput = 2,
  kExitSolver = 3,
};

struct RunConfig
{
  SolverConfig solver;
  int workers = 1;
  /// `branch` or `mcdc`
  std::string coverage = "branch";
  int unroll = 0;
  int min_budget = kDefaultMinimizationBudget;
  /// Output directory; nothing is written when empty.
  std::string out_dir = "contraverify-out";
  bool keep_smt = false;
  bool trace = false;
  std::int64_t step_budget = kDefaultStepBudget;
};

class ConfigError : public std::runtime_error
{
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kConfigFileName = "contraverify.toml";
inline constexpr const char* kSolverEnv = "CONTRAVERIFY_SOLVER";

/// Built-in defaults (solver from the build configuration).
RunConfig default_config();
/// `key = value` lines, `#` comments, optional double quotes around values.
void apply_config_text(RunConfig& cfg, std::string_view text);
/// No-op when the file does not exist.
void apply_config_file(RunConfig& cfg, const std::filesystem::path& path);
void apply_environment(RunConfig& cfg);
/// Numeric settings positive, unroll depth within range, known coverage goal.
void check_config(const RunConfig& cfg);

struct RunReport
{
  nlohmann::json doc;
  /// Human-readable summary.
  std::string text;
  int exit_code = kExitOk;

  /// Canonical JSON (sorted keys, two-space indent).
  std::string serialize() const;
  static RunReport parse(std::string_view json);
  /// The document without timings, for comparisons across runs.
  nlohmann::json comparable() const;
};

RunReport cmd_verify(const std::vector<std::string>& files, const RunConfig& cfg);
RunReport cmd_testgen(const std::vector<std::string>& files, const RunConfig& cfg);
/// Runs the manifest's tests against the given programs. Green means the
/// run ends normally (or the routine's precondition now rejects the input).
RunReport cmd_runtests(const std::vector<std::string>& files,
                       const std::string& manifest,
                       const RunConfig& cfg);
RunReport cmd_fix(const std::vector<std::string>& files, const RunConfig& cfg);

nlohmann::json binding_json(const ArgBinding& b);
ArgBinding binding_from_json(const nlohmann::json& j);

}  // namespace contraverify
