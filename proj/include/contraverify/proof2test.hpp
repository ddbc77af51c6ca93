#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "contraverify/evaluator.hpp"
#include "contraverify/smt.hpp"
#include "contraverify/testcase.hpp"
#include "contraverify/typecheck.hpp"
#include "contraverify/vcgen.hpp"

namespace contraverify {

inline constexpr int kDefaultMinimizationBudget = 32;
/// Array cells beyond this index are never pinned or shrunk.
inline constexpr std::int64_t kMaxShrunkCells = 64;

class NotACounterexample : public std::runtime_error
{
 public:
  using std::runtime_error::runtime_error;
};

/* -------------------------------------------------------------------------- */
/* Minimization                                                               */
/* -------------------------------------------------------------------------- */

/// One shrinkable input: a scalar, an array count, or an array cell.
struct ShrinkVariable
{
  enum class Kind
  {
    Scalar,
    Boolean,
    Count,
    Cell,
  };

  Kind kind = Kind::Scalar;
  std::string name;  // argument name
  std::int64_t index = 0;  // cells only

  /// `x`, `a.count`, `a[3]`
  std::string display() const;
  std::string smt() const;
};

struct VariableShrink
{
  ShrinkVariable variable;
  std::int64_t before = 0;
  std::int64_t after = 0;
  /// Solver calls spent on this variable.
  int runs = 0;
};

struct MinimizationReport
{
  Counterexample original;
  Counterexample minimized;
  /// Solver calls spent shrinking (excludes the two confirmation solves).
  int reverification_runs = 0;
  /// Initial pin check plus final confirmation.
  int confirmation_runs = 0;
  bool budget_exhausted = false;
  std::vector<VariableShrink> variables;

  /// Mean of (|before| - |after|) / |before| over integer variables (scalars,
  /// counts, and cells present before and after) whose original value is
  /// non-zero; 0 when there is none.
  double average_reduction() const;
  /// Largest solver-call count spent on a single variable.
  int max_runs_per_variable() const;
};

/// Greedy pinned search: counts (largest first), then integer and boolean
/// scalars (largest first), then cells in index order. For each variable the
/// smallest magnitude keeping the VC falsifiable, with earlier variables
/// pinned, is found by a doubling probe followed by bisection; +v is
/// preferred to -v. Variables named in `fixed` are pinned up front and left
/// alone. `budget` counts shrinking solver calls.
MinimizationReport minimize(const Counterexample& cex,
                            const VerificationCondition& vc,
                            const Routine& r,
                            const SolverConfig& cfg,
                            int budget = kDefaultMinimizationBudget,
                            const std::set<std::string>& fixed = {});

/// Shrink variables of a binding in the committed search order.
std::vector<ShrinkVariable> shrink_order(const ArgBinding& binding,
                                         const Routine& r,
                                         const std::set<std::string>& fixed = {});

/// One solver call per variable: with every other input pinned to its value
/// in `binding`, no strictly smaller magnitude for that variable keeps the VC
/// falsifiable. Returns the variables that could still shrink.
std::vector<std::string> one_minimality_violations(const ArgBinding& binding,
                                                   const VerificationCondition& vc,
                                                   const Routine& r,
                                                   const SolverConfig& cfg,
                                                   const std::set<std::string>& fixed = {});

/* -------------------------------------------------------------------------- */
/* Tests                                                                      */
/* -------------------------------------------------------------------------- */

TestCase counterexample_to_test(const Counterexample& cex, bool minimized);

/// Standalone `.ec` routine reproducing the test. Line 1 carries the
/// expectation header (`-- expect: violation <label>` or `-- expect: pass`).
std::string emit_test_source(const TestCase& t, const Routine& target, const std::string& name);

/// Canonical test file name `t_<routine>_<origin>_<n>.ec`.
std::string test_file_name(const TestCase& t, int n);

struct TestSource
{
  Expectation expected;
  std::string target;
  std::string origin;
  /// The test routine's name.
  std::string routine;
  Program program;
};

class TestFormatError : public std::runtime_error
{
 public:
  using std::runtime_error::runtime_error;
};

TestSource parse_test_source(std::string_view source);

/// Runs an emitted test routine against `target` (merged into one program).
/// The verdict is classified exactly as `run_test` does.
TestVerdict run_test_source(const TypedProgram& target,
                            const TestSource& test,
                            std::int64_t step_budget = kDefaultStepBudget);

/* -------------------------------------------------------------------------- */
/* Verification pipeline                                                      */
/* -------------------------------------------------------------------------- */

struct ProofFailure
{
  VerificationCondition vc;
  SolverVerdict::Kind verdict = SolverVerdict::Kind::Unknown;
  std::string reason;
};

struct Diagnosis
{
  std::string vc_key;
  std::string routine;
  std::string kind;
  std::string label;
  SourceSpan location;
  std::string path_context;
  /// Input table rows (`a.count` -> `2`).
  std::vector<std::pair<std::string, std::string>> inputs;
  bool has_counterexample = false;
  bool specification_gap = false;
  std::string gap_outcome;
  std::string test_file;
  std::string text;
};

Diagnosis diagnose(const ProofFailure& f,
                   const std::optional<Counterexample>& cex,
                   const Routine& r,
                   const std::string& test_file = "",
                   const std::optional<Outcome>& gap = std::nullopt);

struct VcRecord
{
  VerificationCondition vc;
  SolverVerdict::Kind verdict = SolverVerdict::Kind::Unknown;
  std::string reason;
  std::optional<Counterexample> raw;
  std::optional<MinimizationReport> minimization;
  std::optional<TestCase> test;
  /// Runtime outcome of the emitted test.
  std::optional<Outcome> test_outcome;
  bool specification_gap = false;
  std::optional<Diagnosis> diagnosis;
};

struct VerifyOptions
{
  SolverConfig solver;
  int min_budget = kDefaultMinimizationBudget;
  /// Distinct models tried per failure before declaring a specification gap.
  int reproduce_attempts = 4;
  int workers = 1;
  std::int64_t step_budget = kDefaultStepBudget;
};

struct RoutineVerification
{
  std::string routine;
  std::vector<VcRecord> vcs;
  /// Set when VC generation failed (e.g. missing loop invariant).
  std::string error;

  bool all_valid() const;
};

/// Generates, solves and, for falsified VCs, minimizes and turns into tests.
std::vector<RoutineVerification> verify_program(const TypedProgram& p, const VerifyOptions& opt);

}  // namespace contraverify
