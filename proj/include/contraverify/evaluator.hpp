#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "contraverify/structure.hpp"
#include "contraverify/testcase.hpp"
#include "contraverify/typecheck.hpp"
#include "contraverify/value.hpp"

namespace contraverify {

inline constexpr std::int64_t kDefaultStepBudget = 1'000'000;

enum class ViolationKind
{
  Precondition,
  Postcondition,
  Check,
  LoopInvariant,
  LoopVariant,
  Bounds,
  Overflow,
};

std::string to_string(ViolationKind kind);

/// Clause label when present, otherwise `kind@line:col`.
std::string display_label(ViolationKind kind,
                          const std::string& label,
                          SourceSpan location);

struct Violation
{
  ViolationKind kind = ViolationKind::Check;
  std::string label;
  SourceSpan location;
  std::string routine;

  std::string display() const { return display_label(kind, label, location); }
  bool operator==(const Violation&) const = default;
};

struct Outcome
{
  enum class Kind
  {
    Normal,
    ContractViolation,
    Divergence,
  };

  Kind kind = Kind::Normal;
  std::optional<Value> result;
  Violation violation;

  bool normal() const { return kind == Kind::Normal; }
  bool violated() const { return kind == Kind::ContractViolation; }
  std::string to_string() const;
  bool operator==(const Outcome&) const = default;
};

/// Receives execution events. All callbacks default to no-ops.
class ExecutionObserver
{
 public:
  virtual ~ExecutionObserver() = default;
  virtual void on_enter(const std::string& /*routine*/) {}
  virtual void on_branch(const std::string& /*routine*/, int /*id*/) {}
  virtual void on_decision(const std::string& /*routine*/,
                           int /*decision*/,
                           const std::vector<std::optional<bool>>& /*conditions*/,
                           bool /*outcome*/)
  {
  }
  virtual void on_loop_iteration(const std::string& /*routine*/,
                                 int /*loop*/,
                                 SourceSpan /*location*/,
                                 std::int64_t /*k*/)
  {
  }
  virtual void on_loop_exit(const std::string& /*routine*/,
                            int /*loop*/,
                            std::int64_t /*iterations*/)
  {
  }
  virtual void on_violation(const Violation& /*v*/) {}
};

/// Line-oriented trace: `ENTER r`, `BRANCH id`, `LOOP-ITER loc k`,
/// `VIOLATION kind label loc`.
class TraceRecorder : public ExecutionObserver
{
 public:
  void on_enter(const std::string& routine) override;
  void on_branch(const std::string& routine, int id) override;
  void on_loop_iteration(const std::string& routine,
                         int loop,
                         SourceSpan location,
                         std::int64_t k) override;
  void on_violation(const Violation& v) override;

  const std::vector<std::string>& lines() const { return d_lines; }
  std::string text() const;

 private:
  std::vector<std::string> d_lines;
};

/// Fans events out to several observers.
class ObserverList : public ExecutionObserver
{
 public:
  void add(ExecutionObserver* o) { d_observers.push_back(o); }

  void on_enter(const std::string& r) override;
  void on_branch(const std::string& r, int id) override;
  void on_decision(const std::string& r,
                   int d,
                   const std::vector<std::optional<bool>>& c,
                   bool outcome) override;
  void on_loop_iteration(const std::string& r, int l, SourceSpan loc, std::int64_t k) override;
  void on_loop_exit(const std::string& r, int l, std::int64_t n) override;
  void on_violation(const Violation& v) override;

 private:
  std::vector<ExecutionObserver*> d_observers;
};

/// Interpreter with full runtime contract checking. Holds the structural
/// lookup tables of a program so repeated runs do not recompute them.
class Interpreter
{
 public:
  explicit Interpreter(const TypedProgram& p);
  ~Interpreter();

  Outcome run(const std::string& routine,
              const ArgBinding& args,
              std::int64_t step_budget = kDefaultStepBudget,
              ExecutionObserver* observer = nullptr) const;

  const RoutineStructure& structure(const std::string& routine) const;
  const TypedProgram& program() const { return d_program; }

 private:
  const TypedProgram& d_program;
  std::map<std::string, RoutineStructure> d_structures;
};

Outcome run_routine(const TypedProgram& p,
                    const std::string& routine,
                    const ArgBinding& args,
                    std::int64_t step_budget = kDefaultStepBudget,
                    ExecutionObserver* observer = nullptr);

/* -------------------------------------------------------------------------- */
/* Tests and coverage                                                         */
/* -------------------------------------------------------------------------- */

struct TestVerdict
{
  enum class Kind
  {
    ReproducesExpectedViolation,
    /// Normal outcome. Expected for `passes` tests; for a recorded failure it
    /// means the fault is gone (the regression suite is green).
    PassesUnexpectedly,
    OtherViolation,
  };

  Kind kind = Kind::OtherViolation;
  Outcome outcome;

  /// The test's recorded expectation holds.
  bool expectation_met(const TestCase& t) const;
  /// Regression view: the run ended normally.
  bool green() const { return kind == Kind::PassesUnexpectedly; }
};

std::string to_string(TestVerdict::Kind kind);

/// Verdict of an outcome against an expectation.
TestVerdict classify(const Expectation& e, Outcome o);

/// The routine's own precondition rejected the input (callee precondition
/// failures inside the routine do not count).
bool entry_precondition_failure(const Routine& r, const Outcome& o);

TestVerdict run_test(const TypedProgram& p,
                     const TestCase& t,
                     std::int64_t step_budget = kDefaultStepBudget);

struct DecisionRecord
{
  std::vector<std::optional<bool>> conditions;
  bool outcome = false;

  auto operator<=>(const DecisionRecord&) const = default;
};

using BranchKey = std::pair<std::string, int>;
using DecisionKey = std::pair<std::string, int>;
/// (routine, decision, condition index)
using ConditionKey = std::tuple<std::string, int, int>;
using LoopKey = std::pair<std::string, int>;

struct CoverageReport
{
  std::map<BranchKey, std::int64_t> branch_hits;
  std::map<ConditionKey, bool> mcdc_satisfied;
  /// Conditions that can never independently affect their decision.
  std::set<ConditionKey> mcdc_degenerate;
  std::map<LoopKey, std::set<std::int64_t>> loop_profiles;
  std::map<DecisionKey, std::set<DecisionRecord>> decision_records;
  int tests_counted = 0;
  /// Precondition-violating tests: reported, excluded from statistics.
  int tests_excluded = 0;

  double branch_coverage_ratio(const std::set<BranchKey>& infeasible = {}) const;
  /// Fraction of non-degenerate conditions with a witnessing pair.
  double mcdc_ratio() const;
  bool all_mcdc_satisfied() const;
};

/// Records branch hits, decision evaluations and loop iteration counts.
class CoverageCollector : public ExecutionObserver
{
 public:
  void on_branch(const std::string& routine, int id) override;
  void on_decision(const std::string& routine,
                   int decision,
                   const std::vector<std::optional<bool>>& conditions,
                   bool outcome) override;
  void on_loop_exit(const std::string& routine, int loop, std::int64_t n) override;

  std::map<BranchKey, std::int64_t> branch_hits;
  std::map<DecisionKey, std::set<DecisionRecord>> decisions;
  std::map<LoopKey, std::set<std::int64_t>> loops;
};

/// True when the two records witness condition `j` of `d` under masking
/// MC/DC: the condition and the outcome differ and, in both runs, flipping
/// the condition alone would flip the decision.
bool masking_pair(const Decision& d,
                  int j,
                  const DecisionRecord& a,
                  const DecisionRecord& b);

/// Whether condition `j` of `d` can ever independently affect `d`
/// (truth-table check over the atomic conditions).
bool condition_independent_somewhere(const Decision& d, int j);

CoverageReport measure_coverage(const TypedProgram& p,
                                const TestSuite& suite,
                                std::int64_t step_budget = kDefaultStepBudget);

}  // namespace contraverify
