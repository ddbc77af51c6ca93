#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "contraverify/evaluator.hpp"
#include "contraverify/proof2test.hpp"
#include "contraverify/smt.hpp"
#include "contraverify/structure.hpp"
#include "contraverify/typecheck.hpp"

namespace contraverify {

/// The block-number input added to every instrumented routine.
inline constexpr const char* kSelector = "__sc";
inline constexpr int kDefaultUnrollDepth = 3;
inline constexpr int kMaxUnrollDepth = 8;
/// Bound on the product of (copies + 1) along a loop nest.
inline constexpr int kUnrollProductCap = 64;

struct CoverageGoal
{
  bool branch = true;
  bool mcdc = false;
  int unroll_depth = 0;
  int product_cap = kUnrollProductCap;
};

struct Obligation
{
  enum class Kind
  {
    Branch,
    Mcdc,
    LoopIteration,
  };

  Kind kind = Kind::Branch;
  int id = 0;
  std::string routine;
  SourceSpan location;
  int branch = -1;
  int decision = -1;
  int condition = -1;
  /// Required value of the condition (MC/DC).
  bool polarity = false;
  /// Required decision outcome paired with `polarity` (MC/DC).
  bool outcome = false;
  int loop = -1;
  int iterations = -1;

  TestOrigin origin() const;
  std::string describe() const;
};

struct InstrumentedProgram
{
  TypedProgram program;
  std::string selector = kSelector;
  /// Per routine, in id order.
  std::map<std::string, std::vector<Obligation>> obligations;
  /// Conditions that can never independently affect their decision.
  std::set<ConditionKey> degenerate;
  std::vector<std::string> warnings;
};

/// Trap every branch, MC/DC obligation and loop iteration count requested by
/// `goal`. Branch obligations take the BranchPoint ids; the others follow.
InstrumentedProgram instrument(const TypedProgram& p, const CoverageGoal& goal);
InstrumentedProgram seed_branches(const TypedProgram& p);
InstrumentedProgram seed_mcdc(const TypedProgram& p);
InstrumentedProgram unroll_loops(const TypedProgram& p, int depth);

/// Removes traps, ghost state, preludes, synthesized else blocks and the
/// selector argument.
Program strip(const Program& p);

struct InfeasibilityEntry
{
  std::string routine;
  int id = 0;
  /// `infeasible` or `unknown`
  std::string verdict;
  std::string description;
};

struct InfeasibilityReport
{
  std::vector<InfeasibilityEntry> entries;

  /// Branch obligations proved unreachable.
  std::set<BranchKey> infeasible_branches(const InstrumentedProgram& ip) const;
};

struct ObligationResult
{
  enum class Status
  {
    Covered,
    Reused,
    Infeasible,
    Unknown,
  };

  Obligation obligation;
  Status status = Status::Unknown;
  /// Index into the suite of the covering test.
  int test = -1;
  /// Solver models tried before one reached the trap at run time.
  int attempts = 0;
};

std::string to_string(ObligationResult::Status s);

struct SuiteOptions
{
  SolverConfig solver;
  int min_budget = kDefaultMinimizationBudget;
  bool minimize = true;
  /// Models tried per trap site before giving up on it.
  int confirm_attempts = 8;
  int workers = 1;
  std::int64_t step_budget = kDefaultStepBudget;
};

struct SuiteResult
{
  TestSuite suite;
  CoverageReport coverage;
  InfeasibilityReport infeasibility;
  std::vector<ObligationResult> obligations;
  std::set<ConditionKey> degenerate;
  std::set<BranchKey> infeasible_branches;
  std::vector<std::string> warnings;
};

/// Instrument, solve every trap, confirm each model by execution, minimize,
/// and emit tests against the original program with expectations taken from
/// running it.
SuiteResult generate_suite(const TypedProgram& p, const CoverageGoal& goal, const SuiteOptions& opt);

}  // namespace contraverify
