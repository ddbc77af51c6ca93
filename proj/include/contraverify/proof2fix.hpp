#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "contraverify/proof2test.hpp"
#include "contraverify/smt.hpp"
#include "contraverify/typecheck.hpp"
#include "contraverify/vcgen.hpp"

namespace contraverify {

inline constexpr int kDefaultFixCounterexamples = 8;
inline constexpr int kDefaultCandidateCap = 50;
/// Invariants used by the guard and contract templates.
inline constexpr int kTemplateInvariants = 3;

/* -------------------------------------------------------------------------- */
/* Counterexample invariants                                                  */
/* -------------------------------------------------------------------------- */

/// A quantity observed on every counterexample. `expr` is null for
/// quantities that are not expressible in the routine's entry state
/// (the observed and the required Result).
struct Term
{
  std::string name;
  ExprPtr expr;
  bool input = true;
};

/// Value of each term name on one counterexample.
using Observation = std::map<std::string, std::int64_t>;

struct CexInvariant
{
  enum class Pattern
  {
    Constant,
    Equality,
    Linear,
    /// e1 = a * old e2 + b, e1 an output and e2 an input
    LinearOld,
    Range,
  };

  Pattern pattern = Pattern::Constant;
  std::string lhs;
  std::string rhs;
  std::int64_t a = 1;
  std::int64_t b = 0;
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  int support = 0;

  bool holds(const Observation& o) const;
  std::string text() const;
  /// Predicate over entry-state expressions; null when a term is not
  /// expressible.
  ExprPtr predicate(const std::vector<Term>& terms) const;
  /// Right-hand side of an equality, linear or constant invariant.
  ExprPtr value(const std::vector<Term>& terms) const;
};

std::string to_string(CexInvariant::Pattern p);

/// Terms over the routine's inputs: scalars, counts, first and last cells.
/// Cell terms are kept only when every binding has a non-empty array.
std::vector<Term> input_terms(const Routine& r, const std::vector<ArgBinding>& cexs);

/// Exact-fit inference: constants, pairwise equalities, integer linear
/// relations (solved from two observations, checked on all) and ranges.
/// Ranked by support, then pattern simplicity.
std::vector<CexInvariant> infer_invariants(const std::vector<Observation>& obs,
                                           const std::vector<Term>& terms);
/// Inference over the input terms of `scope`.
std::vector<CexInvariant> infer_invariants(const std::vector<Counterexample>& cexs,
                                           const Routine& scope);

/* -------------------------------------------------------------------------- */
/* Candidates                                                                 */
/* -------------------------------------------------------------------------- */

struct FixCandidate
{
  enum class Kind
  {
    ConditionReplace,
    AssignmentReplace,
    PreconditionStrengthen,
    PostconditionWeaken,
  };

  Kind kind = Kind::ConditionReplace;
  std::string routine;
  /// Pre-order index among the routine's conditions (guards, then loop exits
  /// in source order), its assignments, or its postcondition clauses.
  int site = 0;
  SourceSpan location;
  ExprPtr original;
  ExprPtr replacement;
  std::string rationale;

  bool implementation() const
  {
    return kind == Kind::ConditionReplace || kind == Kind::AssignmentReplace;
  }
  std::string describe() const;
};

std::string to_string(FixCandidate::Kind k);

class NoCandidates : public std::runtime_error
{
 public:
  using std::runtime_error::runtime_error;
};

/// A term of the failing routine as it would be written in source.
std::string print_candidate(const FixCandidate& f);

/// Templates: relational mutations, +/-1 bound shifts and invariant guards on
/// conditions; +/-1 and invariant right-hand sides on assignments; contract
/// strengthening/weakening with `not I`. Deduplicated, ordered by edit
/// distance then location, capped.
std::vector<FixCandidate> synthesize_fixes(const Routine& r,
                                           const ProofFailure& failure,
                                           const std::vector<CexInvariant>& invs,
                                           const std::vector<Term>& terms,
                                           int cap = kDefaultCandidateCap);

/// Size of the smallest single-subtree edit turning `a` into `b`.
int edit_distance(const ExprPtr& a, const ExprPtr& b);

/// `p` with the candidate applied (the result is not typechecked).
Program apply_fix(const Program& p, const FixCandidate& f);

/* -------------------------------------------------------------------------- */
/* Validation and ranking                                                     */
/* -------------------------------------------------------------------------- */

struct ValidationVerdict
{
  enum class Kind
  {
    Valid,
    RemovesFailureButBreaksOther,
    StillFails,
    Unknown,
    IllTyped,
  };

  Kind kind = Kind::Unknown;
  /// Labels of VCs or tests that fail after the edit.
  std::vector<std::string> new_failures;
  /// Decided by executing the stored failing tests, without the prover.
  bool by_tests = false;
  int solver_calls = 0;
};

std::string to_string(ValidationVerdict::Kind k);

/// `routine: kind label`, stable across edits elsewhere in the routine.
std::string failure_signature(const VerificationCondition& vc);

struct ValidationContext
{
  /// The failure being fixed: `routine`, VC kind and label.
  std::string routine;
  VcKind kind = VcKind::PostconditionClause;
  std::string label;
  /// Tests built from the failure's counterexamples (cheap pre-filter).
  std::vector<TestCase> failing_tests;
  /// Must all end normally (or be rejected by the new precondition).
  std::vector<TestCase> regression;
  /// Failures of other routines present before the edit; not held against it.
  std::set<std::string> preexisting;
  std::int64_t step_budget = kDefaultStepBudget;
};

/// Applies the edit, runs the failing tests, then re-proves every VC of the
/// patched program. Valid means every VC holds and every stored test ends
/// normally or is now rejected by the routine's own precondition.
ValidationVerdict validate_fix(const TypedProgram& p,
                               const FixCandidate& f,
                               const SolverConfig& cfg,
                               const ValidationContext& ctx);
ValidationVerdict validate_fix(const TypedProgram& p, const FixCandidate& f, const SolverConfig& cfg);

struct FixAttempt
{
  FixCandidate candidate;
  ValidationVerdict verdict;
  int edit_distance = 0;
  /// 1-based position in the ranked list; 0 when not Valid.
  int rank = 0;
  /// Unified-diff rendering of the patched routine (Valid only).
  std::string patch;
};

/// Valid attempts only: implementation before contract, then edit distance,
/// then source location.
std::vector<FixAttempt> rank_fixes(const std::vector<FixAttempt>& validated);

/* -------------------------------------------------------------------------- */
/* Sessions                                                                   */
/* -------------------------------------------------------------------------- */

struct FixOptions
{
  SolverConfig solver;
  int counterexamples = kDefaultFixCounterexamples;
  int min_budget = kDefaultMinimizationBudget;
  int cap = kDefaultCandidateCap;
  int workers = 1;
  std::int64_t step_budget = kDefaultStepBudget;
  /// Extra tests every fix must keep green.
  std::vector<TestCase> regression;
  /// Failure signatures of the unpatched program (see failure_signature).
  std::set<std::string> preexisting;
};

struct FailureFix
{
  std::string vc_key;
  std::string routine;
  std::string kind;
  std::string label;
  SourceSpan location;
  /// Distinct minimized counterexamples fed to inference.
  std::vector<Counterexample> counterexamples;
  std::vector<Term> terms;
  std::vector<CexInvariant> invariants;
  /// All candidates in generation order, with verdicts.
  std::vector<FixAttempt> attempts;
  /// Valid attempts, ranked.
  std::vector<FixAttempt> ranked;
  /// Counterexamples whose execution reproduces the failure.
  int reproduced = 0;
  /// Share of input terms left unconstrained by any constant, equality or
  /// linear invariant over the raw solver models (1 = fully diverse).
  double diversity = 0.0;
  std::optional<std::string> diagnostic;
  std::vector<std::string> warnings;
  double seconds = 0.0;
};

struct FixReport
{
  std::vector<FailureFix> failures;
  /// Routines whose VCs could not be generated.
  std::vector<std::string> errors;
};

FailureFix fix_failure(const TypedProgram& p, const VerificationCondition& vc, const FixOptions& opt);
/// Verifies every routine and runs a fix session per falsified VC.
FixReport fix_program(const TypedProgram& p, const FixOptions& opt);

/// Line diff of two texts in unified style (no hunk headers beyond one).
std::string unified_diff(const std::string& before, const std::string& after, const std::string& name);

}  // namespace contraverify
