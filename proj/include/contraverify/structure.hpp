#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "contraverify/ast.hpp"

namespace contraverify {

enum class BranchKind
{
  Entry,
  Then,
  ElseIf,
  Else,
  LoopBody,
  LoopSkip,
};

std::string to_string(BranchKind kind);

struct BranchPoint
{
  int id = 0;
  SourceSpan location;
  BranchKind kind = BranchKind::Entry;
  /// Owning statement (If or Loop); null for the entry block.
  const Stmt* owner = nullptr;
  /// Arm index for If statements (else = arms.size()).
  int arm = 0;
};

/// One BranchPoint per control branch in pre-order; implicit else branches
/// and both loop faces included. A routine without any control construct
/// yields the single entry block. Instrumentation preludes are skipped.
std::vector<BranchPoint> enumerate_branches(const Routine& r);

struct Decision
{
  int id = 0;
  SourceSpan location;
  ExprPtr expr;
  std::vector<ExprPtr> conditions;
  const Stmt* owner = nullptr;
  /// Arm index for If guards; -1 for a loop exit condition.
  int arm = -1;
};

/// Ordered, duplicate-free atomic conditions of a boolean expression.
std::vector<ExprPtr> atomic_conditions(const ExprPtr& decision);

/// Every if/elseif guard and loop exit condition, in pre-order.
std::vector<Decision> enumerate_decisions(const Routine& r);

/// Truth value of `decision` given values for its atomic conditions.
/// Unknown (nullopt) entries propagate unless the result is forced.
std::optional<bool> evaluate_decision(const ExprPtr& decision,
                                      const std::vector<ExprPtr>& conditions,
                                      const std::vector<std::optional<bool>>& values);

/// `decision` with every occurrence of `condition` replaced by `replacement`.
ExprPtr replace_condition(const ExprPtr& decision,
                          const ExprPtr& condition,
                          const ExprPtr& replacement);

/// Statement-to-first-branch-id and statement-to-decision lookup for a routine.
struct RoutineStructure
{
  std::vector<BranchPoint> branches;
  std::vector<Decision> decisions;
  std::map<const Stmt*, int> first_branch;
  std::map<std::pair<const Stmt*, int>, int> decision_at;
  std::map<const Stmt*, int> loop_index;
  std::vector<const Stmt*> loops;

  static RoutineStructure of(const Routine& r);
};

}  // namespace contraverify
