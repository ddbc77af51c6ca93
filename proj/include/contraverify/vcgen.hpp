#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "contraverify/ast.hpp"
#include "contraverify/evaluator.hpp"
#include "contraverify/typecheck.hpp"
#include "contraverify/value.hpp"

namespace contraverify {

enum class VcKind
{
  PostconditionClause,
  PreconditionOfCallee,
  Check,
  LoopInvariantInit,
  LoopInvariantMaintain,
  LoopVariantNonneg,
  LoopVariantDecrease,
  Bounds,
};

std::string to_string(VcKind kind);
/// The runtime violation a falsified VC of this kind corresponds to.
ViolationKind violation_kind(VcKind kind);

/// A declared solver symbol: a routine input or a havoc'd value.
struct Symbol
{
  std::string name;
  Type type = Type::Integer;
  bool input = true;
};

/// `name` abbreviates `value` (a let binding in front of the obligation).
struct Definition
{
  std::string name;
  Type type = Type::Integer;
  ExprPtr value;
};

/// Closed obligation: under `definitions`, `assumptions` imply `obligation`.
/// Free symbols are exactly `symbols` (plus bound quantifier variables).
struct VerificationCondition
{
  int id = 0;
  VcKind kind = VcKind::Check;
  std::string routine;
  std::string label;
  SourceSpan location;
  std::string path_context;
  std::vector<Symbol> symbols;
  std::vector<Definition> definitions;
  std::vector<ExprPtr> assumptions;
  ExprPtr obligation;
  /// Seeded trap id when this VC comes from a trap check; -1 otherwise.
  int trap_id = -1;

  std::string display_label() const;
  /// `<routine>.<id>`
  std::string key() const;
  const Symbol* find_symbol(const std::string& name) const;
};

class MissingInvariant : public std::runtime_error
{
 public:
  MissingInvariant(std::string routine, SourceSpan where);
  SourceSpan where() const { return d_where; }

 private:
  SourceSpan d_where;
};

class ScopeError : public std::runtime_error
{
 public:
  using std::runtime_error::runtime_error;
};

/// One VC per assertion site in execution order. Every other assertion on
/// the way is assumed, so a binding falsifies a VC exactly when that
/// assertion is the first one to fail along the (loop-summarized) path.
std::vector<VerificationCondition> generate_vcs(const TypedProgram& p, const Routine& r);
std::vector<VerificationCondition> generate_vcs(const TypedProgram& p);

/// Textbook weakest precondition (substitution based).
ExprPtr wp(const TypedProgram& p, const Stmt& s, const ExprPtr& q);
ExprPtr wp(const TypedProgram& p, const Block& b, const ExprPtr& q);

/// `vc` with `extra` conjoined to its assumptions.
VerificationCondition assume_context(const VerificationCondition& vc, const ExprPtr& extra);

/// Evaluates the VC at a concrete input binding (no havoc symbols allowed).
/// True when the binding satisfies the assumptions and falsifies the
/// obligation.
bool falsified_by(const VerificationCondition& vc, const ArgBinding& binding);
bool has_havoc(const VerificationCondition& vc);

/// Diagnostic rendering, one obligation per stanza.
std::string print_vc(const VerificationCondition& vc);

}  // namespace contraverify
