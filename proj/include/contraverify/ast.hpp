#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace contraverify {

struct SourceSpan
{
  int line = 0;
  int column = 0;

  bool operator==(const SourceSpan&) const = default;
  auto operator<=>(const SourceSpan&) const = default;
};

std::string to_string(const SourceSpan& span);

enum class Type
{
  Unknown,
  Integer,
  Boolean,
  IntArray,
};

std::string to_string(Type type);

/* -------------------------------------------------------------------------- */
/* Expressions                                                                */
/* -------------------------------------------------------------------------- */

enum class ExprKind
{
  IntLit,
  BoolLit,
  Var,
  ArrayRead,
  ArrayCount,
  Unary,
  Binary,
  Old,
  Quant,
  Call,
  // Logic-only terms produced by vcgen; never produced by the parser.
  Store,
  NewArray,
  Ite,
};

enum class UnOp
{
  Neg,
  Not,
};

enum class BinOp
{
  Add,
  Sub,
  Mul,
  Div,
  Mod,
  Eq,
  Ne,
  Lt,
  Le,
  Gt,
  Ge,
  And,
  Or,
  Implies,
};

enum class QuantKind
{
  ForAll,
  Exists,
};

bool is_boolean_op(BinOp op);
bool is_relational_op(BinOp op);
bool is_arithmetic_op(BinOp op);
const char* spelling(BinOp op);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Immutable expression node. Children live in `operands`:
///   ArrayRead  [array, index]         ArrayCount [array]
///   Unary      [operand]              Binary     [lhs, rhs]
///   Old        [operand]              Quant      [lo, hi, body] (bound var in `name`)
///   Call       [args...]              Store      [array, index, value]
///   NewArray   [count]                Ite        [cond, then, else]
struct Expr
{
  ExprKind kind = ExprKind::IntLit;
  Type type = Type::Unknown;
  SourceSpan span;
  std::int64_t value = 0;
  std::string name;
  UnOp unop = UnOp::Neg;
  BinOp binop = BinOp::Add;
  QuantKind quant = QuantKind::ForAll;
  std::vector<ExprPtr> operands;
};

namespace ex {

ExprPtr int_lit(std::int64_t v, SourceSpan span = {});
ExprPtr bool_lit(bool v, SourceSpan span = {});
ExprPtr var(std::string name, Type type = Type::Unknown, SourceSpan span = {});
ExprPtr read(ExprPtr array, ExprPtr index, SourceSpan span = {});
ExprPtr count(ExprPtr array, SourceSpan span = {});
ExprPtr unary(UnOp op, ExprPtr operand, SourceSpan span = {});
ExprPtr binary(BinOp op, ExprPtr lhs, ExprPtr rhs, SourceSpan span = {});
ExprPtr old(ExprPtr operand, SourceSpan span = {});
ExprPtr quant(QuantKind kind,
              std::string bound,
              ExprPtr lo,
              ExprPtr hi,
              ExprPtr body,
              SourceSpan span = {});
ExprPtr call(std::string routine, std::vector<ExprPtr> args, SourceSpan span = {});
ExprPtr store(ExprPtr array, ExprPtr index, ExprPtr value);
ExprPtr new_array(ExprPtr count);
ExprPtr ite(ExprPtr cond, ExprPtr then_value, ExprPtr else_value);

/// Copy of `e` with a different operand list (same kind/op/name/span/type).
ExprPtr with_operands(const ExprPtr& e, std::vector<ExprPtr> operands);
ExprPtr with_type(const ExprPtr& e, Type type);

}  // namespace ex

/// Structural equality: ignores spans and type annotations.
bool equal(const ExprPtr& a, const ExprPtr& b);
std::size_t size(const ExprPtr& e);

/* -------------------------------------------------------------------------- */
/* Statements                                                                 */
/* -------------------------------------------------------------------------- */

struct Clause
{
  std::string label;
  ExprPtr expr;
  SourceSpan span;
};

struct Stmt;
using StmtPtr = std::shared_ptr<const Stmt>;
using Block = std::vector<StmtPtr>;

struct AssignStmt
{
  std::string target;
  ExprPtr value;
};

struct ArrayAssignStmt
{
  std::string array;
  ExprPtr index;
  ExprPtr value;
};

struct GuardedBlock
{
  ExprPtr guard;
  Block body;
};

struct IfStmt
{
  std::vector<GuardedBlock> arms;  // `if` arm first, then `elseif` arms
  std::optional<Block> else_block;
  bool synthesized_else = false;  // else block added by instrumentation
};

struct LoopStmt
{
  Block init;
  /// Instrumentation executed between `init` and the loop proper. Empty in
  /// source programs; holds unrolled copies and iteration traps after seeding.
  Block prelude;
  std::vector<Clause> invariant;
  ExprPtr exit;
  std::optional<Clause> variant;
  Block body;
};

enum class CheckRole
{
  User,
  Trap,
  LoopInvariant,
  LoopVariantNonneg,
  LoopVariantDecrease,
};

struct CheckStmt
{
  Clause assertion;
  CheckRole role = CheckRole::User;
  /// Obligation id for traps; -1 otherwise.
  int trap_id = -1;
  /// For loop-role checks: location reported in violations (the original clause).
  SourceSpan origin;
};

struct CallStmt
{
  std::string callee;
  std::vector<ExprPtr> args;
  std::optional<std::string> target;
};

struct CreateStmt
{
  std::string array;
  ExprPtr count;
};

/// Ghost assignment introduced by instrumentation (iteration counters,
/// variant snapshots). Executes like an assignment, removed by strip.
struct GhostAssignStmt
{
  std::string target;
  ExprPtr value;
};

struct Stmt
{
  SourceSpan span;
  std::variant<AssignStmt,
               ArrayAssignStmt,
               IfStmt,
               LoopStmt,
               CheckStmt,
               CallStmt,
               CreateStmt,
               GhostAssignStmt>
      node;

  template <typename T>
  const T* as() const
  {
    return std::get_if<T>(&node);
  }
};

template <typename T>
StmtPtr make_stmt(T node, SourceSpan span = {})
{
  return std::make_shared<const Stmt>(Stmt{span, std::move(node)});
}

/* -------------------------------------------------------------------------- */
/* Routines and programs                                                      */
/* -------------------------------------------------------------------------- */

struct VarDecl
{
  std::string name;
  Type type = Type::Unknown;
};

struct Routine
{
  std::string name;
  std::vector<VarDecl> args;
  std::vector<VarDecl> locals;
  std::optional<Type> result_type;
  std::vector<Clause> precondition;
  std::vector<Clause> postcondition;
  Block body;
  SourceSpan span;

  const VarDecl* find_variable(const std::string& name) const;
  bool is_argument(const std::string& name) const;
};

struct Program
{
  std::string name;
  std::vector<Routine> routines;

  const Routine* find(const std::string& name) const;
};

bool equal(const Block& a, const Block& b);
bool equal(const Routine& a, const Routine& b);
bool equal(const Program& a, const Program& b);

}  // namespace contraverify
