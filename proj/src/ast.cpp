#include "contraverify/ast.hpp"

#include <algorithm>

namespace contraverify {

std::string
to_string(const SourceSpan& span)
{
  return std::to_string(span.line) + ":" + std::to_string(span.column);
}

std::string
to_string(Type type)
{
  switch (type)
  {
    case Type::Integer: return "INTEGER";
    case Type::Boolean: return "BOOLEAN";
    case Type::IntArray: return "ARRAY [INTEGER]";
    case Type::Unknown: break;
  }
  return "<unknown>";
}

bool
is_boolean_op(BinOp op)
{
  return op == BinOp::And || op == BinOp::Or || op == BinOp::Implies;
}

bool
is_relational_op(BinOp op)
{
  switch (op)
  {
    case BinOp::Eq:
    case BinOp::Ne:
    case BinOp::Lt:
    case BinOp::Le:
    case BinOp::Gt:
    case BinOp::Ge: return true;
    default: return false;
  }
}

bool
is_arithmetic_op(BinOp op)
{
  switch (op)
  {
    case BinOp::Add:
    case BinOp::Sub:
    case BinOp::Mul:
    case BinOp::Div:
    case BinOp::Mod: return true;
    default: return false;
  }
}

const char*
spelling(BinOp op)
{
  switch (op)
  {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Div: return "//";
    case BinOp::Mod: return "\\\\";
    case BinOp::Eq: return "=";
    case BinOp::Ne: return "/=";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
    case BinOp::And: return "and";
    case BinOp::Or: return "or";
    case BinOp::Implies: return "implies";
  }
  return "?";
}

namespace ex {

namespace {

ExprPtr
make(Expr e)
{
  return std::make_shared<const Expr>(std::move(e));
}

}  // namespace

ExprPtr
int_lit(std::int64_t v, SourceSpan span)
{
  Expr e;
  e.kind  = ExprKind::IntLit;
  e.type  = Type::Integer;
  e.value = v;
  e.span  = span;
  return make(std::move(e));
}

ExprPtr
bool_lit(bool v, SourceSpan span)
{
  Expr e;
  e.kind  = ExprKind::BoolLit;
  e.type  = Type::Boolean;
  e.value = v ? 1 : 0;
  e.span  = span;
  return make(std::move(e));
}

ExprPtr
var(std::string name, Type type, SourceSpan span)
{
  Expr e;
  e.kind = ExprKind::Var;
  e.name = std::move(name);
  e.type = type;
  e.span = span;
  return make(std::move(e));
}

ExprPtr
read(ExprPtr array, ExprPtr index, SourceSpan span)
{
  Expr e;
  e.kind     = ExprKind::ArrayRead;
  e.type     = Type::Integer;
  e.span     = span;
  e.operands = {std::move(array), std::move(index)};
  return make(std::move(e));
}

ExprPtr
count(ExprPtr array, SourceSpan span)
{
  Expr e;
  e.kind     = ExprKind::ArrayCount;
  e.type     = Type::Integer;
  e.span     = span;
  e.operands = {std::move(array)};
  return make(std::move(e));
}

ExprPtr
unary(UnOp op, ExprPtr operand, SourceSpan span)
{
  Expr e;
  e.kind     = ExprKind::Unary;
  e.unop     = op;
  e.type     = op == UnOp::Not ? Type::Boolean : Type::Integer;
  e.span     = span;
  e.operands = {std::move(operand)};
  return make(std::move(e));
}

ExprPtr
binary(BinOp op, ExprPtr lhs, ExprPtr rhs, SourceSpan span)
{
  Expr e;
  e.kind     = ExprKind::Binary;
  e.binop    = op;
  e.type     = is_arithmetic_op(op) ? Type::Integer : Type::Boolean;
  e.span     = span;
  e.operands = {std::move(lhs), std::move(rhs)};
  return make(std::move(e));
}

ExprPtr
old(ExprPtr operand, SourceSpan span)
{
  Expr e;
  e.kind     = ExprKind::Old;
  e.type     = operand ? operand->type : Type::Unknown;
  e.span     = span;
  e.operands = {std::move(operand)};
  return make(std::move(e));
}

ExprPtr
quant(QuantKind kind,
      std::string bound,
      ExprPtr lo,
      ExprPtr hi,
      ExprPtr body,
      SourceSpan span)
{
  Expr e;
  e.kind     = ExprKind::Quant;
  e.quant    = kind;
  e.name     = std::move(bound);
  e.type     = Type::Boolean;
  e.span     = span;
  e.operands = {std::move(lo), std::move(hi), std::move(body)};
  return make(std::move(e));
}

ExprPtr
call(std::string routine, std::vector<ExprPtr> args, SourceSpan span)
{
  Expr e;
  e.kind     = ExprKind::Call;
  e.name     = std::move(routine);
  e.span     = span;
  e.operands = std::move(args);
  return make(std::move(e));
}

ExprPtr
store(ExprPtr array, ExprPtr index, ExprPtr value)
{
  Expr e;
  e.kind     = ExprKind::Store;
  e.type     = Type::IntArray;
  e.operands = {std::move(array), std::move(index), std::move(value)};
  return make(std::move(e));
}

ExprPtr
new_array(ExprPtr count)
{
  Expr e;
  e.kind     = ExprKind::NewArray;
  e.type     = Type::IntArray;
  e.operands = {std::move(count)};
  return make(std::move(e));
}

ExprPtr
ite(ExprPtr cond, ExprPtr then_value, ExprPtr else_value)
{
  Expr e;
  e.kind     = ExprKind::Ite;
  e.type     = then_value->type;
  e.operands = {std::move(cond), std::move(then_value), std::move(else_value)};
  return make(std::move(e));
}

ExprPtr
with_operands(const ExprPtr& e, std::vector<ExprPtr> operands)
{
  Expr copy     = *e;
  copy.operands = std::move(operands);
  return make(std::move(copy));
}

ExprPtr
with_type(const ExprPtr& e, Type type)
{
  if (e->type == type) return e;
  Expr copy = *e;
  copy.type = type;
  return make(std::move(copy));
}

}  // namespace ex

bool
equal(const ExprPtr& a, const ExprPtr& b)
{
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind || a->operands.size() != b->operands.size())
    return false;
  switch (a->kind)
  {
    case ExprKind::IntLit:
    case ExprKind::BoolLit:
      if (a->value != b->value) return false;
      break;
    case ExprKind::Var:
    case ExprKind::Call:
      if (a->name != b->name) return false;
      break;
    case ExprKind::Unary:
      if (a->unop != b->unop) return false;
      break;
    case ExprKind::Binary:
      if (a->binop != b->binop) return false;
      break;
    case ExprKind::Quant:
      if (a->quant != b->quant || a->name != b->name) return false;
      break;
    default: break;
  }
  for (std::size_t i = 0; i < a->operands.size(); ++i)
  {
    if (!equal(a->operands[i], b->operands[i])) return false;
  }
  return true;
}

std::size_t
size(const ExprPtr& e)
{
  if (!e) return 0;
  std::size_t n = 1;
  for (const auto& op : e->operands) n += size(op);
  return n;
}

/* -------------------------------------------------------------------------- */

namespace {

bool
equal(const Clause& a, const Clause& b)
{
  return a.label == b.label && equal(a.expr, b.expr);
}

bool
equal(const std::vector<Clause>& a, const std::vector<Clause>& b)
{
  return std::equal(a.begin(),
                    a.end(),
                    b.begin(),
                    b.end(),
                    [](const Clause& x, const Clause& y) { return equal(x, y); });
}

bool
equal_args(const std::vector<ExprPtr>& a, const std::vector<ExprPtr>& b)
{
  return std::equal(
      a.begin(), a.end(), b.begin(), b.end(), [](const auto& x, const auto& y) {
        return equal(x, y);
      });
}

bool
equal(const Stmt& a, const Stmt& b)
{
  if (a.node.index() != b.node.index()) return false;
  if (auto* x = a.as<AssignStmt>())
  {
    auto* y = b.as<AssignStmt>();
    return x->target == y->target && equal(x->value, y->value);
  }
  if (auto* x = a.as<GhostAssignStmt>())
  {
    auto* y = b.as<GhostAssignStmt>();
    return x->target == y->target && equal(x->value, y->value);
  }
  if (auto* x = a.as<ArrayAssignStmt>())
  {
    auto* y = b.as<ArrayAssignStmt>();
    return x->array == y->array && equal(x->index, y->index)
           && equal(x->value, y->value);
  }
  if (auto* x = a.as<IfStmt>())
  {
    auto* y = b.as<IfStmt>();
    if (x->arms.size() != y->arms.size()) return false;
    for (std::size_t i = 0; i < x->arms.size(); ++i)
    {
      if (!equal(x->arms[i].guard, y->arms[i].guard)
          || !contraverify::equal(x->arms[i].body, y->arms[i].body))
        return false;
    }
    if (x->else_block.has_value() != y->else_block.has_value()) return false;
    return !x->else_block
           || contraverify::equal(*x->else_block, *y->else_block);
  }
  if (auto* x = a.as<LoopStmt>())
  {
    auto* y = b.as<LoopStmt>();
    if (x->variant.has_value() != y->variant.has_value()) return false;
    if (x->variant && !equal(*x->variant, *y->variant)) return false;
    return contraverify::equal(x->init, y->init)
           && contraverify::equal(x->prelude, y->prelude)
           && equal(x->invariant, y->invariant) && equal(x->exit, y->exit)
           && contraverify::equal(x->body, y->body);
  }
  if (auto* x = a.as<CheckStmt>())
  {
    auto* y = b.as<CheckStmt>();
    return x->role == y->role && x->trap_id == y->trap_id
           && equal(x->assertion, y->assertion);
  }
  if (auto* x = a.as<CallStmt>())
  {
    auto* y = b.as<CallStmt>();
    return x->callee == y->callee && x->target == y->target
           && equal_args(x->args, y->args);
  }
  if (auto* x = a.as<CreateStmt>())
  {
    auto* y = b.as<CreateStmt>();
    return x->array == y->array && equal(x->count, y->count);
  }
  return false;
}

bool
equal(const std::vector<VarDecl>& a, const std::vector<VarDecl>& b)
{
  return std::equal(
      a.begin(), a.end(), b.begin(), b.end(), [](const auto& x, const auto& y) {
        return x.name == y.name && x.type == y.type;
      });
}

}  // namespace

bool
equal(const Block& a, const Block& b)
{
  return std::equal(
      a.begin(), a.end(), b.begin(), b.end(), [](const auto& x, const auto& y) {
        return equal(*x, *y);
      });
}

bool
equal(const Routine& a, const Routine& b)
{
  return a.name == b.name && equal(a.args, b.args) && equal(a.locals, b.locals)
         && a.result_type == b.result_type
         && equal(a.precondition, b.precondition)
         && equal(a.postcondition, b.postcondition) && equal(a.body, b.body);
}

bool
equal(const Program& a, const Program& b)
{
  return a.name == b.name
         && std::equal(a.routines.begin(),
                       a.routines.end(),
                       b.routines.begin(),
                       b.routines.end(),
                       [](const auto& x, const auto& y) { return equal(x, y); });
}

const VarDecl*
Routine::find_variable(const std::string& var_name) const
{
  for (const auto& d : args)
    if (d.name == var_name) return &d;
  for (const auto& d : locals)
    if (d.name == var_name) return &d;
  return nullptr;
}

bool
Routine::is_argument(const std::string& var_name) const
{
  return std::any_of(
      args.begin(), args.end(), [&](const auto& d) { return d.name == var_name; });
}

const Routine*
Program::find(const std::string& routine_name) const
{
  for (const auto& r : routines)
    if (r.name == routine_name) return &r;
  return nullptr;
}

}  // namespace contraverify
