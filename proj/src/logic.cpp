#include "contraverify/logic.hpp"

#include <stdexcept>

namespace contraverify {

namespace {

void
collect_free(const ExprPtr& e, std::set<std::string>& bound, std::set<std::string>& out)
{
  if (e->kind == ExprKind::Var)
  {
    if (!bound.count(e->name)) out.insert(e->name);
    return;
  }
  if (e->kind == ExprKind::Quant)
  {
    collect_free(e->operands[0], bound, out);
    collect_free(e->operands[1], bound, out);
    bool fresh = bound.insert(e->name).second;
    collect_free(e->operands[2], bound, out);
    if (fresh) bound.erase(e->name);
    return;
  }
  for (const auto& op : e->operands) collect_free(op, bound, out);
}

class Substituter
{
 public:
  explicit Substituter(const Substitution& s) : d_sub(s) {}

  ExprPtr run(const ExprPtr& e)
  {
    auto it = d_memo.find(e.get());
    if (it != d_memo.end()) return it->second;
    ExprPtr out = apply(e);
    d_memo.emplace(e.get(), out);
    return out;
  }

 private:
  ExprPtr apply(const ExprPtr& e)
  {
    if (e->kind == ExprKind::Var)
    {
      auto it = d_sub.find(e->name);
      return it == d_sub.end() ? e : it->second;
    }
    if (e->operands.empty()) return e;
    if (e->kind == ExprKind::Quant) return quant(e);
    std::vector<ExprPtr> ops;
    bool changed = false;
    for (const auto& op : e->operands)
    {
      ops.push_back(run(op));
      changed |= ops.back() != op;
    }
    return changed ? ex::with_operands(e, std::move(ops)) : e;
  }

  ExprPtr quant(const ExprPtr& e)
  {
    ExprPtr lo = run(e->operands[0]);
    ExprPtr hi = run(e->operands[1]);

    Substitution inner = d_sub;
    inner.erase(e->name);
    std::string bound = e->name;
    bool clash        = false;
    for (const auto& [name, repl] : inner)
    {
      if (free_variables(repl).count(bound)) clash = true;
    }
    if (clash)
    {
      std::set<std::string> taken;
      for (const auto& [name, repl] : inner)
      {
        auto fv = free_variables(repl);
        taken.insert(fv.begin(), fv.end());
      }
      auto fv = free_variables(e->operands[2]);
      taken.insert(fv.begin(), fv.end());
      while (taken.count(bound)) bound += "'";
      inner[e->name] = ex::var(bound, Type::Integer);
    }
    ExprPtr body = Substituter(inner).run(e->operands[2]);
    Expr copy    = *e;
    copy.name    = bound;
    copy.operands = {lo, hi, body};
    return std::make_shared<const Expr>(std::move(copy));
  }

  const Substitution& d_sub;
  std::map<const Expr*, ExprPtr> d_memo;
};

std::int64_t
as_int(const Value& v)
{
  return v.integer;
}

}  // namespace

ExprPtr
substitute(const ExprPtr& e, const Substitution& s)
{
  if (s.empty()) return e;
  return Substituter(s).run(e);
}

ExprPtr
resolve_old(const ExprPtr& e, const Substitution& entry)
{
  if (e->kind == ExprKind::Old) return substitute(e->operands[0], entry);
  if (e->operands.empty()) return e;
  std::vector<ExprPtr> ops;
  bool changed = false;
  for (const auto& op : e->operands)
  {
    ops.push_back(resolve_old(op, entry));
    changed |= ops.back() != op;
  }
  return changed ? ex::with_operands(e, std::move(ops)) : e;
}

std::set<std::string>
free_variables(const ExprPtr& e)
{
  std::set<std::string> bound, out;
  collect_free(e, bound, out);
  return out;
}

namespace lg {

ExprPtr
truth(bool v)
{
  return ex::with_type(ex::bool_lit(v), Type::Boolean);
}

bool
is_true(const ExprPtr& e)
{
  return e->kind == ExprKind::BoolLit && e->value != 0;
}

bool
is_false(const ExprPtr& e)
{
  return e->kind == ExprKind::BoolLit && e->value == 0;
}

namespace {

ExprPtr
typed_binary(BinOp op, const ExprPtr& a, const ExprPtr& b, Type t)
{
  return ex::with_type(ex::binary(op, a, b), t);
}

}  // namespace

ExprPtr
conj(const ExprPtr& a, const ExprPtr& b)
{
  if (is_true(a)) return b;
  if (is_true(b)) return a;
  if (is_false(a) || is_false(b)) return truth(false);
  return typed_binary(BinOp::And, a, b, Type::Boolean);
}

ExprPtr
conj(const std::vector<ExprPtr>& parts)
{
  ExprPtr out = truth(true);
  for (const auto& p : parts) out = conj(out, p);
  return out;
}

ExprPtr
disj(const ExprPtr& a, const ExprPtr& b)
{
  if (is_false(a)) return b;
  if (is_false(b)) return a;
  if (is_true(a) || is_true(b)) return truth(true);
  return typed_binary(BinOp::Or, a, b, Type::Boolean);
}

ExprPtr
neg(const ExprPtr& a)
{
  if (a->kind == ExprKind::BoolLit) return truth(a->value == 0);
  if (a->kind == ExprKind::Unary && a->unop == UnOp::Not) return a->operands[0];
  return ex::with_type(ex::unary(UnOp::Not, a), Type::Boolean);
}

ExprPtr
implies(const ExprPtr& a, const ExprPtr& b)
{
  if (is_true(a)) return b;
  if (is_false(a) || is_true(b)) return truth(true);
  return typed_binary(BinOp::Implies, a, b, Type::Boolean);
}

ExprPtr
eq(const ExprPtr& a, const ExprPtr& b)
{
  return typed_binary(BinOp::Eq, a, b, Type::Boolean);
}

ExprPtr
le(const ExprPtr& a, const ExprPtr& b)
{
  return typed_binary(BinOp::Le, a, b, Type::Boolean);
}

ExprPtr
lt(const ExprPtr& a, const ExprPtr& b)
{
  return typed_binary(BinOp::Lt, a, b, Type::Boolean);
}

ExprPtr
add(const ExprPtr& a, const ExprPtr& b)
{
  return typed_binary(BinOp::Add, a, b, Type::Integer);
}

ExprPtr
ite(const ExprPtr& c, const ExprPtr& a, const ExprPtr& b)
{
  if (is_true(c) || a == b) return a;
  if (is_false(c)) return b;
  return ex::ite(c, a, b);
}

}  // namespace lg

Value
eval_logic(const ExprPtr& e, const LogicEnv& env)
{
  switch (e->kind)
  {
    case ExprKind::IntLit: return Value::of_int(e->value);
    case ExprKind::BoolLit: return Value::of_bool(e->value != 0);
    case ExprKind::Var:
    {
      auto it = env.find(e->name);
      if (it == env.end())
        throw std::out_of_range("unbound symbol '" + e->name + "'");
      return it->second;
    }
    case ExprKind::ArrayRead:
    {
      Value a         = eval_logic(e->operands[0], env);
      std::int64_t i  = as_int(eval_logic(e->operands[1], env));
      if (i < 1 || i > a.count()) return Value::of_int(0);
      return Value::of_int(a.cells[static_cast<std::size_t>(i - 1)]);
    }
    case ExprKind::ArrayCount:
      return Value::of_int(eval_logic(e->operands[0], env).count());
    case ExprKind::Unary:
    {
      Value v = eval_logic(e->operands[0], env);
      if (e->unop == UnOp::Not) return Value::of_bool(!v.boolean);
      return Value::of_int(-v.integer);
    }
    case ExprKind::Binary:
    {
      BinOp op = e->binop;
      if (op == BinOp::And)
        return Value::of_bool(eval_logic_bool(e->operands[0], env)
                              && eval_logic_bool(e->operands[1], env));
      if (op == BinOp::Or)
        return Value::of_bool(eval_logic_bool(e->operands[0], env)
                              || eval_logic_bool(e->operands[1], env));
      if (op == BinOp::Implies)
        return Value::of_bool(!eval_logic_bool(e->operands[0], env)
                              || eval_logic_bool(e->operands[1], env));
      Value l = eval_logic(e->operands[0], env);
      Value r = eval_logic(e->operands[1], env);
      if ((op == BinOp::Eq || op == BinOp::Ne) && l.type == Type::Boolean)
        return Value::of_bool((l.boolean == r.boolean) == (op == BinOp::Eq));
      std::int64_t x = l.integer, y = r.integer;
      switch (op)
      {
        case BinOp::Add: return Value::of_int(x + y);
        case BinOp::Sub: return Value::of_int(x - y);
        case BinOp::Mul: return Value::of_int(x * y);
        case BinOp::Div: return Value::of_int(y == 0 ? 0 : euclid_div(x, y));
        case BinOp::Mod: return Value::of_int(y == 0 ? 0 : euclid_mod(x, y));
        case BinOp::Eq: return Value::of_bool(x == y);
        case BinOp::Ne: return Value::of_bool(x != y);
        case BinOp::Lt: return Value::of_bool(x < y);
        case BinOp::Le: return Value::of_bool(x <= y);
        case BinOp::Gt: return Value::of_bool(x > y);
        case BinOp::Ge: return Value::of_bool(x >= y);
        default: break;
      }
      break;
    }
    case ExprKind::Old: return eval_logic(e->operands[0], env);
    case ExprKind::Quant:
    {
      std::int64_t lo = as_int(eval_logic(e->operands[0], env));
      std::int64_t hi = as_int(eval_logic(e->operands[1], env));
      bool forall     = e->quant == QuantKind::ForAll;
      LogicEnv inner  = env;
      for (std::int64_t j = lo; j <= hi; ++j)
      {
        inner[e->name] = Value::of_int(j);
        bool v         = eval_logic_bool(e->operands[2], inner);
        if (forall && !v) return Value::of_bool(false);
        if (!forall && v) return Value::of_bool(true);
      }
      return Value::of_bool(forall);
    }
    case ExprKind::Store:
    {
      Value a        = eval_logic(e->operands[0], env);
      std::int64_t i = as_int(eval_logic(e->operands[1], env));
      std::int64_t v = as_int(eval_logic(e->operands[2], env));
      if (i >= 1 && i <= a.count()) a.cells[static_cast<std::size_t>(i - 1)] = v;
      return a;
    }
    case ExprKind::NewArray:
    {
      std::int64_t n = as_int(eval_logic(e->operands[0], env));
      return Value::of_array(std::vector<std::int64_t>(n > 0 ? n : 0, 0));
    }
    case ExprKind::Ite:
      return eval_logic_bool(e->operands[0], env) ? eval_logic(e->operands[1], env)
                                                  : eval_logic(e->operands[2], env);
    case ExprKind::Call: break;
  }
  throw std::logic_error("cannot evaluate expression at the logic level");
}

bool
eval_logic_bool(const ExprPtr& e, const LogicEnv& env)
{
  return eval_logic(e, env).boolean;
}

}  // namespace contraverify
