#include "contraverify/typecheck.hpp"

#include <map>
#include <set>
#include <stdexcept>

namespace contraverify {

std::string
TypeError::to_string() const
{
  return "type error at " + contraverify::to_string(where) + " in '" + routine
         + "': " + message;
}

const Routine&
TypedProgram::routine(const std::string& name) const
{
  const Routine* r = d_program.find(name);
  if (!r) throw std::out_of_range("no routine named '" + name + "'");
  return *r;
}

namespace {

enum class Context
{
  Precondition,
  Postcondition,
  Body,
};

class Checker
{
 public:
  Checker(const Program& p, std::vector<TypeError>& errors)
      : d_program(p), d_errors(errors)
  {
  }

  Routine routine(const Routine& r)
  {
    d_routine = &r;
    Routine out = r;

    std::set<std::string> names;
    for (const auto* list : {&r.args, &r.locals})
    {
      for (const auto& d : *list)
      {
        if (d.name == "Result")
          error(r.span, "'Result' cannot be declared");
        else if (!names.insert(d.name).second)
          error(r.span, "duplicate declaration of '" + d.name + "'");
      }
    }

    out.precondition  = clauses(r.precondition, Context::Precondition);
    out.body          = block(r.body);
    out.postcondition = clauses(r.postcondition, Context::Postcondition);
    return out;
  }

 private:
  void error(SourceSpan where, std::string msg)
  {
    d_errors.push_back({where, d_routine ? d_routine->name : "", std::move(msg)});
  }

  std::vector<Clause> clauses(const std::vector<Clause>& cs, Context ctx)
  {
    std::vector<Clause> out;
    std::set<std::string> labels;
    for (const auto& c : cs)
    {
      if (!c.label.empty() && !labels.insert(c.label).second)
        error(c.span, "duplicate clause label '" + c.label + "'");
      Clause typed = c;
      typed.expr   = expect(c.expr, Type::Boolean, ctx, "assertion");
      out.push_back(std::move(typed));
    }
    return out;
  }

  ExprPtr expect(const ExprPtr& e, Type want, Context ctx, const char* what)
  {
    ExprPtr typed = expr(e, ctx);
    if (typed->type != Type::Unknown && typed->type != want)
    {
      error(e->span,
            std::string(what) + " must be " + to_string(want) + ", got "
                + to_string(typed->type));
    }
    return typed;
  }

  Type variable_type(const ExprPtr& e)
  {
    if (e->name == "Result")
    {
      if (!d_routine->result_type)
      {
        error(e->span, "'Result' used in a routine without a result type");
        return Type::Unknown;
      }
      return *d_routine->result_type;
    }
    for (auto it = d_bound.rbegin(); it != d_bound.rend(); ++it)
      if (*it == e->name) return Type::Integer;
    if (const VarDecl* d = d_routine->find_variable(e->name)) return d->type;
    error(e->span, "undeclared identifier '" + e->name + "'");
    return Type::Unknown;
  }

  ExprPtr expr(const ExprPtr& e, Context ctx)
  {
    switch (e->kind)
    {
      case ExprKind::IntLit: return ex::with_type(e, Type::Integer);
      case ExprKind::BoolLit: return ex::with_type(e, Type::Boolean);
      case ExprKind::Var:
        if (e->name == "Result" && ctx == Context::Precondition)
          error(e->span, "'Result' is not available in a precondition");
        return ex::with_type(e, variable_type(e));
      case ExprKind::ArrayRead:
      {
        auto arr = expect(e->operands[0], Type::IntArray, ctx, "indexed expression");
        auto idx = expect(e->operands[1], Type::Integer, ctx, "array index");
        return ex::with_type(ex::with_operands(e, {arr, idx}), Type::Integer);
      }
      case ExprKind::ArrayCount:
      {
        auto arr = expect(e->operands[0], Type::IntArray, ctx, "'count' target");
        return ex::with_type(ex::with_operands(e, {arr}), Type::Integer);
      }
      case ExprKind::Unary:
      {
        Type t  = e->unop == UnOp::Not ? Type::Boolean : Type::Integer;
        auto op = expect(e->operands[0], t, ctx, "operand");
        return ex::with_type(ex::with_operands(e, {op}), t);
      }
      case ExprKind::Binary: return binary(e, ctx);
      case ExprKind::Old:
      {
        if (ctx != Context::Postcondition)
          error(e->span, "'old' is only allowed in postconditions");
        auto op = expr(e->operands[0], ctx);
        return ex::with_type(ex::with_operands(e, {op}), op->type);
      }
      case ExprKind::Quant:
      {
        if (d_routine->find_variable(e->name) || e->name == "Result")
          error(e->span, "bound variable '" + e->name + "' shadows a declaration");
        auto lo = expect(e->operands[0], Type::Integer, ctx, "quantifier bound");
        auto hi = expect(e->operands[1], Type::Integer, ctx, "quantifier bound");
        d_bound.push_back(e->name);
        auto body = expect(e->operands[2], Type::Boolean, ctx, "quantifier body");
        d_bound.pop_back();
        return ex::with_type(ex::with_operands(e, {lo, hi, body}), Type::Boolean);
      }
      case ExprKind::Call:
        error(e->span, "routine calls are only allowed as statements");
        return e;
      case ExprKind::Store:
      case ExprKind::NewArray:
      case ExprKind::Ite:
        error(e->span, "logic-only term in source program");
        return e;
    }
    return e;
  }

  ExprPtr binary(const ExprPtr& e, Context ctx)
  {
    BinOp op = e->binop;
    if (is_arithmetic_op(op))
    {
      auto l = expect(e->operands[0], Type::Integer, ctx, "arithmetic operand");
      auto r = expect(e->operands[1], Type::Integer, ctx, "arithmetic operand");
      return ex::with_type(ex::with_operands(e, {l, r}), Type::Integer);
    }
    if (is_boolean_op(op))
    {
      auto l = expect(e->operands[0], Type::Boolean, ctx, "boolean operand");
      auto r = expect(e->operands[1], Type::Boolean, ctx, "boolean operand");
      return ex::with_type(ex::with_operands(e, {l, r}), Type::Boolean);
    }
    if (op == BinOp::Eq || op == BinOp::Ne)
    {
      auto l = expr(e->operands[0], ctx);
      auto r = expr(e->operands[1], ctx);
      if (l->type == Type::IntArray || r->type == Type::IntArray)
        error(e->span, "arrays cannot be compared");
      else if (l->type != Type::Unknown && r->type != Type::Unknown
               && l->type != r->type)
        error(e->span,
              "cannot compare " + to_string(l->type) + " with "
                  + to_string(r->type));
      return ex::with_type(ex::with_operands(e, {l, r}), Type::Boolean);
    }
    auto l = expect(e->operands[0], Type::Integer, ctx, "comparison operand");
    auto r = expect(e->operands[1], Type::Integer, ctx, "comparison operand");
    return ex::with_type(ex::with_operands(e, {l, r}), Type::Boolean);
  }

  Type assignable(const std::string& target, SourceSpan where)
  {
    if (target == "Result")
    {
      if (!d_routine->result_type)
      {
        error(where, "'Result' assigned in a routine without a result type");
        return Type::Unknown;
      }
      return *d_routine->result_type;
    }
    if (d_routine->is_argument(target))
    {
      error(where, "argument '" + target + "' is read-only");
      return Type::Unknown;
    }
    const VarDecl* d = d_routine->find_variable(target);
    if (!d)
    {
      error(where, "undeclared identifier '" + target + "'");
      return Type::Unknown;
    }
    return d->type;
  }

  Block block(const Block& b)
  {
    Block out;
    for (const auto& s : b) out.push_back(statement(*s));
    return out;
  }

  StmtPtr statement(const Stmt& s)
  {
    const Context ctx = Context::Body;
    if (auto* a = s.as<AssignStmt>())
    {
      Type t = assignable(a->target, s.span);
      if (t == Type::IntArray) error(s.span, "whole-array assignment is not supported");
      AssignStmt out{a->target, expr(a->value, ctx)};
      if (t != Type::Unknown && out.value->type != Type::Unknown && t != out.value->type)
      {
        error(s.span,
              to_string(out.value->type) + " assigned to " + to_string(t) + " '"
                  + a->target + "'");
      }
      return make_stmt(std::move(out), s.span);
    }
    if (auto* g = s.as<GhostAssignStmt>())
    {
      GhostAssignStmt out{g->target, expr(g->value, ctx)};
      return make_stmt(std::move(out), s.span);
    }
    if (auto* w = s.as<ArrayAssignStmt>())
    {
      Type t = assignable(w->array, s.span);
      if (t != Type::Unknown && t != Type::IntArray)
        error(s.span, "'" + w->array + "' is not an array");
      ArrayAssignStmt out{w->array,
                          expect(w->index, Type::Integer, ctx, "array index"),
                          expect(w->value, Type::Integer, ctx, "array element")};
      return make_stmt(std::move(out), s.span);
    }
    if (auto* c = s.as<CreateStmt>())
    {
      Type t = assignable(c->array, s.span);
      if (t != Type::Unknown && t != Type::IntArray)
        error(s.span, "'" + c->array + "' is not an array");
      CreateStmt out{c->array, expect(c->count, Type::Integer, ctx, "array size")};
      return make_stmt(std::move(out), s.span);
    }
    if (auto* c = s.as<CheckStmt>())
    {
      CheckStmt out   = *c;
      out.assertion.expr = expect(c->assertion.expr, Type::Boolean, ctx, "check");
      return make_stmt(std::move(out), s.span);
    }
    if (auto* c = s.as<CallStmt>()) return make_stmt(call(*c, s.span), s.span);
    if (auto* i = s.as<IfStmt>())
    {
      IfStmt out = *i;
      for (auto& arm : out.arms)
      {
        arm.guard = expect(arm.guard, Type::Boolean, ctx, "condition");
        arm.body  = block(arm.body);
      }
      if (out.else_block) out.else_block = block(*out.else_block);
      return make_stmt(std::move(out), s.span);
    }
    if (auto* l = s.as<LoopStmt>())
    {
      LoopStmt out  = *l;
      out.init      = block(l->init);
      out.prelude   = block(l->prelude);
      out.invariant = clauses(l->invariant, ctx);
      out.exit      = expect(l->exit, Type::Boolean, ctx, "exit condition");
      if (l->variant)
      {
        out.variant->expr = expect(l->variant->expr, Type::Integer, ctx, "variant");
      }
      out.body = block(l->body);
      return make_stmt(std::move(out), s.span);
    }
    return std::make_shared<const Stmt>(s);
  }

  CallStmt call(const CallStmt& c, SourceSpan where)
  {
    CallStmt out = c;
    for (auto& a : out.args) a = expr(a, Context::Body);
    const Routine* callee = d_program.find(c.callee);
    if (!callee)
    {
      error(where, "unknown routine '" + c.callee + "'");
      return out;
    }
    if (callee->args.size() != c.args.size())
    {
      error(where,
            "'" + c.callee + "' expects " + std::to_string(callee->args.size())
                + " arguments, got " + std::to_string(c.args.size()));
    }
    else
    {
      for (std::size_t i = 0; i < out.args.size(); ++i)
      {
        Type got = out.args[i]->type;
        if (got != Type::Unknown && got != callee->args[i].type)
          error(out.args[i]->span,
                "argument " + std::to_string(i + 1) + " of '" + c.callee
                    + "' must be " + to_string(callee->args[i].type));
      }
    }
    if (c.target)
    {
      if (!callee->result_type)
      {
        error(where, "'" + c.callee + "' has no result");
      }
      else
      {
        Type t = assignable(*c.target, where);
        if (t != Type::Unknown && t != *callee->result_type)
          error(where, "result of '" + c.callee + "' assigned to " + to_string(t));
        if (t == Type::IntArray) error(where, "array-valued calls are not supported");
      }
    }
    return out;
  }

  const Program& d_program;
  std::vector<TypeError>& d_errors;
  const Routine* d_routine = nullptr;
  std::vector<std::string> d_bound;
};

void
collect_callees(const Block& b, std::set<std::string>& out)
{
  for (const auto& s : b)
  {
    if (auto* c = s->as<CallStmt>()) out.insert(c->callee);
    if (auto* i = s->as<IfStmt>())
    {
      for (const auto& arm : i->arms) collect_callees(arm.body, out);
      if (i->else_block) collect_callees(*i->else_block, out);
    }
    if (auto* l = s->as<LoopStmt>())
    {
      collect_callees(l->init, out);
      collect_callees(l->prelude, out);
      collect_callees(l->body, out);
    }
  }
}

void
check_recursion(const Program& p, std::vector<TypeError>& errors)
{
  std::map<std::string, std::set<std::string>> graph;
  for (const auto& r : p.routines) collect_callees(r.body, graph[r.name]);

  for (const auto& r : p.routines)
  {
    std::set<std::string> seen;
    std::vector<std::string> work(graph[r.name].begin(), graph[r.name].end());
    bool cyclic = false;
    while (!work.empty() && !cyclic)
    {
      std::string n = work.back();
      work.pop_back();
      if (n == r.name) cyclic = true;
      if (!seen.insert(n).second || !graph.count(n)) continue;
      for (const auto& m : graph[n]) work.push_back(m);
    }
    if (cyclic)
      errors.push_back({r.span, r.name, "recursive routines are not supported"});
  }
}

}  // namespace

TypecheckResult
typecheck(const Program& p)
{
  TypecheckResult result;
  std::set<std::string> names;
  for (const auto& r : p.routines)
  {
    if (!names.insert(r.name).second)
      result.errors.push_back({r.span, r.name, "duplicate routine '" + r.name + "'"});
  }

  Checker checker(p, result.errors);
  Program typed;
  typed.name = p.name;
  for (const auto& r : p.routines) typed.routines.push_back(checker.routine(r));
  check_recursion(p, result.errors);

  if (result.errors.empty()) result.program = TypedProgram(std::move(typed));
  return result;
}

TypedProgram
assume_typed(Program p)
{
  auto result = typecheck(p);
  if (!result.ok())
  {
    throw std::logic_error("transformation produced an ill-typed program: "
                           + result.errors.front().to_string());
  }
  return std::move(*result.program);
}

}  // namespace contraverify
