#include "contraverify/structure.hpp"

namespace contraverify {

std::string
to_string(BranchKind kind)
{
  switch (kind)
  {
    case BranchKind::Entry: return "entry";
    case BranchKind::Then: return "then-branch";
    case BranchKind::ElseIf: return "elseif-branch";
    case BranchKind::Else: return "else-branch";
    case BranchKind::LoopBody: return "loop-body";
    case BranchKind::LoopSkip: return "loop-skip";
  }
  return "?";
}

namespace {

void
branches_of(const Block& b, std::vector<BranchPoint>& out)
{
  for (const auto& s : b)
  {
    if (auto* i = s->as<IfStmt>())
    {
      int n = static_cast<int>(i->arms.size());
      for (int k = 0; k < n; ++k)
      {
        BranchPoint bp;
        bp.id       = static_cast<int>(out.size());
        bp.location = k == 0 ? s->span : i->arms[k].guard->span;
        bp.kind     = k == 0 ? BranchKind::Then : BranchKind::ElseIf;
        bp.owner    = s.get();
        bp.arm      = k;
        out.push_back(bp);
      }
      BranchPoint els;
      els.id       = static_cast<int>(out.size());
      els.location = s->span;
      els.kind     = BranchKind::Else;
      els.owner    = s.get();
      els.arm      = n;
      out.push_back(els);
      for (const auto& arm : i->arms) branches_of(arm.body, out);
      if (i->else_block) branches_of(*i->else_block, out);
    }
    else if (auto* l = s->as<LoopStmt>())
    {
      BranchPoint body;
      body.id       = static_cast<int>(out.size());
      body.location = s->span;
      body.kind     = BranchKind::LoopBody;
      body.owner    = s.get();
      out.push_back(body);
      BranchPoint skip = body;
      skip.id          = body.id + 1;
      skip.kind        = BranchKind::LoopSkip;
      skip.arm         = 1;
      out.push_back(skip);
      branches_of(l->init, out);
      branches_of(l->body, out);
    }
  }
}

void
decisions_of(const Block& b, std::vector<Decision>& out)
{
  for (const auto& s : b)
  {
    if (auto* i = s->as<IfStmt>())
    {
      for (std::size_t k = 0; k < i->arms.size(); ++k)
      {
        Decision d;
        d.id         = static_cast<int>(out.size());
        d.location   = i->arms[k].guard->span;
        d.expr       = i->arms[k].guard;
        d.conditions = atomic_conditions(d.expr);
        d.owner      = s.get();
        d.arm        = static_cast<int>(k);
        out.push_back(std::move(d));
      }
      for (const auto& arm : i->arms) decisions_of(arm.body, out);
      if (i->else_block) decisions_of(*i->else_block, out);
    }
    else if (auto* l = s->as<LoopStmt>())
    {
      decisions_of(l->init, out);
      Decision d;
      d.id         = static_cast<int>(out.size());
      d.location   = l->exit->span;
      d.expr       = l->exit;
      d.conditions = atomic_conditions(d.expr);
      d.owner      = s.get();
      d.arm        = -1;
      out.push_back(std::move(d));
      decisions_of(l->body, out);
    }
  }
}

bool
is_connective(const ExprPtr& e)
{
  if (e->kind == ExprKind::Unary && e->unop == UnOp::Not) return true;
  return e->kind == ExprKind::Binary && is_boolean_op(e->binop);
}

void
collect_conditions(const ExprPtr& e, std::vector<ExprPtr>& out)
{
  if (is_connective(e))
  {
    for (const auto& op : e->operands) collect_conditions(op, out);
    return;
  }
  for (const auto& c : out)
    if (equal(c, e)) return;
  out.push_back(e);
}

std::optional<bool>
eval3(const ExprPtr& e,
      const std::vector<ExprPtr>& conds,
      const std::vector<std::optional<bool>>& values)
{
  if (!is_connective(e))
  {
    for (std::size_t i = 0; i < conds.size(); ++i)
      if (equal(conds[i], e)) return values[i];
    if (e->kind == ExprKind::BoolLit) return e->value != 0;
    return std::nullopt;
  }
  if (e->kind == ExprKind::Unary)
  {
    auto v = eval3(e->operands[0], conds, values);
    if (!v) return std::nullopt;
    return !*v;
  }
  auto l = eval3(e->operands[0], conds, values);
  auto r = eval3(e->operands[1], conds, values);
  switch (e->binop)
  {
    case BinOp::And:
      if ((l && !*l) || (r && !*r)) return false;
      if (l && r) return true;
      return std::nullopt;
    case BinOp::Or:
      if ((l && *l) || (r && *r)) return true;
      if (l && r) return false;
      return std::nullopt;
    case BinOp::Implies:
      if ((l && !*l) || (r && *r)) return true;
      if (l && r) return false;
      return std::nullopt;
    default: return std::nullopt;
  }
}

}  // namespace

std::vector<BranchPoint>
enumerate_branches(const Routine& r)
{
  std::vector<BranchPoint> out;
  branches_of(r.body, out);
  if (out.empty())
  {
    BranchPoint entry;
    entry.location = r.span;
    out.push_back(entry);
  }
  return out;
}

std::vector<ExprPtr>
atomic_conditions(const ExprPtr& decision)
{
  std::vector<ExprPtr> out;
  collect_conditions(decision, out);
  return out;
}

std::vector<Decision>
enumerate_decisions(const Routine& r)
{
  std::vector<Decision> out;
  decisions_of(r.body, out);
  return out;
}

std::optional<bool>
evaluate_decision(const ExprPtr& decision,
                  const std::vector<ExprPtr>& conditions,
                  const std::vector<std::optional<bool>>& values)
{
  return eval3(decision, conditions, values);
}

ExprPtr
replace_condition(const ExprPtr& decision,
                  const ExprPtr& condition,
                  const ExprPtr& replacement)
{
  if (!is_connective(decision))
    return equal(decision, condition) ? replacement : decision;
  std::vector<ExprPtr> ops;
  for (const auto& op : decision->operands)
    ops.push_back(replace_condition(op, condition, replacement));
  return ex::with_operands(decision, std::move(ops));
}

RoutineStructure
RoutineStructure::of(const Routine& r)
{
  RoutineStructure s;
  s.branches  = enumerate_branches(r);
  s.decisions = enumerate_decisions(r);
  for (const auto& b : s.branches)
  {
    if (b.owner && !s.first_branch.count(b.owner)) s.first_branch[b.owner] = b.id;
  }
  for (const auto& d : s.decisions)
  {
    s.decision_at[{d.owner, d.arm}] = d.id;
    if (d.arm == -1)
    {
      s.loop_index[d.owner] = static_cast<int>(s.loops.size());
      s.loops.push_back(d.owner);
    }
  }
  return s;
}

}  // namespace contraverify
