#include "contraverify/proof2fix.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>

#include "contraverify/logic.hpp"
#include "contraverify/parallel.hpp"
#include "contraverify/printer.hpp"

namespace contraverify {

namespace {

const char* const kObservedResult = "Result";
const char* const kRequiredResult = "Result*";

ExprPtr
typed(ExprPtr e, Type t)
{
  return ex::with_type(e, t);
}

ExprPtr
int_term(std::int64_t v)
{
  return typed(ex::int_lit(v), Type::Integer);
}

/// a * e + b, folded for a = 1 and b = 0.
ExprPtr
affine(std::int64_t a, const ExprPtr& e, std::int64_t b)
{
  ExprPtr out = e;
  if (a != 1) out = typed(ex::binary(BinOp::Mul, int_term(a), e), Type::Integer);
  if (b > 0) out = typed(ex::binary(BinOp::Add, out, int_term(b)), Type::Integer);
  if (b < 0) out = typed(ex::binary(BinOp::Sub, out, int_term(-b)), Type::Integer);
  return out;
}

ExprPtr
boolean(BinOp op, ExprPtr a, ExprPtr b)
{
  return typed(ex::binary(op, std::move(a), std::move(b)), Type::Boolean);
}

ExprPtr
negation(ExprPtr a)
{
  return typed(ex::unary(UnOp::Not, std::move(a)), Type::Boolean);
}

const Term*
find_term(const std::vector<Term>& terms, const std::string& name)
{
  for (const auto& t : terms)
    if (t.name == name) return &t;
  return nullptr;
}

int
pattern_rank(CexInvariant::Pattern p)
{
  switch (p)
  {
    case CexInvariant::Pattern::Constant: return 0;
    case CexInvariant::Pattern::Equality: return 1;
    case CexInvariant::Pattern::Linear:
    case CexInvariant::Pattern::LinearOld: return 2;
    case CexInvariant::Pattern::Range: return 3;
  }
  return 4;
}

}  // namespace

/* -------------------------------------------------------------------------- */
/* Invariants                                                                 */
/* -------------------------------------------------------------------------- */

std::string
to_string(CexInvariant::Pattern p)
{
  switch (p)
  {
    case CexInvariant::Pattern::Constant: return "constant";
    case CexInvariant::Pattern::Equality: return "equality";
    case CexInvariant::Pattern::Linear: return "linear";
    case CexInvariant::Pattern::LinearOld: return "linear-old";
    case CexInvariant::Pattern::Range: return "range";
  }
  return "?";
}

bool
CexInvariant::holds(const Observation& o) const
{
  auto l = o.find(lhs);
  if (l == o.end()) return false;
  std::int64_t x = l->second;
  switch (pattern)
  {
    case Pattern::Constant: return x == b;
    case Pattern::Range: return lo <= x && x <= hi;
    default: break;
  }
  auto r = o.find(rhs);
  if (r == o.end()) return false;
  return x == a * r->second + b;
}

std::string
CexInvariant::text() const
{
  auto lin = [&](const std::string& v) {
    std::string s = a == 1 ? v : std::to_string(a) + " * " + v;
    if (b > 0) s += " + " + std::to_string(b);
    if (b < 0) s += " - " + std::to_string(-b);
    return s;
  };
  switch (pattern)
  {
    case Pattern::Constant: return lhs + " = " + std::to_string(b);
    case Pattern::Equality: return lhs + " = " + rhs;
    case Pattern::Linear: return lhs + " = " + lin(rhs);
    case Pattern::LinearOld: return lhs + " = " + lin("old " + rhs);
    case Pattern::Range: return std::to_string(lo) + " <= " + lhs + " <= " + std::to_string(hi);
  }
  return "";
}

ExprPtr
CexInvariant::value(const std::vector<Term>& terms) const
{
  if (pattern == Pattern::Constant) return int_term(b);
  if (pattern == Pattern::Range) return nullptr;
  const Term* r = find_term(terms, rhs);
  if (!r || !r->expr) return nullptr;
  return affine(a, r->expr, b);
}

ExprPtr
CexInvariant::predicate(const std::vector<Term>& terms) const
{
  const Term* l = find_term(terms, lhs);
  if (!l || !l->expr) return nullptr;
  if (pattern == Pattern::Range)
    return boolean(BinOp::And, boolean(BinOp::Le, int_term(lo), l->expr),
                   boolean(BinOp::Le, l->expr, int_term(hi)));
  ExprPtr v = value(terms);
  if (!v) return nullptr;
  return boolean(BinOp::Eq, l->expr, v);
}

std::vector<Term>
input_terms(const Routine& r, const std::vector<ArgBinding>& cexs)
{
  std::vector<Term> out;
  for (const auto& a : r.args)
  {
    if (a.type == Type::Integer)
    {
      out.push_back({a.name, ex::var(a.name, Type::Integer), true});
    }
    else if (a.type == Type::IntArray)
    {
      ExprPtr arr   = ex::var(a.name, Type::IntArray);
      ExprPtr count = typed(ex::count(arr), Type::Integer);
      out.push_back({a.name + ".count", count, true});
      bool nonempty = !cexs.empty() && std::all_of(cexs.begin(), cexs.end(), [&](const ArgBinding& b) {
        auto it = b.find(a.name);
        return it != b.end() && !it->second.cells.empty();
      });
      if (nonempty)
      {
        out.push_back({a.name + "[1]", typed(ex::read(arr, int_term(1)), Type::Integer), true});
        out.push_back({a.name + "[" + a.name + ".count]", typed(ex::read(arr, count), Type::Integer), true});
      }
    }
  }
  return out;
}

namespace {

std::optional<std::int64_t>
term_value(const Term& t, const ArgBinding& b)
{
  if (!t.expr) return std::nullopt;
  LogicEnv env(b.begin(), b.end());
  try
  {
    return eval_logic(t.expr, env).integer;
  }
  catch (const std::exception&)
  {
    return std::nullopt;
  }
}

Observation
observe_inputs(const std::vector<Term>& terms, const ArgBinding& b)
{
  Observation o;
  for (const auto& t : terms)
    if (auto v = term_value(t, b)) o[t.name] = *v;
  return o;
}

}  // namespace

std::vector<CexInvariant>
infer_invariants(const std::vector<Observation>& obs, const std::vector<Term>& terms)
{
  std::vector<CexInvariant> out;
  if (obs.empty()) return out;
  const int n = static_cast<int>(obs.size());

  std::vector<std::string> names;
  for (const auto& t : terms)
    if (std::all_of(obs.begin(), obs.end(), [&](const Observation& o) { return o.count(t.name); }))
      names.push_back(t.name);
  auto input = [&](const std::string& name) {
    const Term* t = find_term(terms, name);
    return t && t->input;
  };
  auto constant = [&](const std::string& name) {
    return std::all_of(obs.begin(), obs.end(),
                       [&](const Observation& o) { return o.at(name) == obs[0].at(name); });
  };

  for (const auto& x : names)
  {
    if (constant(x))
    {
      CexInvariant inv;
      inv.pattern = CexInvariant::Pattern::Constant;
      inv.lhs     = x;
      inv.b       = obs[0].at(x);
      out.push_back(inv);
    }
  }
  for (std::size_t i = 0; i < names.size(); ++i)
  {
    for (std::size_t j = 0; j < names.size(); ++j)
    {
      if (i == j) continue;
      const std::string& y = names[i];
      const std::string& x = names[j];
      if (constant(x)) continue;
      // Two observations with distinct x fix a and b.
      std::size_t k = 1;
      while (k < obs.size() && obs[k].at(x) == obs[0].at(x)) ++k;
      if (k == obs.size()) continue;
      std::int64_t dx = obs[k].at(x) - obs[0].at(x);
      std::int64_t dy = obs[k].at(y) - obs[0].at(y);
      if (dy % dx != 0) continue;
      std::int64_t a = dy / dx;
      if (a == 0) continue;
      std::int64_t b = obs[0].at(y) - a * obs[0].at(x);
      CexInvariant inv;
      inv.lhs = y;
      inv.rhs = x;
      inv.a   = a;
      inv.b   = b;
      if (a == 1 && b == 0)
      {
        // Each equality once, outputs on the left.
        if (input(y) == input(x) ? j < i : input(y)) continue;
        inv.pattern = CexInvariant::Pattern::Equality;
      }
      else
      {
        inv.pattern = !input(y) && input(x) ? CexInvariant::Pattern::LinearOld
                                             : CexInvariant::Pattern::Linear;
      }
      if (std::all_of(obs.begin(), obs.end(), [&](const Observation& o) { return inv.holds(o); }))
        out.push_back(inv);
    }
  }
  for (const auto& x : names)
  {
    if (constant(x)) continue;
    CexInvariant inv;
    inv.pattern = CexInvariant::Pattern::Range;
    inv.lhs     = x;
    inv.lo = inv.hi = obs[0].at(x);
    for (const auto& o : obs)
    {
      inv.lo = std::min(inv.lo, o.at(x));
      inv.hi = std::max(inv.hi, o.at(x));
    }
    out.push_back(inv);
  }
  for (auto& inv : out)
    inv.support = static_cast<int>(
        std::count_if(obs.begin(), obs.end(), [&](const Observation& o) { return inv.holds(o); }));
  std::erase_if(out, [&](const CexInvariant& inv) { return inv.support != n; });
  std::stable_sort(out.begin(), out.end(), [](const CexInvariant& x, const CexInvariant& y) {
    if (x.support != y.support) return x.support > y.support;
    return pattern_rank(x.pattern) < pattern_rank(y.pattern);
  });
  return out;
}

std::vector<CexInvariant>
infer_invariants(const std::vector<Counterexample>& cexs, const Routine& scope)
{
  std::vector<ArgBinding> bindings;
  for (const auto& c : cexs) bindings.push_back(c.binding);
  std::vector<Term> terms = input_terms(scope, bindings);
  std::vector<Observation> obs;
  for (const auto& b : bindings) obs.push_back(observe_inputs(terms, b));
  return infer_invariants(obs, terms);
}

/* -------------------------------------------------------------------------- */
/* Sites and edits                                                            */
/* -------------------------------------------------------------------------- */

std::string
to_string(FixCandidate::Kind k)
{
  switch (k)
  {
    case FixCandidate::Kind::ConditionReplace: return "condition_replace";
    case FixCandidate::Kind::AssignmentReplace: return "assignment_replace";
    case FixCandidate::Kind::PreconditionStrengthen: return "precondition_strengthen";
    case FixCandidate::Kind::PostconditionWeaken: return "postcondition_weaken";
  }
  return "?";
}

std::string
FixCandidate::describe() const
{
  switch (kind)
  {
    case Kind::ConditionReplace:
      return "condition " + print_expr(original) + "  ->  " + print_expr(replacement);
    case Kind::AssignmentReplace:
      return "assignment " + print_expr(original) + "  ->  " + print_expr(replacement);
    case Kind::PreconditionStrengthen: return "require " + print_expr(replacement);
    case Kind::PostconditionWeaken:
      return "ensure " + print_expr(original) + "  ->  " + print_expr(replacement);
  }
  return "";
}

std::string
print_candidate(const FixCandidate& f)
{
  return f.routine + ": " + f.describe();
}

namespace {

struct ConditionSite
{
  ExprPtr expr;
  SourceSpan span;
};

struct AssignmentSite
{
  std::string target;
  ExprPtr value;
  SourceSpan span;
};

/// Walks conditions and assignments in source order. When an edit is
/// requested, rebuilds the block with the matching site replaced.
class SiteWalker
{
 public:
  std::vector<ConditionSite> conditions;
  std::vector<AssignmentSite> assignments;

  int edit_condition = -1;
  int edit_assignment = -1;
  ExprPtr replacement;

  Block block(const Block& b)
  {
    Block out;
    for (const auto& s : b) out.push_back(stmt(s));
    return out;
  }

 private:
  ExprPtr condition(const ExprPtr& e)
  {
    int k = static_cast<int>(conditions.size());
    conditions.push_back({e, e->span});
    return k == edit_condition ? replacement : e;
  }

  StmtPtr stmt(const StmtPtr& s)
  {
    if (auto* i = s->as<IfStmt>())
    {
      IfStmt n = *i;
      for (auto& arm : n.arms)
      {
        arm.guard = condition(arm.guard);
        arm.body  = block(arm.body);
      }
      if (n.else_block) n.else_block = block(*n.else_block);
      return make_stmt(std::move(n), s->span);
    }
    if (auto* l = s->as<LoopStmt>())
    {
      LoopStmt n = *l;
      n.init     = block(l->init);
      n.exit     = condition(l->exit);
      n.body     = block(l->body);
      return make_stmt(std::move(n), s->span);
    }
    if (auto* a = s->as<AssignStmt>())
    {
      int k = static_cast<int>(assignments.size());
      assignments.push_back({a->target, a->value, s->span});
      if (k != edit_assignment) return s;
      return make_stmt(AssignStmt{a->target, replacement}, s->span);
    }
    return s;
  }
};

/// Pre-order copies of `e`, each with one relational operator changed.
void
relational_mutants(const ExprPtr& e, const std::function<void(ExprPtr)>& emit)
{
  // Rebuilds e with node #target replaced by `fn(node)`.
  std::function<ExprPtr(const ExprPtr&, int&, int, const std::function<ExprPtr(const ExprPtr&)>&)>
      rebuild = [&](const ExprPtr& x, int& counter, int target,
                    const std::function<ExprPtr(const ExprPtr&)>& fn) -> ExprPtr {
    bool here = x->kind == ExprKind::Binary && is_relational_op(x->binop);
    if (here && counter++ == target) return fn(x);
    if (x->operands.empty() || x->kind == ExprKind::Quant) return x;
    std::vector<ExprPtr> ops;
    for (const auto& o : x->operands) ops.push_back(rebuild(o, counter, target, fn));
    return ex::with_operands(x, std::move(ops));
  };

  int total = 0;
  {
    int c = 0;
    rebuild(e, c, -1, [](const ExprPtr& x) { return x; });
    total = c;
  }
  static const BinOp kRel[] = {BinOp::Eq, BinOp::Ne, BinOp::Lt, BinOp::Le, BinOp::Gt, BinOp::Ge};
  for (int t = 0; t < total; ++t)
  {
    ExprPtr found;
    int c = 0;
    rebuild(e, c, t, [&](const ExprPtr& x) {
      found = x;
      return x;
    });
    const Expr& n = *found;
    bool boolean_operands = n.operands[0]->type == Type::Boolean;
    for (BinOp op : kRel)
    {
      if (op == n.binop) continue;
      if (boolean_operands && op != BinOp::Eq && op != BinOp::Ne) continue;
      int k = 0;
      emit(rebuild(e, k, t, [&](const ExprPtr& x) {
        return ex::binary(op, x->operands[0], x->operands[1], x->span);
      }));
    }
    if (boolean_operands) continue;
    for (BinOp shift : {BinOp::Add, BinOp::Sub})
    {
      int k = 0;
      emit(rebuild(e, k, t, [&](const ExprPtr& x) {
        return ex::binary(x->binop, x->operands[0],
                          ex::binary(shift, x->operands[1], ex::int_lit(1)), x->span);
      }));
    }
  }
}

bool
contains(const ExprPtr& haystack, const ExprPtr& needle)
{
  if (equal(haystack, needle)) return true;
  return std::any_of(haystack->operands.begin(), haystack->operands.end(),
                     [&](const ExprPtr& o) { return contains(o, needle); });
}

}  // namespace

int
edit_distance(const ExprPtr& a, const ExprPtr& b)
{
  if (equal(a, b)) return 0;
  if (a->kind == b->kind && a->operands.size() == b->operands.size() && a->name == b->name
      && a->unop == b->unop && a->quant == b->quant && !a->operands.empty())
  {
    int d = a->binop != b->binop ? 1 : 0;
    for (std::size_t i = 0; i < a->operands.size(); ++i) d += edit_distance(a->operands[i], b->operands[i]);
    return d;
  }
  if (a->operands.empty() && b->operands.empty() && a->kind == b->kind) return 1;
  int sa = static_cast<int>(size(a)), sb = static_cast<int>(size(b));
  if (contains(b, a)) return sb - sa;
  if (contains(a, b)) return sa - sb;
  return sb;
}

Program
apply_fix(const Program& p, const FixCandidate& f)
{
  Program out = p;
  for (auto& r : out.routines)
  {
    if (r.name != f.routine) continue;
    switch (f.kind)
    {
      case FixCandidate::Kind::ConditionReplace:
      case FixCandidate::Kind::AssignmentReplace:
      {
        SiteWalker w;
        (f.kind == FixCandidate::Kind::ConditionReplace ? w.edit_condition : w.edit_assignment) = f.site;
        w.replacement = f.replacement;
        r.body        = w.block(r.body);
        break;
      }
      case FixCandidate::Kind::PreconditionStrengthen:
        r.precondition.push_back({"strengthened", f.replacement, SourceSpan{}});
        break;
      case FixCandidate::Kind::PostconditionWeaken:
        r.postcondition.at(static_cast<std::size_t>(f.site)).expr = f.replacement;
        break;
    }
  }
  return out;
}

std::vector<FixCandidate>
synthesize_fixes(const Routine& r,
                 const ProofFailure& failure,
                 const std::vector<CexInvariant>& invs,
                 const std::vector<Term>& terms,
                 int cap)
{
  SiteWalker w;
  w.block(r.body);

  std::vector<ExprPtr> guards;  // `I` of top input invariants
  for (const auto& inv : invs)
  {
    if (static_cast<int>(guards.size()) >= kTemplateInvariants) break;
    if (ExprPtr p = inv.predicate(terms)) guards.push_back(p);
  }
  std::vector<std::string> guard_text;
  for (const auto& inv : invs)
    if (inv.predicate(terms) && static_cast<int>(guard_text.size()) < kTemplateInvariants)
      guard_text.push_back(inv.text());

  std::vector<std::pair<FixCandidate, int>> out;
  std::set<std::string> seen;
  auto add = [&](FixCandidate c) {
    if (c.original && equal(c.original, c.replacement)) return;
    std::string key = to_string(c.kind) + "#" + std::to_string(c.site) + "#" + print_expr(c.replacement);
    if (!seen.insert(key).second) return;
    int d = c.original ? edit_distance(c.original, c.replacement) : static_cast<int>(size(c.replacement));
    out.push_back({std::move(c), d});
  };

  for (std::size_t k = 0; k < w.conditions.size(); ++k)
  {
    const ConditionSite& site = w.conditions[k];
    auto make = [&](ExprPtr repl, std::string why) {
      FixCandidate c;
      c.kind        = FixCandidate::Kind::ConditionReplace;
      c.routine     = r.name;
      c.site        = static_cast<int>(k);
      c.location    = site.span;
      c.original    = site.expr;
      c.replacement = std::move(repl);
      c.rationale   = std::move(why);
      add(std::move(c));
    };
    relational_mutants(site.expr, [&](ExprPtr m) { make(m, "relational mutation"); });
    for (std::size_t g = 0; g < guards.size(); ++g)
    {
      make(ex::binary(BinOp::And, site.expr, ex::unary(UnOp::Not, guards[g])),
           "exclude counterexamples: " + guard_text[g]);
      make(ex::binary(BinOp::Or, site.expr, ex::unary(UnOp::Not, guards[g])),
           "admit counterexamples: " + guard_text[g]);
    }
  }

  for (std::size_t k = 0; k < w.assignments.size(); ++k)
  {
    const AssignmentSite& site = w.assignments[k];
    const VarDecl* target      = r.find_variable(site.target);
    bool integer = site.target == "Result" ? r.result_type == Type::Integer
                                           : target && target->type == Type::Integer;
    if (!integer) continue;
    auto make = [&](ExprPtr repl, std::string why) {
      FixCandidate c;
      c.kind        = FixCandidate::Kind::AssignmentReplace;
      c.routine     = r.name;
      c.site        = static_cast<int>(k);
      c.location    = site.span;
      c.original    = site.value;
      c.replacement = std::move(repl);
      c.rationale   = std::move(why);
      add(std::move(c));
    };
    make(ex::binary(BinOp::Add, site.value, ex::int_lit(1)), "off by one");
    make(ex::binary(BinOp::Sub, site.value, ex::int_lit(1)), "off by one");
    if (site.target != "Result") continue;
    for (const auto& inv : invs)
    {
      if (inv.lhs != kRequiredResult || inv.pattern == CexInvariant::Pattern::Range) continue;
      if (ExprPtr v = inv.value(terms)) make(v, "required value: " + inv.text());
    }
  }

  for (std::size_t g = 0; g < guards.size(); ++g)
  {
    FixCandidate c;
    c.kind        = FixCandidate::Kind::PreconditionStrengthen;
    c.routine     = r.name;
    c.site        = static_cast<int>(r.precondition.size());
    c.location    = r.span;
    c.replacement = ex::unary(UnOp::Not, guards[g]);
    c.rationale   = "reject counterexamples: " + guard_text[g];
    add(std::move(c));
  }
  if (failure.vc.kind == VcKind::PostconditionClause)
  {
    for (std::size_t k = 0; k < r.postcondition.size(); ++k)
    {
      const Clause& clause = r.postcondition[k];
      if (clause.label != failure.vc.label || clause.span != failure.vc.location) continue;
      if (clause.expr->kind == ExprKind::BoolLit) continue;
      for (std::size_t g = 0; g < guards.size(); ++g)
      {
        FixCandidate c;
        c.kind        = FixCandidate::Kind::PostconditionWeaken;
        c.routine     = r.name;
        c.site        = static_cast<int>(k);
        c.location    = clause.span;
        c.original    = clause.expr;
        c.replacement = ex::binary(BinOp::Implies, ex::unary(UnOp::Not, guards[g]), clause.expr);
        c.rationale   = "exempt counterexamples: " + guard_text[g];
        add(std::move(c));
      }
    }
  }

  if (out.empty()) throw NoCandidates("no fix template applies to " + r.name);
  std::stable_sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    if (x.second != y.second) return x.second < y.second;
    return x.first.location < y.first.location;
  });
  std::vector<FixCandidate> result;
  for (auto& [c, d] : out)
  {
    if (static_cast<int>(result.size()) >= cap) break;
    result.push_back(std::move(c));
  }
  return result;
}

/* -------------------------------------------------------------------------- */
/* Validation                                                                 */
/* -------------------------------------------------------------------------- */

std::string
failure_signature(const VerificationCondition& vc)
{
  return vc.routine + ": " + to_string(vc.kind) + " " + vc.display_label();
}

std::string
to_string(ValidationVerdict::Kind k)
{
  switch (k)
  {
    case ValidationVerdict::Kind::Valid: return "valid";
    case ValidationVerdict::Kind::RemovesFailureButBreaksOther: return "removes_failure_but_breaks_other";
    case ValidationVerdict::Kind::StillFails: return "still_fails";
    case ValidationVerdict::Kind::Unknown: return "unknown";
    case ValidationVerdict::Kind::IllTyped: return "ill_typed";
  }
  return "?";
}

ValidationVerdict
validate_fix(const TypedProgram& p, const FixCandidate& f, const SolverConfig& cfg, const ValidationContext& ctx)
{
  ValidationVerdict v;
  TypecheckResult tc = typecheck(apply_fix(p.program(), f));
  if (!tc.ok())
  {
    v.kind = ValidationVerdict::Kind::IllTyped;
    for (const auto& e : tc.errors) v.new_failures.push_back(e.to_string());
    return v;
  }
  const TypedProgram& q = *tc.program;
  Interpreter interp(q);

  // Tests first: a stored counterexample that still fails the same way
  // settles the verdict without the prover.
  for (const auto& t : ctx.failing_tests)
  {
    Outcome o = interp.run(t.routine, t.binding, ctx.step_budget);
    if (o.violated() && t.expected.violation && o.violation.display() == t.expected.label)
    {
      v.kind     = ValidationVerdict::Kind::StillFails;
      v.by_tests = true;
      v.new_failures.push_back(t.expected.label);
      return v;
    }
  }

  bool unknown        = false;
  bool original_fails = false;
  SolverSession session(cfg);
  unsigned seed = cfg.seeds.empty() ? 0 : cfg.seeds[0];
  for (const auto& r : q.program().routines)
  {
    if (f.implementation() && r.name != f.routine) continue;
    std::vector<VerificationCondition> vcs;
    try
    {
      vcs = generate_vcs(q, r);
    }
    catch (const std::exception& e)
    {
      v.new_failures.push_back(r.name + ": " + e.what());
      unknown = true;
      continue;
    }
    for (const auto& vc : vcs)
    {
      session.load(encode(vc), seed);
      ++v.solver_calls;
      CheckResult res = session.check();
      if (res == CheckResult::Unsat) continue;
      if (res != CheckResult::Sat)
      {
        unknown = true;
        continue;
      }
      bool same = vc.routine == ctx.routine && vc.kind == ctx.kind && vc.display_label() == ctx.label;
      original_fails = original_fails || same;
      std::string sig = failure_signature(vc);
      if (!same && vc.routine != f.routine && ctx.preexisting.count(sig)) continue;
      v.new_failures.push_back(sig);
    }
  }
  if (original_fails)
  {
    v.kind = ValidationVerdict::Kind::StillFails;
    return v;
  }
  if (!v.new_failures.empty() && !unknown)
  {
    v.kind = ValidationVerdict::Kind::RemovesFailureButBreaksOther;
    return v;
  }
  if (unknown || !v.new_failures.empty())
  {
    v.kind = ValidationVerdict::Kind::Unknown;
    return v;
  }

  std::vector<TestCase> tests = ctx.failing_tests;
  tests.insert(tests.end(), ctx.regression.begin(), ctx.regression.end());
  for (const auto& t : tests)
  {
    const Routine* r = q.find(t.routine);
    if (!r) continue;
    Outcome o = interp.run(t.routine, t.binding, ctx.step_budget);
    if (o.normal() || entry_precondition_failure(*r, o)) continue;
    v.new_failures.push_back("test " + t.routine + " (" + to_string(t.binding, *r) + "): " + o.to_string());
  }
  v.kind = v.new_failures.empty() ? ValidationVerdict::Kind::Valid
                                  : ValidationVerdict::Kind::RemovesFailureButBreaksOther;
  return v;
}

ValidationVerdict
validate_fix(const TypedProgram& p, const FixCandidate& f, const SolverConfig& cfg)
{
  ValidationContext ctx;
  ctx.routine = f.routine;
  // Without a recorded failure every falsified VC counts as still failing.
  ValidationVerdict v = validate_fix(p, f, cfg, ctx);
  if (v.kind == ValidationVerdict::Kind::RemovesFailureButBreaksOther && !v.new_failures.empty()
      && v.new_failures[0].rfind("test ", 0) != 0)
    v.kind = ValidationVerdict::Kind::StillFails;
  return v;
}

std::vector<FixAttempt>
rank_fixes(const std::vector<FixAttempt>& validated)
{
  std::vector<FixAttempt> out;
  for (const auto& a : validated)
    if (a.verdict.kind == ValidationVerdict::Kind::Valid) out.push_back(a);
  std::stable_sort(out.begin(), out.end(), [](const FixAttempt& x, const FixAttempt& y) {
    bool ix = x.candidate.implementation(), iy = y.candidate.implementation();
    if (ix != iy) return ix;
    if (x.edit_distance != y.edit_distance) return x.edit_distance < y.edit_distance;
    return x.candidate.location < y.candidate.location;
  });
  for (std::size_t i = 0; i < out.size(); ++i) out[i].rank = static_cast<int>(i) + 1;
  return out;
}

/* -------------------------------------------------------------------------- */
/* Sessions                                                                   */
/* -------------------------------------------------------------------------- */

std::string
unified_diff(const std::string& before, const std::string& after, const std::string& name)
{
  auto lines = [](const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string l;
    while (std::getline(in, l)) out.push_back(l);
    return out;
  };
  auto a = lines(before), b = lines(after);
  std::size_t n = a.size(), m = b.size();
  std::vector<std::vector<int>> lcs(n + 1, std::vector<int>(m + 1, 0));
  for (std::size_t i = n; i-- > 0;)
    for (std::size_t j = m; j-- > 0;)
      lcs[i][j] = a[i] == b[j] ? lcs[i + 1][j + 1] + 1 : std::max(lcs[i + 1][j], lcs[i][j + 1]);
  std::ostringstream out;
  out << "--- " << name << "\n+++ " << name << " (fixed)\n@@ -1," << n << " +1," << m << " @@\n";
  std::size_t i = 0, j = 0;
  while (i < n || j < m)
  {
    if (i < n && j < m && a[i] == b[j])
    {
      out << " " << a[i++] << "\n";
      ++j;
    }
    else if (i < n && (j == m || lcs[i + 1][j] >= lcs[i][j + 1]))
    {
      out << "-" << a[i++] << "\n";
    }
    else
    {
      out << "+" << b[j++] << "\n";
    }
  }
  return out.str();
}

namespace {

/// The value of Result that the postcondition demands for `b`, if any.
std::optional<std::int64_t>
required_result(const Routine& r, const ArgBinding& b, SolverSession& session, unsigned seed)
{
  if (r.result_type != Type::Integer || r.postcondition.empty()) return std::nullopt;
  VerificationCondition vc;
  vc.routine = r.name;
  Substitution entry;
  for (const auto& a : r.args)
  {
    vc.symbols.push_back({a.name, a.type, true});
    ExprPtr v = ex::var(a.name, a.type);
    entry[a.name] = v;
    const Value& x = b.at(a.name);
    if (a.type == Type::IntArray)
    {
      vc.assumptions.push_back(boolean(BinOp::Eq, typed(ex::count(v), Type::Integer), int_term(x.count())));
      for (std::size_t k = 0; k < x.cells.size(); ++k)
        vc.assumptions.push_back(boolean(
            BinOp::Eq, typed(ex::read(v, int_term(static_cast<std::int64_t>(k) + 1)), Type::Integer),
            int_term(x.cells[k])));
    }
    else if (a.type == Type::Boolean)
    {
      vc.assumptions.push_back(x.boolean ? v : negation(v));
    }
    else
    {
      vc.assumptions.push_back(boolean(BinOp::Eq, v, int_term(x.integer)));
    }
  }
  const std::string want = "__required";
  vc.symbols.push_back({want, Type::Integer, true});
  Substitution result{{"Result", ex::var(want, Type::Integer)}};
  std::vector<ExprPtr> post;
  for (const auto& c : r.postcondition) post.push_back(substitute(resolve_old(c.expr, entry), result));
  vc.obligation = negation(lg::conj(post));
  try
  {
    session.load(encode(vc), seed);
    if (session.check() != CheckResult::Sat) return std::nullopt;
    return session.model({{want, Type::Integer, true}}).int_value(want);
  }
  catch (const std::exception&)
  {
    return std::nullopt;
  }
}

}  // namespace

FailureFix
fix_failure(const TypedProgram& p, const VerificationCondition& vc, const FixOptions& opt)
{
  auto t0 = std::chrono::steady_clock::now();
  const Routine& r = p.routine(vc.routine);
  FailureFix out;
  out.vc_key   = vc.key();
  out.routine  = vc.routine;
  out.kind     = to_string(vc.kind);
  out.label    = vc.display_label();
  out.location = vc.location;

  // Counterexamples: distinct models, each minimized.
  std::vector<Model> models = solve_distinct(encode(vc), opt.counterexamples, opt.solver);
  std::vector<ArgBinding> raw;
  for (const auto& m : models)
  {
    Counterexample c = extract_counterexample(m, vc, r);
    if (c.oversized) continue;
    raw.push_back(c.binding);
    try
    {
      c = minimize(c, vc, r, opt.solver, opt.min_budget).minimized;
    }
    catch (const std::exception&)
    {
    }
    if (c.oversized) continue;
    bool dup = std::any_of(out.counterexamples.begin(), out.counterexamples.end(),
                           [&](const Counterexample& x) { return x.binding == c.binding; });
    if (!dup) out.counterexamples.push_back(std::move(c));
  }
  if (out.counterexamples.size() < 2)
    out.warnings.push_back("only " + std::to_string(out.counterexamples.size())
                           + " distinct counterexample(s); invariants may over-fit");

  ValidationContext ctx;
  ctx.routine     = vc.routine;
  ctx.kind        = vc.kind;
  ctx.label       = vc.display_label();
  ctx.regression  = opt.regression;
  ctx.preexisting = opt.preexisting;
  ctx.step_budget = opt.step_budget;
  Interpreter interp(p);
  for (const auto& c : out.counterexamples)
  {
    TestCase t = counterexample_to_test(c, true);
    if (classify(t.expected, interp.run(t.routine, t.binding, opt.step_budget)).kind
        == TestVerdict::Kind::ReproducesExpectedViolation)
      ++out.reproduced;
    ctx.failing_tests.push_back(std::move(t));
  }

  // Observations: inputs, the observed Result (postconditions not checked)
  // and the Result the postcondition requires.
  // Minimized counterexamples tend to collapse onto one point, so inference
  // also sees the raw models.
  std::vector<ArgBinding> bindings;
  for (const auto& c : out.counterexamples) bindings.push_back(c.binding);
  for (const auto& b : raw)
    if (std::find(bindings.begin(), bindings.end(), b) == bindings.end()) bindings.push_back(b);
  out.terms = input_terms(r, bindings);
  std::vector<Observation> obs;
  for (const auto& b : bindings) obs.push_back(observe_inputs(out.terms, b));
  if (r.result_type == Type::Integer && !obs.empty())
  {
    Program unchecked = p.program();
    for (auto& x : unchecked.routines)
      if (x.name == r.name) x.postcondition.clear();
    TypedProgram up = assume_typed(std::move(unchecked));
    Interpreter observer(up);
    bool observed = true, required = true;
    SolverSession session(opt.solver);
    unsigned seed = opt.solver.seeds.empty() ? 0 : opt.solver.seeds[0];
    for (std::size_t i = 0; i < obs.size(); ++i)
    {
      Outcome o = observer.run(r.name, bindings[i], opt.step_budget);
      if (o.normal() && o.result)
        obs[i][kObservedResult] = o.result->integer;
      else
        observed = false;
      if (auto want = required_result(r, bindings[i], session, seed))
        obs[i][kRequiredResult] = *want;
      else
        required = false;
    }
    if (observed) out.terms.push_back({kObservedResult, nullptr, false});
    if (required) out.terms.push_back({kRequiredResult, nullptr, false});
  }
  out.invariants = infer_invariants(obs, out.terms);

  // Diversity over the raw models.
  {
    std::vector<Term> rt = input_terms(r, raw);
    std::vector<Observation> ro;
    for (const auto& b : raw) ro.push_back(observe_inputs(rt, b));
    std::set<std::string> pinned;
    for (const auto& inv : infer_invariants(ro, rt))
    {
      if (inv.pattern == CexInvariant::Pattern::Range) continue;
      pinned.insert(inv.lhs);
    }
    out.diversity = rt.empty() || raw.size() < 2
                        ? 0.0
                        : 1.0 - static_cast<double>(pinned.size()) / static_cast<double>(rt.size());
  }

  std::vector<FixCandidate> candidates;
  try
  {
    candidates = synthesize_fixes(r, {vc, SolverVerdict::Kind::Falsified, ""}, out.invariants,
                                  out.terms, opt.cap);
  }
  catch (const NoCandidates& e)
  {
    out.warnings.push_back(e.what());
  }

  out.attempts.resize(candidates.size());
  parallel_for(candidates.size(), opt.workers, [&](std::size_t i) {
    FixAttempt& a   = out.attempts[i];
    a.candidate     = candidates[i];
    a.edit_distance = a.candidate.original ? edit_distance(a.candidate.original, a.candidate.replacement)
                                           : static_cast<int>(size(a.candidate.replacement));
    a.verdict       = validate_fix(p, a.candidate, opt.solver, ctx);
    if (a.verdict.kind == ValidationVerdict::Kind::Valid)
    {
      Program patched = apply_fix(p.program(), a.candidate);
      a.patch = unified_diff(print_routine(r), print_routine(*patched.find(r.name)), r.name);
    }
  });
  out.ranked = rank_fixes(out.attempts);
  for (auto& a : out.attempts)
    for (const auto& v : out.ranked)
      if (v.candidate.kind == a.candidate.kind && v.candidate.site == a.candidate.site
          && equal(v.candidate.replacement, a.candidate.replacement))
        a.rank = v.rank;

  if (out.ranked.empty())
  {
    std::size_t n = out.counterexamples.size();
    std::ostringstream d;
    d << "no valid fix among " << candidates.size() << " candidate(s). ";
    d << n << " distinct counterexample(s), diversity " << out.diversity << ", " << out.reproduced
      << " of " << n << " reproduce the failure when executed. ";
    if (out.reproduced < static_cast<int>(n))
      d << "The prover's counterexamples include behaviour the code does not exhibit, so the "
           "failure most likely comes from a contract that is too weak (a callee postcondition "
           "or a loop invariant) rather than from the code; no invariant of the counterexamples "
           "isolates a faulty case to repair.";
    else
      d << "The counterexamples are too diverse for the invariant patterns to single out the "
           "faulty case; review the contracts.";
    out.diagnostic = d.str();
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

FixReport
fix_program(const TypedProgram& p, const FixOptions& opt)
{
  FixReport report;
  VerifyOptions vo;
  vo.solver             = opt.solver;
  vo.min_budget         = opt.min_budget;
  vo.workers            = opt.workers;
  vo.step_budget        = opt.step_budget;
  vo.reproduce_attempts = 1;
  FixOptions o = opt;
  std::vector<const VerificationCondition*> failed;
  auto verified = verify_program(p, vo);
  for (const auto& rv : verified)
  {
    if (!rv.error.empty()) report.errors.push_back(rv.routine + ": " + rv.error);
    for (const auto& rec : rv.vcs)
    {
      if (rec.verdict != SolverVerdict::Kind::Valid) o.preexisting.insert(failure_signature(rec.vc));
      if (rec.verdict == SolverVerdict::Kind::Falsified) failed.push_back(&rec.vc);
    }
  }
  for (const auto* vc : failed) report.failures.push_back(fix_failure(p, *vc, o));
  return report;
}

}  // namespace contraverify
