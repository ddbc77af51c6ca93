#include "contraverify/vcgen.hpp"

#include <map>
#include <set>

#include "contraverify/logic.hpp"
#include "contraverify/printer.hpp"

namespace contraverify {

std::string
to_string(VcKind kind)
{
  switch (kind)
  {
    case VcKind::PostconditionClause: return "postcondition_clause";
    case VcKind::PreconditionOfCallee: return "precondition_of_callee";
    case VcKind::Check: return "check";
    case VcKind::LoopInvariantInit: return "loop_invariant_init";
    case VcKind::LoopInvariantMaintain: return "loop_invariant_maintain";
    case VcKind::LoopVariantNonneg: return "loop_variant_nonneg";
    case VcKind::LoopVariantDecrease: return "loop_variant_decrease";
    case VcKind::Bounds: return "bounds";
  }
  return "?";
}

ViolationKind
violation_kind(VcKind kind)
{
  switch (kind)
  {
    case VcKind::PostconditionClause: return ViolationKind::Postcondition;
    case VcKind::PreconditionOfCallee: return ViolationKind::Precondition;
    case VcKind::Check: return ViolationKind::Check;
    case VcKind::LoopInvariantInit:
    case VcKind::LoopInvariantMaintain: return ViolationKind::LoopInvariant;
    case VcKind::LoopVariantNonneg:
    case VcKind::LoopVariantDecrease: return ViolationKind::LoopVariant;
    case VcKind::Bounds: return ViolationKind::Bounds;
  }
  return ViolationKind::Check;
}

std::string
VerificationCondition::display_label() const
{
  return contraverify::display_label(violation_kind(kind), label, location);
}

std::string
VerificationCondition::key() const
{
  return routine + "." + std::to_string(id);
}

const Symbol*
VerificationCondition::find_symbol(const std::string& name) const
{
  for (const auto& s : symbols)
    if (s.name == name) return &s;
  return nullptr;
}

MissingInvariant::MissingInvariant(std::string routine, SourceSpan where)
    : std::runtime_error("loop at " + to_string(where) + " in '" + routine
                         + "' has no invariant"),
      d_where(where)
{
}

namespace {

ExprPtr
default_term(Type t)
{
  switch (t)
  {
    case Type::Boolean: return lg::truth(false);
    case Type::IntArray: return ex::new_array(ex::with_type(ex::int_lit(0), Type::Integer));
    default: return ex::with_type(ex::int_lit(0), Type::Integer);
  }
}

ExprPtr
int_term(std::int64_t v)
{
  return ex::with_type(ex::int_lit(v), Type::Integer);
}

void
assigned_in(const Block& b, std::set<std::string>& out)
{
  for (const auto& s : b)
  {
    if (auto* a = s->as<AssignStmt>()) out.insert(a->target);
    else if (auto* g = s->as<GhostAssignStmt>()) out.insert(g->target);
    else if (auto* w = s->as<ArrayAssignStmt>()) out.insert(w->array);
    else if (auto* c = s->as<CreateStmt>()) out.insert(c->array);
    else if (auto* c = s->as<CallStmt>())
    {
      if (c->target) out.insert(*c->target);
    }
    else if (auto* i = s->as<IfStmt>())
    {
      for (const auto& arm : i->arms) assigned_in(arm.body, out);
      if (i->else_block) assigned_in(*i->else_block, out);
    }
    else if (auto* l = s->as<LoopStmt>())
    {
      assigned_in(l->init, out);
      assigned_in(l->prelude, out);
      assigned_in(l->body, out);
    }
  }
}

/// One quantifier level of a bounds walk; level 0 is the unquantified part.
struct Level
{
  std::string bound;
  ExprPtr lo, hi;
  ExprPtr guard;
};

struct State
{
  Substitution env;
  ExprPtr pc;
  std::vector<std::string> trail;
};

class Generator
{
 public:
  Generator(const TypedProgram& p, const Routine& r) : d_program(p), d_routine(r) {}

  std::vector<VerificationCondition> run()
  {
    State st;
    st.pc = lg::truth(true);
    for (const auto& a : d_routine.args)
    {
      d_symbols.push_back({a.name, a.type, true});
      st.env[a.name] = ex::var(a.name, a.type);
    }
    for (const auto& l : d_routine.locals) st.env[l.name] = default_term(l.type);
    if (d_routine.result_type) st.env["Result"] = default_term(*d_routine.result_type);
    d_entry = st.env;

    for (const auto& c : d_routine.precondition)
      d_assumptions.push_back(substitute(c.expr, st.env));

    block(d_routine.body, st);

    for (const auto& c : d_routine.postcondition)
    {
      ExprPtr e = resolve_old(c.expr, d_entry);
      bounds(e, st);
      assert_here(VcKind::PostconditionClause, c.label, c.span, translate(e, st), st);
    }
    return std::move(d_vcs);
  }

 private:
  ExprPtr translate(const ExprPtr& e, const State& st) { return substitute(e, st.env); }

  std::string fresh(const std::string& base)
  {
    int n = ++d_counters[base];
    return base + "$" + std::to_string(n);
  }

  Type type_of(const std::string& var) const
  {
    if (var == "Result") return *d_routine.result_type;
    const VarDecl* d = d_routine.find_variable(var);
    return d ? d->type : Type::Integer;
  }

  ExprPtr define(const std::string& var, Type t, const ExprPtr& value)
  {
    if (value->kind == ExprKind::IntLit || value->kind == ExprKind::BoolLit
        || value->kind == ExprKind::Var)
      return value;
    std::string name = fresh(var);
    d_definitions.push_back({name, t, value});
    return ex::var(name, t);
  }

  ExprPtr havoc(const std::string& var, Type t)
  {
    std::string name = fresh(var);
    d_symbols.push_back({name, t, false});
    return ex::var(name, t);
  }

  void assume(const ExprPtr& fact, const State& st)
  {
    d_facts.push_back(lg::implies(st.pc, fact));
  }

  void assert_here(VcKind kind,
                   const std::string& label,
                   SourceSpan where,
                   const ExprPtr& obligation,
                   const State& st,
                   const ExprPtr& guard = nullptr,
                   int trap_id = -1)
  {
    ExprPtr context = guard ? lg::conj(st.pc, guard) : st.pc;
    VerificationCondition vc;
    vc.id       = static_cast<int>(d_vcs.size());
    vc.kind     = kind;
    vc.routine  = d_routine.name;
    vc.label    = label;
    vc.location = where;
    for (std::size_t i = 0; i < st.trail.size(); ++i)
      vc.path_context += (i ? " > " : "") + st.trail[i];
    if (vc.path_context.empty()) vc.path_context = "entry";
    vc.symbols     = d_symbols;
    vc.definitions = d_definitions;
    vc.assumptions = d_assumptions;
    vc.assumptions.insert(vc.assumptions.end(), d_facts.begin(), d_facts.end());
    if (!lg::is_true(context)) vc.assumptions.push_back(context);
    vc.obligation = obligation;
    vc.trap_id    = trap_id;
    d_vcs.push_back(std::move(vc));
    d_facts.push_back(lg::implies(context, obligation));
  }

  /* Bounds obligations of an expression, in runtime evaluation order. */

  void bounds(const ExprPtr& e, const State& st)
  {
    std::vector<Level> levels{{"", nullptr, nullptr, lg::truth(true)}};
    walk(e, st, levels);
  }

  void emit_bounds(const ExprPtr& cond,
                   SourceSpan where,
                   const State& st,
                   const std::vector<Level>& levels)
  {
    ExprPtr ob = cond;
    for (std::size_t l = levels.size(); l-- > 1;)
    {
      ob = lg::implies(levels[l].guard, ob);
      ob = ex::with_type(
          ex::quant(QuantKind::ForAll, levels[l].bound, levels[l].lo, levels[l].hi, ob),
          Type::Boolean);
    }
    assert_here(VcKind::Bounds, "", where, ob, st, levels[0].guard);
  }

  ExprPtr walk_term(const ExprPtr& e, const State& st)
  {
    return translate(e, st);
  }

  void walk(const ExprPtr& e, const State& st, std::vector<Level>& levels)
  {
    switch (e->kind)
    {
      case ExprKind::ArrayRead:
      {
        walk(e->operands[0], st, levels);
        walk(e->operands[1], st, levels);
        ExprPtr a = walk_term(e->operands[0], st);
        ExprPtr i = walk_term(e->operands[1], st);
        ExprPtr in_range =
            lg::conj(lg::le(int_term(1), i), lg::le(i, ex::with_type(ex::count(a), Type::Integer)));
        emit_bounds(in_range, e->span, st, levels);
        return;
      }
      case ExprKind::Binary:
      {
        BinOp op = e->binop;
        walk(e->operands[0], st, levels);
        if (op == BinOp::And || op == BinOp::Implies || op == BinOp::Or)
        {
          ExprPtr l = walk_term(e->operands[0], st);
          ExprPtr g = op == BinOp::Or ? lg::neg(l) : l;
          ExprPtr saved       = levels.back().guard;
          levels.back().guard = lg::conj(saved, g);
          walk(e->operands[1], st, levels);
          levels.back().guard = saved;
          return;
        }
        walk(e->operands[1], st, levels);
        if (op == BinOp::Div || op == BinOp::Mod)
        {
          ExprPtr d = walk_term(e->operands[1], st);
          ExprPtr nonzero =
              ex::with_type(ex::binary(BinOp::Ne, d, int_term(0)), Type::Boolean);
          emit_bounds(nonzero, e->span, st, levels);
        }
        return;
      }
      case ExprKind::Quant:
      {
        walk(e->operands[0], st, levels);
        walk(e->operands[1], st, levels);
        levels.push_back({e->name,
                          walk_term(e->operands[0], st),
                          walk_term(e->operands[1], st),
                          lg::truth(true)});
        walk(e->operands[2], st, levels);
        levels.pop_back();
        return;
      }
      default:
        for (const auto& op : e->operands) walk(op, st, levels);
    }
  }

  /* Statements. */

  void block(const Block& b, State& st)
  {
    for (const auto& s : b) statement(*s, st);
  }

  void statement(const Stmt& s, State& st)
  {
    if (auto* a = s.as<AssignStmt>())
    {
      bounds(a->value, st);
      st.env[a->target] = define(a->target, type_of(a->target), translate(a->value, st));
    }
    else if (auto* g = s.as<GhostAssignStmt>())
    {
      bounds(g->value, st);
      st.env[g->target] = define(g->target, type_of(g->target), translate(g->value, st));
    }
    else if (auto* w = s.as<ArrayAssignStmt>())
    {
      bounds(w->index, st);
      bounds(w->value, st);
      ExprPtr arr = st.env.at(w->array);
      ExprPtr i   = translate(w->index, st);
      ExprPtr v   = translate(w->value, st);
      ExprPtr in_range =
          lg::conj(lg::le(int_term(1), i), lg::le(i, ex::with_type(ex::count(arr), Type::Integer)));
      assert_here(VcKind::Bounds, "", s.span, in_range, st);
      st.env[w->array] =
          define(w->array, Type::IntArray, ex::with_type(ex::store(arr, i, v), Type::IntArray));
    }
    else if (auto* c = s.as<CreateStmt>())
    {
      bounds(c->count, st);
      ExprPtr n = translate(c->count, st);
      assert_here(VcKind::Bounds, "", s.span, lg::le(int_term(0), n), st);
      st.env[c->array] = define(c->array, Type::IntArray, ex::new_array(n));
    }
    else if (auto* c = s.as<CheckStmt>())
    {
      bounds(c->assertion.expr, st);
      VcKind kind      = VcKind::Check;
      SourceSpan where = c->assertion.span;
      switch (c->role)
      {
        case CheckRole::LoopInvariant:
          kind  = VcKind::LoopInvariantMaintain;
          where = c->origin;
          break;
        case CheckRole::LoopVariantNonneg:
          kind  = VcKind::LoopVariantNonneg;
          where = c->origin;
          break;
        case CheckRole::LoopVariantDecrease:
          kind  = VcKind::LoopVariantDecrease;
          where = c->origin;
          break;
        default: break;
      }
      assert_here(kind, c->assertion.label, where, translate(c->assertion.expr, st), st,
                  nullptr, c->role == CheckRole::Trap ? c->trap_id : -1);
    }
    else if (auto* c = s.as<CallStmt>())
    {
      call(s, *c, st);
    }
    else if (auto* i = s.as<IfStmt>())
    {
      conditional(s, *i, st);
    }
    else if (auto* l = s.as<LoopStmt>())
    {
      loop(s, *l, st);
    }
  }

  void call(const Stmt& s, const CallStmt& c, State& st)
  {
    const Routine& callee = d_program.routine(c.callee);
    Substitution params;
    for (std::size_t k = 0; k < c.args.size(); ++k)
    {
      bounds(c.args[k], st);
      params[callee.args[k].name] = translate(c.args[k], st);
    }
    for (const auto& pre : callee.precondition)
      assert_here(VcKind::PreconditionOfCallee, pre.label, s.span, substitute(pre.expr, params), st);

    Substitution entry = params;
    for (const auto& l : callee.locals) entry[l.name] = default_term(l.type);
    ExprPtr result;
    if (callee.result_type)
    {
      entry["Result"] = default_term(*callee.result_type);
      result          = havoc(c.target ? *c.target : c.callee + ".Result", *callee.result_type);
    }
    Substitution post = params;
    if (result) post["Result"] = result;
    for (const auto& q : callee.postcondition)
      assume(substitute(resolve_old(q.expr, entry), post), st);
    if (c.target && result) st.env[*c.target] = result;
  }

  void conditional(const Stmt& s, const IfStmt& i, State& st)
  {
    ExprPtr not_before = lg::truth(true);
    std::vector<ExprPtr> guards;
    std::vector<State> outs;
    for (std::size_t k = 0; k < i.arms.size(); ++k)
    {
      State probe = st;
      probe.pc    = lg::conj(st.pc, not_before);
      bounds(i.arms[k].guard, probe);
      ExprPtr g = translate(i.arms[k].guard, st);
      guards.push_back(g);

      State arm = st;
      arm.pc    = lg::conj(probe.pc, g);
      arm.trail.push_back((k == 0 ? "then@" : "elseif@") + to_string(i.arms[k].guard->span));
      block(i.arms[k].body, arm);
      outs.push_back(std::move(arm));
      not_before = lg::conj(not_before, lg::neg(g));
    }
    State other = st;
    other.pc    = lg::conj(st.pc, not_before);
    other.trail.push_back("else@" + to_string(s.span));
    if (i.else_block) block(*i.else_block, other);
    outs.push_back(std::move(other));

    std::set<std::string> vars;
    for (const auto& o : outs)
      for (const auto& [name, t] : o.env) vars.insert(name);
    for (const auto& name : vars)
    {
      bool same = true;
      for (const auto& o : outs)
        same &= o.env.count(name) && o.env.at(name) == outs[0].env.at(name);
      if (same)
      {
        st.env[name] = outs[0].env.at(name);
        continue;
      }
      ExprPtr merged = outs.back().env.at(name);
      for (std::size_t k = guards.size(); k-- > 0;)
        merged = lg::ite(guards[k], outs[k].env.at(name), merged);
      st.env[name] = define(name, type_of(name), merged);
    }
  }

  void loop(const Stmt& s, const LoopStmt& l, State& st)
  {
    block(l.init, st);
    block(l.prelude, st);
    if (l.invariant.empty()) throw MissingInvariant(d_routine.name, s.span);

    for (const auto& c : l.invariant)
    {
      bounds(c.expr, st);
      assert_here(VcKind::LoopInvariantInit, c.label, c.span, translate(c.expr, st), st);
    }

    std::set<std::string> frame;
    assigned_in(l.body, frame);
    for (const auto& v : frame) st.env[v] = havoc(v, type_of(v));
    for (const auto& c : l.invariant) assume(translate(c.expr, st), st);

    bounds(l.exit, st);
    ExprPtr exit = translate(l.exit, st);

    State body = st;
    body.pc    = lg::conj(st.pc, lg::neg(exit));
    body.trail.push_back("loop-body@" + to_string(s.span));
    ExprPtr before;
    if (l.variant)
    {
      bounds(l.variant->expr, body);
      ExprPtr v = translate(l.variant->expr, body);
      assert_here(VcKind::LoopVariantNonneg, l.variant->label, l.variant->span,
                  lg::le(int_term(0), v), body);
      before = define("variant", Type::Integer, v);
    }
    block(l.body, body);
    for (const auto& c : l.invariant)
    {
      bounds(c.expr, body);
      assert_here(VcKind::LoopInvariantMaintain, c.label, c.span, translate(c.expr, body), body);
    }
    if (l.variant)
    {
      bounds(l.variant->expr, body);
      assert_here(VcKind::LoopVariantDecrease, l.variant->label, l.variant->span,
                  lg::lt(translate(l.variant->expr, body), before), body);
    }
    // The body path ends here (assume false); execution continues on exit.
    d_facts.push_back(lg::neg(body.pc));

    st.pc = lg::conj(st.pc, exit);
    st.trail.push_back("loop-exit@" + to_string(s.span));
  }

  const TypedProgram& d_program;
  const Routine& d_routine;
  Substitution d_entry;
  std::vector<Symbol> d_symbols;
  std::vector<Definition> d_definitions;
  std::vector<ExprPtr> d_assumptions;
  std::vector<ExprPtr> d_facts;
  std::vector<VerificationCondition> d_vcs;
  std::map<std::string, int> d_counters;
};

}  // namespace

std::vector<VerificationCondition>
generate_vcs(const TypedProgram& p, const Routine& r)
{
  return Generator(p, r).run();
}

std::vector<VerificationCondition>
generate_vcs(const TypedProgram& p)
{
  std::vector<VerificationCondition> out;
  for (const auto& r : p.program().routines)
  {
    auto vcs = generate_vcs(p, r);
    out.insert(out.end(), vcs.begin(), vcs.end());
  }
  return out;
}

/* -------------------------------------------------------------------------- */
/* Textbook wp                                                                */
/* -------------------------------------------------------------------------- */

ExprPtr
wp(const TypedProgram& p, const Block& b, const ExprPtr& q)
{
  ExprPtr out = q;
  for (auto it = b.rbegin(); it != b.rend(); ++it) out = wp(p, **it, out);
  return out;
}

ExprPtr
wp(const TypedProgram& p, const Stmt& s, const ExprPtr& q)
{
  auto boolean = [](BinOp op, ExprPtr a, ExprPtr b) {
    return ex::with_type(ex::binary(op, std::move(a), std::move(b)), Type::Boolean);
  };
  if (auto* a = s.as<AssignStmt>()) return substitute(q, {{a->target, a->value}});
  if (auto* g = s.as<GhostAssignStmt>()) return substitute(q, {{g->target, g->value}});
  if (auto* w = s.as<ArrayAssignStmt>())
  {
    ExprPtr arr = ex::var(w->array, Type::IntArray);
    return substitute(q, {{w->array, ex::with_type(ex::store(arr, w->index, w->value), Type::IntArray)}});
  }
  if (auto* c = s.as<CreateStmt>()) return substitute(q, {{c->array, ex::new_array(c->count)}});
  if (auto* c = s.as<CheckStmt>()) return lg::conj(c->assertion.expr, q);
  if (auto* i = s.as<IfStmt>())
  {
    ExprPtr rest = i->else_block ? wp(p, *i->else_block, q) : q;
    for (std::size_t k = i->arms.size(); k-- > 0;)
    {
      ExprPtr g = i->arms[k].guard;
      rest      = boolean(BinOp::And,
                     boolean(BinOp::Implies, g, wp(p, i->arms[k].body, q)),
                     boolean(BinOp::Implies, lg::neg(g), rest));
    }
    return rest;
  }
  if (auto* l = s.as<LoopStmt>())
  {
    std::vector<ExprPtr> inv;
    for (const auto& c : l->invariant) inv.push_back(c.expr);
    Block head = l->init;
    head.insert(head.end(), l->prelude.begin(), l->prelude.end());
    return wp(p, head, lg::conj(inv));
  }
  if (auto* c = s.as<CallStmt>())
  {
    const Routine& callee = p.routine(c->callee);
    Substitution params;
    for (std::size_t k = 0; k < c->args.size(); ++k) params[callee.args[k].name] = c->args[k];
    std::vector<ExprPtr> pre, post;
    for (const auto& x : callee.precondition) pre.push_back(substitute(x.expr, params));
    Substitution entry = params;
    for (const auto& l : callee.locals) entry[l.name] = default_term(l.type);
    ExprPtr q2 = q;
    if (callee.result_type)
    {
      entry["Result"]  = default_term(*callee.result_type);
      ExprPtr r        = ex::var(c->callee + "$result", *callee.result_type);
      params["Result"] = r;
      if (c->target) q2 = substitute(q, {{*c->target, r}});
    }
    for (const auto& x : callee.postcondition)
      post.push_back(substitute(resolve_old(x.expr, entry), params));
    return lg::conj(lg::conj(pre), lg::implies(lg::conj(post), q2));
  }
  return q;
}

VerificationCondition
assume_context(const VerificationCondition& vc, const ExprPtr& extra)
{
  std::set<std::string> known;
  for (const auto& s : vc.symbols) known.insert(s.name);
  for (const auto& d : vc.definitions) known.insert(d.name);
  for (const auto& v : free_variables(extra))
  {
    if (!known.count(v)) throw ScopeError("unknown symbol '" + v + "' in context");
  }
  VerificationCondition out = vc;
  out.assumptions.push_back(extra);
  return out;
}

bool
has_havoc(const VerificationCondition& vc)
{
  for (const auto& s : vc.symbols)
    if (!s.input) return true;
  return false;
}

bool
falsified_by(const VerificationCondition& vc, const ArgBinding& binding)
{
  LogicEnv env;
  for (const auto& s : vc.symbols)
  {
    if (!s.input) throw std::invalid_argument("VC has havoc symbols; evaluate with a solver");
    auto it = binding.find(s.name);
    if (it == binding.end()) throw std::invalid_argument("binding lacks '" + s.name + "'");
    env[s.name] = it->second;
  }
  for (const auto& d : vc.definitions) env[d.name] = eval_logic(d.value, env);
  for (const auto& a : vc.assumptions)
  {
    if (!eval_logic_bool(a, env)) return false;
  }
  return !eval_logic_bool(vc.obligation, env);
}

std::string
print_vc(const VerificationCondition& vc)
{
  std::string s = "vc " + vc.key() + " [" + to_string(vc.kind) + "] " + vc.display_label()
                  + " at " + to_string(vc.location) + "\n";
  s += "  path: " + vc.path_context + "\n";
  for (const auto& d : vc.definitions)
    s += "  let " + d.name + " = " + print_expr(d.value) + "\n";
  for (const auto& a : vc.assumptions) s += "  assume " + print_expr(a) + "\n";
  s += "  prove " + print_expr(vc.obligation) + "\n";
  return s;
}

}  // namespace contraverify
