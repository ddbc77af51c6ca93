#include "contraverify/seeding.hpp"

#include <algorithm>

#include "contraverify/logic.hpp"
#include "contraverify/parallel.hpp"

namespace contraverify {

TestOrigin
Obligation::origin() const
{
  TestOrigin o;
  switch (kind)
  {
    case Kind::Branch:
      o.kind   = TestOrigin::Kind::SeededBranch;
      o.branch = branch;
      break;
    case Kind::Mcdc:
      o.kind      = TestOrigin::Kind::Mcdc;
      o.decision  = decision;
      o.condition = condition;
      o.polarity  = polarity;
      break;
    case Kind::LoopIteration:
      o.kind       = TestOrigin::Kind::LoopUnroll;
      o.loop       = loop;
      o.iterations = iterations;
      break;
  }
  return o;
}

std::string
Obligation::describe() const
{
  std::string at = " at " + to_string(location);
  switch (kind)
  {
    case Kind::Branch: return "branch " + std::to_string(branch) + at;
    case Kind::Mcdc:
      return "decision " + std::to_string(decision) + " condition " + std::to_string(condition)
             + (polarity ? " true" : " false") + " (decision " + (outcome ? "true" : "false")
             + ")" + at;
    case Kind::LoopIteration:
      return "loop " + std::to_string(loop) + " exactly " + std::to_string(iterations)
             + " iteration(s)" + at;
  }
  return at;
}

std::string
to_string(ObligationResult::Status s)
{
  switch (s)
  {
    case ObligationResult::Status::Covered: return "covered";
    case ObligationResult::Status::Reused: return "reused";
    case ObligationResult::Status::Infeasible: return "infeasible";
    case ObligationResult::Status::Unknown: return "unknown";
  }
  return "?";
}

std::set<BranchKey>
InfeasibilityReport::infeasible_branches(const InstrumentedProgram& ip) const
{
  std::set<BranchKey> out;
  for (const auto& e : entries)
  {
    if (e.verdict != "infeasible") continue;
    for (const auto& ob : ip.obligations.at(e.routine))
      if (ob.id == e.id && ob.kind == Obligation::Kind::Branch) out.insert({e.routine, ob.branch});
  }
  return out;
}

/* -------------------------------------------------------------------------- */
/* Instrumentation                                                            */
/* -------------------------------------------------------------------------- */

namespace {

ExprPtr
int_term(std::int64_t v)
{
  return ex::with_type(ex::int_lit(v), Type::Integer);
}

ExprPtr
selector()
{
  return ex::var(kSelector, Type::Integer);
}

ExprPtr
bin(BinOp op, ExprPtr a, ExprPtr b)
{
  return ex::binary(op, std::move(a), std::move(b));
}

ExprPtr
negate(ExprPtr a)
{
  return ex::unary(UnOp::Not, std::move(a));
}

StmtPtr
trap(int id, ExprPtr must_hold, SourceSpan at)
{
  CheckStmt c;
  c.assertion = Clause{"__trap_" + std::to_string(id), std::move(must_hold), at};
  c.role      = CheckRole::Trap;
  c.trap_id   = id;
  return make_stmt(std::move(c), at);
}

/// Trap whose counterexamples satisfy `condition` with `__sc = id`.
StmtPtr
guarded_trap(int id, const ExprPtr& condition, SourceSpan at)
{
  return trap(id, negate(bin(BinOp::And, bin(BinOp::Eq, selector(), int_term(id)), condition)), at);
}

StmtPtr
role_check(const Clause& c, CheckRole role, SourceSpan origin)
{
  CheckStmt k;
  k.assertion = c;
  k.role      = role;
  k.origin    = origin;
  return make_stmt(std::move(k), c.span);
}

StmtPtr
ghost(const std::string& target, ExprPtr value, SourceSpan at)
{
  return make_stmt(GhostAssignStmt{target, std::move(value)}, at);
}

struct McdcTrap
{
  int id = 0;
  int condition = 0;
  bool polarity = false;
  bool outcome = false;
};

/// For condition j: truth-table rows where flipping it flips the decision.
/// Returns the (polarity, outcome) pairs to target, or empty if degenerate.
std::vector<std::pair<bool, bool>>
mcdc_targets(const Decision& d, int j)
{
  std::size_t n = d.conditions.size();
  bool pos_t = false, pos_f = false, neg_t = false, neg_f = false;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask)
  {
    std::vector<std::optional<bool>> row;
    for (std::size_t i = 0; i < n; ++i) row.push_back(((mask >> i) & 1) != 0);
    auto with = [&](bool v) {
      auto r                          = row;
      r[static_cast<std::size_t>(j)] = v;
      return evaluate_decision(d.expr, d.conditions, r);
    };
    auto t = with(true), f = with(false);
    if (!t || !f || *t == *f) continue;
    bool cj  = *row[static_cast<std::size_t>(j)];
    bool out = cj ? *t : *f;
    if (cj && out) pos_t = true;
    if (!cj && !out) pos_f = true;
    if (cj && !out) neg_t = true;
    if (!cj && out) neg_f = true;
  }
  if (pos_t && pos_f) return {{true, true}, {false, false}};
  if (neg_t && neg_f) return {{true, false}, {false, true}};
  return {};
}

class Instrumenter
{
 public:
  Instrumenter(const Routine& r, const CoverageGoal& goal, int& next_id)
      : d_routine(r), d_structure(RoutineStructure::of(r)), d_goal(goal), d_next(next_id)
  {
  }

  Routine run(std::vector<Obligation>& obligations,
              std::set<ConditionKey>& degenerate,
              std::vector<std::string>& warnings)
  {
    if (d_goal.branch)
    {
      for (const auto& b : d_structure.branches)
      {
        Obligation ob;
        ob.kind     = Obligation::Kind::Branch;
        ob.id       = b.id;
        ob.routine  = d_routine.name;
        ob.location = b.location;
        ob.branch   = b.id;
        obligations.push_back(ob);
        d_next = std::max(d_next, b.id + 1);
      }
    }
    if (d_goal.mcdc)
    {
      for (const auto& d : d_structure.decisions)
      {
        for (int j = 0; j < static_cast<int>(d.conditions.size()); ++j)
        {
          auto targets = mcdc_targets(d, j);
          if (targets.empty())
          {
            degenerate.insert({d_routine.name, d.id, j});
            warnings.push_back(d_routine.name + ": condition " + std::to_string(j) + " of decision "
                               + std::to_string(d.id) + " at " + to_string(d.location)
                               + " can never affect the decision (degenerate)");
            continue;
          }
          for (auto [pol, out] : targets)
          {
            Obligation ob;
            ob.kind      = Obligation::Kind::Mcdc;
            ob.id        = d_next++;
            ob.routine   = d_routine.name;
            ob.location  = d.location;
            ob.decision  = d.id;
            ob.condition = j;
            ob.polarity  = pol;
            ob.outcome   = out;
            obligations.push_back(ob);
            d_mcdc[d.id].push_back({ob.id, j, pol, out});
          }
        }
      }
    }
    plan_copies(d_routine.body, 1);
    for (std::size_t L = 0; L < d_structure.loops.size() && d_goal.unroll_depth > 0; ++L)
    {
      int copies = d_copies[static_cast<int>(L)];
      int upto   = std::min(d_goal.unroll_depth, copies);
      if (upto < d_goal.unroll_depth)
        warnings.push_back(d_routine.name + ": loop " + std::to_string(L) + " unrolled to depth "
                           + std::to_string(upto) + " only (nested unrolling cap)");
      for (int j = 0; j <= upto; ++j)
      {
        Obligation ob;
        ob.kind       = Obligation::Kind::LoopIteration;
        ob.id         = d_next++;
        ob.routine    = d_routine.name;
        ob.location   = d_structure.loops[L]->span;
        ob.loop       = static_cast<int>(L);
        ob.iterations = j;
        obligations.push_back(ob);
        d_iterations[static_cast<int>(L)].push_back({j, ob.id});
      }
    }

    Routine out = d_routine;
    out.args.push_back({kSelector, Type::Integer});
    out.body = block(d_routine.body);
    for (const auto& g : d_ghosts) out.locals.push_back({g, Type::Integer});
    return out;
  }

 private:
  void plan_copies(const Block& b, int product)
  {
    for (const auto& s : b)
    {
      if (auto* i = s->as<IfStmt>())
      {
        for (const auto& arm : i->arms) plan_copies(arm.body, product);
        if (i->else_block) plan_copies(*i->else_block, product);
      }
      else if (auto* l = s->as<LoopStmt>())
      {
        int c = std::max(d_goal.unroll_depth, 1);
        while (c > 0 && product * (c + 1) > d_goal.product_cap) --c;
        d_copies[d_structure.loop_index.at(s.get())] = c;
        plan_copies(l->init, product);
        plan_copies(l->body, product * (c + 1));
      }
    }
  }

  Block block(const Block& b)
  {
    Block out;
    for (const auto& s : b) statement(s, out);
    return out;
  }

  void mcdc_traps(const Decision& d, const ExprPtr& prefix, Block& out)
  {
    auto it = d_mcdc.find(d.id);
    if (it == d_mcdc.end()) return;
    for (const auto& t : it->second)
    {
      const ExprPtr& c = d.conditions[static_cast<std::size_t>(t.condition)];
      ExprPtr when_t   = replace_condition(d.expr, c, ex::bool_lit(true));
      ExprPtr when_f   = replace_condition(d.expr, c, ex::bool_lit(false));
      ExprPtr indep    = bin(BinOp::Ne, when_t, when_f);
      ExprPtr cond     = t.polarity ? c : negate(c);
      ExprPtr outcome  = t.outcome ? d.expr : negate(d.expr);
      ExprPtr all      = bin(BinOp::And, bin(BinOp::And, cond, indep), outcome);
      if (prefix) all = bin(BinOp::And, prefix, all);
      out.push_back(guarded_trap(t.id, all, d.location));
    }
  }

  const Decision* decision_at(const Stmt* s, int arm) const
  {
    auto it = d_structure.decision_at.find({s, arm});
    if (it == d_structure.decision_at.end()) return nullptr;
    return &d_structure.decisions[static_cast<std::size_t>(it->second)];
  }

  StmtPtr branch_trap(int branch, SourceSpan at) const
  {
    return trap(branch, bin(BinOp::Ne, selector(), int_term(branch)), at);
  }

  void statement(const StmtPtr& s, Block& out)
  {
    if (auto* i = s->as<IfStmt>())
    {
      int first = d_structure.first_branch.at(s.get());
      ExprPtr prefix;
      for (std::size_t k = 0; k < i->arms.size(); ++k)
      {
        if (const Decision* d = decision_at(s.get(), static_cast<int>(k))) mcdc_traps(*d, prefix, out);
        ExprPtr not_g = negate(i->arms[k].guard);
        prefix        = prefix ? bin(BinOp::And, prefix, not_g) : not_g;
      }
      IfStmt n;
      n.synthesized_else = false;
      for (std::size_t k = 0; k < i->arms.size(); ++k)
      {
        GuardedBlock arm;
        arm.guard = i->arms[k].guard;
        if (d_goal.branch)
          arm.body.push_back(branch_trap(first + static_cast<int>(k), i->arms[k].guard->span));
        Block rest = block(i->arms[k].body);
        arm.body.insert(arm.body.end(), rest.begin(), rest.end());
        n.arms.push_back(std::move(arm));
      }
      int else_id = first + static_cast<int>(i->arms.size());
      if (i->else_block)
      {
        Block e;
        if (d_goal.branch) e.push_back(branch_trap(else_id, s->span));
        Block rest = block(*i->else_block);
        e.insert(e.end(), rest.begin(), rest.end());
        n.else_block = std::move(e);
      }
      else if (d_goal.branch)
      {
        n.else_block       = Block{branch_trap(else_id, s->span)};
        n.synthesized_else = true;
      }
      out.push_back(make_stmt(std::move(n), s->span));
      return;
    }
    if (auto* l = s->as<LoopStmt>())
    {
      out.push_back(loop(s, *l));
      return;
    }
    if (auto* c = s->as<CallStmt>())
    {
      // Callees are instrumented too; a selector no trap uses keeps their
      // traps quiet when the caller runs.
      CallStmt n = *c;
      n.args.push_back(int_term(-1));
      out.push_back(make_stmt(std::move(n), s->span));
      return;
    }
    out.push_back(s);
  }

  StmtPtr loop(const StmtPtr& s, const LoopStmt& l)
  {
    int L          = d_structure.loop_index.at(s.get());
    int first      = d_structure.first_branch.at(s.get());
    int copies     = d_copies.at(L);
    std::string it = "__it" + std::to_string(L);
    std::string vs = "__v" + std::to_string(L);
    d_ghosts.push_back(it);
    if (l.variant) d_ghosts.push_back(vs);
    const Decision* exit_decision = decision_at(s.get(), -1);

    LoopStmt n;
    n.init      = block(l.init);
    n.invariant = l.invariant;
    n.exit      = l.exit;
    n.variant   = l.variant;

    Block body;
    if (d_goal.branch) body.push_back(branch_trap(first, s->span));
    Block rest = block(l.body);
    body.insert(body.end(), rest.begin(), rest.end());
    if (exit_decision) mcdc_traps(*exit_decision, nullptr, body);
    n.body = body;

    Block& pre = n.prelude;
    for (const auto& c : l.invariant) pre.push_back(role_check(c, CheckRole::LoopInvariant, c.span));
    if (exit_decision) mcdc_traps(*exit_decision, nullptr, pre);
    if (d_goal.branch) pre.push_back(guarded_trap(first + 1, l.exit, s->span));
    pre.push_back(ghost(it, int_term(0), s->span));
    for (int c = 0; c < copies; ++c)
    {
      GuardedBlock arm;
      arm.guard = negate(l.exit);
      if (l.variant)
      {
        const Clause& v = *l.variant;
        arm.body.push_back(role_check({v.label, bin(BinOp::Ge, v.expr, int_term(0)), v.span},
                                      CheckRole::LoopVariantNonneg, v.span));
        arm.body.push_back(ghost(vs, v.expr, v.span));
      }
      arm.body.insert(arm.body.end(), body.begin(), body.end());
      for (const auto& inv : l.invariant)
        arm.body.push_back(role_check(inv, CheckRole::LoopInvariant, inv.span));
      if (l.variant)
      {
        const Clause& v = *l.variant;
        arm.body.push_back(role_check(
            {v.label, bin(BinOp::Lt, v.expr, ex::var(vs, Type::Integer)), v.span},
            CheckRole::LoopVariantDecrease, v.span));
      }
      arm.body.push_back(
          ghost(it, bin(BinOp::Add, ex::var(it, Type::Integer), int_term(1)), s->span));
      IfStmt copy;
      copy.arms.push_back(std::move(arm));
      pre.push_back(make_stmt(std::move(copy), s->span));
    }
    for (const auto& [j, id] : d_iterations[L])
    {
      ExprPtr cond =
          bin(BinOp::And, bin(BinOp::Eq, ex::var(it, Type::Integer), int_term(j)), l.exit);
      pre.push_back(guarded_trap(id, cond, s->span));
    }
    return make_stmt(std::move(n), s->span);
  }

  const Routine& d_routine;
  RoutineStructure d_structure;
  const CoverageGoal& d_goal;
  int& d_next;
  std::map<int, std::vector<McdcTrap>> d_mcdc;
  std::map<int, int> d_copies;
  std::map<int, std::vector<std::pair<int, int>>> d_iterations;
  std::vector<std::string> d_ghosts;
};

}  // namespace

InstrumentedProgram
instrument(const TypedProgram& p, const CoverageGoal& goal)
{
  Program out;
  out.name = p.program().name;
  std::map<std::string, std::vector<Obligation>> obligations;
  std::set<ConditionKey> degenerate;
  std::vector<std::string> warnings;
  for (const auto& r : p.program().routines)
  {
    int next = 0;
    Instrumenter ins(r, goal, next);
    out.routines.push_back(ins.run(obligations[r.name], degenerate, warnings));
  }
  return InstrumentedProgram{assume_typed(std::move(out)), kSelector, std::move(obligations),
                             std::move(degenerate), std::move(warnings)};
}

InstrumentedProgram
seed_branches(const TypedProgram& p)
{
  return instrument(p, {});
}

InstrumentedProgram
seed_mcdc(const TypedProgram& p)
{
  CoverageGoal g;
  g.branch = false;
  g.mcdc   = true;
  return instrument(p, g);
}

InstrumentedProgram
unroll_loops(const TypedProgram& p, int depth)
{
  CoverageGoal g;
  g.branch       = false;
  g.unroll_depth = depth;
  return instrument(p, g);
}

/* -------------------------------------------------------------------------- */
/* Strip                                                                      */
/* -------------------------------------------------------------------------- */

namespace {

bool
is_ghost(const std::string& name)
{
  return name.rfind("__", 0) == 0;
}

Block
strip_block(const Block& b, const std::set<std::string>& seeded)
{
  Block out;
  for (const auto& s : b)
  {
    if (auto* c = s->as<CheckStmt>(); c && c->role != CheckRole::User) continue;
    if (s->as<GhostAssignStmt>()) continue;
    if (auto* i = s->as<IfStmt>())
    {
      IfStmt n;
      for (const auto& arm : i->arms) n.arms.push_back({arm.guard, strip_block(arm.body, seeded)});
      if (i->else_block && !i->synthesized_else) n.else_block = strip_block(*i->else_block, seeded);
      out.push_back(make_stmt(std::move(n), s->span));
      continue;
    }
    if (auto* l = s->as<LoopStmt>())
    {
      LoopStmt n = *l;
      n.init     = strip_block(l->init, seeded);
      n.prelude.clear();
      n.body = strip_block(l->body, seeded);
      out.push_back(make_stmt(std::move(n), s->span));
      continue;
    }
    if (auto* c = s->as<CallStmt>(); c && seeded.count(c->callee) && !c->args.empty())
    {
      CallStmt n = *c;
      n.args.pop_back();
      out.push_back(make_stmt(std::move(n), s->span));
      continue;
    }
    out.push_back(s);
  }
  return out;
}

}  // namespace

Program
strip(const Program& p)
{
  Program out = p;
  std::set<std::string> seeded;
  for (const auto& r : p.routines)
    if (!r.args.empty() && r.args.back().name == kSelector) seeded.insert(r.name);
  for (auto& r : out.routines)
  {
    std::erase_if(r.args, [](const VarDecl& v) { return v.name == kSelector; });
    std::erase_if(r.locals, [](const VarDecl& v) { return is_ghost(v.name); });
    r.body = strip_block(r.body, seeded);
  }
  return out;
}

/* -------------------------------------------------------------------------- */
/* Suite generation                                                           */
/* -------------------------------------------------------------------------- */

namespace {

struct RoutineSuite
{
  std::vector<TestCase> tests;
  std::vector<ObligationResult> results;
  std::vector<std::string> warnings;
};

class SuiteBuilder
{
 public:
  SuiteBuilder(const TypedProgram& original,
               const InstrumentedProgram& ip,
               const SuiteOptions& opt)
      : d_original(original), d_ip(ip), d_opt(opt), d_inst(ip.program), d_orig(original)
  {
  }

  RoutineSuite run(const std::string& routine)
  {
    RoutineSuite out;
    const Routine& ri = d_ip.program.routine(routine);
    std::vector<VerificationCondition> vcs;
    try
    {
      vcs = generate_vcs(d_ip.program, ri);
    }
    catch (const std::exception& e)
    {
      out.warnings.push_back(routine + ": no suite generated: " + e.what());
      for (const auto& ob : d_ip.obligations.at(routine)) out.results.push_back({ob});
      return out;
    }
    std::map<int, std::vector<const VerificationCondition*>> sites;
    for (const auto& vc : vcs)
      if (vc.trap_id >= 0) sites[vc.trap_id].push_back(&vc);

    SolverSession session(d_opt.solver);
    unsigned seed = d_opt.solver.seeds.empty() ? 0 : d_opt.solver.seeds[0];

    for (const auto& ob : d_ip.obligations.at(routine))
    {
      ObligationResult res;
      res.obligation = ob;
      for (std::size_t t = 0; t < out.tests.size(); ++t)
      {
        if (fires(routine, out.tests[t].binding, ob.id))
        {
          res.status = ObligationResult::Status::Reused;
          res.test   = static_cast<int>(t);
          break;
        }
      }
      if (res.status == ObligationResult::Status::Reused)
      {
        out.results.push_back(res);
        continue;
      }

      bool all_unsat = true;
      std::optional<ArgBinding> found;
      bool minimized = false;
      for (const VerificationCondition* vc : sites[ob.id])
      {
        auto inputs = input_symbols(*vc);
        session.load(encode(*vc), seed);
        for (int attempt = 0; attempt < d_opt.confirm_attempts && !found; ++attempt)
        {
          CheckResult cr = session.check();
          if (cr == CheckResult::Unsat)
          {
            if (attempt > 0) all_unsat = false;
            break;
          }
          all_unsat = false;
          if (cr != CheckResult::Sat)
          {
            if (cr == CheckResult::Timeout) session.load(encode(*vc), seed);
            break;
          }
          ++res.attempts;
          Model m            = session.model(inputs);
          Counterexample cex = extract_counterexample(m, *vc, ri);
          if (!cex.oversized && fires(routine, cex.binding, ob.id))
          {
            found = cex.binding;
            if (d_opt.minimize)
            {
              try
              {
                auto rep = contraverify::minimize(cex, *vc, ri, d_opt.solver, d_opt.min_budget,
                                                  {kSelector});
                if (!rep.minimized.oversized && fires(routine, rep.minimized.binding, ob.id))
                {
                  found     = rep.minimized.binding;
                  minimized = true;
                }
              }
              catch (const std::exception&)
              {
              }
            }
            break;
          }
          session.assert_term(blocking_clause(m, inputs));
        }
        if (found) break;
      }

      if (found)
      {
        found->erase(kSelector);
        TestCase t;
        t.routine   = routine;
        t.binding   = *found;
        t.origin    = ob.origin();
        t.minimized = minimized;
        Outcome o   = d_orig.run(routine, t.binding, d_opt.step_budget);
        if (o.violated())
          t.expected = {true, o.violation.display()};
        else
          t.expected = {false, ""};
        if (o.kind == Outcome::Kind::Divergence)
          out.warnings.push_back(routine + ": test for " + ob.describe() + " diverges");
        auto dup = std::find_if(out.tests.begin(), out.tests.end(),
                                [&](const TestCase& x) { return x.binding == t.binding; });
        res.status = ObligationResult::Status::Covered;
        if (dup != out.tests.end())
        {
          res.status = ObligationResult::Status::Reused;
          res.test   = static_cast<int>(dup - out.tests.begin());
        }
        else
        {
          res.test = static_cast<int>(out.tests.size());
          out.tests.push_back(std::move(t));
        }
      }
      else
      {
        res.status = all_unsat && !sites[ob.id].empty() ? ObligationResult::Status::Infeasible
                                                        : ObligationResult::Status::Unknown;
      }
      out.results.push_back(res);
    }
    return out;
  }

 private:
  bool fires(const std::string& routine, ArgBinding b, int id) const
  {
    b[kSelector] = Value::of_int(id);
    Outcome o    = d_inst.run(routine, b, d_opt.step_budget);
    return o.violated() && o.violation.kind == ViolationKind::Check
           && o.violation.label == "__trap_" + std::to_string(id);
  }

  const TypedProgram& d_original;
  const InstrumentedProgram& d_ip;
  const SuiteOptions& d_opt;
  Interpreter d_inst;
  Interpreter d_orig;
};

}  // namespace

SuiteResult
generate_suite(const TypedProgram& p, const CoverageGoal& goal, const SuiteOptions& opt)
{
  InstrumentedProgram ip = instrument(p, goal);
  SuiteResult out;
  out.degenerate = ip.degenerate;
  out.warnings   = ip.warnings;

  const auto& routines = p.program().routines;
  std::vector<RoutineSuite> parts(routines.size());
  parallel_for(routines.size(), opt.workers, [&](std::size_t i) {
    SuiteBuilder b(p, ip, opt);
    parts[i] = b.run(routines[i].name);
  });

  for (std::size_t i = 0; i < routines.size(); ++i)
  {
    std::map<int, int> index;  // local test index -> suite index
    for (std::size_t t = 0; t < parts[i].tests.size(); ++t)
    {
      if (out.suite.add(parts[i].tests[t]))
      {
        index[static_cast<int>(t)] = static_cast<int>(out.suite.tests.size()) - 1;
      }
      else
      {
        for (std::size_t k = 0; k < out.suite.tests.size(); ++k)
          if (out.suite.tests[k].routine == parts[i].tests[t].routine
              && out.suite.tests[k].binding == parts[i].tests[t].binding)
            index[static_cast<int>(t)] = static_cast<int>(k);
      }
    }
    for (auto res : parts[i].results)
    {
      if (res.test >= 0) res.test = index.at(res.test);
      if (res.status == ObligationResult::Status::Infeasible
          || res.status == ObligationResult::Status::Unknown)
      {
        out.infeasibility.entries.push_back(
            {res.obligation.routine, res.obligation.id,
             res.status == ObligationResult::Status::Infeasible ? "infeasible" : "unknown",
             res.obligation.describe()});
        if (res.status == ObligationResult::Status::Unknown)
          out.warnings.push_back(res.obligation.routine + ": uncovered obligation "
                                 + res.obligation.describe());
      }
      out.obligations.push_back(res);
    }
    out.warnings.insert(out.warnings.end(), parts[i].warnings.begin(), parts[i].warnings.end());
  }
  out.infeasible_branches = out.infeasibility.infeasible_branches(ip);
  out.coverage            = measure_coverage(p, out.suite, opt.step_budget);
  return out;
}

}  // namespace contraverify
