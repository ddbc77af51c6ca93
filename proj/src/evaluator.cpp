#include "contraverify/evaluator.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace contraverify {

std::string
to_string(ViolationKind kind)
{
  switch (kind)
  {
    case ViolationKind::Precondition: return "precondition";
    case ViolationKind::Postcondition: return "postcondition";
    case ViolationKind::Check: return "check";
    case ViolationKind::LoopInvariant: return "loop_invariant";
    case ViolationKind::LoopVariant: return "loop_variant";
    case ViolationKind::Bounds: return "bounds";
    case ViolationKind::Overflow: return "overflow";
  }
  return "?";
}

std::string
display_label(ViolationKind kind, const std::string& label, SourceSpan location)
{
  if (!label.empty()) return label;
  return to_string(kind) + "@" + to_string(location);
}

std::string
Outcome::to_string() const
{
  switch (kind)
  {
    case Kind::Normal:
      return result ? "normal (" + contraverify::to_string(*result) + ")" : "normal";
    case Kind::ContractViolation:
      return contraverify::to_string(violation.kind) + " " + violation.display()
             + " violated at " + contraverify::to_string(violation.location) + " in "
             + violation.routine;
    case Kind::Divergence: return "divergence (step budget exhausted)";
  }
  return "?";
}

/* -------------------------------------------------------------------------- */
/* Observers                                                                  */
/* -------------------------------------------------------------------------- */

void
TraceRecorder::on_enter(const std::string& routine)
{
  d_lines.push_back("ENTER " + routine);
}

void
TraceRecorder::on_branch(const std::string&, int id)
{
  d_lines.push_back("BRANCH " + std::to_string(id));
}

void
TraceRecorder::on_loop_iteration(const std::string&, int, SourceSpan location, std::int64_t k)
{
  d_lines.push_back("LOOP-ITER " + to_string(location) + " " + std::to_string(k));
}

void
TraceRecorder::on_violation(const Violation& v)
{
  d_lines.push_back("VIOLATION " + to_string(v.kind) + " " + v.display() + " "
                    + to_string(v.location));
}

std::string
TraceRecorder::text() const
{
  std::string s;
  for (const auto& l : d_lines) s += l + "\n";
  return s;
}

void
ObserverList::on_enter(const std::string& r)
{
  for (auto* o : d_observers) o->on_enter(r);
}

void
ObserverList::on_branch(const std::string& r, int id)
{
  for (auto* o : d_observers) o->on_branch(r, id);
}

void
ObserverList::on_decision(const std::string& r,
                          int d,
                          const std::vector<std::optional<bool>>& c,
                          bool outcome)
{
  for (auto* o : d_observers) o->on_decision(r, d, c, outcome);
}

void
ObserverList::on_loop_iteration(const std::string& r, int l, SourceSpan loc, std::int64_t k)
{
  for (auto* o : d_observers) o->on_loop_iteration(r, l, loc, k);
}

void
ObserverList::on_loop_exit(const std::string& r, int l, std::int64_t n)
{
  for (auto* o : d_observers) o->on_loop_exit(r, l, n);
}

void
ObserverList::on_violation(const Violation& v)
{
  for (auto* o : d_observers) o->on_violation(v);
}

/* -------------------------------------------------------------------------- */
/* Interpreter                                                                */
/* -------------------------------------------------------------------------- */

namespace {

struct Halt
{
  Outcome outcome;
};

using Vars = std::map<std::string, Value>;

struct Frame
{
  const Routine* routine = nullptr;
  const RoutineStructure* structure = nullptr;
  Vars vars;
  const Vars* entry = nullptr;
};

ViolationKind
kind_of(CheckRole role)
{
  switch (role)
  {
    case CheckRole::LoopInvariant: return ViolationKind::LoopInvariant;
    case CheckRole::LoopVariantNonneg:
    case CheckRole::LoopVariantDecrease: return ViolationKind::LoopVariant;
    default: return ViolationKind::Check;
  }
}

class Machine
{
 public:
  Machine(const Interpreter& interp, std::int64_t budget, ExecutionObserver* obs)
      : d_interp(interp), d_budget(budget), d_obs(obs)
  {
  }

  Outcome run(const Routine& r, const ArgBinding& args)
  {
    try
    {
      std::vector<Value> values;
      for (const auto& a : r.args)
      {
        auto it = args.find(a.name);
        if (it == args.end())
          throw std::invalid_argument("missing argument '" + a.name + "'");
        values.push_back(it->second);
      }
      Outcome out;
      out.kind   = Outcome::Kind::Normal;
      out.result = invoke(r, std::move(values), nullptr, {});
      if (!r.result_type) out.result.reset();
      return out;
    }
    catch (const Halt& h)
    {
      return h.outcome;
    }
  }

 private:
  void step()
  {
    if (d_quiet) return;
    if (++d_steps > d_budget)
    {
      Outcome o;
      o.kind = Outcome::Kind::Divergence;
      throw Halt{o};
    }
  }

  [[noreturn]] void fail(ViolationKind kind,
                         const std::string& label,
                         SourceSpan where,
                         const std::string& routine)
  {
    Outcome o;
    o.kind      = Outcome::Kind::ContractViolation;
    o.violation = {kind, label, where, routine};
    if (d_obs && !d_quiet) d_obs->on_violation(o.violation);
    throw Halt{o};
  }

  [[noreturn]] void overflow(const ExprPtr& e, Frame& f)
  {
    fail(ViolationKind::Overflow, "", e->span, f.routine->name);
  }

  std::optional<Value> invoke(const Routine& r,
                              std::vector<Value> args,
                              Frame* caller,
                              SourceSpan site)
  {
    Frame f;
    f.routine   = &r;
    f.structure = &d_interp.structure(r.name);
    for (std::size_t i = 0; i < r.args.size(); ++i) f.vars[r.args[i].name] = args[i];
    for (const auto& l : r.locals) f.vars[l.name] = Value::default_of(l.type);
    if (r.result_type) f.vars["Result"] = Value::default_of(*r.result_type);
    if (d_obs) d_obs->on_enter(r.name);

    for (const auto& c : r.precondition)
    {
      bool ok = false;
      try
      {
        ok = eval_bool(c.expr, f);
      }
      catch (const Halt& h)
      {
        if (h.outcome.kind != Outcome::Kind::ContractViolation) throw;
      }
      if (!ok)
      {
        if (caller)
          fail(ViolationKind::Precondition, c.label, site, caller->routine->name);
        fail(ViolationKind::Precondition, c.label, c.span, r.name);
      }
    }

    const Vars entry = f.vars;
    if (d_obs && f.structure->branches.size() == 1
        && f.structure->branches[0].kind == BranchKind::Entry)
      d_obs->on_branch(r.name, 0);

    block(r.body, f);

    f.entry = &entry;
    for (const auto& c : r.postcondition)
    {
      if (!eval_bool(c.expr, f))
        fail(ViolationKind::Postcondition, c.label, c.span, r.name);
    }
    if (!r.result_type) return std::nullopt;
    return f.vars["Result"];
  }

  void block(const Block& b, Frame& f)
  {
    for (const auto& s : b) statement(*s, f);
  }

  void check_clauses(const std::vector<Clause>& cs, Frame& f)
  {
    for (const auto& c : cs)
    {
      if (!eval_bool(c.expr, f))
        fail(ViolationKind::LoopInvariant, c.label, c.span, f.routine->name);
    }
  }

  void statement(const Stmt& s, Frame& f)
  {
    step();
    if (auto* a = s.as<AssignStmt>())
    {
      f.vars[a->target] = eval(a->value, f);
    }
    else if (auto* g = s.as<GhostAssignStmt>())
    {
      f.vars[g->target] = eval(g->value, f);
    }
    else if (auto* w = s.as<ArrayAssignStmt>())
    {
      std::int64_t i = eval(w->index, f).integer;
      std::int64_t v = eval(w->value, f).integer;
      Value& arr     = f.vars[w->array];
      if (i < 1 || i > arr.count())
        fail(ViolationKind::Bounds, "", s.span, f.routine->name);
      arr.cells[static_cast<std::size_t>(i - 1)] = v;
    }
    else if (auto* c = s.as<CreateStmt>())
    {
      std::int64_t n = eval(c->count, f).integer;
      if (n < 0) fail(ViolationKind::Bounds, "", s.span, f.routine->name);
      if (n > 100'000'000) fail(ViolationKind::Overflow, "", s.span, f.routine->name);
      f.vars[c->array] = Value::of_array(std::vector<std::int64_t>(n, 0));
    }
    else if (auto* c = s.as<CheckStmt>())
    {
      if (!eval_bool(c->assertion.expr, f))
      {
        SourceSpan where = c->role == CheckRole::User || c->role == CheckRole::Trap
                               ? c->assertion.span
                               : c->origin;
        fail(kind_of(c->role), c->assertion.label, where, f.routine->name);
      }
    }
    else if (auto* c = s.as<CallStmt>())
    {
      std::vector<Value> args;
      for (const auto& a : c->args) args.push_back(eval(a, f));
      const Routine* callee = d_interp.program().find(c->callee);
      auto result           = invoke(*callee, std::move(args), &f, s.span);
      if (c->target && result) f.vars[*c->target] = *result;
    }
    else if (auto* i = s.as<IfStmt>())
    {
      conditional(s, *i, f);
    }
    else if (auto* l = s.as<LoopStmt>())
    {
      loop(s, *l, f);
    }
  }

  void record_decision(const Stmt& s, int arm, bool outcome, Frame& f)
  {
    auto it = f.structure->decision_at.find({&s, arm});
    if (it == f.structure->decision_at.end()) return;
    const Decision& d = f.structure->decisions[static_cast<std::size_t>(it->second)];
    std::vector<std::optional<bool>> values;
    for (const auto& c : d.conditions) values.push_back(try_eval_bool(c, f));
    d_obs->on_decision(f.routine->name, d.id, values, outcome);
  }

  int first_branch(const Stmt& s, Frame& f)
  {
    auto it = f.structure->first_branch.find(&s);
    return it == f.structure->first_branch.end() ? -1 : it->second;
  }

  void conditional(const Stmt& s, const IfStmt& i, Frame& f)
  {
    int first = d_obs ? first_branch(s, f) : -1;
    for (std::size_t k = 0; k < i.arms.size(); ++k)
    {
      bool g = eval_bool(i.arms[k].guard, f);
      if (first >= 0) record_decision(s, static_cast<int>(k), g, f);
      if (g)
      {
        if (first >= 0) d_obs->on_branch(f.routine->name, first + static_cast<int>(k));
        block(i.arms[k].body, f);
        return;
      }
    }
    if (first >= 0)
      d_obs->on_branch(f.routine->name, first + static_cast<int>(i.arms.size()));
    if (i.else_block) block(*i.else_block, f);
  }

  void loop(const Stmt& s, const LoopStmt& l, Frame& f)
  {
    block(l.init, f);
    block(l.prelude, f);
    check_clauses(l.invariant, f);

    int first      = d_obs ? first_branch(s, f) : -1;
    int loop_index = -1;
    if (first >= 0)
    {
      auto it = f.structure->loop_index.find(&s);
      if (it != f.structure->loop_index.end()) loop_index = it->second;
    }

    std::int64_t n = 0;
    while (true)
    {
      step();
      bool done = eval_bool(l.exit, f);
      if (first >= 0) record_decision(s, -1, done, f);
      if (done) break;
      if (first >= 0)
      {
        d_obs->on_branch(f.routine->name, first);
        d_obs->on_loop_iteration(f.routine->name, loop_index, s.span, n + 1);
      }
      std::int64_t before = 0;
      if (l.variant)
      {
        before = eval(l.variant->expr, f).integer;
        if (before < 0)
          fail(ViolationKind::LoopVariant, l.variant->label, l.variant->span, f.routine->name);
      }
      block(l.body, f);
      check_clauses(l.invariant, f);
      if (l.variant)
      {
        std::int64_t after = eval(l.variant->expr, f).integer;
        if (!(after < before))
          fail(ViolationKind::LoopVariant, l.variant->label, l.variant->span, f.routine->name);
      }
      ++n;
    }
    if (first >= 0)
    {
      if (n == 0) d_obs->on_branch(f.routine->name, first + 1);
      if (loop_index >= 0) d_obs->on_loop_exit(f.routine->name, loop_index, n);
    }
  }

  std::optional<bool> try_eval_bool(const ExprPtr& e, Frame& f)
  {
    bool saved = d_quiet;
    d_quiet    = true;
    std::optional<bool> out;
    try
    {
      out = eval_bool(e, f);
    }
    catch (const Halt&)
    {
      out.reset();
    }
    d_quiet = saved;
    return out;
  }

  bool eval_bool(const ExprPtr& e, Frame& f) { return eval(e, f).boolean; }

  Value eval(const ExprPtr& e, Frame& f)
  {
    switch (e->kind)
    {
      case ExprKind::IntLit: return Value::of_int(e->value);
      case ExprKind::BoolLit: return Value::of_bool(e->value != 0);
      case ExprKind::Var:
      {
        auto it = f.vars.find(e->name);
        if (it == f.vars.end())
          throw std::logic_error("unbound variable '" + e->name + "' at run time");
        return it->second;
      }
      case ExprKind::ArrayRead:
      {
        const Value a  = eval(e->operands[0], f);
        std::int64_t i = eval(e->operands[1], f).integer;
        if (i < 1 || i > a.count())
          fail(ViolationKind::Bounds, "", e->span, f.routine->name);
        return Value::of_int(a.cells[static_cast<std::size_t>(i - 1)]);
      }
      case ExprKind::ArrayCount: return Value::of_int(eval(e->operands[0], f).count());
      case ExprKind::Unary:
      {
        Value v = eval(e->operands[0], f);
        if (e->unop == UnOp::Not) return Value::of_bool(!v.boolean);
        std::int64_t r = 0;
        if (__builtin_sub_overflow(std::int64_t{0}, v.integer, &r)) overflow(e, f);
        return Value::of_int(r);
      }
      case ExprKind::Binary: return binary(e, f);
      case ExprKind::Old:
      {
        if (!f.entry) throw std::logic_error("'old' evaluated outside a postcondition");
        Frame snapshot;
        snapshot.routine   = f.routine;
        snapshot.structure = f.structure;
        snapshot.vars      = *f.entry;
        return eval(e->operands[0], snapshot);
      }
      case ExprKind::Quant:
      {
        std::int64_t lo = eval(e->operands[0], f).integer;
        std::int64_t hi = eval(e->operands[1], f).integer;
        bool forall     = e->quant == QuantKind::ForAll;
        bool acc        = forall;
        for (std::int64_t j = lo; j <= hi; ++j)
        {
          step();
          f.vars[e->name] = Value::of_int(j);
          bool v          = eval_bool(e->operands[2], f);
          acc             = forall ? (acc && v) : (acc || v);
        }
        f.vars.erase(e->name);
        return Value::of_bool(acc);
      }
      default: break;
    }
    throw std::logic_error("expression kind cannot be executed");
  }

  Value binary(const ExprPtr& e, Frame& f)
  {
    BinOp op = e->binop;
    if (op == BinOp::And)
      return Value::of_bool(eval_bool(e->operands[0], f) && eval_bool(e->operands[1], f));
    if (op == BinOp::Or)
      return Value::of_bool(eval_bool(e->operands[0], f) || eval_bool(e->operands[1], f));
    if (op == BinOp::Implies)
      return Value::of_bool(!eval_bool(e->operands[0], f) || eval_bool(e->operands[1], f));

    Value l = eval(e->operands[0], f);
    Value r = eval(e->operands[1], f);
    if ((op == BinOp::Eq || op == BinOp::Ne) && l.type == Type::Boolean)
      return Value::of_bool((l.boolean == r.boolean) == (op == BinOp::Eq));

    std::int64_t x = l.integer, y = r.integer, out = 0;
    switch (op)
    {
      case BinOp::Add:
        if (__builtin_add_overflow(x, y, &out)) overflow(e, f);
        return Value::of_int(out);
      case BinOp::Sub:
        if (__builtin_sub_overflow(x, y, &out)) overflow(e, f);
        return Value::of_int(out);
      case BinOp::Mul:
        if (__builtin_mul_overflow(x, y, &out)) overflow(e, f);
        return Value::of_int(out);
      case BinOp::Div:
      case BinOp::Mod:
      {
        if (y == 0) fail(ViolationKind::Bounds, "", e->span, f.routine->name);
        __int128 a = x, b = y;
        __int128 q = a / b, m = a % b;
        if (m < 0)
        {
          m += b < 0 ? -b : b;
          q += b > 0 ? -1 : 1;
        }
        __int128 res = op == BinOp::Div ? q : m;
        if (res > INT64_MAX || res < INT64_MIN) overflow(e, f);
        return Value::of_int(static_cast<std::int64_t>(res));
      }
      case BinOp::Eq: return Value::of_bool(x == y);
      case BinOp::Ne: return Value::of_bool(x != y);
      case BinOp::Lt: return Value::of_bool(x < y);
      case BinOp::Le: return Value::of_bool(x <= y);
      case BinOp::Gt: return Value::of_bool(x > y);
      case BinOp::Ge: return Value::of_bool(x >= y);
      default: break;
    }
    throw std::logic_error("unexpected operator");
  }

  const Interpreter& d_interp;
  std::int64_t d_budget;
  ExecutionObserver* d_obs;
  std::int64_t d_steps = 0;
  bool d_quiet = false;
};

}  // namespace

Interpreter::Interpreter(const TypedProgram& p) : d_program(p)
{
  for (const auto& r : p.program().routines) d_structures.emplace(r.name, RoutineStructure::of(r));
}

Interpreter::~Interpreter() = default;

const RoutineStructure&
Interpreter::structure(const std::string& routine) const
{
  return d_structures.at(routine);
}

Outcome
Interpreter::run(const std::string& routine,
                 const ArgBinding& args,
                 std::int64_t step_budget,
                 ExecutionObserver* observer) const
{
  Machine m(*this, step_budget, observer);
  return m.run(d_program.routine(routine), args);
}

Outcome
run_routine(const TypedProgram& p,
            const std::string& routine,
            const ArgBinding& args,
            std::int64_t step_budget,
            ExecutionObserver* observer)
{
  return Interpreter(p).run(routine, args, step_budget, observer);
}

/* -------------------------------------------------------------------------- */
/* Tests and coverage                                                         */
/* -------------------------------------------------------------------------- */

std::string
to_string(TestVerdict::Kind kind)
{
  switch (kind)
  {
    case TestVerdict::Kind::ReproducesExpectedViolation: return "reproduces_expected_violation";
    case TestVerdict::Kind::PassesUnexpectedly: return "passes";
    case TestVerdict::Kind::OtherViolation: return "other_violation";
  }
  return "?";
}

bool
TestVerdict::expectation_met(const TestCase& t) const
{
  return t.expected.violation ? kind == Kind::ReproducesExpectedViolation
                              : kind == Kind::PassesUnexpectedly;
}

TestVerdict
classify(const Expectation& e, Outcome o)
{
  TestVerdict v;
  if (o.normal())
    v.kind = TestVerdict::Kind::PassesUnexpectedly;
  else if (o.violated() && e.violation && o.violation.display() == e.label)
    v.kind = TestVerdict::Kind::ReproducesExpectedViolation;
  else
    v.kind = TestVerdict::Kind::OtherViolation;
  v.outcome = std::move(o);
  return v;
}

bool
entry_precondition_failure(const Routine& r, const Outcome& o)
{
  if (!o.violated() || o.violation.kind != ViolationKind::Precondition
      || o.violation.routine != r.name)
    return false;
  return std::any_of(r.precondition.begin(), r.precondition.end(),
                     [&](const Clause& c) { return c.span == o.violation.location; });
}

namespace {

}  // namespace

TestVerdict
run_test(const TypedProgram& p, const TestCase& t, std::int64_t step_budget)
{
  return classify(t.expected, run_routine(p, t.routine, t.binding, step_budget));
}

void
CoverageCollector::on_branch(const std::string& routine, int id)
{
  ++branch_hits[{routine, id}];
}

void
CoverageCollector::on_decision(const std::string& routine,
                               int decision,
                               const std::vector<std::optional<bool>>& conditions,
                               bool outcome)
{
  decisions[{routine, decision}].insert({conditions, outcome});
}

void
CoverageCollector::on_loop_exit(const std::string& routine, int loop, std::int64_t n)
{
  loops[{routine, loop}].insert(n);
}

namespace {

std::optional<bool>
flipped(const Decision& d, int j, const DecisionRecord& r, bool value)
{
  auto values                         = r.conditions;
  values[static_cast<std::size_t>(j)] = value;
  return evaluate_decision(d.expr, d.conditions, values);
}

bool
independent_in(const Decision& d, int j, const DecisionRecord& r)
{
  auto t = flipped(d, j, r, true);
  auto f = flipped(d, j, r, false);
  return t && f && *t != *f;
}

}  // namespace

bool
masking_pair(const Decision& d, int j, const DecisionRecord& a, const DecisionRecord& b)
{
  auto ca = a.conditions[static_cast<std::size_t>(j)];
  auto cb = b.conditions[static_cast<std::size_t>(j)];
  if (!ca || !cb || *ca == *cb) return false;
  if (a.outcome == b.outcome) return false;
  return independent_in(d, j, a) && independent_in(d, j, b);
}

bool
condition_independent_somewhere(const Decision& d, int j)
{
  std::size_t n = d.conditions.size();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask)
  {
    DecisionRecord r;
    for (std::size_t i = 0; i < n; ++i) r.conditions.push_back(((mask >> i) & 1) != 0);
    if (independent_in(d, j, r)) return true;
  }
  return false;
}

double
CoverageReport::branch_coverage_ratio(const std::set<BranchKey>& infeasible) const
{
  std::size_t total = 0, covered = 0;
  for (const auto& [key, hits] : branch_hits)
  {
    if (infeasible.count(key)) continue;
    ++total;
    if (hits > 0) ++covered;
  }
  if (total == 0 || tests_counted == 0) return 0.0;
  return static_cast<double>(covered) / static_cast<double>(total);
}

double
CoverageReport::mcdc_ratio() const
{
  std::size_t total = 0, covered = 0;
  for (const auto& [key, ok] : mcdc_satisfied)
  {
    if (mcdc_degenerate.count(key)) continue;
    ++total;
    if (ok) ++covered;
  }
  if (total == 0) return tests_counted > 0 ? 1.0 : 0.0;
  return static_cast<double>(covered) / static_cast<double>(total);
}

bool
CoverageReport::all_mcdc_satisfied() const
{
  for (const auto& [key, ok] : mcdc_satisfied)
  {
    if (!ok && !mcdc_degenerate.count(key)) return false;
  }
  return true;
}

CoverageReport
measure_coverage(const TypedProgram& p, const TestSuite& suite, std::int64_t step_budget)
{
  Interpreter interp(p);
  CoverageReport report;
  for (const auto& r : p.program().routines)
  {
    for (const auto& b : interp.structure(r.name).branches) report.branch_hits[{r.name, b.id}] = 0;
  }

  for (const auto& t : suite.tests)
  {
    CoverageCollector c;
    Outcome o = interp.run(t.routine, t.binding, step_budget, &c);
    if (entry_precondition_failure(p.routine(t.routine), o))
    {
      ++report.tests_excluded;
      continue;
    }
    ++report.tests_counted;
    for (const auto& [k, n] : c.branch_hits) report.branch_hits[k] += n;
    for (const auto& [k, recs] : c.decisions)
      report.decision_records[k].insert(recs.begin(), recs.end());
    for (const auto& [k, ns] : c.loops) report.loop_profiles[k].insert(ns.begin(), ns.end());
  }

  for (const auto& r : p.program().routines)
  {
    for (const auto& d : interp.structure(r.name).decisions)
    {
      const auto& recs = report.decision_records[{r.name, d.id}];
      for (int j = 0; j < static_cast<int>(d.conditions.size()); ++j)
      {
        ConditionKey key{r.name, d.id, j};
        if (!condition_independent_somewhere(d, j)) report.mcdc_degenerate.insert(key);
        bool found = false;
        for (auto a = recs.begin(); a != recs.end() && !found; ++a)
        {
          for (auto b = std::next(a); b != recs.end() && !found; ++b)
            found = masking_pair(d, j, *a, *b);
        }
        report.mcdc_satisfied[key] = found;
      }
    }
  }
  return report;
}

}  // namespace contraverify
