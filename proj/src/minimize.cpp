#include <algorithm>
#include <cstdlib>
#include <functional>
#include <set>

#include "contraverify/proof2test.hpp"

namespace contraverify {

std::string
ShrinkVariable::display() const
{
  switch (kind)
  {
    case Kind::Count: return name + ".count";
    case Kind::Cell: return name + "[" + std::to_string(index) + "]";
    default: return name;
  }
}

std::string
ShrinkVariable::smt() const
{
  switch (kind)
  {
    case Kind::Count: return smt_count_symbol(name);
    case Kind::Cell: return "(" + smt_symbol(name) + " " + std::to_string(index) + ")";
    default: return smt_symbol(name);
  }
}

double
MinimizationReport::average_reduction() const
{
  double sum = 0;
  int n      = 0;
  for (const auto& v : variables)
  {
    if (v.variable.kind == ShrinkVariable::Kind::Boolean || v.before == 0) continue;
    double b = std::abs(static_cast<double>(v.before));
    double a = std::abs(static_cast<double>(v.after));
    sum += (b - a) / b;
    ++n;
  }
  return n == 0 ? 0.0 : sum / n;
}

int
MinimizationReport::max_runs_per_variable() const
{
  int m = 0;
  for (const auto& v : variables) m = std::max(m, v.runs);
  return m;
}

namespace {

using K = ShrinkVariable::Kind;

std::int64_t
magnitude(std::int64_t v)
{
  return v < 0 ? -v : v;
}

void
collect_literals(const ExprPtr& e, std::set<std::int64_t>& out)
{
  if (!e) return;
  if (e->kind == ExprKind::IntLit) out.insert(magnitude(e->value));
  for (const auto& o : e->operands) collect_literals(o, out);
}

void
collect_literals(const Block& b, std::set<std::int64_t>& out)
{
  for (const auto& st : b)
  {
    if (const auto* a = st->as<AssignStmt>()) collect_literals(a->value, out);
    else if (const auto* a = st->as<ArrayAssignStmt>())
    {
      collect_literals(a->index, out);
      collect_literals(a->value, out);
    }
    else if (const auto* i = st->as<IfStmt>())
    {
      for (const auto& arm : i->arms)
      {
        collect_literals(arm.guard, out);
        collect_literals(arm.body, out);
      }
      if (i->else_block) collect_literals(*i->else_block, out);
    }
    else if (const auto* l = st->as<LoopStmt>())
    {
      collect_literals(l->init, out);
      collect_literals(l->exit, out);
      collect_literals(l->body, out);
    }
    else if (const auto* c = st->as<CallStmt>())
      for (const auto& a : c->args) collect_literals(a, out);
    else if (const auto* c = st->as<CreateStmt>())
      collect_literals(c->count, out);
  }
}

/// Magnitudes next to the routine's integer constants. Minimal failing values
/// tend to sit on these boundaries, so they are tried before blind doubling.
std::vector<std::int64_t>
landmarks(const Routine& r)
{
  std::set<std::int64_t> lits;
  for (const auto& c : r.precondition) collect_literals(c.expr, lits);
  for (const auto& c : r.postcondition) collect_literals(c.expr, lits);
  collect_literals(r.body, lits);
  std::set<std::int64_t> out;
  for (std::int64_t c : lits)
    for (std::int64_t d : {c - 1, c, c + 1})
      if (d > 0) out.insert(d);
  return {out.begin(), out.end()};
}

std::int64_t
value_in(const Model& m, const ShrinkVariable& v)
{
  switch (v.kind)
  {
    case K::Scalar: return m.int_value(v.name).value_or(0);
    case K::Boolean: return m.bool_value(v.name).value_or(false) ? 1 : 0;
    case K::Count: return m.int_value(v.name + ".count").value_or(0);
    case K::Cell: return m.apply(v.name, v.index);
  }
  return 0;
}

std::int64_t
value_in(const ArgBinding& b, const ShrinkVariable& v)
{
  const Value& x = b.at(v.name);
  switch (v.kind)
  {
    case K::Scalar: return x.integer;
    case K::Boolean: return x.boolean ? 1 : 0;
    case K::Count: return x.count();
    case K::Cell: return x.cells.at(static_cast<std::size_t>(v.index - 1));
  }
  return 0;
}

std::string
pin_term(const ShrinkVariable& v, std::int64_t value)
{
  if (v.kind == K::Boolean) return "(= " + v.smt() + (value ? " true)" : " false)");
  return "(= " + v.smt() + " " + smt_int(value) + ")";
}

std::string
within(const ShrinkVariable& v, std::int64_t m)
{
  return "(and (<= " + smt_int(-m) + " " + v.smt() + ") (<= " + v.smt() + " " + smt_int(m) + "))";
}

/// Counts, then scalars, each ordered by descending magnitude (stable on
/// argument order). Cells are appended by the caller once counts are known.
std::vector<ShrinkVariable>
head_order(const Routine& r,
           const std::set<std::string>& fixed,
           const std::function<std::int64_t(const ShrinkVariable&)>& value)
{
  std::vector<ShrinkVariable> counts, scalars;
  for (const auto& a : r.args)
  {
    if (fixed.count(a.name)) continue;
    if (a.type == Type::IntArray)
      counts.push_back({K::Count, a.name, 0});
    else
      scalars.push_back({a.type == Type::Boolean ? K::Boolean : K::Scalar, a.name, 0});
  }
  auto by_magnitude = [&](const ShrinkVariable& x, const ShrinkVariable& y) {
    return magnitude(value(x)) > magnitude(value(y));
  };
  std::stable_sort(counts.begin(), counts.end(), by_magnitude);
  std::stable_sort(scalars.begin(), scalars.end(), by_magnitude);
  counts.insert(counts.end(), scalars.begin(), scalars.end());
  return counts;
}

std::vector<ShrinkVariable>
cells_of(const Routine& r,
         const std::set<std::string>& fixed,
         const std::function<std::int64_t(const std::string&)>& count)
{
  std::vector<ShrinkVariable> out;
  for (const auto& a : r.args)
  {
    if (a.type != Type::IntArray || fixed.count(a.name)) continue;
    std::int64_t n = std::min(count(a.name), kMaxShrunkCells);
    for (std::int64_t k = 1; k <= n; ++k) out.push_back({K::Cell, a.name, k});
  }
  return out;
}

/// Pins the inputs named in `fixed` plus everything materialized in `cex`.
std::string
pin_counterexample(const Counterexample& cex, const Routine& r)
{
  std::string eqs;
  for (const auto& a : r.args)
  {
    auto it = cex.binding.find(a.name);
    if (it == cex.binding.end()) continue;
    const Value& v = it->second;
    if (a.type == Type::IntArray)
    {
      auto c         = cex.counts.find(a.name);
      std::int64_t n = c != cex.counts.end() ? c->second : v.count();
      eqs += " (= " + smt_count_symbol(a.name) + " " + smt_int(n) + ")";
      if (v.count() != n) continue;  // oversized: cells not materialized
      for (std::int64_t k = 1; k <= n; ++k)
        eqs += " (= (" + smt_symbol(a.name) + " " + std::to_string(k) + ") "
               + smt_int(v.cells[static_cast<std::size_t>(k - 1)]) + ")";
    }
    else if (a.type == Type::Boolean)
    {
      eqs += std::string(" (= ") + smt_symbol(a.name) + (v.boolean ? " true)" : " false)");
    }
    else
    {
      eqs += " (= " + smt_symbol(a.name) + " " + smt_int(v.integer) + ")";
    }
  }
  return "(and true" + eqs + ")";
}

}  // namespace

std::vector<ShrinkVariable>
shrink_order(const ArgBinding& binding, const Routine& r, const std::set<std::string>& fixed)
{
  auto order = head_order(r, fixed, [&](const ShrinkVariable& v) { return value_in(binding, v); });
  auto cells = cells_of(r, fixed, [&](const std::string& a) { return binding.at(a).count(); });
  order.insert(order.end(), cells.begin(), cells.end());
  return order;
}

MinimizationReport
minimize(const Counterexample& cex,
         const VerificationCondition& vc,
         const Routine& r,
         const SolverConfig& cfg,
         int budget,
         const std::set<std::string>& fixed)
{
  MinimizationReport rep;
  rep.original = cex;

  const std::vector<Symbol> inputs = input_symbols(vc);
  SolverSession s(cfg);
  unsigned seed = cfg.seeds.empty() ? 0 : cfg.seeds[0];
  s.load(encode(vc), seed);

  s.push();
  s.assert_term(pin_counterexample(cex, r));
  ++rep.confirmation_runs;
  if (s.check() != CheckResult::Sat)
    throw NotACounterexample("the binding does not falsify " + vc.key());
  Model current = s.model(inputs);
  s.pop();

  std::vector<std::string> pins;
  for (const auto& a : r.args)
  {
    if (!fixed.count(a.name)) continue;
    const Value& v = cex.binding.at(a.name);
    if (a.type == Type::IntArray)
      pins.push_back(pin_binding({{a.name, v}}, inputs));
    else
      pins.push_back(pin_term({a.type == Type::Boolean ? K::Boolean : K::Scalar, a.name, 0},
                              a.type == Type::Boolean ? v.boolean : v.integer));
    s.assert_term(pins.back());
  }

  const std::vector<std::int64_t> marks = landmarks(r);
  bool stopped = false;
  // Returns true when sat; updates `current`.
  auto probe = [&](const std::string& constraint, VariableShrink& rec) {
    if (rep.reverification_runs >= budget)
    {
      stopped = rep.budget_exhausted = true;
      return false;
    }
    ++rep.reverification_runs;
    ++rec.runs;
    s.push();
    s.assert_term(constraint);
    CheckResult res = s.check();
    bool sat = res == CheckResult::Sat;
    if (sat) current = s.model(inputs);
    if (res == CheckResult::Timeout || res == CheckResult::Unknown)
    {
      stopped = rep.budget_exhausted = true;
      if (res == CheckResult::Timeout)
      {
        // The session was restarted empty; reload and reassert the pins.
        s.load(encode(vc), seed);
        for (const auto& p : pins) s.assert_term(p);
        return false;
      }
    }
    s.pop();
    return sat;
  };

  auto shrink = [&](const ShrinkVariable& var) {
    VariableShrink rec;
    rec.variable = var;
    rec.before   = value_in(current, var);
    if (!stopped && rec.before != 0)
    {
      if (var.kind == K::Boolean)
      {
        probe(pin_term(var, 0), rec);
      }
      else
      {
        std::int64_t lo = -1;  // largest magnitude bound known unsat
        std::int64_t hi = magnitude(rec.before);  // known sat
        bool found = false;
        auto step = [&](std::int64_t m) {
          if (probe(within(var, m), rec))
          {
            hi    = magnitude(value_in(current, var));
            found = true;
          }
          else
            lo = m;
        };
        step(0);
        for (std::int64_t m : marks)
          if (!found && !stopped && m > lo && m < hi) step(m);
        for (std::int64_t d = 1; !found && !stopped && lo + d < hi; d = 2 * d)
          step(lo + d);
        while (!stopped && hi - lo > 1)
        {
          std::int64_t mid = lo + (hi - lo) / 2;
          if (probe(within(var, mid), rec))
            hi = magnitude(value_in(current, var));
          else
            lo = mid;
        }
        if (!stopped && hi > 0 && value_in(current, var) < 0) probe(pin_term(var, hi), rec);
      }
    }
    rec.after = value_in(current, var);
    std::string pin = pin_term(var, rec.after);
    s.assert_term(pin);
    pins.push_back(pin);
    rep.variables.push_back(rec);
  };

  for (const auto& var :
       head_order(r, fixed, [&](const ShrinkVariable& v) { return value_in(current, v); }))
    shrink(var);
  for (const auto& var : cells_of(r, fixed, [&](const std::string& a) {
         return current.int_value(a + ".count").value_or(0);
       }))
    shrink(var);

  ++rep.confirmation_runs;
  if (s.check() != CheckResult::Sat)
    throw NotACounterexample("minimized binding no longer falsifies " + vc.key());
  Model final_model = s.model(inputs);
  rep.minimized      = extract_counterexample(final_model, vc, r);
  rep.minimized.seed = cex.seed;
  return rep;
}

std::vector<std::string>
one_minimality_violations(const ArgBinding& binding,
                          const VerificationCondition& vc,
                          const Routine& r,
                          const SolverConfig& cfg,
                          const std::set<std::string>& fixed)
{
  const std::vector<Symbol> inputs = input_symbols(vc);
  const auto order                 = shrink_order(binding, r, fixed);
  SolverSession s(cfg);
  s.load(encode(vc), cfg.seeds.empty() ? 0 : cfg.seeds[0]);

  std::vector<std::string> out;
  for (std::size_t i = 0; i < order.size(); ++i)
  {
    const ShrinkVariable& var = order[i];
    std::int64_t v            = value_in(binding, var);
    if (v == 0) continue;
    s.push();
    for (const auto& a : r.args)
    {
      const Value& x = binding.at(a.name);
      if (a.type == Type::IntArray)
      {
        if (!(var.kind == K::Count && var.name == a.name))
          s.assert_term("(= " + smt_count_symbol(a.name) + " " + smt_int(x.count()) + ")");
        for (std::int64_t k = 1; k <= x.count(); ++k)
        {
          if (var.kind == K::Cell && var.name == a.name && var.index == k) continue;
          s.assert_term(pin_term({K::Cell, a.name, k}, x.cells[static_cast<std::size_t>(k - 1)]));
        }
      }
      else if (a.name != var.name)
      {
        ShrinkVariable other{a.type == Type::Boolean ? K::Boolean : K::Scalar, a.name, 0};
        s.assert_term(pin_term(other, value_in(binding, other)));
      }
    }
    s.assert_term(var.kind == K::Boolean ? pin_term(var, 0) : within(var, magnitude(v) - 1));
    if (s.check() == CheckResult::Sat) out.push_back(var.display());
    s.pop();
  }
  return out;
}

}  // namespace contraverify
