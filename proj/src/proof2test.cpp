#include "contraverify/proof2test.hpp"

#include <algorithm>
#include <sstream>

#include "contraverify/parallel.hpp"
#include "contraverify/parser.hpp"

namespace contraverify {

/* -------------------------------------------------------------------------- */
/* Tests                                                                      */
/* -------------------------------------------------------------------------- */

TestCase
counterexample_to_test(const Counterexample& cex, bool minimized)
{
  TestCase t;
  t.routine            = cex.violated.routine;
  t.binding            = cex.binding;
  t.expected.violation = true;
  t.expected.label     = cex.violated.display();
  t.origin.kind        = TestOrigin::Kind::ProofFailure;
  t.minimized          = minimized;
  return t;
}

std::string
test_file_name(const TestCase& t, int n)
{
  return "t_" + t.routine + "_" + t.origin.tag() + "_" + std::to_string(n) + ".ec";
}

namespace {

std::string
literal(std::int64_t v)
{
  if (v == INT64_MIN) return "-9223372036854775807 - 1";
  return std::to_string(v);
}

std::string
literal(const Value& v)
{
  if (v.type == Type::Boolean) return v.boolean ? "True" : "False";
  return literal(v.integer);
}

const char*
type_name(Type t)
{
  switch (t)
  {
    case Type::Boolean: return "BOOLEAN";
    case Type::IntArray: return "ARRAY [INTEGER]";
    default: return "INTEGER";
  }
}

std::string
trim(std::string s)
{
  auto b = s.find_first_not_of(" \t\r");
  auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

}  // namespace

std::string
emit_test_source(const TestCase& t, const Routine& target, const std::string& name)
{
  std::ostringstream out;
  if (t.expected.violation)
    out << "-- expect: violation " << t.expected.label << "\n";
  else
    out << "-- expect: pass\n";
  out << "-- target: " << t.routine << "\n";
  out << "-- origin: " << t.origin.tag() << "\n";
  out << name << "\n";

  std::string result;
  if (target.result_type)
  {
    result = "r";
    while (target.find_variable(result)) result += "_";
  }
  if (!target.args.empty() || !result.empty())
  {
    out << "\tlocal\n";
    for (const auto& a : target.args) out << "\t\t" << a.name << ": " << type_name(a.type) << "\n";
    if (!result.empty()) out << "\t\t" << result << ": " << type_name(*target.result_type) << "\n";
  }
  out << "\tdo\n";
  std::string args;
  for (const auto& a : target.args)
  {
    const Value& v = t.binding.at(a.name);
    if (a.type == Type::IntArray)
    {
      out << "\t\tcreate " << a.name << ".make (" << v.count() << ")\n";
      for (std::size_t k = 0; k < v.cells.size(); ++k)
        out << "\t\t" << a.name << " [" << k + 1 << "] := " << literal(v.cells[k]) << "\n";
    }
    else
    {
      out << "\t\t" << a.name << " := " << literal(v) << "\n";
    }
    args += (args.empty() ? "" : ", ") + a.name;
  }
  out << "\t\t" << (result.empty() ? "" : result + " := ") << t.routine << " (" << args << ")\n";
  out << "\tend\n";
  return out.str();
}

TestSource
parse_test_source(std::string_view source)
{
  TestSource ts;
  bool have_expect = false;
  std::istringstream in{std::string(source)};
  std::string line;
  while (std::getline(in, line))
  {
    line = trim(line);
    if (line.rfind("--", 0) != 0) break;
    std::string body = trim(line.substr(2));
    auto colon       = body.find(':');
    if (colon == std::string::npos) continue;
    std::string key   = trim(body.substr(0, colon));
    std::string value = trim(body.substr(colon + 1));
    if (key == "expect")
    {
      have_expect = true;
      if (value == "pass")
      {
        ts.expected = {false, ""};
      }
      else if (value.rfind("violation ", 0) == 0)
      {
        ts.expected = {true, trim(value.substr(10))};
      }
      else
      {
        throw TestFormatError("malformed expectation header: " + line);
      }
    }
    else if (key == "target")
    {
      ts.target = value;
    }
    else if (key == "origin")
    {
      ts.origin = value;
    }
  }
  if (!have_expect) throw TestFormatError("missing '-- expect:' header");
  try
  {
    ts.program = parse_program(source, "TESTS");
  }
  catch (const ParseError& e)
  {
    throw TestFormatError(std::string("test does not parse: ") + e.what());
  }
  if (ts.program.routines.size() != 1) throw TestFormatError("a test file holds exactly one routine");
  ts.routine = ts.program.routines[0].name;
  return ts;
}

TestVerdict
run_test_source(const TypedProgram& target, const TestSource& test, std::int64_t step_budget)
{
  Program merged = target.program();
  for (const auto& r : test.program.routines)
  {
    if (merged.find(r.name)) throw TestFormatError("test routine name clashes: " + r.name);
    merged.routines.push_back(r);
  }
  TypecheckResult tc = typecheck(merged);
  if (!tc.ok())
  {
    std::string msg = "test does not typecheck against its target:";
    for (const auto& e : tc.errors) msg += " " + e.to_string();
    throw TestFormatError(msg);
  }
  return classify(test.expected, run_routine(*tc.program, test.routine, {}, step_budget));
}

/* -------------------------------------------------------------------------- */
/* Diagnosis                                                                  */
/* -------------------------------------------------------------------------- */

namespace {

std::string
kind_words(VcKind k)
{
  switch (k)
  {
    case VcKind::PostconditionClause: return "postcondition";
    case VcKind::PreconditionOfCallee: return "precondition of callee";
    case VcKind::Check: return "check";
    case VcKind::LoopInvariantInit: return "loop invariant (on entry)";
    case VcKind::LoopInvariantMaintain: return "loop invariant (preservation)";
    case VcKind::LoopVariantNonneg: return "loop variant (non-negative)";
    case VcKind::LoopVariantDecrease: return "loop variant (decrease)";
    case VcKind::Bounds: return "bounds";
  }
  return "?";
}

std::vector<std::pair<std::string, std::string>>
input_rows(const Counterexample& cex, const Routine& r)
{
  std::vector<std::pair<std::string, std::string>> rows;
  for (const auto& a : r.args)
  {
    auto it = cex.binding.find(a.name);
    if (it == cex.binding.end()) continue;
    const Value& v = it->second;
    if (a.type == Type::IntArray)
    {
      auto c = cex.counts.find(a.name);
      rows.push_back({a.name + ".count",
                      std::to_string(c != cex.counts.end() ? c->second : v.count())});
      std::size_t shown = std::min<std::size_t>(v.cells.size(), kMaxShrunkCells);
      for (std::size_t k = 0; k < shown; ++k)
        rows.push_back({a.name + "[" + std::to_string(k + 1) + "]", std::to_string(v.cells[k])});
    }
    else
    {
      rows.push_back({a.name, to_string(v)});
    }
  }
  return rows;
}

}  // namespace

Diagnosis
diagnose(const ProofFailure& f,
         const std::optional<Counterexample>& cex,
         const Routine& r,
         const std::string& test_file,
         const std::optional<Outcome>& gap)
{
  Diagnosis d;
  d.vc_key       = f.vc.key();
  d.routine      = f.vc.routine;
  d.kind         = to_string(f.vc.kind);
  d.label        = f.vc.display_label();
  d.location     = f.vc.location;
  d.path_context = f.vc.path_context;
  d.test_file    = test_file;

  std::ostringstream out;
  out << f.vc.routine << ": " << kind_words(f.vc.kind) << " " << d.label;
  if (f.verdict == SolverVerdict::Kind::Falsified && cex)
  {
    d.has_counterexample = true;
    d.inputs             = input_rows(*cex, r);
    out << " violated at " << to_string(f.vc.location) << "\n";
    if (!f.vc.path_context.empty()) out << "  path: " << f.vc.path_context << "\n";
    out << "  input:\n";
    for (const auto& [k, v] : d.inputs) out << "    " << k << " = " << v << "\n";
    if (cex->oversized) out << "  (array too large to materialize; cells omitted)\n";
    if (!test_file.empty()) out << "  test: " << test_file << "\n";
    if (gap)
    {
      d.specification_gap = true;
      d.gap_outcome       = gap->to_string();
      out << "  specification gap: running this input gives " << d.gap_outcome
          << "; the contracts admit a failure that the code does not exhibit, so some"
             " annotation (loop invariant or callee postcondition) is too weak\n";
    }
  }
  else
  {
    out << " may be violated at " << to_string(f.vc.location)
        << "\n  the prover could not decide";
    if (!f.reason.empty()) out << " (" << f.reason << ")";
    out << "; no counterexample is available. Review the annotations.\n";
  }
  d.text = out.str();
  return d;
}

/* -------------------------------------------------------------------------- */
/* Pipeline                                                                   */
/* -------------------------------------------------------------------------- */

bool
RoutineVerification::all_valid() const
{
  if (!error.empty()) return false;
  return std::all_of(vcs.begin(), vcs.end(), [](const VcRecord& v) {
    return v.verdict == SolverVerdict::Kind::Valid;
  });
}

namespace {

void
process_vc(const TypedProgram& p, VcRecord& rec, const VerifyOptions& opt)
{
  const Routine& r   = p.routine(rec.vc.routine);
  SmtScript script   = encode(rec.vc);
  keep_script(opt.solver, rec.vc, script);
  auto inputs        = input_symbols(rec.vc);
  unsigned seed      = opt.solver.seeds.empty() ? 0 : opt.solver.seeds[0];

  SolverSession s(opt.solver);
  s.load(script, seed);
  CheckResult first = s.check();
  if (first == CheckResult::Unsat)
  {
    rec.verdict = SolverVerdict::Kind::Valid;
    return;
  }
  if (first != CheckResult::Sat)
  {
    rec.verdict = SolverVerdict::Kind::Unknown;
    rec.reason  = first == CheckResult::Timeout ? "timeout" : "incomplete";
    rec.diagnosis = diagnose({rec.vc, rec.verdict, rec.reason}, std::nullopt, r);
    return;
  }
  rec.verdict = SolverVerdict::Kind::Falsified;

  struct Attempt
  {
    Counterexample raw;
    std::optional<MinimizationReport> min;
    std::optional<TestCase> test;
    std::optional<Outcome> outcome;
  };
  std::optional<Attempt> kept;
  for (int attempt = 0; attempt < std::max(1, opt.reproduce_attempts); ++attempt)
  {
    if (attempt > 0 && s.check() != CheckResult::Sat) break;
    Model m = s.model(inputs);
    Attempt a;
    a.raw      = extract_counterexample(m, rec.vc, r);
    a.raw.seed = seed;
    Counterexample use = a.raw;
    try
    {
      a.min = minimize(a.raw, rec.vc, r, opt.solver, opt.min_budget);
      use   = a.min->minimized;
    }
    catch (const NotACounterexample&)
    {
      a.min.reset();
    }
    if (!use.oversized)
    {
      a.test = counterexample_to_test(use, a.min.has_value());
      TestVerdict v = run_test(p, *a.test, opt.step_budget);
      a.outcome     = v.outcome;
      bool ok       = v.kind == TestVerdict::Kind::ReproducesExpectedViolation;
      if (!kept || ok) kept = a;
      if (ok) break;
    }
    else if (!kept)
    {
      kept = a;
    }
    s.assert_term(blocking_clause(m, inputs));
  }

  rec.raw          = kept->raw;
  rec.minimization = kept->min;
  rec.test         = kept->test;
  rec.test_outcome = kept->outcome;
  std::optional<Outcome> gap;
  if (rec.test && rec.test_outcome
      && !(rec.test_outcome->violated()
           && rec.test_outcome->violation.display() == rec.test->expected.label))
  {
    rec.specification_gap = true;
    gap                   = rec.test_outcome;
  }
  std::optional<Counterexample> shown =
      rec.minimization ? std::optional<Counterexample>(rec.minimization->minimized) : rec.raw;
  rec.diagnosis = diagnose({rec.vc, rec.verdict, ""}, shown, r, "", gap);
}

}  // namespace

std::vector<RoutineVerification>
verify_program(const TypedProgram& p, const VerifyOptions& opt)
{
  std::vector<RoutineVerification> out;
  std::vector<std::pair<std::size_t, std::size_t>> jobs;
  for (const auto& r : p.program().routines)
  {
    RoutineVerification rv;
    rv.routine = r.name;
    try
    {
      for (auto& vc : generate_vcs(p, r))
      {
        VcRecord rec;
        rec.vc = std::move(vc);
        rv.vcs.push_back(std::move(rec));
      }
    }
    catch (const MissingInvariant& e)
    {
      rv.error = e.what();
    }
    catch (const ScopeError& e)
    {
      rv.error = e.what();
    }
    for (std::size_t k = 0; k < rv.vcs.size(); ++k) jobs.push_back({out.size(), k});
    out.push_back(std::move(rv));
  }
  parallel_for(jobs.size(), opt.workers, [&](std::size_t i) {
    process_vc(p, out[jobs[i].first].vcs[jobs[i].second], opt);
  });
  return out;
}

}  // namespace contraverify
