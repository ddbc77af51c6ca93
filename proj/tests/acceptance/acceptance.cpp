// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "../support.hpp"
#include "contraverify/driver.hpp"
#include "contraverify/printer.hpp"
#include "contraverify/proof2fix.hpp"
#include "contraverify/proof2test.hpp"
#include "contraverify/seeding.hpp"
#include "contraverify/structure.hpp"

using namespace contraverify;
using namespace testsupport;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Tolerances and thresholds.
constexpr double kMaxSeconds = 5.0;
constexpr double kMinAverageReduction = 0.70;
constexpr double kMaxMedianRuns = 8.0;
constexpr double kMcdcSizeFactor = 10.0;
constexpr double kUnrollTimeFactor = 8.0;
constexpr double kMinFixRate = 0.60;
constexpr double kMaxFixSeconds = 120.0;
constexpr std::int64_t kRangeLo = -3;
constexpr std::int64_t kRangeHi = 3;
constexpr std::int64_t kMaxCount = 3;

struct Verdict
{
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what)
  {
    if (!ok)
    {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

using Clock = std::chrono::steady_clock;

double
seconds_since(Clock::time_point t0)
{
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string
fmt(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

RunConfig
quiet_config(const std::string& out = "")
{
  RunConfig cfg = default_config();
  cfg.out_dir   = out;
  return cfg;
}

/* --- enumeration helpers ------------------------------------------------- */

std::vector<ArgBinding>
all_bindings(const Routine& r, std::int64_t lo, std::int64_t hi, std::int64_t max_count)
{
  std::vector<ArgBinding> out{ArgBinding{}};
  for (const auto& a : r.args)
  {
    std::vector<Value> values;
    if (a.type == Type::Boolean)
      values = {Value::of_bool(false), Value::of_bool(true)};
    else if (a.type == Type::IntArray)
    {
      std::vector<std::vector<std::int64_t>> arrays{{}};
      std::vector<std::vector<std::int64_t>> layer{{}};
      for (std::int64_t c = 1; c <= max_count; ++c)
      {
        std::vector<std::vector<std::int64_t>> next;
        for (const auto& base : layer)
          for (std::int64_t v = lo; v <= hi; ++v)
          {
            auto grown = base;
            grown.push_back(v);
            next.push_back(grown);
          }
        arrays.insert(arrays.end(), next.begin(), next.end());
        layer = std::move(next);
      }
      for (auto& cells : arrays) values.push_back(Value::of_array(cells));
    }
    else
      for (std::int64_t v = lo; v <= hi; ++v) values.push_back(Value::of_int(v));

    std::vector<ArgBinding> next;
    for (const auto& b : out)
      for (const auto& v : values)
      {
        ArgBinding e = b;
        e[a.name]    = v;
        next.push_back(std::move(e));
      }
    out = std::move(next);
  }
  return out;
}

bool
block_has(const Block& b, const std::function<bool(const Stmt&)>& pred)
{
  for (const auto& s : b)
  {
    if (pred(*s)) return true;
    if (auto* i = s->as<IfStmt>())
    {
      for (const auto& arm : i->arms)
        if (block_has(arm.body, pred)) return true;
      if (i->else_block && block_has(*i->else_block, pred)) return true;
    }
    if (auto* l = s->as<LoopStmt>())
      if (block_has(l->init, pred) || block_has(l->body, pred)) return true;
  }
  return false;
}

bool
has_loop(const Routine& r)
{
  return block_has(r.body, [](const Stmt& s) { return s.as<LoopStmt>() != nullptr; });
}

bool
has_call(const Routine& r)
{
  return block_has(r.body, [](const Stmt& s) { return s.as<CallStmt>() != nullptr; });
}

bool
scalar_only(const Routine& r)
{
  return std::none_of(r.args.begin(), r.args.end(), [](const VarDecl& v) { return v.type == Type::IntArray; });
}

/// Outcome fingerprint used to decide whether a mutant is killed.
std::string
observed(const TypedProgram& p, const TestCase& t)
{
  return run_routine(p, t.routine, t.binding).to_string();
}

bool
killed(const TypedProgram& original, const TypedProgram& mutant, const TestSuite& suite)
{
  for (const auto& t : suite.tests)
    if (observed(original, t) != observed(mutant, t)) return true;
  return false;
}

SuiteOptions
suite_options()
{
  SuiteOptions so;
  so.solver = solver();
  return so;
}

/* --- 1. MAX end to end --------------------------------------------------- */

Verdict
criterion_max(const fs::path& dir)
{
  Verdict v;
  auto t0      = Clock::now();
  RunReport r  = cmd_verify({corpus("max.ec")}, quiet_config(dir.string()));
  double secs  = seconds_since(t0);
  v.require(r.exit_code == kExitFailures, "exit code " + std::to_string(r.exit_code));

  std::vector<json> failed;
  for (const auto& rt : r.doc["files"][0]["routines"])
    for (const auto& vc : rt["vcs"])
      if (vc["verdict"] != "valid") failed.push_back(vc);
  v.require(failed.size() == 1, std::to_string(failed.size()) + " failed VCs");
  if (failed.size() != 1) return v;
  const json& f = failed.front();
  v.require(f["label"] == "is_max", "failed clause " + f["label"].get<std::string>());
  v.require(f["verdict"] == "falsified", "verdict " + f["verdict"].get<std::string>());

  auto cells = f["minimized"]["binding"]["a"].get<std::vector<std::int64_t>>();
  v.require(cells.size() == 2, "minimized count " + std::to_string(cells.size()));
  for (auto c : cells) v.require(c >= -2 && c <= 2, "cell out of [-2,2]");
  if (cells.size() == 2) v.require(cells[1] > cells[0], "maximum not at index 2");

  TypedProgram p = load("max.ec");
  TestSource ts  = parse_test_source(slurp((dir / f["test"].get<std::string>()).string()));
  TestVerdict tv = run_test_source(p, ts);
  v.require(tv.kind == TestVerdict::Kind::ReproducesExpectedViolation && tv.outcome.violation.label == "is_max",
            "emitted test outcome: " + tv.outcome.to_string());
  v.require(secs < kMaxSeconds, "took " + fmt(secs) + " s");
  v.detail = v.pass ? "a = [" + std::to_string(cells[0]) + ", " + std::to_string(cells[1]) + "], " + fmt(secs) + " s"
                    : v.detail;
  return v;
}

/* --- 2. regression inversion --------------------------------------------- */

Verdict
criterion_regression(const fs::path& dir)
{
  Verdict v;
  TypedProgram p = load("max.ec");
  FixOptions fo;
  fo.solver     = solver();
  FixReport rep = fix_program(p, fo);
  const FixAttempt* chosen = nullptr;
  for (const auto& ff : rep.failures)
    for (const auto& a : ff.ranked)
      if (a.candidate.kind == FixCandidate::Kind::ConditionReplace && print_expr(a.candidate.replacement) == "i > a.count")
        chosen = &a;
  v.require(chosen != nullptr, "fix `i > a.count` not proposed");
  if (!chosen) return v;

  fs::path patched = dir / "max_patched.ec";
  {
    std::ofstream out(patched);
    out << print_program(apply_fix(p.program(), chosen->candidate));
  }
  RunReport ver = cmd_verify({patched.string()}, quiet_config());
  v.require(ver.exit_code == kExitOk, "patched program: verify exit " + std::to_string(ver.exit_code));

  std::string manifest = (dir / "manifest.json").string();
  RunReport green      = cmd_runtests({patched.string()}, manifest, quiet_config());
  v.require(green.exit_code == kExitOk, "run-tests on patched exit " + std::to_string(green.exit_code));
  int tests = static_cast<int>(green.doc["tests"].size());
  v.require(tests >= 1 && green.doc["counts"]["green"] == tests, "not all tests green");
  RunReport red = cmd_runtests({corpus("max.ec")}, manifest, quiet_config());
  v.require(red.exit_code == kExitFailures, "run-tests on buggy max should be red");
  if (v.pass) v.detail = std::to_string(tests) + " test(s) green after fix, red before";
  return v;
}

/* --- 3. SC branch coverage ----------------------------------------------- */

Verdict
criterion_branch_coverage()
{
  Verdict v;
  auto files = corpus_files("sc");
  v.require(files.size() >= 10, "corpus has " + std::to_string(files.size()) + " programs");
  CoverageGoal goal;
  int infeasible_total = 0;
  bool clash_reported  = false;
  double total_secs    = 0;
  for (const auto& f : files)
  {
    TypedProgram p = load(f);
    auto t0        = Clock::now();
    SuiteResult s  = generate_suite(p, goal, suite_options());
    total_secs += seconds_since(t0);

    // Independent recount of branch hits.
    std::set<BranchKey> hit;
    for (const auto& t : s.suite.tests)
    {
      CoverageCollector c;
      Outcome o = run_routine(p, t.routine, t.binding, kDefaultStepBudget, &c);
      if (entry_precondition_failure(p.routine(t.routine), o)) continue;
      for (const auto& [k, n] : c.branch_hits)
        if (n > 0) hit.insert(k);
    }
    for (const auto& r : p.program().routines)
      for (const auto& b : enumerate_branches(r))
      {
        BranchKey k{r.name, b.id};
        if (s.infeasible_branches.count(k)) continue;
        v.require(hit.count(k) > 0, f + ": " + r.name + " branch " + std::to_string(b.id) + " not covered");
      }
    v.require(s.coverage.branch_coverage_ratio(s.infeasible_branches) == 1.0, f + ": reported ratio < 1");

    // Every branch called infeasible is never reached by exhaustive execution.
    for (const auto& k : s.infeasible_branches)
    {
      ++infeasible_total;
      const Routine& r = p.routine(k.first);
      v.require(scalar_only(r), f + ": infeasible branch in array routine not enumerated");
      for (const auto& b : all_bindings(r, kRangeLo, kRangeHi, 0))
      {
        CoverageCollector c;
        run_routine(p, r.name, b, kDefaultStepBudget, &c);
        v.require(c.branch_hits.count(k) == 0 || c.branch_hits.at(k) == 0,
                  f + ": branch reported infeasible is reachable");
      }
      if (f == "sc/infeasible.ec" && k.first == "clash") clash_reported = true;
    }
  }
  v.require(clash_reported, "infeasible fixture branch not reported");
  if (v.pass)
    v.detail = std::to_string(files.size()) + " programs, ratio 1.0, " + std::to_string(infeasible_total)
               + " infeasible branch(es) confirmed over [-3,3], " + fmt(total_secs) + " s";
  return v;
}

/* --- 4. counterexample -> test soundness --------------------------------- */

Verdict
criterion_soundness()
{
  Verdict v;
  std::vector<std::string> files = corpus_files("faults");
  for (const auto& f : corpus_files("sc")) files.push_back(f);
  for (const char* f : {"max.ec", "gap.ec", "weak.ec", "large.ec"}) files.push_back(f);
  VerifyOptions vo;
  vo.solver = solver();
  int strict = 0, reproduced = 0, loopy = 0, gaps = 0;
  for (const auto& f : files)
  {
    TypedProgram p = load(f);
    for (const auto& rv : verify_program(p, vo))
    {
      const Routine& r = p.routine(rv.routine);
      bool straight    = !has_loop(r) && !has_call(r);
      for (const auto& rec : rv.vcs)
      {
        if (!rec.test) continue;
        TestVerdict tv = run_test(p, *rec.test);
        bool same      = tv.kind == TestVerdict::Kind::ReproducesExpectedViolation
                    && tv.outcome.violation.display() == rec.vc.display_label();
        if (straight)
        {
          ++strict;
          reproduced += same;
          v.require(same, f + ": " + rec.vc.key() + " test gives " + tv.outcome.to_string());
        }
        else
        {
          ++loopy;
          if (same) continue;
          ++gaps;
          bool flagged = rec.specification_gap && rec.diagnosis
                         && rec.diagnosis->text.find("specification gap") != std::string::npos;
          v.require(flagged, f + ": " + rec.vc.key() + " mismatch without diagnostic");
        }
      }
    }
  }
  v.require(strict > 0 && gaps > 0, "corpus does not exercise both paths");
  if (v.pass)
    v.detail = std::to_string(reproduced) + "/" + std::to_string(strict) + " loop-free tests reproduce; "
               + std::to_string(gaps) + " of " + std::to_string(loopy) + " loop/call tests flagged as specification gaps";
  return v;
}

/* --- 5. minimization quality --------------------------------------------- */

struct Seeded
{
  const char* routine;
  const char* hint;
};

const Seeded kLargeModels[] = {
    {"bump", "x >= 5000 and y >= 3000"},
    {"bump", "x <= -4000 and y >= 9000"},
    {"ratio", "x >= 7000 and d >= 300"},
    {"ratio", "x <= -8000 and d <= -200"},
    {"pair_sum", "a.count >= 40 and a [1] >= 900"},
    {"pair_sum", "a.count >= 25 and a [1] <= -700"},
    {"mix", "x >= 2000 and y >= 1500 and z >= 400"},
    {"mix", "x <= -3000 and z >= 9000"},
    {"window", "a.count >= 30 and i >= 20"},
    {"window", "a.count >= 50 and i >= 45 and a [1] >= 300"},
    {"pick", "not flag and x <= -5000"},
    {"pick", "flag and x >= 6000"},
    {"diff", "x >= 4000"},
    {"diff", "y <= -6000"},
    {"sum3", "a.count >= 20 and a [1] >= 800 and a [2] >= 500"},
    {"sum3", "a.count >= 12 and a [3] <= -400"},
    {"mid", "lo >= 500 and hi >= 2000"},
    {"mid", "lo <= -900 and hi >= 5000"},
    {"spread", "x <= -3000 and y >= 3000"},
    {"spread", "x >= 1000"},
};

/// Mean relative magnitude reduction over non-zero integer inputs (scalars,
/// counts, and cells present in both bindings).
double
reduction(const ArgBinding& before, const ArgBinding& after)
{
  double sum = 0;
  int n      = 0;
  auto add   = [&](std::int64_t b, std::int64_t a) {
    if (b == 0) return;
    sum += (std::fabs(static_cast<double>(b)) - std::fabs(static_cast<double>(a))) / std::fabs(static_cast<double>(b));
    ++n;
  };
  for (const auto& [name, b] : before)
  {
    const Value& a = after.at(name);
    if (b.type == Type::Integer) add(b.integer, a.integer);
    if (b.type == Type::IntArray)
    {
      add(b.count(), a.count());
      for (std::size_t i = 0; i < std::min(b.cells.size(), a.cells.size()); ++i) add(b.cells[i], a.cells[i]);
    }
  }
  return n ? sum / n : 0.0;
}

/// One solver call per variable: no smaller magnitude keeps the VC
/// falsifiable with the other inputs pinned.
bool
one_minimal(const ArgBinding& b, const VerificationCondition& vc, const Routine& r, int& calls)
{
  SmtScript script = encode(vc);
  auto inputs      = input_symbols(vc);
  for (const auto& var : shrink_order(b, r))
  {
    std::int64_t value = 0;
    const Value& arg   = b.at(var.name);
    switch (var.kind)
    {
      case ShrinkVariable::Kind::Scalar: value = arg.integer; break;
      case ShrinkVariable::Kind::Boolean: value = arg.boolean ? 1 : 0; break;
      case ShrinkVariable::Kind::Count: value = arg.count(); break;
      case ShrinkVariable::Kind::Cell: value = arg.cells.at(static_cast<std::size_t>(var.index - 1)); break;
    }
    if (value == 0) continue;
    ArgBinding others = b;
    others.erase(var.name);
    SolverSession s(solver());
    s.load(script, 0);
    s.assert_term(pin_binding(others, inputs));
    auto smaller = [&](const std::string& t, std::int64_t v) {
      s.assert_term("(< (abs " + t + ") " + smt_int(std::llabs(v)) + ")");
    };
    if (var.kind == ShrinkVariable::Kind::Boolean)
      s.assert_term("(not " + var.smt() + ")");
    else if (var.kind == ShrinkVariable::Kind::Scalar)
      smaller(var.smt(), value);
    else
    {
      // The rest of the array stays pinned.
      ShrinkVariable count{ShrinkVariable::Kind::Count, var.name, 0};
      if (var.kind == ShrinkVariable::Kind::Count)
        smaller(count.smt(), value);
      else
        s.assert_term("(= " + count.smt() + " " + smt_int(arg.count()) + ")");
      for (std::int64_t i = 1; i <= std::min<std::int64_t>(arg.count(), kMaxShrunkCells); ++i)
      {
        ShrinkVariable cell{ShrinkVariable::Kind::Cell, var.name, i};
        if (var.kind == ShrinkVariable::Kind::Cell && i == var.index)
          smaller(cell.smt(), value);
        else
          s.assert_term("(= " + cell.smt() + " " + smt_int(arg.cells[static_cast<std::size_t>(i - 1)]) + ")");
      }
    }
    ++calls;
    if (s.check() != CheckResult::Unsat) return false;
  }
  return true;
}

Verdict
criterion_minimization()
{
  Verdict v;
  TypedProgram p = load("large.ec");
  std::vector<double> reductions;
  std::vector<int> runs;
  int extra_calls = 0, minimal = 0;
  for (const auto& s : kLargeModels)
  {
    const Routine& r = p.routine(s.routine);
    std::vector<VerificationCondition> vcs = generate_vcs(p, r);
    const VerificationCondition* failing   = nullptr;
    for (const auto& vc : vcs)
      if (vc.kind == VcKind::PostconditionClause) failing = &vc;
    VerificationCondition hinted = assume_context(*failing, parse_expression(s.hint));
    SolverVerdict sv            = solve(hinted, solver());
    if (sv.kind != SolverVerdict::Kind::Falsified || !sv.model)
    {
      v.require(false, std::string(s.routine) + ": hinted VC not falsified");
      continue;
    }
    Counterexample cex   = extract_counterexample(*sv.model, *failing, r);
    MinimizationReport m = minimize(cex, *failing, r, solver());
    v.require(falsified_by(*failing, m.minimized.binding), std::string(s.routine) + ": minimized input does not fail");
    reductions.push_back(reduction(cex.binding, m.minimized.binding));
    runs.push_back(m.reverification_runs);
    bool ok = one_minimal(m.minimized.binding, *failing, r, extra_calls);
    minimal += ok;
    v.require(ok, std::string(s.routine) + " [" + s.hint + "]: not 1-minimal");
  }
  double avg = 0;
  for (double d : reductions) avg += d;
  avg /= std::max<std::size_t>(reductions.size(), 1);
  std::sort(runs.begin(), runs.end());
  double median = runs.empty() ? 0
                  : runs.size() % 2 ? runs[runs.size() / 2]
                                    : (runs[runs.size() / 2 - 1] + runs[runs.size() / 2]) / 2.0;
  v.require(reductions.size() == 20, "only " + std::to_string(reductions.size()) + " failures minimized");
  v.require(avg >= kMinAverageReduction, "average reduction " + fmt(avg));
  v.require(median <= kMaxMedianRuns, "median reverification runs " + fmt(median));
  if (v.pass)
    v.detail = "20 failures, average reduction " + fmt(avg * 100) + "%, " + std::to_string(minimal)
               + "/20 1-minimal (" + std::to_string(extra_calls) + " checks), median runs " + fmt(median);
  return v;
}

/* --- 6. MC/DC ------------------------------------------------------------ */

/// Masking MC/DC witness for condition j, decided from the two recorded
/// evaluations by truth-table flipping.
bool
witnesses(const Decision& d, int j, const DecisionRecord& a, const DecisionRecord& b)
{
  auto cj = [&](const DecisionRecord& r) { return r.conditions[static_cast<std::size_t>(j)]; };
  if (!cj(a) || !cj(b) || *cj(a) == *cj(b) || a.outcome == b.outcome) return false;
  for (const auto* r : {&a, &b})
  {
    auto flipped                          = r->conditions;
    flipped[static_cast<std::size_t>(j)] = !*cj(*r);
    auto out                              = evaluate_decision(d.expr, d.conditions, flipped);
    if (!out || *out == r->outcome) return false;
  }
  return true;
}

/// Some total assignment of the conditions lets condition j decide.
bool
non_degenerate(const Decision& d, int j)
{
  std::size_t n = d.conditions.size();
  for (std::size_t mask = 0; mask < (1u << n); ++mask)
  {
    std::vector<std::optional<bool>> vals(n);
    for (std::size_t i = 0; i < n; ++i) vals[i] = (mask >> i) & 1u;
    auto a                            = evaluate_decision(d.expr, d.conditions, vals);
    vals[static_cast<std::size_t>(j)] = !*vals[static_cast<std::size_t>(j)];
    auto b                            = evaluate_decision(d.expr, d.conditions, vals);
    if (a && b && *a != *b) return true;
  }
  return false;
}

Verdict
criterion_mcdc()
{
  Verdict v;
  CoverageGoal branch_goal;
  CoverageGoal mcdc_goal;
  mcdc_goal.mcdc = true;
  int conditions = 0;
  double worst   = 0;
  std::map<std::string, TestSuite> branch_suites, mcdc_suites;
  for (const auto& f : corpus_files("mcdc"))
  {
    if (f.find("mutant") != std::string::npos) continue;
    TypedProgram p  = load(f);
    SuiteResult bs  = generate_suite(p, branch_goal, suite_options());
    SuiteResult ms  = generate_suite(p, mcdc_goal, suite_options());
    branch_suites[f] = bs.suite;
    mcdc_suites[f]   = ms.suite;

    std::map<DecisionKey, std::set<DecisionRecord>> records;
    for (const auto& t : ms.suite.tests)
    {
      CoverageCollector c;
      Outcome o = run_routine(p, t.routine, t.binding, kDefaultStepBudget, &c);
      if (entry_precondition_failure(p.routine(t.routine), o)) continue;
      for (const auto& [k, rs] : c.decisions) records[k].insert(rs.begin(), rs.end());
    }
    for (const auto& r : p.program().routines)
      for (const auto& d : enumerate_decisions(r))
        for (int j = 0; j < static_cast<int>(d.conditions.size()); ++j)
        {
          if (!non_degenerate(d, j)) continue;
          ++conditions;
          bool found    = false;
          const auto& rs = records[{r.name, d.id}];
          for (const auto& a : rs)
            for (const auto& b : rs) found = found || witnesses(d, j, a, b);
          v.require(found, f + ": " + r.name + " decision " + std::to_string(d.id) + " condition "
                               + std::to_string(j) + " lacks a masking pair");
          if (d.conditions.size() == 3)
          {
            std::size_t n = std::count_if(ms.suite.tests.begin(), ms.suite.tests.end(),
                                          [&](const TestCase& t) { return t.routine == r.name; });
            v.require(n >= 4, f + ": 3-condition decision has " + std::to_string(n) + " tests");
          }
        }
    double factor = static_cast<double>(ms.suite.tests.size()) / std::max<std::size_t>(bs.suite.tests.size(), 1);
    worst         = std::max(worst, factor);
    v.require(factor <= kMcdcSizeFactor, f + ": suite grows by " + fmt(factor));
  }

  TypedProgram original = load("mcdc/both.ec");
  TypedProgram mutant   = load("mcdc/both_mutant.ec");
  bool by_mcdc          = killed(original, mutant, mcdc_suites["mcdc/both.ec"]);
  bool by_branch        = killed(original, mutant, branch_suites["mcdc/both.ec"]);
  v.require(by_mcdc, "masking mutant survives the MC/DC suite");
  v.require(!by_branch, "masking mutant already killed by branch coverage");
  if (v.pass)
    v.detail = std::to_string(conditions) + " conditions witnessed, max size factor " + fmt(worst)
               + ", mutant killed by MC/DC only";
  return v;
}

/* --- 7. loop unrolling --------------------------------------------------- */

std::set<std::int64_t>
feasible_iterations(const TypedProgram& p, const Routine& r, std::int64_t k)
{
  std::set<std::int64_t> out;
  for (const auto& b : all_bindings(r, -3, k + 3, 0))
  {
    CoverageCollector c;
    Outcome o = run_routine(p, r.name, b, kDefaultStepBudget, &c);
    if (entry_precondition_failure(r, o)) continue;
    for (const auto& [key, its] : c.loops)
      for (auto j : its)
        if (j <= k) out.insert(j);
  }
  return out;
}

/// Arrays are enumerated with zero cells only (iteration counts of the plain
/// fixtures depend on the count alone).
std::set<std::int64_t>
feasible_iterations_arrays(const TypedProgram& p, const Routine& r, std::int64_t k)
{
  std::set<std::int64_t> out;
  for (std::int64_t c = 0; c <= k + 1; ++c)
  {
    ArgBinding b;
    for (const auto& a : r.args)
      b[a.name] = a.type == Type::IntArray ? Value::of_array(std::vector<std::int64_t>(static_cast<std::size_t>(c), 0))
                                            : Value::of_int(0);
    CoverageCollector col;
    Outcome o = run_routine(p, r.name, b, kDefaultStepBudget, &col);
    if (entry_precondition_failure(r, o)) continue;
    for (const auto& [key, its] : col.loops)
      for (auto j : its)
        if (j <= k) out.insert(j);
  }
  return out;
}

double
fastest_generation(const TypedProgram& p, const CoverageGoal& g)
{
  double best = 1e9;
  for (int rep = 0; rep < 3; ++rep)
  {
    auto t0 = Clock::now();
    generate_suite(p, g, suite_options());
    best = std::min(best, seconds_since(t0));
  }
  return best;
}

Verdict
criterion_unroll()
{
  Verdict v;
  const std::vector<std::string> fixtures = {"loops/countdown.ec", "loops/double.ec", "loops/power.ec", "loops/total.ec"};
  for (const auto& f : fixtures)
  {
    TypedProgram p = load(f);
    for (int k = 0; k <= 5; ++k)
    {
      CoverageGoal g;
      g.unroll_depth = k;
      SuiteResult s  = generate_suite(p, g, suite_options());
      for (const auto& r : p.program().routines)
      {
        auto feasible = scalar_only(r) ? feasible_iterations(p, r, k) : feasible_iterations_arrays(p, r, k);
        std::set<std::int64_t> seen;
        for (const auto& t : s.suite.tests)
        {
          if (t.routine != r.name) continue;
          CoverageCollector c;
          run_routine(p, r.name, t.binding, kDefaultStepBudget, &c);
          for (const auto& [key, its] : c.loops) seen.insert(its.begin(), its.end());
        }
        for (auto j : feasible)
          v.require(seen.count(j) > 0, f + " k=" + std::to_string(k) + ": no test with " + std::to_string(j) + " iterations");
      }
    }
  }

  TypedProgram original = load("loops/double.ec");
  TypedProgram mutant   = load("loops/double_mutant.ec");
  std::string kills;
  for (int k = 0; k <= 5; ++k)
  {
    CoverageGoal g;
    g.unroll_depth = k;
    bool dead      = killed(original, mutant, generate_suite(original, g, suite_options()).suite);
    v.require(dead == (k >= 3), "iteration-3 mutant " + std::string(dead ? "killed" : "missed") + " at k="
                                    + std::to_string(k));
    kills += dead ? "K" : ".";
  }

  double t1 = 0, t5 = 0;
  for (const auto& f : fixtures)
  {
    TypedProgram p = load(f);
    CoverageGoal g1, g5;
    g1.unroll_depth = 1;
    g5.unroll_depth = 5;
    t1 += fastest_generation(p, g1);
    t5 += fastest_generation(p, g5);
  }
  v.require(t5 <= kUnrollTimeFactor * t1, "time(k=5)/time(k=1) = " + fmt(t5 / t1));
  if (v.pass)
    v.detail = "iteration counts 0..k covered for k=0..5; mutant by k: " + kills + "; time ratio " + fmt(t5 / t1);
  return v;
}

/* --- 8. Proof2Fix -------------------------------------------------------- */

Verdict
criterion_fix()
{
  Verdict v;
  auto files = corpus_files("faults");
  int conditions = 0, assignments = 0, fixed = 0, checked = 0;
  double slowest  = 0;
  bool max_listed = false;
  FixOptions fo;
  fo.solver = solver();
  VerifyOptions vo;
  vo.solver = solver();
  for (const auto& f : files)
  {
    std::string base = fs::path(f).filename().string();
    (base[0] == 'c' ? conditions : assignments) += 1;
    TypedProgram p = load(f);
    FixReport rep  = fix_program(p, fo);
    bool any_valid = false;
    for (const auto& ff : rep.failures)
    {
      slowest = std::max(slowest, ff.seconds);
      for (const auto& a : ff.ranked)
      {
        any_valid = true;
        if (base == "c06_max.ec" && print_expr(a.candidate.replacement) == "i > a.count") max_listed = true;
        // Independent re-check: full re-verification and the failing tests.
        auto tc = typecheck(apply_fix(p.program(), a.candidate));
        v.require(tc.ok(), base + ": valid fix does not typecheck");
        if (!tc.ok()) continue;
        ++checked;
        for (const auto& rv : verify_program(*tc.program, vo))
        {
          if (rv.routine != ff.routine && a.candidate.implementation()) continue;
          v.require(rv.all_valid(), base + ": fix `" + a.candidate.describe() + "` leaves " + rv.routine + " unproved");
        }
        for (const auto& c : ff.counterexamples)
        {
          TestCase t = counterexample_to_test(c, true);
          Outcome o  = run_routine(*tc.program, t.routine, t.binding);
          v.require(o.normal() || entry_precondition_failure(tc.program->routine(t.routine), o),
                    base + ": fix `" + a.candidate.describe() + "` fails regression test: " + o.to_string());
        }
      }
    }
    fixed += any_valid;
  }
  v.require(conditions == 10 && assignments == 10, "fault corpus is not 10 + 10");
  double rate = static_cast<double>(fixed) / std::max<std::size_t>(files.size(), 1);
  v.require(rate >= kMinFixRate, "valid-fix rate " + fmt(rate));
  v.require(max_listed, "max: `i > a.count` missing from the ranked list");
  v.require(slowest < kMaxFixSeconds, "slowest session " + fmt(slowest) + " s");

  TypedProgram weak = load("weak.ec");
  FixReport wr      = fix_program(weak, fo);
  bool diagnosed    = !wr.failures.empty();
  for (const auto& ff : wr.failures)
  {
    v.require(ff.ranked.empty(), "contract-weakness fixture got a Valid fix");
    diagnosed = diagnosed && ff.diagnostic && ff.diagnostic->find("diversity") != std::string::npos;
  }
  v.require(diagnosed, "contract-weakness fixture lacks the diversity diagnostic");
  if (v.pass)
    v.detail = std::to_string(fixed) + "/20 faults fixed (" + fmt(rate * 100) + "%), " + std::to_string(checked)
               + " valid fixes re-checked, slowest session " + fmt(slowest) + " s";
  return v;
}

/* --- 9. logic/execution agreement ---------------------------------------- */

Verdict
criterion_agreement()
{
  Verdict v;
  std::vector<std::string> files = corpus_files("sc");
  for (const auto& d : {"mcdc", "faults"})
    for (const auto& f : corpus_files(d)) files.push_back(f);
  for (const char* f : {"max.ec", "gap.ec", "weak.ec", "large.ec"}) files.push_back(f);
  long bindings = 0;
  int routines  = 0;
  for (const auto& f : files)
  {
    TypedProgram p = load(f);
    for (const auto& r : p.program().routines)
    {
      if (has_loop(r) || has_call(r)) continue;
      auto vcs = generate_vcs(p, r);
      if (std::any_of(vcs.begin(), vcs.end(), [](const VerificationCondition& vc) { return has_havoc(vc); })) continue;
      ++routines;
      for (const auto& b : all_bindings(r, kRangeLo, kRangeHi, kMaxCount))
      {
        ++bindings;
        Outcome o           = run_routine(p, r.name, b);
        bool rejected       = entry_precondition_failure(r, o);
        for (const auto& vc : vcs)
        {
          bool logic = falsified_by(vc, b);
          bool exec  = !rejected && o.violated() && o.violation.kind == violation_kind(vc.kind)
                      && o.violation.location == vc.location;
          if (logic != exec)
          {
            std::ostringstream msg;
            msg << f << ": " << vc.key() << " on " << to_string(b, r) << ": logic " << logic << ", run "
                << o.to_string();
            v.require(false, msg.str());
          }
        }
        if (o.violated() && !rejected)
        {
          bool matched = std::any_of(vcs.begin(), vcs.end(), [&](const VerificationCondition& vc) {
            return vc.location == o.violation.location && violation_kind(vc.kind) == o.violation.kind;
          });
          v.require(matched, f + ": runtime violation without a VC: " + o.to_string());
        }
      }
    }
  }
  if (v.detail.size() > 600) v.detail = v.detail.substr(0, 600) + "...";
  if (v.pass)
    v.detail = std::to_string(routines) + " routines, " + std::to_string(bindings) + " bindings, zero mismatches";
  return v;
}

/* --- 10. determinism ----------------------------------------------------- */

Verdict
criterion_determinism()
{
  Verdict v;
  std::vector<std::string> files = {corpus("max.ec"), corpus("sc/triangle.ec"), corpus("mcdc/logic.ec"),
                                    corpus("faults/c04_sign.ec"), corpus("loops/total.ec")};
  auto run = [&](const std::string& tag) {
    fs::path dir = scratch("det-" + tag);
    std::vector<std::string> docs;
    RunConfig cfg = quiet_config();
    cfg.workers   = 2;
    cfg.coverage  = "mcdc";
    cfg.unroll    = 2;
    for (const auto& cmd : {"verify", "testgen", "fix"})
    {
      cfg.out_dir = (dir / cmd).string();
      RunReport r = std::string(cmd) == "verify"    ? cmd_verify(files, cfg)
                    : std::string(cmd) == "testgen" ? cmd_testgen(files, cfg)
                                                    : cmd_fix(files, cfg);
      docs.push_back(r.comparable().dump(2));
      docs.push_back(RunReport::parse(slurp((dir / cmd / "report.json").string())).comparable().dump(2));
      if (std::string(cmd) != "fix") docs.push_back(slurp((dir / cmd / "manifest.json").string()));
    }
    return docs;
  };
  auto a = run("a");
  auto b = run("b");
  v.require(a.size() == b.size(), "different document counts");
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i)
    v.require(a[i] == b[i], "document " + std::to_string(i) + " differs between runs");
  if (v.pass) v.detail = std::to_string(a.size()) + " reports and manifests byte-identical across two runs";
  return v;
}

}  // namespace

int
main()
{
  fs::path dir = scratch("acceptance-max");
  struct Criterion
  {
    const char* name;
    std::function<Verdict()> run;
  };
  const Criterion criteria[] = {
      {"1 MAX end-to-end", [&] { return criterion_max(dir); }},
      {"2 regression inversion", [&] { return criterion_regression(dir); }},
      {"3 SC branch coverage", criterion_branch_coverage},
      {"4 counterexample-to-test soundness", criterion_soundness},
      {"5 minimization quality", criterion_minimization},
      {"6 MC/DC validity", criterion_mcdc},
      {"7 loop unrolling", criterion_unroll},
      {"8 Proof2Fix", criterion_fix},
      {"9 logic/execution agreement", criterion_agreement},
      {"10 determinism", criterion_determinism},
  };
  int failed = 0;
  for (const auto& c : criteria)
  {
    Verdict v;
    auto t0 = Clock::now();
    try
    {
      v = c.run();
    }
    catch (const std::exception& e)
    {
      v.pass   = false;
      v.detail = std::string("exception: ") + e.what();
    }
    failed += !v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << "  " << c.name << "  (" << fmt(seconds_since(t0)) << " s)  "
              << v.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
