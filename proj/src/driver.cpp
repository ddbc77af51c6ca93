#include "contraverify/driver.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "contraverify/parser.hpp"
#include "contraverify/proof2fix.hpp"
#include "contraverify/proof2test.hpp"

namespace contraverify {

using json = nlohmann::json;
namespace fs = std::filesystem;

/* -------------------------------------------------------------------------- */
/* Configuration                                                              */
/* -------------------------------------------------------------------------- */

RunConfig
default_config()
{
  RunConfig cfg;
  cfg.solver.executable = default_solver_path();
  return cfg;
}

namespace {

std::string
trim(std::string_view s)
{
  auto b = s.find_first_not_of(" \t\r");
  auto e = s.find_last_not_of(" \t\r");
  return b == std::string_view::npos ? "" : std::string(s.substr(b, e - b + 1));
}

long long
to_integer(const std::string& key, const std::string& v)
{
  try
  {
    std::size_t used = 0;
    long long n      = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return n;
  }
  catch (const std::exception&)
  {
    throw ConfigError("'" + key + "' expects an integer, got '" + v + "'");
  }
}

bool
to_bool(const std::string& key, const std::string& v)
{
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("'" + key + "' expects true or false, got '" + v + "'");
}

std::vector<std::string>
split(const std::string& v, char sep)
{
  std::vector<std::string> out;
  std::stringstream in(v);
  std::string part;
  while (std::getline(in, part, sep))
    if (!trim(part).empty()) out.push_back(trim(part));
  return out;
}

}  // namespace

void
apply_config_text(RunConfig& cfg, std::string_view text)
{
  std::istringstream in{std::string(text)};
  std::string line;
  int n = 0;
  while (std::getline(in, line))
  {
    ++n;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty() || line.front() == '[') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(n) + ": expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    std::string v   = trim(line.substr(eq + 1));
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') v = v.substr(1, v.size() - 2);

    if (key == "solver")
      cfg.solver.executable = v;
    else if (key == "solver_args")
      cfg.solver.args = split(v, ' ');
    else if (key == "timeout")
      cfg.solver.timeout_seconds = static_cast<double>(to_integer(key, v));
    else if (key == "seeds")
    {
      cfg.solver.seeds.clear();
      for (const auto& s : split(v, ',')) cfg.solver.seeds.push_back(static_cast<unsigned>(to_integer(key, s)));
    }
    else if (key == "workers")
      cfg.workers = static_cast<int>(to_integer(key, v));
    else if (key == "coverage")
      cfg.coverage = v;
    else if (key == "unroll")
      cfg.unroll = static_cast<int>(to_integer(key, v));
    else if (key == "min_budget")
      cfg.min_budget = static_cast<int>(to_integer(key, v));
    else if (key == "out")
      cfg.out_dir = v;
    else if (key == "keep_smt")
      cfg.keep_smt = to_bool(key, v);
    else if (key == "trace")
      cfg.trace = to_bool(key, v);
    else if (key == "step_budget")
      cfg.step_budget = to_integer(key, v);
    else
      throw ConfigError("line " + std::to_string(n) + ": unknown key '" + key + "'");
  }
}

void
apply_config_file(RunConfig& cfg, const fs::path& path)
{
  std::ifstream in(path);
  if (!in) return;
  std::stringstream ss;
  ss << in.rdbuf();
  try
  {
    apply_config_text(cfg, ss.str());
  }
  catch (const ConfigError& e)
  {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void
apply_environment(RunConfig& cfg)
{
  if (const char* s = std::getenv(kSolverEnv); s && *s) cfg.solver.executable = s;
}

void
check_config(const RunConfig& cfg)
{
  if (cfg.solver.timeout_seconds <= 0) throw ConfigError("timeout must be positive");
  if (cfg.workers <= 0) throw ConfigError("workers must be positive");
  if (cfg.min_budget <= 0) throw ConfigError("min_budget must be positive");
  if (cfg.step_budget <= 0) throw ConfigError("step_budget must be positive");
  if (cfg.unroll < 0 || cfg.unroll > kMaxUnrollDepth)
    throw ConfigError("unroll must be between 0 and " + std::to_string(kMaxUnrollDepth));
  if (cfg.coverage != "branch" && cfg.coverage != "mcdc")
    throw ConfigError("coverage must be 'branch' or 'mcdc'");
  if (cfg.solver.seeds.empty()) throw ConfigError("at least one seed is required");
}

/* -------------------------------------------------------------------------- */
/* Reports                                                                    */
/* -------------------------------------------------------------------------- */

std::string
RunReport::serialize() const
{
  return doc.dump(2) + "\n";
}

RunReport
RunReport::parse(std::string_view text)
{
  RunReport r;
  r.doc       = json::parse(text);
  r.exit_code = r.doc.value("exit_code", 0);
  r.text      = r.doc.value("summary", "");
  return r;
}

json
RunReport::comparable() const
{
  json j = doc;
  j.erase("timings");
  return j;
}

json
binding_json(const ArgBinding& b)
{
  json j = json::object();
  for (const auto& [name, v] : b)
  {
    switch (v.type)
    {
      case Type::Boolean: j[name] = v.boolean; break;
      case Type::IntArray: j[name] = v.cells; break;
      default: j[name] = v.integer; break;
    }
  }
  return j;
}

ArgBinding
binding_from_json(const json& j)
{
  ArgBinding b;
  for (const auto& [name, v] : j.items())
  {
    if (v.is_boolean())
      b[name] = Value::of_bool(v.get<bool>());
    else if (v.is_array())
      b[name] = Value::of_array(v.get<std::vector<std::int64_t>>());
    else
      b[name] = Value::of_int(v.get<std::int64_t>());
  }
  return b;
}

namespace {

using Clock = std::chrono::steady_clock;

double
since(Clock::time_point t0)
{
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

json
span_json(SourceSpan s)
{
  return json{{"line", s.line}, {"column", s.column}};
}

json
config_json(const RunConfig& cfg)
{
  return json{{"solver_args", cfg.solver.args},
              {"timeout", cfg.solver.timeout_seconds},
              {"seeds", cfg.solver.seeds},
              {"workers", cfg.workers},
              {"coverage", cfg.coverage},
              {"unroll", cfg.unroll},
              {"min_budget", cfg.min_budget},
              {"step_budget", cfg.step_budget}};
}

std::string
expectation_text(const Expectation& e)
{
  return e.violation ? "violation " + e.label : "pass";
}

SolverConfig
solver_of(const RunConfig& cfg)
{
  SolverConfig s = cfg.solver;
  if (cfg.keep_smt && !cfg.out_dir.empty()) s.keep_smt_dir = (fs::path(cfg.out_dir) / "smt").string();
  if (!s.keep_smt_dir.empty()) fs::create_directories(s.keep_smt_dir);
  return s;
}

void
write_file(const RunConfig& cfg, const std::string& rel, const std::string& text)
{
  if (cfg.out_dir.empty()) return;
  fs::path p = fs::path(cfg.out_dir) / rel;
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + p.string());
}

void
trace(const RunConfig& cfg, const std::string& msg)
{
  if (cfg.trace) std::cerr << "[contraverify] " << msg << "\n";
}

struct Loaded
{
  std::string path;
  std::optional<TypedProgram> program;
};

/// Parses and typechecks every file; returns false (with messages) on any
/// input error.
bool
load_files(const std::vector<std::string>& files, std::vector<Loaded>& out, json& errors, std::string& text)
{
  bool ok = true;
  for (const auto& f : files)
  {
    std::ifstream in(f, std::ios::binary);
    if (!in)
    {
      errors.push_back({{"file", f}, {"error", "cannot read file"}});
      text += f + ": cannot read file\n";
      ok = false;
      continue;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    try
    {
      TypecheckResult tc = typecheck(parse_program(ss.str(), fs::path(f).stem().string()));
      if (!tc.ok())
      {
        for (const auto& e : tc.errors)
        {
          errors.push_back({{"file", f}, {"error", e.to_string()}});
          text += f + ": " + e.to_string() + "\n";
        }
        ok = false;
        continue;
      }
      out.push_back({f, std::move(tc.program)});
    }
    catch (const ParseError& e)
    {
      errors.push_back({{"file", f}, {"error", e.what()}});
      text += f + ": " + e.what() + "\n";
      ok = false;
    }
  }
  return ok;
}

RunReport
start_report(const std::string& command, const RunConfig& cfg)
{
  RunReport r;
  r.doc = json{{"format", "contraverify-report/1"},
               {"command", command},
               {"config", config_json(cfg)},
               {"files", json::array()},
               {"timings", json::object()}};
  return r;
}

RunReport&
finish(RunReport& r, const RunConfig& cfg, int exit_code)
{
  r.exit_code          = exit_code;
  r.doc["exit_code"]   = exit_code;
  r.doc["summary"]     = r.text;
  write_file(cfg, "report.json", r.serialize());
  return r;
}

RunReport
input_failure(RunReport r, const RunConfig& cfg, json errors)
{
  r.doc["errors"] = std::move(errors);
  return finish(r, cfg, kExitInput);
}

/// Runs `body`, mapping solver infrastructure failures to exit code 3.
template <typename Fn>
RunReport
guarded(RunReport r, const RunConfig& cfg, Fn body)
{
  try
  {
    return body(r);
  }
  catch (const SolverProcessError& e)
  {
    r.text += std::string("solver failure: ") + e.what() + "\n";
    r.doc["errors"] = json::array({{{"error", std::string("solver failure: ") + e.what()}}});
    return finish(r, cfg, kExitSolver);
  }
  catch (const EncodingError& e)
  {
    r.text += std::string("encoding failure: ") + e.what() + "\n";
    r.doc["errors"] = json::array({{{"error", std::string("encoding failure: ") + e.what()}}});
    return finish(r, cfg, kExitSolver);
  }
}

json
manifest_entry(const TestCase& t, const std::string& file, const Loaded& src)
{
  return json{{"file", file},
              {"routine", t.routine},
              {"program", src.program->program().name},
              {"source", src.path},
              {"origin", t.origin.tag()},
              {"expected", expectation_text(t.expected)},
              {"binding", binding_json(t.binding)},
              {"minimized", t.minimized}};
}

/// Writes the test and returns its manifest-relative path.
std::string
emit_test(const RunConfig& cfg, const TestCase& t, const Routine& target, int n)
{
  std::string file = test_file_name(t, n);
  std::string name = fs::path(file).stem().string();
  std::string rel  = "tests/" + file;
  write_file(cfg, rel, emit_test_source(t, target, name));
  return rel;
}

json
cex_json(const Counterexample& c)
{
  json j{{"binding", binding_json(c.binding)}, {"oversized", c.oversized}};
  if (!c.counts.empty()) j["counts"] = c.counts;
  return j;
}

}  // namespace

/* -------------------------------------------------------------------------- */
/* verify                                                                     */
/* -------------------------------------------------------------------------- */

RunReport
cmd_verify(const std::vector<std::string>& files, const RunConfig& cfg)
{
  auto t0      = Clock::now();
  RunReport rr = start_report("verify", cfg);
  std::vector<Loaded> loaded;
  json errors = json::array();
  if (!load_files(files, loaded, errors, rr.text)) return input_failure(rr, cfg, errors);
  rr.doc["timings"]["parse"] = since(t0);

  return guarded(rr, cfg, [&](RunReport& r) -> RunReport {
    VerifyOptions vo;
    vo.solver      = solver_of(cfg);
    vo.min_budget  = cfg.min_budget;
    vo.workers     = cfg.workers;
    vo.step_budget = cfg.step_budget;

    bool all_valid = true;
    int n          = 0;
    json manifest{{"format", "contraverify-manifest/1"}, {"tests", json::array()}};
    for (const auto& f : loaded)
    {
      trace(cfg, "verify " + f.path);
      auto tv             = Clock::now();
      const TypedProgram& p = *f.program;
      json fj{{"file", f.path}, {"program", p.program().name}, {"routines", json::array()}};
      for (const auto& rv : verify_program(p, vo))
      {
        const Routine& routine = p.routine(rv.routine);
        json rj{{"routine", rv.routine}, {"vcs", json::array()}};
        if (!rv.error.empty())
        {
          rj["error"] = rv.error;
          r.text += f.path + ": " + rv.error + "\n";
        }
        all_valid = all_valid && rv.all_valid();
        int failed = 0;
        for (const auto& rec : rv.vcs)
        {
          json vj{{"key", rec.vc.key()},
                  {"kind", to_string(rec.vc.kind)},
                  {"label", rec.vc.display_label()},
                  {"location", span_json(rec.vc.location)},
                  {"verdict", to_string(rec.verdict)}};
          if (!rec.reason.empty()) vj["reason"] = rec.reason;
          if (rec.verdict != SolverVerdict::Kind::Valid) ++failed;
          std::string test_file;
          if (rec.raw) vj["counterexample"] = cex_json(*rec.raw);
          if (rec.minimization)
          {
            const MinimizationReport& m = *rec.minimization;
            vj["minimized"]             = cex_json(m.minimized);
            vj["minimization"]          = json{{"reverification_runs", m.reverification_runs},
                                      {"confirmation_runs", m.confirmation_runs},
                                      {"budget_exhausted", m.budget_exhausted},
                                      {"average_reduction", m.average_reduction()}};
          }
          if (rec.test)
          {
            test_file = emit_test(cfg, *rec.test, routine, ++n);
            vj["test"] = test_file;
            manifest["tests"].push_back(manifest_entry(*rec.test, test_file, f));
          }
          if (rec.test_outcome) vj["test_outcome"] = rec.test_outcome->to_string();
          vj["specification_gap"] = rec.specification_gap;
          if (rec.diagnosis)
          {
            std::optional<Counterexample> shown =
                rec.minimization ? std::optional<Counterexample>(rec.minimization->minimized) : rec.raw;
            std::optional<Outcome> gap;
            if (rec.specification_gap) gap = rec.test_outcome;
            Diagnosis d = diagnose({rec.vc, rec.verdict, rec.reason}, shown, routine, test_file, gap);
            vj["diagnosis"] = d.text;
            r.text += d.text;
          }
          rj["vcs"].push_back(vj);
        }
        r.text += p.program().name + "." + rv.routine + ": " + std::to_string(rv.vcs.size()) + " VC(s), "
                  + std::to_string(failed) + " not proved\n";
        fj["routines"].push_back(rj);
      }
      r.doc["files"].push_back(fj);
      r.doc["timings"]["verify:" + f.path] = since(tv);
    }
    write_file(cfg, "manifest.json", manifest.dump(2) + "\n");
    r.doc["manifest"]          = manifest;
    r.doc["timings"]["total"] = since(t0);
    return finish(r, cfg, all_valid ? kExitOk : kExitFailures);
  });
}

/* -------------------------------------------------------------------------- */
/* testgen                                                                    */
/* -------------------------------------------------------------------------- */

RunReport
cmd_testgen(const std::vector<std::string>& files, const RunConfig& cfg)
{
  auto t0      = Clock::now();
  RunReport rr = start_report("testgen", cfg);
  std::vector<Loaded> loaded;
  json errors = json::array();
  if (!load_files(files, loaded, errors, rr.text)) return input_failure(rr, cfg, errors);
  rr.doc["timings"]["parse"] = since(t0);

  return guarded(rr, cfg, [&](RunReport& r) -> RunReport {
    CoverageGoal goal;
    goal.branch       = true;
    goal.mcdc         = cfg.coverage == "mcdc";
    goal.unroll_depth = cfg.unroll;
    SuiteOptions so;
    so.solver      = solver_of(cfg);
    so.min_budget  = cfg.min_budget;
    so.workers     = cfg.workers;
    so.step_budget = cfg.step_budget;

    bool complete = true;
    int n         = 0;
    json manifest{{"format", "contraverify-manifest/1"},
                  {"provenance", {{"coverage", cfg.coverage}, {"unroll", cfg.unroll}, {"seeds", cfg.solver.seeds}}},
                  {"tests", json::array()}};
    for (const auto& f : loaded)
    {
      trace(cfg, "testgen " + f.path);
      auto tg               = Clock::now();
      const TypedProgram& p = *f.program;
      SuiteResult res       = generate_suite(p, goal, so);

      json fj{{"file", f.path}, {"program", p.program().name}};
      std::vector<std::string> test_files;
      for (const auto& t : res.suite.tests)
      {
        std::string rel = emit_test(cfg, t, p.routine(t.routine), ++n);
        test_files.push_back(rel);
        manifest["tests"].push_back(manifest_entry(t, rel, f));
      }
      json obs = json::array();
      for (const auto& o : res.obligations)
      {
        json oj{{"routine", o.obligation.routine},
                {"id", o.obligation.id},
                {"obligation", o.obligation.describe()},
                {"status", to_string(o.status)},
                {"attempts", o.attempts}};
        if (o.test >= 0) oj["test"] = test_files.at(static_cast<std::size_t>(o.test));
        if (o.status == ObligationResult::Status::Unknown) complete = false;
        obs.push_back(oj);
      }
      fj["obligations"] = obs;
      json infeasible   = json::array();
      for (const auto& e : res.infeasibility.entries)
        infeasible.push_back({{"routine", e.routine}, {"id", e.id}, {"verdict", e.verdict}, {"obligation", e.description}});
      fj["infeasibility"] = infeasible;

      const CoverageReport& c = res.coverage;
      double ratio            = c.branch_coverage_ratio(res.infeasible_branches);
      json hits               = json::array();
      for (const auto& [k, h] : c.branch_hits) hits.push_back({{"routine", k.first}, {"branch", k.second}, {"hits", h}});
      json loops = json::array();
      for (const auto& [k, s] : c.loop_profiles) loops.push_back({{"routine", k.first}, {"loop", k.second}, {"iterations", s}});
      json mcdc = json::array();
      for (const auto& [k, ok] : c.mcdc_satisfied)
        mcdc.push_back({{"routine", std::get<0>(k)}, {"decision", std::get<1>(k)}, {"condition", std::get<2>(k)},
                        {"satisfied", ok}, {"degenerate", c.mcdc_degenerate.count(k) > 0}});
      fj["coverage"] = json{{"branch_ratio", ratio},
                            {"mcdc_ratio", c.mcdc_ratio()},
                            {"branches", hits},
                            {"loops", loops},
                            {"mcdc", mcdc},
                            {"tests_counted", c.tests_counted},
                            {"tests_excluded", c.tests_excluded}};
      fj["warnings"] = res.warnings;
      if (ratio < 1.0) complete = false;
      r.doc["files"].push_back(fj);
      r.doc["timings"]["testgen:" + f.path] = since(tg);

      r.text += f.path + ": " + std::to_string(res.suite.tests.size()) + " test(s), branch coverage "
                + std::to_string(ratio);
      if (goal.mcdc) r.text += ", MC/DC " + std::to_string(c.mcdc_ratio());
      r.text += "\n";
      for (const auto& e : res.infeasibility.entries)
        r.text += "  " + e.verdict + ": " + e.routine + " " + e.description + "\n";
      for (const auto& w : res.warnings) r.text += "  warning: " + w + "\n";
    }
    write_file(cfg, "manifest.json", manifest.dump(2) + "\n");
    r.doc["manifest"]          = manifest;
    r.doc["timings"]["total"] = since(t0);
    return finish(r, cfg, complete ? kExitOk : kExitFailures);
  });
}

/* -------------------------------------------------------------------------- */
/* run-tests                                                                  */
/* -------------------------------------------------------------------------- */

RunReport
cmd_runtests(const std::vector<std::string>& files, const std::string& manifest_path, const RunConfig& cfg)
{
  auto t0      = Clock::now();
  RunReport rr = start_report("run-tests", cfg);
  std::vector<Loaded> loaded;
  json errors = json::array();
  if (!load_files(files, loaded, errors, rr.text)) return input_failure(rr, cfg, errors);

  json manifest;
  {
    std::ifstream in(manifest_path, std::ios::binary);
    if (!in)
    {
      errors.push_back({{"file", manifest_path}, {"error", "cannot read manifest"}});
      rr.text += manifest_path + ": cannot read manifest\n";
      return input_failure(rr, cfg, errors);
    }
    try
    {
      manifest = json::parse(in);
    }
    catch (const json::exception& e)
    {
      errors.push_back({{"file", manifest_path}, {"error", e.what()}});
      rr.text += manifest_path + ": " + e.what() + "\n";
      return input_failure(rr, cfg, errors);
    }
  }
  fs::path base = fs::path(manifest_path).parent_path();

  struct Pending
  {
    json entry;
    TestSource source;
    const Loaded* target;
  };
  std::vector<Pending> pending;
  for (const auto& entry : manifest.value("tests", json::array()))
  {
    std::string file = entry.value("file", "");
    fs::path path    = base / file;
    std::ifstream in(path, std::ios::binary);
    if (!in)
    {
      errors.push_back({{"file", path.string()}, {"error", "test file missing"}});
      rr.text += path.string() + ": test file missing\n";
      continue;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    try
    {
      TestSource ts = parse_test_source(ss.str());
      const Loaded* target = nullptr;
      std::string program  = entry.value("program", "");
      for (const auto& l : loaded)
        if (l.program->find(ts.target) && (program.empty() || l.program->program().name == program)) target = &l;
      if (!target)
        for (const auto& l : loaded)
          if (l.program->find(ts.target)) target = &l;
      if (!target) throw TestFormatError("no given program defines routine '" + ts.target + "'");
      pending.push_back({entry, std::move(ts), target});
    }
    catch (const TestFormatError& e)
    {
      errors.push_back({{"file", path.string()}, {"error", e.what()}});
      rr.text += path.string() + ": " + e.what() + "\n";
    }
  }
  if (!errors.empty()) return input_failure(rr, cfg, errors);

  int green = 0, red = 0, rejected = 0;
  json results = json::array();
  std::map<const Loaded*, TestSuite> suites;
  for (const auto& t : pending)
  {
    json tj{{"file", t.entry.value("file", "")}, {"routine", t.source.target}, {"expected", expectation_text(t.source.expected)}};
    std::string status;
    try
    {
      TestVerdict v = run_test_source(*t.target->program, t.source, cfg.step_budget);
      bool rejected_input = v.outcome.violated() && v.outcome.violation.kind == ViolationKind::Precondition
                            && v.outcome.violation.routine == t.source.routine;
      status = v.green() ? "green" : rejected_input ? "rejected" : "red";
      tj["outcome"]          = v.outcome.to_string();
      tj["verdict"]          = to_string(v.kind);
      tj["expectation_met"]  = v.kind == TestVerdict::Kind::ReproducesExpectedViolation
                               || (!t.source.expected.violation && v.outcome.normal());
    }
    catch (const TestFormatError& e)
    {
      status         = "red";
      tj["outcome"] = e.what();
    }
    tj["status"] = status;
    if (status == "green") ++green;
    if (status == "red") ++red;
    if (status == "rejected") ++rejected;
    rr.text += "  " + status + "  " + t.entry.value("file", "") + "  " + tj.value("outcome", "") + "\n";
    results.push_back(tj);
    if (t.entry.contains("binding"))
    {
      TestCase tc;
      tc.routine = t.source.target;
      tc.binding = binding_from_json(t.entry["binding"]);
      suites[t.target].add(tc);
      if (cfg.trace)
      {
        TraceRecorder rec;
        run_routine(*t.target->program, tc.routine, tc.binding, cfg.step_budget, &rec);
        write_file(cfg, "traces/" + fs::path(t.entry.value("file", "")).stem().string() + ".trace", rec.text());
      }
    }
  }
  rr.doc["tests"] = results;
  json cov        = json::array();
  for (const auto& [l, suite] : suites)
  {
    CoverageReport c = measure_coverage(*l->program, suite, cfg.step_budget);
    cov.push_back({{"file", l->path}, {"branch_ratio", c.branch_coverage_ratio()}, {"mcdc_ratio", c.mcdc_ratio()}});
  }
  rr.doc["coverage"]          = cov;
  rr.doc["counts"]            = json{{"green", green}, {"red", red}, {"rejected", rejected}};
  rr.text += std::to_string(green) + " green, " + std::to_string(red) + " red, " + std::to_string(rejected)
             + " rejected by preconditions\n";
  rr.doc["timings"]["total"] = since(t0);
  return finish(rr, cfg, red == 0 ? kExitOk : kExitFailures);
}

/* -------------------------------------------------------------------------- */
/* fix                                                                        */
/* -------------------------------------------------------------------------- */

RunReport
cmd_fix(const std::vector<std::string>& files, const RunConfig& cfg)
{
  auto t0      = Clock::now();
  RunReport rr = start_report("fix", cfg);
  std::vector<Loaded> loaded;
  json errors = json::array();
  if (!load_files(files, loaded, errors, rr.text)) return input_failure(rr, cfg, errors);

  return guarded(rr, cfg, [&](RunReport& r) -> RunReport {
    FixOptions fo;
    fo.solver      = solver_of(cfg);
    fo.min_budget  = cfg.min_budget;
    fo.workers     = cfg.workers;
    fo.step_budget = cfg.step_budget;

    bool clean = true;
    for (const auto& f : loaded)
    {
      trace(cfg, "fix " + f.path);
      FixReport rep = fix_program(*f.program, fo);
      json fj{{"file", f.path}, {"program", f.program->program().name}, {"failures", json::array()}};
      if (!rep.errors.empty())
      {
        fj["errors"] = rep.errors;
        clean        = false;
      }
      for (const auto& ff : rep.failures)
      {
        clean = false;
        json cexs = json::array();
        for (const auto& c : ff.counterexamples) cexs.push_back(binding_json(c.binding));
        json invs = json::array();
        for (const auto& i : ff.invariants)
          invs.push_back({{"pattern", to_string(i.pattern)}, {"invariant", i.text()}, {"support", i.support}});
        json cands = json::array();
        for (const auto& a : ff.attempts)
        {
          json cj{{"kind", to_string(a.candidate.kind)},
                  {"location", span_json(a.candidate.location)},
                  {"edit", a.candidate.describe()},
                  {"rationale", a.candidate.rationale},
                  {"edit_distance", a.edit_distance},
                  {"verdict", to_string(a.verdict.kind)},
                  {"decided_by_tests", a.verdict.by_tests},
                  {"rank", a.rank}};
          if (!a.verdict.new_failures.empty()) cj["failures"] = a.verdict.new_failures;
          cands.push_back(cj);
        }
        json ranked = json::array();
        for (const auto& a : ff.ranked)
        {
          ranked.push_back({{"rank", a.rank},
                            {"kind", to_string(a.candidate.kind)},
                            {"edit", a.candidate.describe()},
                            {"patch", a.patch}});
          write_file(cfg, "fixes/" + ff.vc_key + "." + std::to_string(a.rank) + ".diff", a.patch);
        }
        json fx{{"vc", ff.vc_key},
                {"routine", ff.routine},
                {"kind", ff.kind},
                {"label", ff.label},
                {"location", span_json(ff.location)},
                {"counterexamples", cexs},
                {"invariants", invs},
                {"candidates", cands},
                {"ranked", ranked},
                {"reproduced", ff.reproduced},
                {"diversity", ff.diversity},
                {"warnings", ff.warnings},
                {"ranking_policy", "implementation fixes before contract fixes"}};
        if (ff.diagnostic) fx["diagnostic"] = *ff.diagnostic;
        fj["failures"].push_back(fx);
        r.doc["timings"]["fix:" + ff.vc_key] = ff.seconds;

        r.text += f.program->program().name + "." + ff.routine + ": " + ff.kind + " " + ff.label + ": "
                  + std::to_string(ff.ranked.size()) + " valid fix(es) of " + std::to_string(ff.attempts.size())
                  + " candidate(s)\n";
        for (const auto& a : ff.ranked)
          r.text += "  " + std::to_string(a.rank) + ". " + a.candidate.describe() + "\n";
        if (ff.diagnostic) r.text += "  " + *ff.diagnostic + "\n";
      }
      r.doc["files"].push_back(fj);
    }
    r.doc["timings"]["total"] = since(t0);
    return finish(r, cfg, clean ? kExitOk : kExitFailures);
  });
}

}  // namespace contraverify
