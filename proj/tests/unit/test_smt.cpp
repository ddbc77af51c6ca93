#include <gtest/gtest.h>

#include "../support.hpp"
#include "contraverify/smt.hpp"
#include "contraverify/vcgen.hpp"

using namespace contraverify;
using namespace testsupport;

namespace {

VerificationCondition
vc_of(const TypedProgram& p, const std::string& routine, const std::string& label)
{
  for (const auto& vc : generate_vcs(p, p.routine(routine)))
    if (vc.display_label() == label) return vc;
  throw std::runtime_error("no VC " + label);
}

}  // namespace

TEST(Smt, Spelling)
{
  EXPECT_EQ(smt_symbol("x"), "|x|");
  EXPECT_EQ(smt_int(-5), "(- 5)");
  EXPECT_EQ(smt_int(7), "7");
}

TEST(Smt, ModelParsing)
{
  Model m = Model::parse(R"((
  (define-fun |x| () Int (- 3))
  (define-fun |b| () Bool true)
  (define-fun |a| ((x!0 Int)) Int (ite (= x!0 2) (- 1) 4))
))");
  EXPECT_EQ(m.int_value("x").value_or(0), -3);
  EXPECT_EQ(m.bool_value("b").value_or(false), true);
  EXPECT_EQ(m.apply("a", 2), -1);
  EXPECT_EQ(m.apply("a", 5), 4);
  EXPECT_EQ(m.apply("missing", 1), 0);
}

TEST(Smt, RenderedScriptIsSelfContained)
{
  TypedProgram p = load("max.ec");
  std::string s  = encode(vc_of(p, "max", "is_max")).render(3);
  EXPECT_NE(s.find("(check-sat)"), std::string::npos);
  EXPECT_NE(s.find("(get-model)"), std::string::npos);
  EXPECT_NE(s.find("random-seed 3"), std::string::npos);
}

TEST(Smt, SolvesFalsifiedAndValid)
{
  TypedProgram buggy = load("max.ec");
  SolverVerdict v    = solve(vc_of(buggy, "max", "is_max"), solver());
  ASSERT_EQ(v.kind, SolverVerdict::Kind::Falsified);
  ASSERT_TRUE(v.model);
  Counterexample c = extract_counterexample(*v.model, vc_of(buggy, "max", "is_max"), buggy.routine("max"));
  EXPECT_GE(c.binding.at("a").count(), 2);

  TypedProgram fixed = load("max_fixed.ec");
  EXPECT_EQ(solve(vc_of(fixed, "max", "is_max"), solver()).kind, SolverVerdict::Kind::Valid);
}

TEST(Smt, DistinctModelsDiffer)
{
  TypedProgram p = load("faults/a01_twice.ec");
  auto vc        = vc_of(p, "twice", "doubled");
  auto models    = solve_distinct(encode(vc), 4, solver());
  ASSERT_EQ(models.size(), 4u);
  std::set<std::int64_t> xs;
  for (const auto& m : models) xs.insert(extract_counterexample(m, vc, p.routine("twice")).binding.at("x").integer);
  EXPECT_EQ(xs.size(), 4u);
}

TEST(Smt, DistinctModelsStopOnUnsat)
{
  TypedProgram p = typed("f (x: INTEGER): INTEGER require small: x = 0 do Result := 1 ensure one: Result = 1 or x = 0 end");
  EXPECT_TRUE(solve_distinct(encode(vc_of(p, "f", "one")), 3, solver()).empty());
}

TEST(Smt, PinnedBindingDecidesConcreteInput)
{
  TypedProgram p = load("max.ec");
  auto vc        = vc_of(p, "max", "is_max");
  SolverSession s(solver());
  auto inputs = input_symbols(vc);
  s.load(encode(vc), 0);
  s.push();
  s.assert_term(pin_binding({{"a", Value::of_array({0, 1})}}, inputs));
  EXPECT_EQ(s.check(), CheckResult::Sat);
  s.pop();
  s.assert_term(pin_binding({{"a", Value::of_array({1, 0})}}, inputs));
  EXPECT_EQ(s.check(), CheckResult::Unsat);
  EXPECT_EQ(s.checks(), 2);
}

TEST(Smt, MissingSolverIsAnInfrastructureError)
{
  SolverConfig cfg = solver();
  cfg.executable   = "/nonexistent/solver";
  TypedProgram p   = load("faults/a01_twice.ec");
  EXPECT_THROW(solve(vc_of(p, "twice", "doubled"), cfg), SolverProcessError);
}

TEST(Smt, KeepScriptWritesNamedFile)
{
  auto dir         = scratch("keep-smt");
  SolverConfig cfg = solver();
  cfg.keep_smt_dir = dir.string();
  TypedProgram p   = load("faults/a01_twice.ec");
  auto vc          = vc_of(p, "twice", "doubled");
  keep_script(cfg, vc, encode(vc));
  EXPECT_TRUE(std::filesystem::exists(dir / ("twice." + std::to_string(vc.id) + ".smt2")));
}
