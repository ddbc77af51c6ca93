#include <gtest/gtest.h>

#include "../support.hpp"
#include "contraverify/proof2test.hpp"

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

TEST(Minimize, ShrinksLargeScalarsToBoundary)
{
  TypedProgram p = load("large.ec");
  auto vc        = vc_of(p, "bump", "small");
  Counterexample c;
  c.binding = {{"x", Value::of_int(5000)}, {"y", Value::of_int(3000)}};
  auto m    = minimize(c, vc, p.routine("bump"), solver());
  EXPECT_EQ(m.minimized.binding.at("x").integer + m.minimized.binding.at("y").integer, 100);
  EXPECT_TRUE(falsified_by(vc, m.minimized.binding));
  EXPECT_GT(m.average_reduction(), 0.9);
  EXPECT_TRUE(one_minimality_violations(m.minimized.binding, vc, p.routine("bump"), solver()).empty());
}

TEST(Minimize, ConstantBoundaryFoundWithoutBisection)
{
  // x shrinks to 0 in one call; y lands on the constant 100 via 0, 99, 100.
  TypedProgram p = load("large.ec");
  Counterexample c;
  c.binding = {{"x", Value::of_int(5000)}, {"y", Value::of_int(3000)}};
  auto m    = minimize(c, vc_of(p, "bump", "small"), p.routine("bump"), solver());
  EXPECT_EQ(m.minimized.binding.at("y").integer, 100);
  EXPECT_EQ(m.reverification_runs, 4);
}

TEST(Minimize, RejectsNonCounterexample)
{
  TypedProgram p = load("large.ec");
  Counterexample c;
  c.binding = {{"x", Value::of_int(1)}, {"y", Value::of_int(1)}};
  EXPECT_THROW(minimize(c, vc_of(p, "bump", "small"), p.routine("bump"), solver()), NotACounterexample);
}

TEST(Minimize, SearchOrderPutsCountsFirst)
{
  TypedProgram p = load("large.ec");
  ArgBinding b{{"a", Value::of_array({5, 6, 7})}, {"i", Value::of_int(9)}};
  auto order = shrink_order(b, p.routine("window"));
  ASSERT_EQ(order.size(), 5u);
  EXPECT_EQ(order[0].kind, ShrinkVariable::Kind::Count);
  EXPECT_EQ(order[1].display(), "i");
  EXPECT_EQ(order[2].display(), "a[1]");
}

TEST(Minimize, BudgetIsRespected)
{
  TypedProgram p = load("large.ec");
  auto vc        = vc_of(p, "mix", "capped");
  Counterexample c;
  c.binding = {{"x", Value::of_int(90000)}, {"y", Value::of_int(-70000)}, {"z", Value::of_int(50000)}};
  auto m    = minimize(c, vc, p.routine("mix"), solver(), 2);
  EXPECT_LE(m.reverification_runs, 2);
  EXPECT_TRUE(m.budget_exhausted);
  EXPECT_TRUE(falsified_by(vc, m.minimized.binding));
}

TEST(TestSource, EmitParseRoundTrip)
{
  TypedProgram p = load("max.ec");
  TestCase t{"max", {{"a", Value::of_array({0, 1})}}, {true, "is_max"}, {}, true};
  std::string name = test_file_name(t, 1);
  EXPECT_EQ(name, "t_max_proof_1.ec");
  std::string src = emit_test_source(t, p.routine("max"), "t_max_proof_1");
  EXPECT_EQ(src.substr(0, src.find('\n')), "-- expect: violation is_max");
  TestSource ts = parse_test_source(src);
  EXPECT_EQ(ts.target, "max");
  EXPECT_EQ(ts.expected, t.expected);
  EXPECT_EQ(run_test_source(p, ts).kind, TestVerdict::Kind::ReproducesExpectedViolation);
}

TEST(TestSource, MissingHeaderIsRejected)
{
  EXPECT_THROW(parse_test_source("t do end"), TestFormatError);
}

TEST(Verify, BuggyMaxYieldsOneMinimizedTest)
{
  TypedProgram p = load("max.ec");
  VerifyOptions o;
  o.solver = solver();
  auto res = verify_program(p, o);
  ASSERT_EQ(res.size(), 1u);
  int failures = 0;
  for (const auto& rec : res[0].vcs)
  {
    if (rec.verdict == SolverVerdict::Kind::Valid) continue;
    ++failures;
    ASSERT_TRUE(rec.test && rec.minimization && rec.diagnosis);
    EXPECT_EQ(rec.test->binding.at("a").count(), 2);
    EXPECT_NE(rec.diagnosis->text.find("is_max"), std::string::npos);
    EXPECT_FALSE(rec.specification_gap);
  }
  EXPECT_EQ(failures, 1);
}

TEST(Verify, WeakInvariantIsASpecificationGap)
{
  TypedProgram p = load("gap.ec");
  VerifyOptions o;
  o.solver = solver();
  for (const auto& rv : verify_program(p, o))
  {
    if (rv.routine != "count_to") continue;
    bool gap = false;
    for (const auto& rec : rv.vcs) gap = gap || rec.specification_gap;
    EXPECT_TRUE(gap);
  }
}

TEST(Diagnose, MentionsInputsAndTestFile)
{
  TypedProgram p = load("max.ec");
  auto vc        = vc_of(p, "max", "is_max");
  Counterexample c;
  c.binding   = {{"a", Value::of_array({0, 1})}};
  Diagnosis d = diagnose({vc, SolverVerdict::Kind::Falsified, ""}, c, p.routine("max"), "tests/t.ec");
  EXPECT_NE(d.text.find("a.count = 2"), std::string::npos) << d.text;
  EXPECT_NE(d.text.find("tests/t.ec"), std::string::npos);
}
