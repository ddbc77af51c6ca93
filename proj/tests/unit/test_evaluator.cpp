#include <gtest/gtest.h>

#include "../support.hpp"
#include "contraverify/evaluator.hpp"
#include "contraverify/parser.hpp"

using namespace contraverify;
using namespace testsupport;

namespace {

ArgBinding
array_arg(std::vector<std::int64_t> cells)
{
  return {{"a", Value::of_array(std::move(cells))}};
}

}  // namespace

TEST(Value, EuclideanDivisionProperty)
{
  for (std::int64_t a = -20; a <= 20; ++a)
    for (std::int64_t b = -6; b <= 6; ++b)
    {
      if (b == 0) continue;
      std::int64_t q = euclid_div(a, b), r = euclid_mod(a, b);
      EXPECT_EQ(a, b * q + r) << a << " " << b;
      EXPECT_GE(r, 0);
      EXPECT_LT(r, std::llabs(b));
    }
  EXPECT_EQ(euclid_div(-7, 2), -4);
  EXPECT_EQ(euclid_mod(-7, 2), 1);
}

TEST(Interpreter, BuggyMaxViolatesIsMax)
{
  TypedProgram p = load("max.ec");
  Outcome o      = run_routine(p, "max", array_arg({0, 1}));
  ASSERT_TRUE(o.violated());
  EXPECT_EQ(o.violation.kind, ViolationKind::Postcondition);
  EXPECT_EQ(o.violation.label, "is_max");
}

TEST(Interpreter, FixedMaxReturnsMaximum)
{
  TypedProgram p = load("max_fixed.ec");
  for (const auto& cells : std::vector<std::vector<std::int64_t>>{{3}, {0, 1}, {5, -2, 7}, {-1, -1}})
  {
    Outcome o = run_routine(p, "max", array_arg(cells));
    ASSERT_TRUE(o.normal()) << o.to_string();
    EXPECT_EQ(o.result->integer, *std::max_element(cells.begin(), cells.end()));
  }
}

TEST(Interpreter, EntryPreconditionIsDistinguished)
{
  TypedProgram p = load("max.ec");
  Outcome o      = run_routine(p, "max", array_arg({}));
  ASSERT_TRUE(o.violated());
  EXPECT_EQ(o.violation.kind, ViolationKind::Precondition);
  EXPECT_TRUE(entry_precondition_failure(p.routine("max"), o));
}

TEST(Interpreter, CalleePreconditionIsNotEntryFailure)
{
  TypedProgram p = typed(R"(
class C
feature
	inner (x: INTEGER): INTEGER
		require
			positive: x > 0
		do
			Result := x
		end
	outer (x: INTEGER): INTEGER
		do
			Result := inner (x)
		end
end
)");
  Outcome o = run_routine(p, "outer", {{"x", Value::of_int(0)}});
  ASSERT_TRUE(o.violated());
  EXPECT_EQ(o.violation.kind, ViolationKind::Precondition);
  EXPECT_FALSE(entry_precondition_failure(p.routine("outer"), o));
}

TEST(Interpreter, BoundsViolationInPostcondition)
{
  TypedProgram p = load("gap.ec");
  Outcome o      = run_routine(p, "first_or_zero", array_arg({}));
  ASSERT_TRUE(o.violated());
  EXPECT_EQ(o.violation.kind, ViolationKind::Bounds);
}

TEST(Interpreter, StepBudgetStopsDivergence)
{
  TypedProgram p = typed(R"(
spin (n: INTEGER): INTEGER
	local
		i: INTEGER
	do
		from
			i := 0
		invariant
			any: True
		until
			i < 0
		loop
			i := i + 1
		end
	end
)");
  Outcome o = run_routine(p, "spin", {{"n", Value::of_int(0)}}, 1000);
  EXPECT_EQ(o.kind, Outcome::Kind::Divergence);
}

TEST(Interpreter, LoopVariantIsChecked)
{
  TypedProgram p = typed(R"(
stuck (n: INTEGER): INTEGER
	local
		i: INTEGER
	do
		from
			i := 0
		invariant
			any: True
		until
			i >= 3
		loop
			i := i + 1
		variant
			5
		end
	end
)");
  Outcome o = run_routine(p, "stuck", {{"n", Value::of_int(0)}});
  ASSERT_TRUE(o.violated());
  EXPECT_EQ(o.violation.kind, ViolationKind::LoopVariant);
}

TEST(Trace, LinesFollowExecution)
{
  TypedProgram p = load("sc/fig4.ec");
  TraceRecorder t;
  run_routine(p, "abs_diff", {{"x", Value::of_int(2)}, {"y", Value::of_int(1)}}, kDefaultStepBudget, &t);
  ASSERT_GE(t.lines().size(), 2u);
  EXPECT_EQ(t.lines()[0], "ENTER abs_diff");
  EXPECT_EQ(t.lines()[1].rfind("BRANCH ", 0), 0u);
}

TEST(Coverage, TwoTestsCoverFig4AbsDiff)
{
  TypedProgram p = load("sc/fig4.ec");
  TestSuite s;
  s.add({"abs_diff", {{"x", Value::of_int(1)}, {"y", Value::of_int(0)}}, {}, {}, false});
  s.add({"abs_diff", {{"x", Value::of_int(0)}, {"y", Value::of_int(0)}}, {}, {}, false});
  EXPECT_FALSE(s.add({"abs_diff", {{"x", Value::of_int(0)}, {"y", Value::of_int(0)}}, {}, {}, false}));
  CoverageReport c = measure_coverage(p, s);
  int hit = 0;
  for (const auto& [k, n] : c.branch_hits)
    if (k.first == "abs_diff" && n > 0) ++hit;
  EXPECT_EQ(hit, 2);
  EXPECT_EQ(c.tests_counted, 2);
}

TEST(Coverage, PreconditionViolatingTestsAreExcluded)
{
  TypedProgram p = load("max.ec");
  TestSuite s;
  s.add({"max", array_arg({}), {}, {}, false});
  CoverageReport c = measure_coverage(p, s);
  EXPECT_EQ(c.tests_excluded, 1);
  EXPECT_EQ(c.tests_counted, 0);
}

TEST(Mcdc, MaskingPairRequiresIndependentEffect)
{
  Routine r;
  Decision d;
  d.expr       = parse_expression("x > 0 and y > 0");
  d.conditions = atomic_conditions(d.expr);
  ASSERT_EQ(d.conditions.size(), 2u);
  DecisionRecord tt{{true, true}, true};
  DecisionRecord ft{{false, true}, false};
  DecisionRecord ff{{false, false}, false};
  EXPECT_TRUE(masking_pair(d, 0, tt, ft));
  EXPECT_FALSE(masking_pair(d, 0, tt, ff));
  EXPECT_FALSE(masking_pair(d, 1, tt, ft));
}

TEST(Mcdc, DegenerateConditionDetected)
{
  Decision d;
  d.expr       = parse_expression("x > 0 and (x > 0 or y > 0)");
  d.conditions = atomic_conditions(d.expr);
  ASSERT_EQ(d.conditions.size(), 2u);
  EXPECT_TRUE(condition_independent_somewhere(d, 0));
  EXPECT_FALSE(condition_independent_somewhere(d, 1));
}

TEST(Tests, RunTestClassifiesExpectations)
{
  TypedProgram p = load("max.ec");
  TestCase t{"max", array_arg({0, 1}), {true, "is_max"}, {}, true};
  EXPECT_EQ(run_test(p, t).kind, TestVerdict::Kind::ReproducesExpectedViolation);
  TypedProgram fixed = load("max_fixed.ec");
  EXPECT_TRUE(run_test(fixed, t).green());
}
