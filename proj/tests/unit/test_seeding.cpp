#include <gtest/gtest.h>

#include "../support.hpp"
#include "contraverify/seeding.hpp"

using namespace contraverify;
using namespace testsupport;

namespace {

SuiteOptions
options()
{
  SuiteOptions o;
  o.solver = solver();
  return o;
}

}  // namespace

TEST(Instrument, StripUndoesEveryPass)
{
  std::vector<std::string> files = {"max.ec", "gap.ec", "weak.ec"};
  for (const auto& d : {"sc", "mcdc", "loops"})
    for (const auto& f : corpus_files(d)) files.push_back(f);
  CoverageGoal all;
  all.mcdc         = true;
  all.unroll_depth = 3;
  for (const auto& f : files)
  {
    TypedProgram p = load(f);
    for (const auto& ip : {seed_branches(p), seed_mcdc(p), unroll_loops(p, 3), instrument(p, all)})
      EXPECT_TRUE(equal(strip(ip.program.program()), p.program())) << f;
  }
}

TEST(Instrument, BranchObligationsUseBranchIds)
{
  TypedProgram p = load("sc/nested.ec");
  auto ip        = seed_branches(p);
  auto branches  = enumerate_branches(p.routine("quadrant"));
  const auto& ob = ip.obligations.at("quadrant");
  ASSERT_EQ(ob.size(), branches.size());
  for (std::size_t i = 0; i < ob.size(); ++i)
  {
    EXPECT_EQ(ob[i].id, branches[i].id);
    EXPECT_EQ(ob[i].kind, Obligation::Kind::Branch);
  }
  EXPECT_EQ(ip.program.routine("quadrant").args.back().name, kSelector);
}

TEST(Instrument, UnrollObligationsPerIteration)
{
  TypedProgram p = load("loops/double.ec");
  auto ip        = unroll_loops(p, 4);
  std::set<int> its;
  for (const auto& o : ip.obligations.at("double_up"))
    if (o.kind == Obligation::Kind::LoopIteration) its.insert(o.iterations);
  EXPECT_EQ(its, (std::set<int>{0, 1, 2, 3, 4}));
}

TEST(Instrument, DegenerateConditionIsReported)
{
  TypedProgram p = typed(R"(
f (x, y: INTEGER): INTEGER
	do
		if x > 0 and (x > 0 or y > 0) then
			Result := 1
		end
	end
)");
  auto ip = seed_mcdc(p);
  EXPECT_EQ(ip.degenerate.size(), 1u);
  ASSERT_FALSE(ip.warnings.empty());
  EXPECT_NE(ip.warnings[0].find("degenerate"), std::string::npos);
}

TEST(Suite, Fig4GetsFullCoverageAndInfeasibleBranch)
{
  TypedProgram p = load("sc/fig4.ec");
  SuiteResult s  = generate_suite(p, CoverageGoal{}, options());
  EXPECT_EQ(s.coverage.branch_coverage_ratio(s.infeasible_branches), 1.0);
  int abs_tests = 0;
  for (const auto& t : s.suite.tests) abs_tests += t.routine == "abs_diff";
  EXPECT_EQ(abs_tests, 2);
  ASSERT_EQ(s.infeasibility.entries.size(), 1u);
  EXPECT_EQ(s.infeasibility.entries[0].routine, "clash");
  EXPECT_EQ(s.infeasibility.entries[0].verdict, "infeasible");
  for (const auto& t : s.suite.tests) EXPECT_FALSE(t.binding.count(kSelector));
}

TEST(Suite, ExpectationsComeFromExecution)
{
  TypedProgram p = load("max.ec");
  SuiteResult s  = generate_suite(p, CoverageGoal{}, options());
  for (const auto& t : s.suite.tests)
  {
    Outcome o = run_routine(p, t.routine, t.binding);
    EXPECT_EQ(t.expected.violation, o.violated());
  }
}

TEST(Suite, McdcSatisfiedOnThreeConditions)
{
  TypedProgram p = load("mcdc/three.ec");
  CoverageGoal g;
  g.mcdc        = true;
  SuiteResult s = generate_suite(p, g, options());
  EXPECT_TRUE(s.coverage.all_mcdc_satisfied());
  EXPECT_GE(s.suite.tests.size(), 4u);
}

TEST(Suite, ParallelMatchesSequential)
{
  TypedProgram p = load("sc/parity.ec");
  SuiteOptions one = options(), four = options();
  four.workers     = 4;
  auto a = generate_suite(p, CoverageGoal{}, one);
  auto b = generate_suite(p, CoverageGoal{}, four);
  ASSERT_EQ(a.suite.tests.size(), b.suite.tests.size());
  for (std::size_t i = 0; i < a.suite.tests.size(); ++i)
  {
    EXPECT_EQ(a.suite.tests[i].routine, b.suite.tests[i].routine);
    EXPECT_EQ(a.suite.tests[i].binding, b.suite.tests[i].binding);
  }
}
