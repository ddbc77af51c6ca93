#include <gtest/gtest.h>

#include "../support.hpp"
#include "contraverify/parser.hpp"
#include "contraverify/printer.hpp"
#include "contraverify/vcgen.hpp"

using namespace contraverify;
using namespace testsupport;

namespace {

VerificationCondition
find_vc(const std::vector<VerificationCondition>& vcs, const std::string& label)
{
  for (const auto& vc : vcs)
    if (vc.display_label() == label) return vc;
  throw std::runtime_error("no VC " + label);
}

}  // namespace

TEST(Vcgen, MaxHasOneObligationPerAssertionSite)
{
  TypedProgram p = load("max.ec");
  auto vcs       = generate_vcs(p, p.routine("max"));
  EXPECT_EQ(vcs.size(), 20u);
  std::set<VcKind> kinds;
  for (const auto& vc : vcs) kinds.insert(vc.kind);
  for (VcKind k : {VcKind::PostconditionClause, VcKind::LoopInvariantInit, VcKind::LoopInvariantMaintain,
                   VcKind::LoopVariantNonneg, VcKind::LoopVariantDecrease, VcKind::Bounds})
    EXPECT_TRUE(kinds.count(k)) << to_string(k);
  for (std::size_t i = 0; i < vcs.size(); ++i) EXPECT_EQ(vcs[i].key(), "max." + std::to_string(vcs[i].id));
}

TEST(Vcgen, FalsifiedByMatchesMaxCounterexample)
{
  TypedProgram p = load("sc/fig4.ec");
  auto vcs       = generate_vcs(p, p.routine("abs_diff"));
  auto vc = find_vc(vcs, "non_negative");
  for (std::int64_t x = -3; x <= 3; ++x)
    for (std::int64_t y = -3; y <= 3; ++y)
      EXPECT_FALSE(falsified_by(vc, {{"x", Value::of_int(x)}, {"y", Value::of_int(y)}}));
}

TEST(Vcgen, ConcreteEvaluationOfLoopFreeFailure)
{
  TypedProgram p = load("faults/a01_twice.ec");
  auto vc = find_vc(generate_vcs(p, p.routine("twice")), "doubled");
  EXPECT_TRUE(falsified_by(vc, {{"x", Value::of_int(1)}}));
  EXPECT_FALSE(falsified_by(vc, {{"x", Value::of_int(0)}}));
  EXPECT_FALSE(has_havoc(vc));
}

TEST(Vcgen, LoopsIntroduceHavocSymbols)
{
  TypedProgram p = load("max.ec");
  auto vc = find_vc(generate_vcs(p, p.routine("max")), "is_max");
  EXPECT_TRUE(has_havoc(vc));
  EXPECT_FALSE(vc.path_context.empty());
}

TEST(Vcgen, TextbookWeakestPrecondition)
{
  TypedProgram p = typed("f (x: INTEGER): INTEGER local y: INTEGER do y := x + 1 Result := 2 * y end");
  const Routine& r = p.routine("f");
  ExprPtr q        = parse_expression("Result > 0");
  EXPECT_EQ(print_expr(wp(p, r.body, q)), "2 * (x + 1) > 0");
}

TEST(Vcgen, LoopWithoutInvariantIsRejected)
{
  TypedProgram p = typed(R"(
f (n: INTEGER): INTEGER
	local
		i: INTEGER
	do
		from
			i := 0
		until
			i >= n
		loop
			i := i + 1
		end
	end
)");
  EXPECT_THROW(generate_vcs(p, p.routine("f")), MissingInvariant);
}

TEST(Vcgen, AssumeContextAddsAssumption)
{
  TypedProgram p = load("faults/a01_twice.ec");
  auto vc = find_vc(generate_vcs(p, p.routine("twice")), "doubled");
  auto narrowed  = assume_context(vc, parse_expression("x = 0"));
  EXPECT_EQ(narrowed.assumptions.size(), vc.assumptions.size() + 1);
  EXPECT_FALSE(falsified_by(narrowed, {{"x", Value::of_int(1)}}));
}

TEST(Vcgen, CalleeContractsSummarizeCalls)
{
  TypedProgram p = load("weak.ec");
  auto vcs       = generate_vcs(p, p.routine("use"));
  bool pre       = false;
  for (const auto& vc : vcs) pre = pre || vc.kind == VcKind::PostconditionClause;
  EXPECT_TRUE(pre);
  EXPECT_TRUE(has_havoc(find_vc(vcs, "same_size")));
}
