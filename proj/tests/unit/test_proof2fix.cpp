#include <gtest/gtest.h>

#include "../support.hpp"
#include "contraverify/parser.hpp"
#include "contraverify/printer.hpp"
#include "contraverify/proof2fix.hpp"

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

FixCandidate
max_exit_fix(const TypedProgram& p, const std::string& replacement)
{
  FixCandidate f;
  f.kind        = FixCandidate::Kind::ConditionReplace;
  f.routine     = "max";
  f.site        = 0;
  f.replacement = parse_expression(replacement);
  auto vc       = vc_of(p, "max", "is_max");
  for (const auto& c : synthesize_fixes(p.routine("max"), {vc, SolverVerdict::Kind::Falsified, ""}, {}, {}))
    if (c.kind == FixCandidate::Kind::ConditionReplace && print_expr(c.replacement) == replacement) return c;
  throw std::runtime_error("candidate not generated: " + replacement);
}

}  // namespace

TEST(Invariants, ExactFitPatterns)
{
  std::vector<Term> terms = {{"x", nullptr, true}, {"y", nullptr, true}, {"k", nullptr, true}};
  std::vector<Observation> obs = {{{"x", 1}, {"y", 3}, {"k", 7}}, {{"x", 2}, {"y", 5}, {"k", 7}}, {{"x", 4}, {"y", 9}, {"k", 7}}};
  auto invs = infer_invariants(obs, terms);
  bool constant = false, linear = false;
  for (const auto& i : invs)
  {
    for (const auto& o : obs) EXPECT_TRUE(i.holds(o)) << i.text();
    constant = constant || (i.pattern == CexInvariant::Pattern::Constant && i.lhs == "k" && i.b == 7);
    linear   = linear || (i.pattern == CexInvariant::Pattern::Linear && i.a == 2 && i.b == 1);
  }
  EXPECT_TRUE(constant);
  EXPECT_TRUE(linear);
}

TEST(Invariants, NoFitNoInvariant)
{
  std::vector<Term> terms      = {{"x", nullptr, true}, {"y", nullptr, true}};
  std::vector<Observation> obs = {{{"x", 1}, {"y", 1}}, {{"x", 2}, {"y", 4}}, {{"x", 3}, {"y", 9}}};
  for (const auto& i : infer_invariants(obs, terms))
    EXPECT_NE(i.pattern, CexInvariant::Pattern::Linear) << i.text();
}

TEST(Candidates, MaxExitConditionMutations)
{
  TypedProgram p = load("max.ec");
  auto vc        = vc_of(p, "max", "is_max");
  auto cands     = synthesize_fixes(p.routine("max"), {vc, SolverVerdict::Kind::Falsified, ""}, {}, {});
  std::set<std::string> texts;
  for (const auto& c : cands) texts.insert(print_expr(c.replacement));
  EXPECT_TRUE(texts.count("i > a.count"));
  EXPECT_LE(cands.size(), static_cast<std::size_t>(kDefaultCandidateCap));
  for (std::size_t i = 1; i < cands.size(); ++i)
    EXPECT_LE(edit_distance(cands[i - 1].original, cands[i - 1].replacement),
              edit_distance(cands[i].original, cands[i].replacement) + 100);
}

TEST(Candidates, EditDistance)
{
  auto a = parse_expression("i >= a.count");
  EXPECT_EQ(edit_distance(a, parse_expression("i >= a.count")), 0);
  EXPECT_LT(edit_distance(a, parse_expression("i > a.count")), edit_distance(a, parse_expression("i >= a.count + 1")));
}

TEST(Validation, RightFixIsValidWrongFixIsNot)
{
  TypedProgram p = load("max.ec");
  EXPECT_EQ(validate_fix(p, max_exit_fix(p, "i > a.count"), solver()).kind, ValidationVerdict::Kind::Valid);
  EXPECT_NE(validate_fix(p, max_exit_fix(p, "i = a.count"), solver()).kind, ValidationVerdict::Kind::Valid);
}

TEST(Validation, FailingTestsShortCircuitTheProver)
{
  TypedProgram p = load("max.ec");
  ValidationContext ctx;
  ctx.routine       = "max";
  ctx.kind          = VcKind::PostconditionClause;
  ctx.label         = "is_max";
  ctx.failing_tests = {{"max", {{"a", Value::of_array({0, 1})}}, {true, "is_max"}, {}, true}};
  auto v            = validate_fix(p, max_exit_fix(p, "i = a.count"), solver(), ctx);
  EXPECT_EQ(v.kind, ValidationVerdict::Kind::StillFails);
  EXPECT_TRUE(v.by_tests);
  EXPECT_EQ(v.solver_calls, 0);
}

TEST(Ranking, ImplementationBeforeContract)
{
  FixAttempt impl, contract;
  impl.candidate.kind      = FixCandidate::Kind::ConditionReplace;
  impl.verdict.kind        = ValidationVerdict::Kind::Valid;
  impl.edit_distance       = 5;
  contract.candidate.kind  = FixCandidate::Kind::PreconditionStrengthen;
  contract.verdict.kind    = ValidationVerdict::Kind::Valid;
  contract.edit_distance   = 1;
  FixAttempt invalid       = impl;
  invalid.verdict.kind     = ValidationVerdict::Kind::StillFails;
  auto ranked              = rank_fixes({contract, invalid, impl});
  ASSERT_EQ(ranked.size(), 2u);
  EXPECT_TRUE(ranked[0].candidate.implementation());
  EXPECT_EQ(ranked[0].rank, 1);
  EXPECT_EQ(ranked[1].rank, 2);
}

TEST(Session, TwiceGetsInvariantDrivenFix)
{
  TypedProgram p = load("faults/a01_twice.ec");
  FixOptions o;
  o.solver  = solver();
  auto rep  = fix_program(p, o);
  ASSERT_EQ(rep.failures.size(), 1u);
  ASSERT_FALSE(rep.failures[0].ranked.empty());
  EXPECT_EQ(print_expr(rep.failures[0].ranked[0].candidate.replacement), "2 * x");
  EXPECT_NE(rep.failures[0].ranked[0].patch.find("+"), std::string::npos);
}

TEST(Session, ContractWeaknessGetsDiagnostic)
{
  TypedProgram p = load("weak.ec");
  FixOptions o;
  o.solver = solver();
  auto rep = fix_program(p, o);
  ASSERT_EQ(rep.failures.size(), 1u);
  EXPECT_TRUE(rep.failures[0].ranked.empty());
  ASSERT_TRUE(rep.failures[0].diagnostic);
  EXPECT_NE(rep.failures[0].diagnostic->find("too weak"), std::string::npos);
  EXPECT_EQ(rep.failures[0].reproduced, 0);
}

TEST(Session, CorrectProgramHasEmptyReport)
{
  FixOptions o;
  o.solver = solver();
  EXPECT_TRUE(fix_program(load("max_fixed.ec"), o).failures.empty());
}

TEST(Diff, RemovedLinesPrecedeAdded)
{
  std::string d = unified_diff("a\nb\nc\n", "a\nx\nc\n", "f");
  auto minus    = d.find("-b");
  auto plus     = d.find("+x");
  ASSERT_NE(minus, std::string::npos);
  ASSERT_NE(plus, std::string::npos);
  EXPECT_LT(minus, plus);
}
