#include <gtest/gtest.h>

#include "../support.hpp"
#include "contraverify/parser.hpp"
#include "contraverify/printer.hpp"
#include "contraverify/typecheck.hpp"

using namespace contraverify;
using namespace testsupport;

TEST(Parser, PrintThenReparseIsIdentityOnCorpus)
{
  std::vector<std::string> files = {"max.ec", "max_fixed.ec", "gap.ec", "weak.ec", "large.ec"};
  for (const auto& d : {"sc", "mcdc", "loops", "faults"})
    for (const auto& f : corpus_files(d)) files.push_back(f);
  for (const auto& f : files)
  {
    Program p     = parse_program(slurp(corpus(f)));
    Program again = parse_program(print_program(p));
    EXPECT_TRUE(equal(p, again)) << f;
  }
}

TEST(Parser, ReportsLocationOfSyntaxError)
{
  try
  {
    parse_program("class X feature f do x := end end");
    FAIL() << "expected a parse error";
  }
  catch (const ParseError& e)
  {
    EXPECT_EQ(e.where().line, 1);
    EXPECT_EQ(e.where().column, 27);
  }
}

TEST(Parser, NotBindsLooserThanComparison)
{
  ExprPtr e = parse_expression("not x = 0");
  ASSERT_EQ(e->kind, ExprKind::Unary);
  EXPECT_EQ(e->operands[0]->kind, ExprKind::Binary);
  EXPECT_EQ(print_expr(e), "not x = 0");
}

TEST(Parser, ImpliesIsRightAssociative)
{
  ExprPtr e = parse_expression("a implies b implies c");
  ASSERT_EQ(e->kind, ExprKind::Binary);
  EXPECT_EQ(e->operands[0]->kind, ExprKind::Var);
  EXPECT_EQ(print_expr(parse_expression("(a implies b) implies c")), "(a implies b) implies c");
}

TEST(Parser, HeaderlessProgramUsesDefaultName)
{
  Program p = parse_program("f (x: INTEGER): INTEGER do Result := x end", "DEFAULTED");
  EXPECT_EQ(p.name, "DEFAULTED");
  ASSERT_EQ(p.routines.size(), 1u);
  EXPECT_EQ(p.routines[0].args.size(), 1u);
}

TEST(Typecheck, CollectsEveryError)
{
  auto tc = typecheck(parse_program(R"(
f (x: INTEGER): INTEGER
	do
		Result := True
		y := 1
	end
)"));
  EXPECT_FALSE(tc.ok());
  EXPECT_GE(tc.errors.size(), 2u);
}

TEST(Typecheck, AcceptsCorpus)
{
  for (const auto& f : corpus_files("sc")) EXPECT_NO_THROW(load(f)) << f;
}

TEST(Typecheck, RejectsArityMismatch)
{
  auto tc = typecheck(parse_program(R"(
g (x: INTEGER): INTEGER do Result := x end
f (x: INTEGER): INTEGER do Result := g (x, x) end
)"));
  ASSERT_FALSE(tc.ok());
  EXPECT_NE(tc.errors[0].to_string().find("expects 1"), std::string::npos) << tc.errors[0].to_string();
}
