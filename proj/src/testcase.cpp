#include "contraverify/testcase.hpp"

namespace contraverify {

std::string
TestOrigin::tag() const
{
  switch (kind)
  {
    case Kind::ProofFailure: return "proof";
    case Kind::SeededBranch: return "branch" + std::to_string(branch);
    case Kind::Mcdc:
      return "mcdc" + std::to_string(decision) + "c" + std::to_string(condition)
             + (polarity ? "t" : "f");
    case Kind::LoopUnroll:
      return "loop" + std::to_string(loop) + "k" + std::to_string(iterations);
  }
  return "test";
}

bool
TestSuite::add(TestCase t)
{
  for (const auto& existing : tests)
  {
    if (existing.routine == t.routine && existing.binding == t.binding) return false;
  }
  tests.push_back(std::move(t));
  return true;
}

}  // namespace contraverify
