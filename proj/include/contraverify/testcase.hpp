#pragma once

#include <map>
#include <string>
#include <vector>

#include "contraverify/value.hpp"

namespace contraverify {

struct Expectation
{
  bool violation = false;
  /// Display label of the expected clause (see `display_label`).
  std::string label;

  bool operator==(const Expectation&) const = default;
};

struct TestOrigin
{
  enum class Kind
  {
    ProofFailure,
    SeededBranch,
    Mcdc,
    LoopUnroll,
  };

  Kind kind = Kind::ProofFailure;
  int branch = -1;
  int decision = -1;
  int condition = -1;
  bool polarity = false;
  int loop = -1;
  int iterations = -1;

  /// Short tag used in file names and manifests, e.g. `branch3`, `mcdc1c0t`.
  std::string tag() const;
  bool operator==(const TestOrigin&) const = default;
};

struct TestCase
{
  std::string routine;
  ArgBinding binding;
  Expectation expected;
  TestOrigin origin;
  bool minimized = false;
};

struct TestSuite
{
  std::vector<TestCase> tests;
  std::map<std::string, std::string> provenance;

  /// Appends unless a test with the same (routine, binding) exists; the
  /// earliest origin wins. Returns whether the test was added.
  bool add(TestCase t);
};

}  // namespace contraverify
