#pragma once

#include <optional>
#include <string>
#include <vector>

#include "contraverify/ast.hpp"

namespace contraverify {

struct TypeError
{
  SourceSpan where;
  std::string routine;
  std::string message;

  std::string to_string() const;
};

/// A program whose expressions all carry their static type. Only `typecheck`
/// (and the instrumentation passes, which preserve typing) construct one.
class TypedProgram
{
 public:
  const Program& program() const { return d_program; }
  const Routine& routine(const std::string& name) const;
  const Routine* find(const std::string& name) const { return d_program.find(name); }

 private:
  explicit TypedProgram(Program p) : d_program(std::move(p)) {}

  friend struct TypecheckResult typecheck(const Program& p);
  friend TypedProgram assume_typed(Program p);

  Program d_program;
};

struct TypecheckResult
{
  std::optional<TypedProgram> program;
  std::vector<TypeError> errors;

  bool ok() const { return program.has_value(); }
};

/// Checks every routine and reports all violations (no fail-fast).
TypecheckResult typecheck(const Program& p);

/// Wraps a program produced by a type-preserving transformation of a
/// TypedProgram (instrumentation, fix application). Re-annotates types.
TypedProgram assume_typed(Program p);

}  // namespace contraverify
