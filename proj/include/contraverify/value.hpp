#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "contraverify/ast.hpp"

namespace contraverify {

/// Runtime value: an integer, a boolean, or an integer array (count = size).
struct Value
{
  Type type = Type::Integer;
  std::int64_t integer = 0;
  bool boolean = false;
  std::vector<std::int64_t> cells;

  static Value of_int(std::int64_t v);
  static Value of_bool(bool v);
  static Value of_array(std::vector<std::int64_t> cells);
  static Value default_of(Type type);

  std::int64_t count() const { return static_cast<std::int64_t>(cells.size()); }

  bool operator==(const Value&) const = default;
};

std::string to_string(const Value& v);

/// Argument name -> value. Covers exactly the routine's arguments.
using ArgBinding = std::map<std::string, Value>;

std::string to_string(const ArgBinding& b, const Routine& r);

/// Euclidean division and remainder (remainder always non-negative), the
/// semantics shared by the interpreter and the SMT encoding.
std::int64_t euclid_div(std::int64_t a, std::int64_t b);
std::int64_t euclid_mod(std::int64_t a, std::int64_t b);

}  // namespace contraverify
