#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "contraverify/ast.hpp"

namespace contraverify {

class ParseError : public std::runtime_error
{
 public:
  ParseError(SourceSpan where, std::vector<std::string> expected, std::string found);

  SourceSpan where() const { return d_where; }
  const std::vector<std::string>& expected() const { return d_expected; }
  const std::string& found() const { return d_found; }

 private:
  SourceSpan d_where;
  std::vector<std::string> d_expected;
  std::string d_found;
};

/// Parses one `.ec` program. A leading `class NAME` header is optional; a
/// headerless file yields a program named `default_name`.
Program parse_program(std::string_view source, std::string default_name = "MAIN");

/// Parses a standalone expression (used by tests and the fix report).
ExprPtr parse_expression(std::string_view source);

}  // namespace contraverify
