#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace contraverify {

/// S-expression as printed by SMT-LIB solvers. Atoms keep their text with
/// `|...|` quoting removed; string literals keep their quotes.
struct SExpr
{
  bool atom = true;
  std::string text;
  std::vector<SExpr> items;

  bool is(std::string_view s) const { return atom && text == s; }
  const SExpr& operator[](std::size_t i) const { return items.at(i); }
  std::size_t size() const { return items.size(); }
  std::string to_string() const;
};

class SExprParseError : public std::runtime_error
{
 public:
  using std::runtime_error::runtime_error;
};

/// Parses exactly one s-expression (surrounding whitespace allowed).
SExpr parse_sexpr(std::string_view text);

/// Length of the first complete s-expression or bare line in `text`, or 0
/// when more input is needed. Used to frame solver responses.
std::size_t complete_response_length(std::string_view text);

}  // namespace contraverify
