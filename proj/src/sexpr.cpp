#include "contraverify/sexpr.hpp"

#include <cctype>

namespace contraverify {

std::string
SExpr::to_string() const
{
  if (atom) return text;
  std::string s = "(";
  for (std::size_t i = 0; i < items.size(); ++i)
  {
    if (i) s += " ";
    s += items[i].to_string();
  }
  return s + ")";
}

namespace {

class Reader
{
 public:
  explicit Reader(std::string_view t) : d_text(t) {}

  void skip()
  {
    while (d_pos < d_text.size())
    {
      char c = d_text[d_pos];
      if (std::isspace(static_cast<unsigned char>(c)))
        ++d_pos;
      else if (c == ';')
        while (d_pos < d_text.size() && d_text[d_pos] != '\n') ++d_pos;
      else
        break;
    }
  }

  SExpr read()
  {
    skip();
    if (d_pos >= d_text.size()) throw SExprParseError("unexpected end of s-expression");
    char c = d_text[d_pos];
    if (c == ')') throw SExprParseError("unbalanced ')'");
    if (c == '(')
    {
      ++d_pos;
      SExpr list;
      list.atom = false;
      while (true)
      {
        skip();
        if (d_pos >= d_text.size()) throw SExprParseError("unterminated list");
        if (d_text[d_pos] == ')')
        {
          ++d_pos;
          return list;
        }
        list.items.push_back(read());
      }
    }
    SExpr a;
    if (c == '|')
    {
      std::size_t end = d_text.find('|', d_pos + 1);
      if (end == std::string_view::npos) throw SExprParseError("unterminated |symbol|");
      a.text = std::string(d_text.substr(d_pos + 1, end - d_pos - 1));
      d_pos  = end + 1;
      return a;
    }
    if (c == '"')
    {
      std::size_t end = d_pos + 1;
      while (end < d_text.size())
      {
        if (d_text[end] == '"')
        {
          if (end + 1 < d_text.size() && d_text[end + 1] == '"')
          {
            end += 2;
            continue;
          }
          break;
        }
        ++end;
      }
      if (end >= d_text.size()) throw SExprParseError("unterminated string");
      a.text = std::string(d_text.substr(d_pos, end - d_pos + 1));
      d_pos  = end + 1;
      return a;
    }
    std::size_t start = d_pos;
    while (d_pos < d_text.size())
    {
      char ch = d_text[d_pos];
      if (std::isspace(static_cast<unsigned char>(ch)) || ch == '(' || ch == ')') break;
      ++d_pos;
    }
    a.text = std::string(d_text.substr(start, d_pos - start));
    return a;
  }

  bool at_end()
  {
    skip();
    return d_pos >= d_text.size();
  }

 private:
  std::string_view d_text;
  std::size_t d_pos = 0;
};

}  // namespace

SExpr
parse_sexpr(std::string_view text)
{
  Reader r(text);
  SExpr e = r.read();
  if (!r.at_end()) throw SExprParseError("trailing input after s-expression");
  return e;
}

std::size_t
complete_response_length(std::string_view text)
{
  std::size_t i = 0;
  while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  if (i >= text.size()) return 0;
  if (text[i] != '(')
  {
    std::size_t nl = text.find('\n', i);
    return nl == std::string_view::npos ? 0 : nl + 1;
  }
  int depth     = 0;
  bool in_bar   = false;
  bool in_quote = false;
  for (; i < text.size(); ++i)
  {
    char c = text[i];
    if (in_bar)
    {
      if (c == '|') in_bar = false;
      continue;
    }
    if (in_quote)
    {
      if (c == '"') in_quote = false;
      continue;
    }
    if (c == '|')
      in_bar = true;
    else if (c == '"')
      in_quote = true;
    else if (c == '(')
      ++depth;
    else if (c == ')' && --depth == 0)
      return i + 1;
  }
  return 0;
}

}  // namespace contraverify
