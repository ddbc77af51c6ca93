#include "contraverify/parser.hpp"

#include <cctype>
#include <charconv>
#include <set>

namespace contraverify {

namespace {

std::string
describe(const SourceSpan& where,
         const std::vector<std::string>& expected,
         const std::string& found)
{
  std::string msg = "parse error at " + to_string(where) + ": expected ";
  for (std::size_t i = 0; i < expected.size(); ++i)
  {
    if (i > 0) msg += i + 1 == expected.size() ? " or " : ", ";
    msg += expected[i];
  }
  msg += ", found " + found;
  return msg;
}

}  // namespace

ParseError::ParseError(SourceSpan where,
                       std::vector<std::string> expected,
                       std::string found)
    : std::runtime_error(describe(where, expected, found)),
      d_where(where),
      d_expected(std::move(expected)),
      d_found(std::move(found))
{
}

namespace {

enum class Tok
{
  End,
  Ident,
  Int,
  Keyword,
  Symbol,
};

struct Token
{
  Tok kind = Tok::End;
  std::string text;
  SourceSpan span;
};

const std::set<std::string, std::less<>> k_keywords = {
    "class",    "feature", "end",    "require", "ensure",  "local",
    "do",       "if",      "then",   "elseif",  "else",    "from",
    "until",    "invariant", "variant", "loop", "check",   "create",
    "and",      "or",      "not",    "implies", "old",     "True",
    "False",    "Result",  "for_all", "exists", "in",      "INTEGER",
    "BOOLEAN",  "ARRAY",
};

class Lexer
{
 public:
  explicit Lexer(std::string_view src) : d_src(src) {}

  std::vector<Token> run()
  {
    std::vector<Token> out;
    for (;;)
    {
      skip_space();
      Token t;
      t.span = {d_line, d_col};
      if (d_pos >= d_src.size())
      {
        t.kind = Tok::End;
        out.push_back(t);
        return out;
      }
      char c = d_src[d_pos];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
      {
        std::size_t start = d_pos;
        while (d_pos < d_src.size()
               && (std::isalnum(static_cast<unsigned char>(d_src[d_pos]))
                   || d_src[d_pos] == '_'))
          advance();
        t.text = std::string(d_src.substr(start, d_pos - start));
        t.kind = k_keywords.count(t.text) ? Tok::Keyword : Tok::Ident;
      }
      else if (std::isdigit(static_cast<unsigned char>(c)))
      {
        std::size_t start = d_pos;
        while (d_pos < d_src.size()
               && std::isdigit(static_cast<unsigned char>(d_src[d_pos])))
          advance();
        t.text = std::string(d_src.substr(start, d_pos - start));
        t.kind = Tok::Int;
      }
      else
      {
        static const char* k_symbols[] = {":=", "..", "//", "\\\\", "/=", "<=",
                                          ">=", "(",  ")",  "[",    "]",  ",",
                                          ";",  ":",  ".",  "+",    "-",  "*",
                                          "=",  "<",  ">"};
        bool matched = false;
        for (const char* sym : k_symbols)
        {
          std::string_view s(sym);
          if (d_src.substr(d_pos, s.size()) == s)
          {
            for (std::size_t i = 0; i < s.size(); ++i) advance();
            t.text  = std::string(s);
            t.kind  = Tok::Symbol;
            matched = true;
            break;
          }
        }
        if (!matched)
          throw ParseError(t.span, {"token"}, std::string("'") + c + "'");
      }
      out.push_back(std::move(t));
    }
  }

 private:
  void advance()
  {
    if (d_src[d_pos] == '\n')
    {
      ++d_line;
      d_col = 1;
    }
    else
    {
      ++d_col;
    }
    ++d_pos;
  }

  void skip_space()
  {
    while (d_pos < d_src.size())
    {
      char c = d_src[d_pos];
      if (std::isspace(static_cast<unsigned char>(c)))
      {
        advance();
      }
      else if (c == '-' && d_pos + 1 < d_src.size() && d_src[d_pos + 1] == '-')
      {
        while (d_pos < d_src.size() && d_src[d_pos] != '\n') advance();
      }
      else
      {
        break;
      }
    }
  }

  std::string_view d_src;
  std::size_t d_pos = 0;
  int d_line        = 1;
  int d_col         = 1;
};

class Parser
{
 public:
  explicit Parser(std::vector<Token> toks) : d_toks(std::move(toks)) {}

  Program program(std::string default_name)
  {
    Program p;
    p.name         = std::move(default_name);
    bool has_class = false;
    if (accept_kw("class"))
    {
      has_class = true;
      p.name    = expect_ident("class name").text;
    }
    accept_kw("feature");
    while (peek().kind == Tok::Ident)
    {
      p.routines.push_back(routine());
      accept_kw("feature");
    }
    if (has_class) expect_kw("end");
    if (peek().kind != Tok::End)
    {
      fail(has_class ? std::vector<std::string>{"routine", "end of file"}
                     : std::vector<std::string>{"routine", "end of file"});
    }
    return p;
  }

  ExprPtr standalone_expression()
  {
    ExprPtr e = expression();
    if (peek().kind != Tok::End) fail({"end of expression"});
    return e;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const
  {
    std::size_t i = std::min(d_pos + ahead, d_toks.size() - 1);
    return d_toks[i];
  }

  Token next() { return d_toks[std::min(d_pos++, d_toks.size() - 1)]; }

  bool is_kw(const char* kw, std::size_t ahead = 0) const
  {
    return peek(ahead).kind == Tok::Keyword && peek(ahead).text == kw;
  }

  bool is_sym(const char* sym, std::size_t ahead = 0) const
  {
    return peek(ahead).kind == Tok::Symbol && peek(ahead).text == sym;
  }

  bool accept_kw(const char* kw)
  {
    if (!is_kw(kw)) return false;
    ++d_pos;
    return true;
  }

  bool accept_sym(const char* sym)
  {
    if (!is_sym(sym)) return false;
    ++d_pos;
    return true;
  }

  [[noreturn]] void fail(std::vector<std::string> expected) const
  {
    const Token& t = peek();
    std::string found =
        t.kind == Tok::End ? std::string("end of file") : "'" + t.text + "'";
    throw ParseError(t.span, std::move(expected), found);
  }

  Token expect_kw(const char* kw)
  {
    if (!is_kw(kw)) fail({std::string("'") + kw + "'"});
    return next();
  }

  Token expect_sym(const char* sym)
  {
    if (!is_sym(sym)) fail({std::string("'") + sym + "'"});
    return next();
  }

  Token expect_ident(const char* what)
  {
    if (peek().kind != Tok::Ident) fail({what});
    return next();
  }

  /* ---------------------------------------------------------------------- */

  Type type()
  {
    if (accept_kw("INTEGER")) return Type::Integer;
    if (accept_kw("BOOLEAN")) return Type::Boolean;
    if (accept_kw("ARRAY"))
    {
      expect_sym("[");
      expect_kw("INTEGER");
      expect_sym("]");
      return Type::IntArray;
    }
    fail({"INTEGER", "BOOLEAN", "ARRAY [INTEGER]"});
  }

  void declarations(std::vector<VarDecl>& out, bool semicolons_required)
  {
    for (;;)
    {
      std::vector<std::string> names;
      names.push_back(expect_ident("identifier").text);
      while (accept_sym(",")) names.push_back(expect_ident("identifier").text);
      expect_sym(":");
      Type t = type();
      for (auto& n : names) out.push_back({std::move(n), t});
      bool sep = accept_sym(";");
      if (semicolons_required && !sep) return;
      // In `local` sections, declarations end at the first non-identifier.
      if (!sep && !(peek().kind == Tok::Ident
                    && (is_sym(":", 1) || is_sym(",", 1))))
        return;
      if (sep && peek().kind != Tok::Ident) return;
    }
  }

  Routine routine()
  {
    Routine r;
    Token name = expect_ident("routine name");
    r.name     = name.text;
    r.span     = name.span;
    if (accept_sym("("))
    {
      if (!is_sym(")")) declarations(r.args, true);
      expect_sym(")");
    }
    if (accept_sym(":")) r.result_type = type();
    if (accept_kw("require")) r.precondition = clauses();
    if (accept_kw("local"))
    {
      if (peek().kind == Tok::Ident) declarations(r.locals, false);
    }
    expect_kw("do");
    r.body = block();
    if (accept_kw("ensure")) r.postcondition = clauses();
    expect_kw("end");
    return r;
  }

  bool starts_expression() const
  {
    const Token& t = peek();
    if (t.kind == Tok::Ident || t.kind == Tok::Int) return true;
    if (t.kind == Tok::Symbol) return t.text == "(" || t.text == "-";
    if (t.kind == Tok::Keyword)
    {
      return t.text == "not" || t.text == "old" || t.text == "True"
             || t.text == "False" || t.text == "Result" || t.text == "for_all"
             || t.text == "exists";
    }
    return false;
  }

  Clause clause()
  {
    Clause c;
    c.span = peek().span;
    if (peek().kind == Tok::Ident && is_sym(":", 1))
    {
      c.label = next().text;
      next();
    }
    c.expr = expression();
    accept_sym(";");
    return c;
  }

  std::vector<Clause> clauses()
  {
    std::vector<Clause> out;
    while (starts_expression()) out.push_back(clause());
    return out;
  }

  Block block()
  {
    Block b;
    for (;;)
    {
      auto s = statement();
      if (!s) break;
      b.push_back(std::move(s));
      accept_sym(";");
    }
    return b;
  }

  StmtPtr statement()
  {
    const Token& t = peek();
    SourceSpan at  = t.span;
    if (t.kind == Tok::Keyword)
    {
      if (t.text == "if") return if_statement();
      if (t.text == "from") return loop_statement();
      if (t.text == "check")
      {
        next();
        CheckStmt c;
        c.assertion = clause();
        expect_kw("end");
        return make_stmt(std::move(c), at);
      }
      if (t.text == "create")
      {
        next();
        CreateStmt c;
        c.array  = expect_ident("array name").text;
        expect_sym(".");
        Token make = expect_ident("'make'");
        if (make.text != "make")
          throw ParseError(make.span, {"'make'"}, "'" + make.text + "'");
        expect_sym("(");
        c.count = expression();
        expect_sym(")");
        return make_stmt(std::move(c), at);
      }
      if (t.text == "Result")
      {
        next();
        return assignment_tail("Result", at);
      }
      return nullptr;
    }
    if (t.kind != Tok::Ident) return nullptr;
    std::string name = next().text;
    if (accept_sym("["))
    {
      ArrayAssignStmt s;
      s.array = name;
      s.index = expression();
      expect_sym("]");
      expect_sym(":=");
      s.value = expression();
      return make_stmt(std::move(s), at);
    }
    if (is_sym("("))
    {
      CallStmt c;
      c.callee = name;
      c.args   = call_args();
      return make_stmt(std::move(c), at);
    }
    return assignment_tail(std::move(name), at);
  }

  StmtPtr assignment_tail(std::string target, SourceSpan at)
  {
    expect_sym(":=");
    ExprPtr value = expression();
    if (value->kind == ExprKind::Call)
    {
      CallStmt c;
      c.callee = value->name;
      c.args   = value->operands;
      c.target = std::move(target);
      return make_stmt(std::move(c), at);
    }
    return make_stmt(AssignStmt{std::move(target), std::move(value)}, at);
  }

  std::vector<ExprPtr> call_args()
  {
    std::vector<ExprPtr> args;
    expect_sym("(");
    if (!is_sym(")"))
    {
      args.push_back(expression());
      while (accept_sym(",")) args.push_back(expression());
    }
    expect_sym(")");
    return args;
  }

  StmtPtr if_statement()
  {
    SourceSpan at = next().span;
    IfStmt s;
    GuardedBlock first;
    first.guard = expression();
    expect_kw("then");
    first.body = block();
    s.arms.push_back(std::move(first));
    while (accept_kw("elseif"))
    {
      GuardedBlock arm;
      arm.guard = expression();
      expect_kw("then");
      arm.body = block();
      s.arms.push_back(std::move(arm));
    }
    if (accept_kw("else")) s.else_block = block();
    expect_kw("end");
    return make_stmt(std::move(s), at);
  }

  StmtPtr loop_statement()
  {
    SourceSpan at = next().span;
    LoopStmt s;
    s.init        = block();
    bool have_inv = false, have_var = false, have_until = false;
    while (!is_kw("loop"))
    {
      if (!have_inv && accept_kw("invariant"))
      {
        have_inv    = true;
        s.invariant = clauses();
      }
      else if (!have_var && accept_kw("variant"))
      {
        have_var  = true;
        s.variant = clause();
      }
      else if (!have_until && accept_kw("until"))
      {
        have_until = true;
        s.exit     = expression();
      }
      else
      {
        std::vector<std::string> exp;
        if (!have_inv) exp.push_back("'invariant'");
        if (!have_var) exp.push_back("'variant'");
        if (!have_until) exp.push_back("'until'");
        if (have_until) exp.push_back("'loop'");
        fail(exp);
      }
    }
    if (!have_until) fail({"'until'"});
    next();
    s.body = block();
    if (!have_var && accept_kw("variant")) s.variant = clause();
    expect_kw("end");
    return make_stmt(std::move(s), at);
  }

  /* ---------------------------------------------------------------------- */
  /* Expressions, lowest to highest precedence:                             */
  /*   implies < or < and < not < relational < additive < multiplicative    */
  /*   < unary minus < postfix/primary                                      */

  ExprPtr expression() { return implies_expr(); }

  ExprPtr rhs_after(const Token& op, ExprPtr (Parser::*sub)())
  {
    if (!starts_expression())
      throw ParseError(op.span,
                       {"expression after '" + op.text + "'"},
                       peek().kind == Tok::End ? "end of file"
                                               : "'" + peek().text + "'");
    return (this->*sub)();
  }

  ExprPtr implies_expr()
  {
    ExprPtr lhs = or_expr();
    if (is_kw("implies"))
    {
      Token op    = next();
      ExprPtr rhs = rhs_after(op, &Parser::implies_expr);
      return ex::binary(BinOp::Implies, lhs, rhs, op.span);
    }
    return lhs;
  }

  ExprPtr or_expr()
  {
    ExprPtr lhs = and_expr();
    while (is_kw("or"))
    {
      Token op = next();
      if (is_kw("else")) next();
      ExprPtr rhs = rhs_after(op, &Parser::and_expr);
      lhs         = ex::binary(BinOp::Or, lhs, rhs, op.span);
    }
    return lhs;
  }

  ExprPtr and_expr()
  {
    ExprPtr lhs = not_expr();
    while (is_kw("and"))
    {
      Token op = next();
      if (is_kw("then")) next();
      ExprPtr rhs = rhs_after(op, &Parser::not_expr);
      lhs         = ex::binary(BinOp::And, lhs, rhs, op.span);
    }
    return lhs;
  }

  ExprPtr not_expr()
  {
    if (is_kw("not"))
    {
      Token op = next();
      return ex::unary(UnOp::Not, rhs_after(op, &Parser::not_expr), op.span);
    }
    return relational();
  }

  ExprPtr relational()
  {
    ExprPtr lhs = additive();
    static const std::pair<const char*, BinOp> k_ops[] = {
        {"=", BinOp::Eq},
        {"/=", BinOp::Ne},
        {"<", BinOp::Lt},
        {"<=", BinOp::Le},
        {">", BinOp::Gt},
        {">=", BinOp::Ge},
    };
    for (auto [sym, op] : k_ops)
    {
      if (is_sym(sym))
      {
        Token t = next();
        return ex::binary(op, lhs, rhs_after(t, &Parser::additive), t.span);
      }
    }
    return lhs;
  }

  ExprPtr additive()
  {
    ExprPtr lhs = multiplicative();
    for (;;)
    {
      BinOp op;
      if (is_sym("+"))
        op = BinOp::Add;
      else if (is_sym("-"))
        op = BinOp::Sub;
      else
        return lhs;
      Token t = next();
      lhs     = ex::binary(op, lhs, rhs_after(t, &Parser::multiplicative), t.span);
    }
  }

  ExprPtr multiplicative()
  {
    ExprPtr lhs = unary_minus();
    for (;;)
    {
      BinOp op;
      if (is_sym("*"))
        op = BinOp::Mul;
      else if (is_sym("//"))
        op = BinOp::Div;
      else if (is_sym("\\\\"))
        op = BinOp::Mod;
      else
        return lhs;
      Token t = next();
      lhs     = ex::binary(op, lhs, rhs_after(t, &Parser::unary_minus), t.span);
    }
  }

  ExprPtr unary_minus()
  {
    if (is_sym("-"))
    {
      Token t = next();
      if (peek().kind == Tok::Int && !is_sym("[", 1) && !is_sym(".", 1))
      {
        // Negative literals fold into a single node so printed values reparse
        // to the same tree.
        ExprPtr lit = primary();
        return ex::int_lit(-lit->value, t.span);
      }
      return ex::unary(UnOp::Neg, rhs_after(t, &Parser::unary_minus), t.span);
    }
    return postfix();
  }

  ExprPtr postfix()
  {
    ExprPtr e = primary();
    for (;;)
    {
      if (is_sym("["))
      {
        Token t     = next();
        ExprPtr idx = expression();
        expect_sym("]");
        e = ex::read(e, idx, t.span);
      }
      else if (is_sym("."))
      {
        Token t        = next();
        Token selector = expect_ident("'count'");
        if (selector.text != "count")
          throw ParseError(selector.span, {"'count'"}, "'" + selector.text + "'");
        e = ex::count(e, t.span);
      }
      else
      {
        return e;
      }
    }
  }

  ExprPtr quantifier()
  {
    Token kw       = next();
    QuantKind kind = kw.text == "for_all" ? QuantKind::ForAll : QuantKind::Exists;
    std::string bound = expect_ident("bound variable").text;
    expect_kw("in");
    ExprPtr lo = additive();
    expect_sym("..");
    ExprPtr hi = additive();
    expect_sym(":");
    ExprPtr body = expression();
    return ex::quant(kind, std::move(bound), lo, hi, body, kw.span);
  }

  ExprPtr primary()
  {
    const Token& t = peek();
    SourceSpan at  = t.span;
    switch (t.kind)
    {
      case Tok::Int:
      {
        std::int64_t v = 0;
        auto [p, ec]   = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (ec != std::errc()) throw ParseError(at, {"64-bit integer literal"}, t.text);
        next();
        return ex::int_lit(v, at);
      }
      case Tok::Ident:
      {
        std::string name = next().text;
        if (is_sym("(")) return ex::call(std::move(name), call_args(), at);
        return ex::var(std::move(name), Type::Unknown, at);
      }
      case Tok::Keyword:
        if (t.text == "True" || t.text == "False")
        {
          bool v = t.text == "True";
          next();
          return ex::bool_lit(v, at);
        }
        if (t.text == "Result")
        {
          next();
          return ex::var("Result", Type::Unknown, at);
        }
        if (t.text == "old")
        {
          Token op = next();
          return ex::old(rhs_after(op, &Parser::postfix), at);
        }
        if (t.text == "for_all" || t.text == "exists") return quantifier();
        break;
      case Tok::Symbol:
        if (t.text == "(")
        {
          next();
          ExprPtr e = expression();
          expect_sym(")");
          return e;
        }
        break;
      case Tok::End: break;
    }
    fail({"expression"});
  }

  std::vector<Token> d_toks;
  std::size_t d_pos = 0;
};

void
reject_nested_calls(const ExprPtr& e)
{
  if (!e) return;
  if (e->kind == ExprKind::Call)
    throw ParseError(e->span, {"routine call as a whole statement"}, "call to '" + e->name + "' inside an expression");
  for (const auto& op : e->operands) reject_nested_calls(op);
}

void
reject_nested_calls(const Block& block);

void
reject_nested_calls(const std::vector<Clause>& cs)
{
  for (const auto& c : cs) reject_nested_calls(c.expr);
}

void
reject_nested_calls(const Block& block)
{
  for (const auto& s : block)
  {
    if (auto* a = s->as<AssignStmt>()) reject_nested_calls(a->value);
    if (auto* a = s->as<ArrayAssignStmt>())
    {
      reject_nested_calls(a->index);
      reject_nested_calls(a->value);
    }
    if (auto* c = s->as<CallStmt>())
      for (const auto& arg : c->args) reject_nested_calls(arg);
    if (auto* c = s->as<CheckStmt>()) reject_nested_calls(c->assertion.expr);
    if (auto* c = s->as<CreateStmt>()) reject_nested_calls(c->count);
    if (auto* i = s->as<IfStmt>())
    {
      for (const auto& arm : i->arms)
      {
        reject_nested_calls(arm.guard);
        reject_nested_calls(arm.body);
      }
      if (i->else_block) reject_nested_calls(*i->else_block);
    }
    if (auto* l = s->as<LoopStmt>())
    {
      reject_nested_calls(l->init);
      reject_nested_calls(l->invariant);
      reject_nested_calls(l->exit);
      if (l->variant) reject_nested_calls(l->variant->expr);
      reject_nested_calls(l->body);
    }
  }
}

}  // namespace

Program
parse_program(std::string_view source, std::string default_name)
{
  Parser parser(Lexer(source).run());
  Program p = parser.program(std::move(default_name));
  for (const auto& r : p.routines)
  {
    reject_nested_calls(r.precondition);
    reject_nested_calls(r.postcondition);
    reject_nested_calls(r.body);
  }
  return p;
}

ExprPtr
parse_expression(std::string_view source)
{
  Parser parser(Lexer(source).run());
  ExprPtr e = parser.standalone_expression();
  reject_nested_calls(e);
  return e;
}

}  // namespace contraverify
