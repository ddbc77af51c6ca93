#include "contraverify/printer.hpp"

#include <sstream>

namespace contraverify {

namespace {

int
precedence(const ExprPtr& e)
{
  switch (e->kind)
  {
    case ExprKind::Quant: return 0;
    case ExprKind::Binary:
      switch (e->binop)
      {
        case BinOp::Implies: return 1;
        case BinOp::Or: return 2;
        case BinOp::And: return 3;
        case BinOp::Eq:
        case BinOp::Ne:
        case BinOp::Lt:
        case BinOp::Le:
        case BinOp::Gt:
        case BinOp::Ge: return 5;
        case BinOp::Add:
        case BinOp::Sub: return 6;
        case BinOp::Mul:
        case BinOp::Div:
        case BinOp::Mod: return 7;
      }
      return 0;
    case ExprKind::Unary: return e->unop == UnOp::Not ? 4 : 8;
    case ExprKind::IntLit: return e->value < 0 ? 8 : 9;
    default: return 9;
  }
}

std::string print(const ExprPtr& e, int required);

std::string
wrap(const ExprPtr& e, int required)
{
  std::string s = print(e, 0);
  if (precedence(e) < required) return "(" + s + ")";
  return s;
}

std::string
print(const ExprPtr& e, int)
{
  switch (e->kind)
  {
    case ExprKind::IntLit: return std::to_string(e->value);
    case ExprKind::BoolLit: return e->value ? "True" : "False";
    case ExprKind::Var: return e->name;
    case ExprKind::ArrayRead:
      return wrap(e->operands[0], 9) + " [" + print(e->operands[1], 0) + "]";
    case ExprKind::ArrayCount: return wrap(e->operands[0], 9) + ".count";
    case ExprKind::Unary:
      if (e->unop == UnOp::Not) return "not " + wrap(e->operands[0], 4);
      else
      {
        const ExprPtr& x = e->operands[0];
        std::string inner = x->kind == ExprKind::IntLit ? "(" + print(x, 0) + ")"
                                                        : wrap(x, 8);
        if (!inner.empty() && inner[0] == '-') inner = "(" + inner + ")";
        return "-" + inner;
      }
    case ExprKind::Binary:
    {
      int p = precedence(e);
      int left_req = p, right_req = p + 1;
      if (e->binop == BinOp::Implies)
      {
        left_req  = p + 1;
        right_req = p;
      }
      else if (p == 5)
      {
        left_req = right_req = 6;
      }
      return wrap(e->operands[0], left_req) + " " + spelling(e->binop) + " "
             + wrap(e->operands[1], right_req);
    }
    case ExprKind::Old: return "old " + wrap(e->operands[0], 9);
    case ExprKind::Quant:
      return std::string(e->quant == QuantKind::ForAll ? "for_all " : "exists ")
             + e->name + " in " + wrap(e->operands[0], 6) + " .. "
             + wrap(e->operands[1], 6) + " : " + print(e->operands[2], 0);
    case ExprKind::Call:
    {
      std::string s = e->name + " (";
      for (std::size_t i = 0; i < e->operands.size(); ++i)
      {
        if (i) s += ", ";
        s += print(e->operands[i], 0);
      }
      return s + ")";
    }
    case ExprKind::Store:
      return wrap(e->operands[0], 9) + " [" + print(e->operands[1], 0)
             + " := " + print(e->operands[2], 0) + "]";
    case ExprKind::NewArray: return "<new " + print(e->operands[0], 0) + ">";
    case ExprKind::Ite:
      return "(if " + print(e->operands[0], 0) + " then " + print(e->operands[1], 0)
             + " else " + print(e->operands[2], 0) + ")";
  }
  return "?";
}

class StmtPrinter
{
 public:
  explicit StmtPrinter(std::ostringstream& out) : d_out(out) {}

  void block(const Block& b, int depth)
  {
    for (const auto& s : b) statement(*s, depth);
  }

  void clauses(const std::vector<Clause>& cs, int depth)
  {
    for (const auto& c : cs) line(depth) << clause(c) << "\n";
  }

  static std::string clause(const Clause& c)
  {
    if (c.label.empty()) return print_expr(c.expr);
    return c.label + ": " + print_expr(c.expr);
  }

  std::ostringstream& line(int depth)
  {
    for (int i = 0; i < depth; ++i) d_out << '\t';
    return d_out;
  }

 private:
  void statement(const Stmt& s, int depth)
  {
    if (auto* a = s.as<AssignStmt>())
    {
      line(depth) << a->target << " := " << print_expr(a->value) << "\n";
    }
    else if (auto* g = s.as<GhostAssignStmt>())
    {
      line(depth) << g->target << " := " << print_expr(g->value) << "\n";
    }
    else if (auto* w = s.as<ArrayAssignStmt>())
    {
      line(depth) << w->array << " [" << print_expr(w->index)
                  << "] := " << print_expr(w->value) << "\n";
    }
    else if (auto* c = s.as<CallStmt>())
    {
      line(depth);
      if (c->target) d_out << *c->target << " := ";
      d_out << print_expr(ex::call(c->callee, c->args)) << "\n";
    }
    else if (auto* c = s.as<CreateStmt>())
    {
      line(depth) << "create " << c->array << ".make (" << print_expr(c->count)
                  << ")\n";
    }
    else if (auto* c = s.as<CheckStmt>())
    {
      line(depth) << "check " << clause(c->assertion) << " end\n";
    }
    else if (auto* i = s.as<IfStmt>())
    {
      for (std::size_t k = 0; k < i->arms.size(); ++k)
      {
        line(depth) << (k == 0 ? "if " : "elseif ")
                    << print_expr(i->arms[k].guard) << " then\n";
        block(i->arms[k].body, depth + 1);
      }
      if (i->else_block)
      {
        line(depth) << "else\n";
        block(*i->else_block, depth + 1);
      }
      line(depth) << "end\n";
    }
    else if (auto* l = s.as<LoopStmt>())
    {
      line(depth) << "from\n";
      block(l->init, depth + 1);
      block(l->prelude, depth + 1);
      if (!l->invariant.empty())
      {
        line(depth) << "invariant\n";
        clauses(l->invariant, depth + 1);
      }
      line(depth) << "until\n";
      line(depth + 1) << print_expr(l->exit) << "\n";
      line(depth) << "loop\n";
      block(l->body, depth + 1);
      if (l->variant)
      {
        line(depth) << "variant\n";
        line(depth + 1) << clause(*l->variant) << "\n";
      }
      line(depth) << "end\n";
    }
  }

  std::ostringstream& d_out;
};

void
print_decls(std::ostringstream& out, const std::vector<VarDecl>& decls, const char* sep)
{
  for (std::size_t i = 0; i < decls.size(); ++i)
  {
    if (i) out << sep;
    out << decls[i].name << ": " << to_string(decls[i].type);
  }
}

void
print_routine_into(std::ostringstream& out, const Routine& r, int depth)
{
  StmtPrinter p(out);
  p.line(depth) << r.name;
  if (!r.args.empty())
  {
    out << " (";
    print_decls(out, r.args, "; ");
    out << ")";
  }
  if (r.result_type) out << ": " << to_string(*r.result_type);
  out << "\n";
  if (!r.precondition.empty())
  {
    p.line(depth + 1) << "require\n";
    p.clauses(r.precondition, depth + 2);
  }
  if (!r.locals.empty())
  {
    p.line(depth + 1) << "local\n";
    for (const auto& d : r.locals)
      p.line(depth + 2) << d.name << ": " << to_string(d.type) << "\n";
  }
  p.line(depth + 1) << "do\n";
  p.block(r.body, depth + 2);
  if (!r.postcondition.empty())
  {
    p.line(depth + 1) << "ensure\n";
    p.clauses(r.postcondition, depth + 2);
  }
  p.line(depth + 1) << "end\n";
}

}  // namespace

std::string
print_expr(const ExprPtr& e)
{
  return print(e, 0);
}

std::string
print_routine(const Routine& r)
{
  std::ostringstream out;
  print_routine_into(out, r, 0);
  return out.str();
}

std::string
print_program(const Program& p)
{
  std::ostringstream out;
  out << "class " << p.name << "\n\nfeature\n";
  for (const auto& r : p.routines)
  {
    out << "\n";
    print_routine_into(out, r, 1);
  }
  out << "\nend\n";
  return out.str();
}

}  // namespace contraverify
