#include "contraverify/smt.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <mutex>

#include "contraverify/logic.hpp"

#ifndef CONTRAVERIFY_DEFAULT_SOLVER
#define CONTRAVERIFY_DEFAULT_SOLVER "z3"
#endif

namespace contraverify {

std::string
default_solver_path()
{
  if (const char* env = std::getenv("CONTRAVERIFY_SOLVER"); env && *env) return env;
  return CONTRAVERIFY_DEFAULT_SOLVER;
}

/* -------------------------------------------------------------------------- */
/* Encoding                                                                   */
/* -------------------------------------------------------------------------- */

std::string
smt_symbol(const std::string& name)
{
  return "|" + name + "|";
}

std::string
smt_count_symbol(const std::string& array)
{
  return "|" + array + ".count|";
}

std::string
smt_int(std::int64_t v)
{
  if (v >= 0) return std::to_string(v);
  if (v == INT64_MIN) return "(- 9223372036854775808)";
  return "(- " + std::to_string(-v) + ")";
}

namespace {

const char*
smt_sort(Type t)
{
  return t == Type::Boolean ? "Bool" : "Int";
}

std::optional<std::int64_t>
constant_value(const ExprPtr& e)
{
  if (e->kind == ExprKind::IntLit) return e->value;
  if (e->kind == ExprKind::Unary && e->unop == UnOp::Neg)
  {
    auto v = constant_value(e->operands[0]);
    if (v) return -*v;
    return std::nullopt;
  }
  if (e->kind == ExprKind::Binary
      && (e->binop == BinOp::Add || e->binop == BinOp::Sub || e->binop == BinOp::Mul))
  {
    auto l = constant_value(e->operands[0]);
    auto r = constant_value(e->operands[1]);
    if (!l || !r) return std::nullopt;
    if (e->binop == BinOp::Add) return *l + *r;
    if (e->binop == BinOp::Sub) return *l - *r;
    return *l * *r;
  }
  return std::nullopt;
}

const char*
smt_op(BinOp op)
{
  switch (op)
  {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Div: return "div";
    case BinOp::Mod: return "mod";
    case BinOp::Eq: return "=";
    case BinOp::Ne: return "distinct";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
    case BinOp::And: return "and";
    case BinOp::Or: return "or";
    case BinOp::Implies: return "=>";
  }
  return "?";
}

std::string term(const ExprPtr& e);

std::string
read(const ExprPtr& arr, const std::string& idx)
{
  switch (arr->kind)
  {
    case ExprKind::Var: return "(" + smt_symbol(arr->name) + " " + idx + ")";
    case ExprKind::Store:
      return "(ite (= " + idx + " " + term(arr->operands[1]) + ") " + term(arr->operands[2])
             + " " + read(arr->operands[0], idx) + ")";
    case ExprKind::NewArray: return "0";
    case ExprKind::Ite:
      return "(ite " + term(arr->operands[0]) + " " + read(arr->operands[1], idx) + " "
             + read(arr->operands[2], idx) + ")";
    default: throw EncodingError("unsupported array term");
  }
}

std::string
count(const ExprPtr& arr)
{
  switch (arr->kind)
  {
    case ExprKind::Var: return smt_count_symbol(arr->name);
    case ExprKind::Store: return count(arr->operands[0]);
    case ExprKind::NewArray: return term(arr->operands[0]);
    case ExprKind::Ite:
      return "(ite " + term(arr->operands[0]) + " " + count(arr->operands[1]) + " "
             + count(arr->operands[2]) + ")";
    default: throw EncodingError("unsupported array term");
  }
}

std::string
quantifier(const ExprPtr& e)
{
  bool forall = e->quant == QuantKind::ForAll;
  auto lo     = constant_value(e->operands[0]);
  auto hi     = constant_value(e->operands[1]);
  if (lo && hi && *hi - *lo + 1 <= kQuantifierExpansionLimit)
  {
    if (*hi < *lo) return forall ? "true" : "false";
    std::string s = forall ? "(and" : "(or";
    for (std::int64_t k = *lo; k <= *hi; ++k)
    {
      ExprPtr inst = substitute(e->operands[2], {{e->name, ex::with_type(ex::int_lit(k), Type::Integer)}});
      s += " " + term(inst);
    }
    return s + ")";
  }
  std::string j     = smt_symbol(e->name);
  std::string range = "(and (<= " + term(e->operands[0]) + " " + j + ") (<= " + j + " "
                      + term(e->operands[1]) + "))";
  if (forall)
    return "(forall ((" + j + " Int)) (=> " + range + " " + term(e->operands[2]) + "))";
  return "(exists ((" + j + " Int)) (and " + range + " " + term(e->operands[2]) + "))";
}

std::string
term(const ExprPtr& e)
{
  switch (e->kind)
  {
    case ExprKind::IntLit: return smt_int(e->value);
    case ExprKind::BoolLit: return e->value ? "true" : "false";
    case ExprKind::Var:
      if (e->type == Type::IntArray) throw EncodingError("array used as a value");
      return smt_symbol(e->name);
    case ExprKind::ArrayRead: return read(e->operands[0], term(e->operands[1]));
    case ExprKind::ArrayCount: return count(e->operands[0]);
    case ExprKind::Unary:
      return std::string(e->unop == UnOp::Not ? "(not " : "(- ") + term(e->operands[0]) + ")";
    case ExprKind::Binary:
      return std::string("(") + smt_op(e->binop) + " " + term(e->operands[0]) + " "
             + term(e->operands[1]) + ")";
    case ExprKind::Quant: return quantifier(e);
    case ExprKind::Ite:
      return "(ite " + term(e->operands[0]) + " " + term(e->operands[1]) + " "
             + term(e->operands[2]) + ")";
    case ExprKind::Old: throw EncodingError("'old' must be resolved before encoding");
    case ExprKind::Call: throw EncodingError("calls cannot appear in assertions");
    case ExprKind::Store:
    case ExprKind::NewArray: throw EncodingError("array term used as a value");
  }
  throw EncodingError("unknown expression");
}

}  // namespace

std::string
encode_term(const ExprPtr& e)
{
  return term(e);
}

std::string
SmtScript::body() const
{
  std::string s;
  for (const auto& d : declarations) s += d + "\n";
  for (const auto& a : assertions) s += "(assert " + a + ")\n";
  return s;
}

std::string
SmtScript::render(unsigned seed) const
{
  return "(set-option :produce-models true)\n(set-option :random-seed " + std::to_string(seed)
         + ")\n(set-logic ALL)\n" + body() + "(check-sat)\n(get-model)\n";
}

SmtScript
encode(const VerificationCondition& vc)
{
  SmtScript s;
  s.symbols = vc.symbols;
  for (const auto& sym : vc.symbols)
  {
    if (sym.type == Type::IntArray)
    {
      s.declarations.push_back("(declare-fun " + smt_symbol(sym.name) + " (Int) Int)");
      s.declarations.push_back("(declare-const " + smt_count_symbol(sym.name) + " Int)");
      s.assertions.push_back("(>= " + smt_count_symbol(sym.name) + " 0)");
    }
    else
    {
      s.declarations.push_back("(declare-const " + smt_symbol(sym.name) + " "
                               + smt_sort(sym.type) + ")");
    }
  }
  for (const auto& d : vc.definitions)
  {
    if (d.type == Type::IntArray)
    {
      const std::string k = "|k!" + d.name + "|";
      s.declarations.push_back("(define-fun " + smt_symbol(d.name) + " ((" + k
                               + " Int)) Int " + read(d.value, k) + ")");
      s.declarations.push_back("(define-fun " + smt_count_symbol(d.name) + " () Int "
                               + count(d.value) + ")");
    }
    else
    {
      s.declarations.push_back("(define-fun " + smt_symbol(d.name) + " () "
                               + smt_sort(d.type) + " " + term(d.value) + ")");
    }
  }
  for (const auto& a : vc.assumptions) s.assertions.push_back(term(a));
  s.assertions.push_back("(not " + term(vc.obligation) + ")");
  return s;
}

/* -------------------------------------------------------------------------- */
/* Models                                                                     */
/* -------------------------------------------------------------------------- */

namespace {

SExpr
atom(std::string text)
{
  SExpr a;
  a.text = std::move(text);
  return a;
}

SExpr
int_atom(std::int64_t v)
{
  return atom(std::to_string(v));
}

SExpr
bool_atom(bool v)
{
  return atom(v ? "true" : "false");
}

bool
sexpr_bool(const SExpr& e)
{
  if (e.is("true")) return true;
  if (e.is("false")) return false;
  throw ModelParseError("expected a boolean, got " + e.to_string());
}

bool
is_numeral(const std::string& s)
{
  if (s.empty()) return false;
  std::size_t i = s[0] == '-' ? 1 : 0;
  if (i >= s.size()) return false;
  for (; i < s.size(); ++i)
    if (s[i] < '0' || s[i] > '9') return false;
  return true;
}

}  // namespace

std::int64_t
sexpr_int(const SExpr& e)
{
  if (e.atom)
  {
    if (!is_numeral(e.text)) throw ModelParseError("expected an integer, got " + e.text);
    errno = 0;
    long long v = std::strtoll(e.text.c_str(), nullptr, 10);
    if (errno == ERANGE) throw ModelParseError("integer out of range: " + e.text);
    return v;
  }
  if (e.size() == 2 && e[0].is("-")) return -sexpr_int(e[1]);
  throw ModelParseError("expected an integer, got " + e.to_string());
}

Model
Model::parse(const std::string& text)
{
  Model m;
  SExpr root;
  try
  {
    root = parse_sexpr(text);
  }
  catch (const SExprParseError& e)
  {
    throw ModelParseError(e.what());
  }
  if (root.atom) throw ModelParseError("model is not a list");
  std::size_t start = 0;
  if (root.size() > 0 && root[0].is("model")) start = 1;
  for (std::size_t i = start; i < root.size(); ++i)
  {
    const SExpr& d = root[i];
    if (d.atom || d.size() == 0) throw ModelParseError("malformed model entry");
    if (!d[0].is("define-fun")) continue;
    if (d.size() != 5 || d[2].atom) throw ModelParseError("malformed define-fun");
    Definition def;
    for (const auto& p : d[2].items)
    {
      if (p.atom || p.size() != 2) throw ModelParseError("malformed parameter");
      def.params.push_back(p[0].text);
    }
    def.body         = d[4];
    m.d_defs[d[1].text] = std::move(def);
  }
  return m;
}

void
Model::set_constant(const std::string& name, const SExpr& value)
{
  d_defs[name] = Definition{{}, value};
}

bool
Model::has_constant(const std::string& name) const
{
  auto it = d_defs.find(name);
  return it != d_defs.end() && it->second.params.empty();
}

bool
Model::has_function(const std::string& name) const
{
  auto it = d_defs.find(name);
  return it != d_defs.end() && !it->second.params.empty();
}

std::optional<std::int64_t>
Model::int_value(const std::string& name) const
{
  if (!has_constant(name)) return std::nullopt;
  return sexpr_int(eval(d_defs.at(name).body, {}, 0));
}

std::optional<bool>
Model::bool_value(const std::string& name) const
{
  if (!has_constant(name)) return std::nullopt;
  return sexpr_bool(eval(d_defs.at(name).body, {}, 0));
}

std::int64_t
Model::apply(const std::string& function, std::int64_t arg) const
{
  auto it = d_defs.find(function);
  if (it == d_defs.end()) return 0;
  if (it->second.params.size() != 1) throw ModelParseError("'" + function + "' is not unary");
  return sexpr_int(eval(it->second.body, {{it->second.params[0], int_atom(arg)}}, 0));
}

SExpr
Model::eval(const SExpr& e, const std::map<std::string, SExpr>& env, int depth) const
{
  if (depth > 10'000) throw ModelParseError("model term nests too deeply");
  if (e.atom)
  {
    if (e.is("true") || e.is("false") || is_numeral(e.text)) return e;
    if (auto it = env.find(e.text); it != env.end()) return it->second;
    if (auto it = d_defs.find(e.text); it != d_defs.end() && it->second.params.empty())
      return eval(it->second.body, {}, depth + 1);
    throw ModelParseError("unknown model symbol '" + e.text + "'");
  }
  if (e.size() == 0 || !e[0].atom) throw ModelParseError("malformed model term");
  const std::string& head = e[0].text;

  if (head == "ite")
  {
    bool c = sexpr_bool(eval(e[1], env, depth + 1));
    return eval(c ? e[2] : e[3], env, depth + 1);
  }
  if (head == "let")
  {
    std::map<std::string, SExpr> inner = env;
    for (const auto& b : e[1].items) inner[b[0].text] = eval(b[1], env, depth + 1);
    return eval(e[2], inner, depth + 1);
  }
  if (head == "and" || head == "or")
  {
    bool is_and = head == "and";
    for (std::size_t i = 1; i < e.size(); ++i)
    {
      bool v = sexpr_bool(eval(e[i], env, depth + 1));
      if (is_and && !v) return bool_atom(false);
      if (!is_and && v) return bool_atom(true);
    }
    return bool_atom(is_and);
  }
  if (head == "not") return bool_atom(!sexpr_bool(eval(e[1], env, depth + 1)));
  if (head == "=>")
    return bool_atom(!sexpr_bool(eval(e[1], env, depth + 1))
                     || sexpr_bool(eval(e[2], env, depth + 1)));

  std::vector<SExpr> args;
  for (std::size_t i = 1; i < e.size(); ++i) args.push_back(eval(e[i], env, depth + 1));

  if (head == "=" || head == "distinct")
  {
    bool same = args.size() == 2 && args[0].text == args[1].text;
    return bool_atom(head == "=" ? same : !same);
  }
  auto ints = [&]() {
    std::vector<std::int64_t> v;
    for (const auto& a : args) v.push_back(sexpr_int(a));
    return v;
  };
  if (head == "<=" || head == "<" || head == ">=" || head == ">")
  {
    auto v = ints();
    if (head == "<=") return bool_atom(v[0] <= v[1]);
    if (head == "<") return bool_atom(v[0] < v[1]);
    if (head == ">=") return bool_atom(v[0] >= v[1]);
    return bool_atom(v[0] > v[1]);
  }
  if (head == "+" || head == "-" || head == "*")
  {
    auto v = ints();
    if (head == "-" && v.size() == 1)
    {
      std::int64_t r = 0;
      if (__builtin_sub_overflow(std::int64_t{0}, v[0], &r))
        throw ModelParseError("integer overflow in model");
      return int_atom(r);
    }
    std::int64_t acc = v.at(0);
    for (std::size_t i = 1; i < v.size(); ++i)
    {
      bool bad = head == "+"   ? __builtin_add_overflow(acc, v[i], &acc)
                 : head == "-" ? __builtin_sub_overflow(acc, v[i], &acc)
                               : __builtin_mul_overflow(acc, v[i], &acc);
      if (bad) throw ModelParseError("integer overflow in model");
    }
    return int_atom(acc);
  }
  if (head == "div" || head == "mod")
  {
    auto v = ints();
    if (v[1] == 0) return int_atom(0);
    return int_atom(head == "div" ? euclid_div(v[0], v[1]) : euclid_mod(v[0], v[1]));
  }
  if (head == "abs")
  {
    auto v = ints();
    return int_atom(v[0] < 0 ? -v[0] : v[0]);
  }

  auto it = d_defs.find(head);
  if (it == d_defs.end())
  {
    // Function the model leaves unconstrained.
    return int_atom(0);
  }
  const Definition& def = it->second;
  if (def.params.size() != args.size()) throw ModelParseError("arity mismatch for '" + head + "'");
  std::map<std::string, SExpr> inner;
  for (std::size_t i = 0; i < args.size(); ++i) inner[def.params[i]] = args[i];
  return eval(def.body, inner, depth + 1);
}

/* -------------------------------------------------------------------------- */
/* Solver process                                                             */
/* -------------------------------------------------------------------------- */

namespace {

void
ignore_sigpipe()
{
  static std::once_flag once;
  std::call_once(once, [] { signal(SIGPIPE, SIG_IGN); });
}

}  // namespace

SolverSession::SolverSession(SolverConfig cfg) : d_cfg(std::move(cfg))
{
  if (d_cfg.executable.empty()) d_cfg.executable = default_solver_path();
  if (d_cfg.seeds.empty()) d_cfg.seeds = {0};
  ignore_sigpipe();
}

SolverSession::~SolverSession()
{
  stop();
}

void
SolverSession::start()
{
  int to_child[2], from_child[2];
  if (pipe(to_child) != 0 || pipe(from_child) != 0)
    throw SolverProcessError(std::string("pipe: ") + std::strerror(errno));

  std::vector<std::string> argv_s{d_cfg.executable};
  argv_s.insert(argv_s.end(), d_cfg.args.begin(), d_cfg.args.end());
  std::vector<char*> argv;
  for (auto& a : argv_s) argv.push_back(a.data());
  argv.push_back(nullptr);

  pid_t pid = fork();
  if (pid < 0) throw SolverProcessError(std::string("fork: ") + std::strerror(errno));
  if (pid == 0)
  {
    dup2(to_child[0], STDIN_FILENO);
    dup2(from_child[1], STDOUT_FILENO);
    int devnull = open("/dev/null", O_WRONLY);
    if (devnull >= 0) dup2(devnull, STDERR_FILENO);
    close(to_child[0]);
    close(to_child[1]);
    close(from_child[0]);
    close(from_child[1]);
    execvp(argv[0], argv.data());
    _exit(127);
  }
  close(to_child[0]);
  close(from_child[1]);
  fcntl(to_child[1], F_SETFD, FD_CLOEXEC);
  fcntl(from_child[0], F_SETFD, FD_CLOEXEC);
  d_pid = pid;
  d_in  = to_child[1];
  d_out = from_child[0];
  d_buffer.clear();
}

void
SolverSession::stop()
{
  if (d_pid < 0) return;
  if (d_in >= 0)
  {
    const char bye[] = "(exit)\n";
    [[maybe_unused]] auto n = write(d_in, bye, sizeof(bye) - 1);
    close(d_in);
  }
  if (d_out >= 0) close(d_out);
  int status = 0;
  for (int i = 0; i < 50; ++i)
  {
    if (waitpid(d_pid, &status, WNOHANG) != 0)
    {
      d_pid = -1;
      break;
    }
    usleep(2000);
  }
  if (d_pid >= 0)
  {
    kill(d_pid, SIGKILL);
    waitpid(d_pid, &status, 0);
  }
  d_pid = -1;
  d_in = d_out = -1;
}

void
SolverSession::send(const std::string& text)
{
  if (d_pid < 0) start();
  std::size_t off = 0;
  while (off < text.size())
  {
    ssize_t n = ::write(d_in, text.data() + off, text.size() - off);
    if (n < 0)
    {
      if (errno == EINTR) continue;
      stop();
      throw SolverProcessError("solver '" + d_cfg.executable + "' is not accepting input");
    }
    off += static_cast<std::size_t>(n);
  }
}

std::string
SolverSession::read_response(double timeout_seconds)
{
  using clock   = std::chrono::steady_clock;
  auto deadline = clock::now() + std::chrono::milliseconds(static_cast<long>(timeout_seconds * 1000));
  while (true)
  {
    std::size_t len = complete_response_length(d_buffer);
    if (len > 0)
    {
      std::string r = d_buffer.substr(0, len);
      d_buffer.erase(0, len);
      auto b = r.find_first_not_of(" \t\r\n");
      auto e = r.find_last_not_of(" \t\r\n");
      return b == std::string::npos ? "" : r.substr(b, e - b + 1);
    }
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - clock::now()).count();
    if (left <= 0) return "<timeout>";
    pollfd p{d_out, POLLIN, 0};
    int rc = poll(&p, 1, static_cast<int>(left));
    if (rc < 0 && errno == EINTR) continue;
    if (rc == 0) return "<timeout>";
    char buf[65536];
    ssize_t n = ::read(d_out, buf, sizeof(buf));
    if (n <= 0)
    {
      stop();
      throw SolverProcessError("solver '" + d_cfg.executable + "' terminated unexpectedly");
    }
    d_buffer.append(buf, static_cast<std::size_t>(n));
  }
}

void
SolverSession::load(const SmtScript& script, unsigned seed)
{
  d_seed   = seed;
  d_loaded = script.body();
  long ms  = static_cast<long>(d_cfg.timeout_seconds * 1000);
  send("(reset)\n(set-option :produce-models true)\n(set-option :random-seed "
       + std::to_string(seed) + ")\n(set-option :timeout " + std::to_string(ms)
       + ")\n(set-logic ALL)\n" + d_loaded);
}

void
SolverSession::set_seed(unsigned seed)
{
  d_seed = seed;
  send("(set-option :random-seed " + std::to_string(seed) + ")\n");
}

void
SolverSession::push()
{
  send("(push 1)\n");
}

void
SolverSession::pop()
{
  send("(pop 1)\n");
}

void
SolverSession::assert_term(const std::string& smt)
{
  send("(assert " + smt + ")\n");
}

CheckResult
SolverSession::check()
{
  ++d_checks;
  send("(check-sat)\n");
  std::string r = read_response(d_cfg.timeout_seconds + 5.0);
  if (r == "<timeout>")
  {
    stop();
    d_loaded.clear();
    return CheckResult::Timeout;
  }
  if (r.rfind("(error", 0) == 0) throw SolverProcessError("solver error: " + r);
  if (r == "sat") return CheckResult::Sat;
  if (r == "unsat") return CheckResult::Unsat;
  if (r == "unknown")
  {
    send("(get-info :reason-unknown)\n");
    std::string why = read_response(5.0);
    if (why.find("timeout") != std::string::npos || why.find("canceled") != std::string::npos)
      return CheckResult::Timeout;
    return CheckResult::Unknown;
  }
  throw SolverProcessError("unexpected solver response: " + r);
}

Model
SolverSession::model(const std::vector<Symbol>& symbols)
{
  Model m;
  std::string names;
  bool arrays = false;
  for (const auto& s : symbols)
  {
    if (s.type == Type::IntArray)
    {
      arrays = true;
      names += " " + smt_count_symbol(s.name);
    }
    else
    {
      names += " " + smt_symbol(s.name);
    }
  }
  if (arrays)
  {
    send("(get-model)\n");
    std::string r = read_response(d_cfg.timeout_seconds + 5.0);
    if (r.rfind("(error", 0) == 0 || r == "<timeout>")
      throw SolverProcessError("get-model failed: " + r);
    m = Model::parse(r);
  }
  if (!names.empty())
  {
    send("(get-value (" + names.substr(1) + "))\n");
    std::string r = read_response(d_cfg.timeout_seconds + 5.0);
    if (r.rfind("(error", 0) == 0 || r == "<timeout>")
      throw SolverProcessError("get-value failed: " + r);
    SExpr v;
    try
    {
      v = parse_sexpr(r);
    }
    catch (const SExprParseError& e)
    {
      throw ModelParseError(e.what());
    }
    for (const auto& pair : v.items)
    {
      if (pair.atom || pair.size() != 2) throw ModelParseError("malformed get-value entry");
      m.set_constant(pair[0].text, pair[1]);
    }
  }
  return m;
}

std::string
to_string(SolverVerdict::Kind kind)
{
  switch (kind)
  {
    case SolverVerdict::Kind::Valid: return "valid";
    case SolverVerdict::Kind::Falsified: return "falsified";
    case SolverVerdict::Kind::Unknown: return "unknown";
  }
  return "?";
}

SolverVerdict
solve(const SmtScript& script, const SolverConfig& cfg)
{
  SolverSession s(cfg);
  SolverVerdict v;
  v.seed = cfg.seeds.empty() ? 0 : cfg.seeds[0];
  s.load(script, v.seed);
  switch (s.check())
  {
    case CheckResult::Unsat: v.kind = SolverVerdict::Kind::Valid; break;
    case CheckResult::Sat:
    {
      std::vector<Symbol> inputs;
      for (const auto& sym : script.symbols)
        if (sym.input) inputs.push_back(sym);
      v.kind  = SolverVerdict::Kind::Falsified;
      v.model = s.model(inputs);
      break;
    }
    case CheckResult::Timeout:
      v.kind   = SolverVerdict::Kind::Unknown;
      v.reason = "timeout";
      break;
    case CheckResult::Unknown:
      v.kind   = SolverVerdict::Kind::Unknown;
      v.reason = "incomplete";
      break;
  }
  return v;
}

void
keep_script(const SolverConfig& cfg, const VerificationCondition& vc, const SmtScript& script)
{
  if (cfg.keep_smt_dir.empty()) return;
  std::filesystem::create_directories(cfg.keep_smt_dir);
  std::ofstream out(std::filesystem::path(cfg.keep_smt_dir)
                    / (vc.routine + "." + std::to_string(vc.id) + ".smt2"));
  out << script.render(cfg.seeds.empty() ? 0 : cfg.seeds[0]);
}

SolverVerdict
solve(const VerificationCondition& vc, const SolverConfig& cfg)
{
  SmtScript script = encode(vc);
  keep_script(cfg, vc, script);
  return solve(script, cfg);
}

std::string
blocking_clause(const Model& m, const std::vector<Symbol>& inputs)
{
  std::string eqs;
  for (const auto& s : inputs)
  {
    if (s.type == Type::IntArray)
    {
      std::int64_t n = m.int_value(s.name + ".count").value_or(0);
      eqs += " (= " + smt_count_symbol(s.name) + " " + smt_int(n) + ")";
      for (std::int64_t k = 1; k <= std::min<std::int64_t>(n, 64); ++k)
        eqs += " (= (" + smt_symbol(s.name) + " " + std::to_string(k) + ") "
               + smt_int(m.apply(s.name, k)) + ")";
    }
    else if (s.type == Type::Boolean)
    {
      eqs += " (= " + smt_symbol(s.name) + " "
             + (m.bool_value(s.name).value_or(false) ? "true" : "false") + ")";
    }
    else
    {
      eqs += " (= " + smt_symbol(s.name) + " " + smt_int(m.int_value(s.name).value_or(0)) + ")";
    }
  }
  if (eqs.empty()) return "false";
  return "(not (and true" + eqs + "))";
}

std::vector<Model>
solve_distinct(const SmtScript& script, int n, const SolverConfig& cfg)
{
  std::vector<Symbol> inputs;
  for (const auto& sym : script.symbols)
    if (sym.input) inputs.push_back(sym);
  std::vector<unsigned> seeds = cfg.seeds.empty() ? std::vector<unsigned>{0} : cfg.seeds;

  std::vector<Model> out;
  SolverSession s(cfg);
  s.load(script, seeds[0]);
  for (int i = 0; i < n; ++i)
  {
    if (i > 0) s.set_seed(seeds[static_cast<std::size_t>(i) % seeds.size()]);
    if (s.check() != CheckResult::Sat) break;
    Model m = s.model(inputs);
    s.assert_term(blocking_clause(m, inputs));
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<Symbol>
input_symbols(const VerificationCondition& vc)
{
  std::vector<Symbol> out;
  for (const auto& s : vc.symbols)
    if (s.input) out.push_back(s);
  return out;
}

Counterexample
extract_counterexample(const Model& m, const VerificationCondition& vc, const Routine& r)
{
  Counterexample cex;
  cex.violated = {violation_kind(vc.kind), vc.label, vc.location, vc.routine};
  cex.vc_key   = vc.key();
  for (const auto& a : r.args)
  {
    if (a.type == Type::IntArray)
    {
      auto n = m.int_value(a.name + ".count");
      if (!n) throw ModelIncomplete("model lacks '" + a.name + ".count'");
      cex.counts[a.name] = *n;
      if (*n > kMaterializationCap)
      {
        cex.oversized      = true;
        cex.binding[a.name] = Value::of_array({});
        continue;
      }
      std::vector<std::int64_t> cells;
      for (std::int64_t k = 1; k <= *n; ++k) cells.push_back(m.apply(a.name, k));
      cex.binding[a.name] = Value::of_array(std::move(cells));
    }
    else if (a.type == Type::Boolean)
    {
      auto v = m.bool_value(a.name);
      if (!v) throw ModelIncomplete("model lacks '" + a.name + "'");
      cex.binding[a.name] = Value::of_bool(*v);
    }
    else
    {
      auto v = m.int_value(a.name);
      if (!v) throw ModelIncomplete("model lacks '" + a.name + "'");
      cex.binding[a.name] = Value::of_int(*v);
    }
  }
  return cex;
}

std::string
pin_binding(const ArgBinding& binding, const std::vector<Symbol>& inputs)
{
  std::string eqs;
  for (const auto& s : inputs)
  {
    auto it = binding.find(s.name);
    if (it == binding.end()) continue;
    const Value& v = it->second;
    if (s.type == Type::IntArray)
    {
      eqs += " (= " + smt_count_symbol(s.name) + " " + std::to_string(v.count()) + ")";
      for (std::int64_t k = 1; k <= v.count(); ++k)
        eqs += " (= (" + smt_symbol(s.name) + " " + std::to_string(k) + ") "
               + smt_int(v.cells[static_cast<std::size_t>(k - 1)]) + ")";
    }
    else if (s.type == Type::Boolean)
    {
      eqs += std::string(" (= ") + smt_symbol(s.name) + (v.boolean ? " true)" : " false)");
    }
    else
    {
      eqs += " (= " + smt_symbol(s.name) + " " + smt_int(v.integer) + ")";
    }
  }
  return "(and true" + eqs + ")";
}

}  // namespace contraverify
