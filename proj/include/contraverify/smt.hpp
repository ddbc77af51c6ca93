#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "contraverify/evaluator.hpp"
#include "contraverify/sexpr.hpp"
#include "contraverify/vcgen.hpp"

namespace contraverify {

class EncodingError : public std::runtime_error
{
 public:
  using std::runtime_error::runtime_error;
};

class SolverProcessError : public std::runtime_error
{
 public:
  using std::runtime_error::runtime_error;
};

class ModelParseError : public std::runtime_error
{
 public:
  using std::runtime_error::runtime_error;
};

class ModelIncomplete : public std::runtime_error
{
 public:
  using std::runtime_error::runtime_error;
};

/// Quantifiers with a constant range up to this size are expanded.
inline constexpr std::int64_t kQuantifierExpansionLimit = 64;
/// Arrays larger than this are not materialized cell by cell.
inline constexpr std::int64_t kMaterializationCap = 100'000;

struct SolverConfig
{
  std::string executable;
  std::vector<std::string> args{"-in", "-smt2"};
  double timeout_seconds = 10.0;
  std::vector<unsigned> seeds{0};
  /// When non-empty, every encoded script is written here.
  std::string keep_smt_dir;
};

/// Solver path from CONTRAVERIFY_SOLVER, else the build-time default.
std::string default_solver_path();

struct SmtScript
{
  std::vector<Symbol> symbols;
  std::vector<std::string> declarations;
  std::vector<std::string> assertions;

  /// Declarations and assertions only (no options, no commands).
  std::string body() const;
  /// A complete stand-alone script: options, body, `(check-sat)`, `(get-model)`.
  std::string render(unsigned seed = 0) const;
};

/// SMT-LIB spelling of a symbol (always `|...|` quoted).
std::string smt_symbol(const std::string& name);
std::string smt_count_symbol(const std::string& array);
std::string smt_int(std::int64_t v);

/// Encodes assumptions and the negated obligation.
SmtScript encode(const VerificationCondition& vc);
/// Encodes a boolean term over the VC's symbols (used for pins and blocks).
std::string encode_term(const ExprPtr& e);

/// Model values. Functions absent from the model read as 0.
class Model
{
 public:
  /// Accepts the response of `(get-model)`, with or without a `model` head.
  static Model parse(const std::string& text);

  void set_constant(const std::string& name, const SExpr& value);
  bool has_constant(const std::string& name) const;
  std::optional<std::int64_t> int_value(const std::string& name) const;
  std::optional<bool> bool_value(const std::string& name) const;
  std::int64_t apply(const std::string& function, std::int64_t arg) const;
  bool has_function(const std::string& name) const;

 private:
  struct Definition
  {
    std::vector<std::string> params;
    SExpr body;
  };

  SExpr eval(const SExpr& e, const std::map<std::string, SExpr>& env, int depth) const;

  std::map<std::string, Definition> d_defs;
};

/// Parses an integer or boolean literal term (`5`, `(- 5)`, `true`).
std::int64_t sexpr_int(const SExpr& e);

enum class CheckResult
{
  Sat,
  Unsat,
  Unknown,
  Timeout,
};

/// A long-lived solver process speaking SMT-LIB over pipes.
class SolverSession
{
 public:
  explicit SolverSession(SolverConfig cfg);
  ~SolverSession();
  SolverSession(const SolverSession&) = delete;
  SolverSession& operator=(const SolverSession&) = delete;

  /// Resets the solver and loads `script` with the given seed.
  void load(const SmtScript& script, unsigned seed);
  void set_seed(unsigned seed);
  void push();
  void pop();
  void assert_term(const std::string& smt);
  CheckResult check();
  /// Values of input symbols after a Sat check (scalars and array counts via
  /// get-value; array cells from the model's function definitions).
  Model model(const std::vector<Symbol>& symbols);

  /// Number of `check-sat` calls issued so far.
  int checks() const { return d_checks; }

 private:
  void start();
  void stop();
  void send(const std::string& text);
  std::string read_response(double timeout_seconds);

  SolverConfig d_cfg;
  int d_pid = -1;
  int d_in = -1;
  int d_out = -1;
  std::string d_buffer;
  std::string d_loaded;
  unsigned d_seed = 0;
  int d_checks = 0;
};

struct SolverVerdict
{
  enum class Kind
  {
    Valid,
    Falsified,
    Unknown,
  };

  Kind kind = Kind::Unknown;
  std::optional<Model> model;
  /// `timeout` or `incomplete` for Unknown verdicts.
  std::string reason;
  unsigned seed = 0;
};

std::string to_string(SolverVerdict::Kind kind);

/// Writes `<routine>.<id>.smt2` into cfg.keep_smt_dir when it is set.
void keep_script(const SolverConfig& cfg, const VerificationCondition& vc, const SmtScript& script);

SolverVerdict solve(const SmtScript& script, const SolverConfig& cfg);
SolverVerdict solve(const VerificationCondition& vc, const SolverConfig& cfg);

/// Blocking clause excluding the model's input valuation (scalars, counts,
/// and up to 64 cells per array).
std::string blocking_clause(const Model& m, const std::vector<Symbol>& inputs);

/// Up to n pairwise-distinct models, varying the seed and blocking each
/// previous input valuation; stops early on unsat.
std::vector<Model> solve_distinct(const SmtScript& script, int n, const SolverConfig& cfg);

struct Counterexample
{
  ArgBinding binding;
  /// Some array exceeded the materialization cap; its cells are absent.
  bool oversized = false;
  std::map<std::string, std::int64_t> counts;
  Violation violated;
  std::string vc_key;
  unsigned seed = 0;
};

/// Reads the routine's inputs out of a model (cells 1..count, defaulting to 0).
Counterexample extract_counterexample(const Model& m,
                                      const VerificationCondition& vc,
                                      const Routine& r);

/// Symbols of `vc` that are routine inputs.
std::vector<Symbol> input_symbols(const VerificationCondition& vc);

/// SMT equality pinning every input of `binding`.
std::string pin_binding(const ArgBinding& binding, const std::vector<Symbol>& inputs);

}  // namespace contraverify
