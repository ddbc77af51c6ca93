#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "contraverify/ast.hpp"
#include "contraverify/value.hpp"

namespace contraverify {

using Substitution = std::map<std::string, ExprPtr>;

/// Capture-avoiding replacement of free variables. `old` nodes are left in
/// place (their operand is substituted like any other subterm).
ExprPtr substitute(const ExprPtr& e, const Substitution& s);

/// Replaces every `old e` by `e` evaluated in the entry substitution.
ExprPtr resolve_old(const ExprPtr& e, const Substitution& entry);

/// Free variable names (array symbols included; bound variables excluded).
std::set<std::string> free_variables(const ExprPtr& e);

/* Simplifying constructors. They fold boolean constants so that VCs of
 * instrumented programs stay small; they never change the meaning. */
namespace lg {

ExprPtr truth(bool v);
ExprPtr conj(const ExprPtr& a, const ExprPtr& b);
ExprPtr conj(const std::vector<ExprPtr>& parts);
ExprPtr disj(const ExprPtr& a, const ExprPtr& b);
ExprPtr neg(const ExprPtr& a);
ExprPtr implies(const ExprPtr& a, const ExprPtr& b);
ExprPtr eq(const ExprPtr& a, const ExprPtr& b);
ExprPtr le(const ExprPtr& a, const ExprPtr& b);
ExprPtr lt(const ExprPtr& a, const ExprPtr& b);
ExprPtr add(const ExprPtr& a, const ExprPtr& b);
ExprPtr ite(const ExprPtr& c, const ExprPtr& a, const ExprPtr& b);
bool is_true(const ExprPtr& e);
bool is_false(const ExprPtr& e);

}  // namespace lg

/// Environment for evaluating closed logic terms.
using LogicEnv = std::map<std::string, Value>;

/// Total evaluation at the logic level: unbounded reads yield 0 and
/// division by zero yields 0 (both are guarded by bounds obligations
/// wherever they matter). Integers wrap silently; callers stay in small
/// domains.
Value eval_logic(const ExprPtr& e, const LogicEnv& env);
bool eval_logic_bool(const ExprPtr& e, const LogicEnv& env);

}  // namespace contraverify
