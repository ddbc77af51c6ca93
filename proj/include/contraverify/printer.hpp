#pragma once

#include <string>

#include "contraverify/ast.hpp"

namespace contraverify {

std::string print_expr(const ExprPtr& e);
std::string print_routine(const Routine& r);
/// Pretty-prints a program in the `.ec` surface syntax; reparsing the output
/// of an uninstrumented program yields a structurally equal AST.
std::string print_program(const Program& p);

}  // namespace contraverify
