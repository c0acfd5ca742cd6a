#pragma once

#include <string>

#include "edbc/ast.hpp"

namespace edbc {

/// Source text for a whole module; parse_module(pretty_print(m)) == m.
std::string pretty_print(const ModuleAst& m);

std::string print_expr(const Expr& e);
std::string print_pattern(const Pattern& p);
std::string print_clause_head(const std::string& name, const Clause& c);
std::string print_fundef(const FunDef& f);
/// The directive for one contract, e.g. `?PRE(fun() -> ?P(1) >= 0 end).`
/// A Spec needs the function name: `-spec fib(integer()) -> integer().`
std::string print_contract(const Contract& c, const std::string& fname = "");

}  // namespace edbc
