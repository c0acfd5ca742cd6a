#pragma once

#include <string>

#include "edbc/ast.hpp"
#include "edbc/violation.hpp"

namespace edbc {

/// Renders the report text for a violation. Deterministic.
std::string format_violation(const Violation& v);

/// Fills v.message and returns the exception to throw.
ContractViolation make_violation(Violation v);

/// Multi-line termination report of a server that died on a violation.
std::string format_server_termination(const std::string& module, const Value& last_message,
                                      const Value& state, const std::string& reason);

/// Markdown documentation of a parsed (not instrumented) module.
std::string generate_docs(const ModuleAst& m);

}  // namespace edbc
