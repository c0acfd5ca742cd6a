#include "edbc/printer.hpp"
#include "edbc/report.hpp"

namespace edbc {

namespace {

// Section order within one function.
int rank(const Contract& c) {
  if (std::holds_alternative<contract::Spec>(c)) return 0;
  if (std::holds_alternative<contract::Pre>(c)) return 1;
  if (std::holds_alternative<contract::Post>(c)) return 2;
  if (std::holds_alternative<contract::Decreases>(c)) return 3;
  if (std::holds_alternative<contract::Pure>(c)) return 4;
  return 5;
}

const char* label(const Contract& c) {
  switch (rank(c)) {
    case 0: return "Spec";
    case 1: return "Precondition";
    case 2: return "Postcondition";
    case 3: return "Decreasing arguments";
    case 4: return "Purity";
    default:
      return std::holds_alternative<contract::Timeout>(c) ? "Timeout" : "Expected time";
  }
}

void block(std::string& out, const std::string& title, const std::string& code) {
  out += "**" + title + "**\n\n```erlang\n" + code + "\n```\n\n";
}

}  // namespace

std::string generate_docs(const ModuleAst& m) {
  std::string out = "# Module " + m.name + "\n\n";
  if (m.invariant) block(out, "Invariant", print_contract(*m.invariant));
  for (const auto& f : m.fundefs) {
    out += "## " + key_of(f.name, f.arity) + "\n\n";
    for (int r = 0; r <= 5; ++r) {
      for (const auto& c : f.contracts) {
        if (rank(c) == r) block(out, label(c), print_contract(c, f.name));
      }
    }
  }
  return out;
}

}  // namespace edbc
