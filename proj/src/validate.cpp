#include <algorithm>
#include <map>
#include <set>

#include "edbc/parser.hpp"

namespace edbc {

namespace {

struct ContractUse {
  std::string owner;
  std::size_t arity;
  bool result_allowed;
};

[[noreturn]] void fail(const std::string& msg) { throw ParseError(msg); }

std::string contract_name(const Contract& c) {
  switch (c.index()) {
    case 0: return "?PRE";
    case 1: return "?POST";
    case 2: return "?DECREASES";
    case 3: return "?EXPECTED_TIME";
    case 4: return "?TIMEOUT";
    case 5: return "?PURE";
    case 6: return "?INVARIANT";
    default: return "-spec";
  }
}

void check_refs(const Expr& e, const std::string& where, std::size_t arity, bool result_allowed) {
  visit(e, [&](const Expr& x) {
    if (const auto* p = std::get_if<expr::ParamRef>(&x.node)) {
      if (p->index < 1 || static_cast<std::size_t>(p->index) > arity) {
        fail(where + ": ?P(" + std::to_string(p->index) + ") is out of range for arity " +
             std::to_string(arity));
      }
    }
    if (std::holds_alternative<expr::ResultRef>(x.node) && !result_allowed) {
      fail(where + ": ?R may only be used in postconditions");
    }
  });
}

bool mentions_contract_macros(const FunDef& f) {
  bool found = false;
  for (const auto& c : f.clauses) {
    auto probe = [&](const Expr& x) {
      if (std::holds_alternative<expr::ParamRef>(x.node) ||
          std::holds_alternative<expr::ResultRef>(x.node)) {
        found = true;
      }
    };
    if (c.guard) visit(**c.guard, probe);
    for (const auto& b : c.body) visit(*b, probe);
  }
  return found;
}

// The condition of a contract must be a fun of the given arity, either
// literal or a local `fun name/arity` reference. Returns the referenced name.
std::optional<std::string> check_condition_shape(const ModuleAst& m, const Expr& e,
                                                 std::size_t arity, const std::string& where) {
  if (const auto* f = std::get_if<expr::FunLit>(&e.node)) {
    if (f->clauses.front().patterns.size() != arity) {
      fail(where + ": condition must be a fun of arity " + std::to_string(arity));
    }
    return std::nullopt;
  }
  if (const auto* r = std::get_if<expr::FunName>(&e.node)) {
    if (!r->module.empty() && r->module != m.name) {
      fail(where + ": condition must refer to a function of this module");
    }
    if (r->arity != arity) fail(where + ": condition must be a fun of arity " + std::to_string(arity));
    if (!m.find(r->name, r->arity)) fail(where + ": undefined function " + key_of(r->name, r->arity));
    return r->name;
  }
  fail(where + ": condition must be a fun expression or a fun name/" + std::to_string(arity) +
       " reference");
}

}  // namespace

void validate_module(const ModuleAst& m) {
  for (const auto& f : m.fundefs) {
    if (f.name.rfind("edbc_", 0) == 0) fail("function name " + f.name + " is reserved");
  }

  std::map<std::string, std::vector<ContractUse>> uses;  // keyed by name/arity
  for (const auto& f : m.fundefs) {
    const std::string where = key_of(f.name, f.arity);
    for (const auto& c : f.contracts) {
      const std::string what = where + " " + contract_name(c);
      const ExprRef* cond = nullptr;
      bool result_allowed = false;
      if (const auto* p = std::get_if<contract::Pre>(&c)) cond = &p->condition;
      if (const auto* p = std::get_if<contract::Post>(&c)) {
        cond = &p->condition;
        result_allowed = true;
      }
      if (const auto* t = std::get_if<contract::ExpectedTime>(&c)) cond = &t->budget;
      if (const auto* t = std::get_if<contract::Timeout>(&c)) cond = &t->budget;
      if (const auto* d = std::get_if<contract::Decreases>(&c)) {
        if (d->params.empty()) fail(what + ": no decreasing parameters given");
        std::set<int> seen;
        for (int i : d->params) {
          if (i < 1 || static_cast<std::size_t>(i) > f.arity) {
            fail(what + ": ?P(" + std::to_string(i) + ") is out of range for arity " +
                 std::to_string(f.arity));
          }
          if (!seen.insert(i).second) fail(what + ": ?P(" + std::to_string(i) + ") listed twice");
        }
      }
      if (const auto* s = std::get_if<contract::Spec>(&c)) {
        if (s->args.size() != f.arity) fail(what + ": arity mismatch");
      }
      if (!cond) continue;
      if (auto named = check_condition_shape(m, **cond, 0, what)) {
        uses[key_of(*named, 0)].push_back(ContractUse{where, f.arity, result_allowed});
      }
      check_refs(**cond, what, f.arity, result_allowed);
    }
  }

  if (m.invariant) {
    const Expr& inv = *m.invariant->function;
    if (auto named = check_condition_shape(m, inv, 1, "?INVARIANT")) {
      uses[key_of(*named, 1)].push_back(ContractUse{"?INVARIANT", 0, false});
    }
    check_refs(inv, "?INVARIANT", 0, false);
  }

  for (const auto& f : m.fundefs) {
    const std::string key = key_of(f.name, f.arity);
    auto it = uses.find(key);
    if (it == uses.end()) {
      if (mentions_contract_macros(f)) {
        fail(key + ": ?P and ?R may only be used inside contract functions");
      }
      continue;
    }
    if (!f.contracts.empty()) fail(key + ": contract functions may not carry contracts");
    for (const auto& use : it->second) {
      const std::string where = key + " (contract of " + use.owner + ")";
      for (const auto& c : f.clauses) {
        if (c.guard) check_refs(**c.guard, where, use.arity, use.result_allowed);
        for (const auto& b : c.body) check_refs(*b, where, use.arity, use.result_allowed);
      }
    }
  }
}

}  // namespace edbc
