#include "edbc/printer.hpp"

namespace edbc {

namespace {

template <class... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

// Binding strength, loosest first. Mirrors the parser's levels.
enum Prec {
  kMatch = 1,
  kOrElse,
  kAndAlso,
  kCompare,
  kAppend,
  kAdd,
  kMul,
  kUnary,
  kPrimary,
};

enum class Assoc { Left, Right, None };

struct OpInfo {
  const char* text;
  int prec;
  Assoc assoc;
};

OpInfo op_info(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return {"+", kAdd, Assoc::Left};
    case BinaryOp::Sub: return {"-", kAdd, Assoc::Left};
    case BinaryOp::Mul: return {"*", kMul, Assoc::Left};
    case BinaryOp::Div: return {"/", kMul, Assoc::Left};
    case BinaryOp::IntDiv: return {"div", kMul, Assoc::Left};
    case BinaryOp::Rem: return {"rem", kMul, Assoc::Left};
    case BinaryOp::Eq: return {"==", kCompare, Assoc::None};
    case BinaryOp::Neq: return {"/=", kCompare, Assoc::None};
    case BinaryOp::ExactEq: return {"=:=", kCompare, Assoc::None};
    case BinaryOp::ExactNeq: return {"=/=", kCompare, Assoc::None};
    case BinaryOp::Lt: return {"<", kCompare, Assoc::None};
    case BinaryOp::Le: return {"=<", kCompare, Assoc::None};
    case BinaryOp::Gt: return {">", kCompare, Assoc::None};
    case BinaryOp::Ge: return {">=", kCompare, Assoc::None};
    case BinaryOp::AndAlso: return {"andalso", kAndAlso, Assoc::Right};
    case BinaryOp::OrElse: return {"orelse", kOrElse, Assoc::Right};
    case BinaryOp::Append: return {"++", kAppend, Assoc::Right};
    case BinaryOp::Send: return {"!", kMatch, Assoc::Right};
  }
  return {"?", kPrimary, Assoc::None};
}

std::string literal(const Value& v) {
  // A bare true/false would read back as a boolean.
  if (v.is_atom("true") || v.is_atom("false")) return "'" + v.as_atom() + "'";
  return to_string(v);
}

std::string expr_at(const Expr& e, int min_prec);

std::string join_exprs(const std::vector<ExprRef>& xs, const char* sep = ", ") {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += sep;
    out += expr_at(*xs[i], kMatch);
  }
  return out;
}

std::string join_patterns(const std::vector<PatternRef>& ps) {
  std::string out;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (i) out += ", ";
    out += print_pattern(*ps[i]);
  }
  return out;
}

std::string guard_suffix(const Clause& c) {
  return c.guard ? " when " + expr_at(**c.guard, kMatch) : "";
}

std::string inline_clauses(const std::vector<Clause>& cs, bool fun_heads) {
  std::string out;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    if (i) out += "; ";
    const Clause& c = cs[i];
    if (fun_heads) {
      out += "(" + join_patterns(c.patterns) + ")";
    } else if (!c.patterns.empty()) {
      out += print_pattern(*c.patterns.front());
    }
    if (fun_heads || !c.patterns.empty()) {
      out += guard_suffix(c) + " -> ";
    } else {
      out += expr_at(**c.guard, kMatch) + " -> ";
    }
    out += join_exprs(c.body);
  }
  return out;
}

int prec_of(const Expr& e) {
  if (const auto* b = std::get_if<expr::Binary>(&e.node)) return op_info(b->op).prec;
  if (std::holds_alternative<expr::Match>(e.node)) return kMatch;
  if (std::holds_alternative<expr::Unary>(e.node)) return kUnary;
  return kPrimary;
}

std::string expr_raw(const Expr& e) {
  return std::visit(
      overloaded{
          [](const expr::Lit& l) { return literal(l.value); },
          [](const expr::Var& v) { return v.name; },
          [](const expr::List& l) {
            std::string out = "[" + join_exprs(l.elements);
            if (l.tail) out += " | " + expr_at(**l.tail, kMatch);
            return out + "]";
          },
          [](const expr::Tuple& t) { return "{" + join_exprs(t.elements) + "}"; },
          [](const expr::Binary& b) {
            OpInfo info = op_info(b.op);
            int lp = info.assoc == Assoc::Left ? info.prec : info.prec + 1;
            int rp = info.assoc == Assoc::Right ? info.prec : info.prec + 1;
            if (b.op == BinaryOp::Send) lp = kOrElse;
            return expr_at(*b.lhs, lp) + " " + info.text + " " + expr_at(*b.rhs, rp);
          },
          [](const expr::Unary& u) {
            if (u.op == UnaryOp::Not) return "not " + expr_at(*u.operand, kUnary);
            // -5 would read back as a literal, so keep the operator visible.
            if (const auto* l = std::get_if<expr::Lit>(&u.operand->node); l && l->value.is_number()) {
              return "-(" + literal(l->value) + ")";
            }
            return "-" + expr_at(*u.operand, kUnary);
          },
          [](const expr::Match& m) {
            return print_pattern(*m.pattern) + " = " + expr_at(*m.value, kMatch);
          },
          [](const expr::LocalCall& c) { return format_atom(c.name) + "(" + join_exprs(c.args) + ")"; },
          [](const expr::RemoteCall& c) {
            return format_atom(c.module) + ":" + format_atom(c.name) + "(" + join_exprs(c.args) + ")";
          },
          [](const expr::Apply& a) {
            std::string f = expr_at(*a.fun, kPrimary);
            bool bare = std::holds_alternative<expr::Var>(a.fun->node) ||
                        std::holds_alternative<expr::Apply>(a.fun->node);
            if (!bare) f = "(" + f + ")";
            return f + "(" + join_exprs(a.args) + ")";
          },
          [](const expr::FunLit& f) { return "fun" + inline_clauses(f.clauses, true) + " end"; },
          [](const expr::FunName& f) {
            std::string out = "fun ";
            if (!f.module.empty()) out += format_atom(f.module) + ":";
            return out + format_atom(f.name) + "/" + std::to_string(f.arity);
          },
          [](const expr::Case& c) {
            return "case " + expr_at(*c.subject, kMatch) + " of " + inline_clauses(c.clauses, false) +
                   " end";
          },
          [](const expr::If& i) { return "if " + inline_clauses(i.clauses, false) + " end"; },
          [](const expr::ListComp& lc) {
            std::string out = "[" + expr_at(*lc.templ, kMatch) + " || " + print_pattern(*lc.pattern) +
                              " <- " + expr_at(*lc.source, kMatch);
            for (const auto& f : lc.filters) out += ", " + expr_at(*f, kMatch);
            return out + "]";
          },
          [](const expr::ParamRef& p) { return "?P(" + std::to_string(p.index) + ")"; },
          [](const expr::ResultRef&) { return std::string("?R"); },
      },
      e.node);
}

std::string expr_at(const Expr& e, int min_prec) {
  std::string s = expr_raw(e);
  if (prec_of(e) < min_prec) return "(" + s + ")";
  return s;
}

std::string decreasing(const contract::Decreases& d) {
  std::string params;
  for (std::size_t i = 0; i < d.params.size(); ++i) {
    if (i) params += ", ";
    params += "?P(" + std::to_string(d.params[i]) + ")";
  }
  if (d.params.size() != 1) params = "[" + params + "]";
  return std::string(d.strict ? "?SDECREASES(" : "?DECREASES(") + params + ").";
}

bool is_post(const Contract& c) { return std::holds_alternative<contract::Post>(c); }

}  // namespace

std::string print_expr(const Expr& e) { return expr_at(e, kMatch); }

std::string print_pattern(const Pattern& p) {
  return std::visit(overloaded{
                        [](const pat::Wildcard&) { return std::string("_"); },
                        [](const pat::Var& v) { return v.name; },
                        [](const pat::Lit& l) { return literal(l.value); },
                        [](const pat::Nil&) { return std::string("[]"); },
                        [](const pat::Tuple& t) { return "{" + join_patterns(t.elements) + "}"; },
                        [&](const pat::Cons&) {
                          std::string out = "[";
                          const Pattern* cur = &p;
                          bool first = true;
                          while (const auto* c = std::get_if<pat::Cons>(&cur->node)) {
                            if (!first) out += ", ";
                            first = false;
                            out += print_pattern(*c->head);
                            cur = c->tail.get();
                          }
                          if (!std::holds_alternative<pat::Nil>(cur->node)) {
                            out += " | " + print_pattern(*cur);
                          }
                          return out + "]";
                        },
                    },
                    p.node);
}

std::string print_clause_head(const std::string& name, const Clause& c) {
  return format_atom(name) + "(" + join_patterns(c.patterns) + ")" + guard_suffix(c) + " ->";
}

std::string print_contract(const Contract& c, const std::string& fname) {
  return std::visit(
      overloaded{
          [](const contract::Pre& p) { return "?PRE(" + print_expr(*p.condition) + ")."; },
          [](const contract::Post& p) { return "?POST(" + print_expr(*p.condition) + ")."; },
          [](const contract::Decreases& d) { return decreasing(d); },
          [](const contract::ExpectedTime& t) {
            return "?EXPECTED_TIME(" + print_expr(*t.budget) + ").";
          },
          [](const contract::Timeout& t) { return "?TIMEOUT(" + print_expr(*t.budget) + ")."; },
          [](const contract::Pure&) { return std::string("?PURE."); },
          [](const contract::Invariant& i) { return "?INVARIANT(" + print_expr(*i.function) + ")."; },
          [&](const contract::Spec& s) {
            std::string out = "-spec " + format_atom(fname) + "(";
            for (std::size_t i = 0; i < s.args.size(); ++i) {
              if (i) out += ", ";
              out += to_string(s.args[i]);
            }
            return out + ") -> " + to_string(s.result) + ".";
          },
      },
      c);
}

std::string print_fundef(const FunDef& f) {
  std::string out;
  for (const auto& c : f.contracts) {
    if (!is_post(c)) out += print_contract(c, f.name) + "\n";
  }
  for (std::size_t i = 0; i < f.clauses.size(); ++i) {
    const Clause& c = f.clauses[i];
    out += print_clause_head(f.name, c) + "\n";
    for (std::size_t j = 0; j < c.body.size(); ++j) {
      out += "    " + print_expr(*c.body[j]);
      out += j + 1 < c.body.size() ? ",\n" : "";
    }
    out += i + 1 < f.clauses.size() ? ";\n" : ".\n";
  }
  for (const auto& c : f.contracts) {
    if (is_post(c)) out += print_contract(c, f.name) + "\n";
  }
  return out;
}

std::string pretty_print(const ModuleAst& m) {
  std::string out = "-module(" + format_atom(m.name) + ").\n";
  if (m.invariant) out += "\n" + print_contract(*m.invariant) + "\n";
  for (const auto& f : m.fundefs) out += "\n" + print_fundef(f);
  return out;
}

}  // namespace edbc
