#include "edbc/parser.hpp"

#include <optional>

#include "lexer.hpp"

namespace edbc {

using detail::Tok;
using detail::Token;

namespace {

struct PendingSpec {
  std::string name;
  contract::Spec spec;
  Token at;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : ts_(std::move(tokens)) {}

  ModuleAst module() {
    expect_punct("-");
    expect_keyword_atom("module");
    expect_punct("(");
    m_.name = expect_atom().text;
    expect_punct(")");
    expect_punct(".");

    while (peek().kind != Tok::End) form();

    if (!pending_.empty()) {
      fail(pending_at_, "contract directive must be placed before the first clause of a function");
    }
    for (auto& ps : specs_) attach_spec(ps);
    return std::move(m_);
  }

  ExprRef single_expr() {
    ExprRef e = expr();
    if (peek().kind != Tok::End) fail(peek(), "unexpected trailing input");
    return e;
  }

  std::vector<ExprRef> expr_list() {
    std::vector<ExprRef> out;
    if (peek().kind == Tok::End) return out;
    out.push_back(expr());
    while (accept_punct(",")) out.push_back(expr());
    if (peek().kind != Tok::End) fail(peek(), "unexpected trailing input");
    return out;
  }

 private:
  // ---- token helpers -------------------------------------------------------

  const Token& peek(std::size_t k = 0) const {
    std::size_t i = std::min(pos_ + k, ts_.size() - 1);
    return ts_[i];
  }
  const Token& next() {
    const Token& t = ts_[pos_];
    if (pos_ + 1 < ts_.size()) ++pos_;
    return t;
  }
  [[noreturn]] static void fail(const Token& t, const std::string& msg) {
    throw ParseError(t.line, t.column, msg);
  }
  bool accept_punct(std::string_view p) {
    if (peek().punct(p)) {
      next();
      return true;
    }
    return false;
  }
  bool accept_keyword(std::string_view k) {
    if (peek().keyword(k)) {
      next();
      return true;
    }
    return false;
  }
  void expect_punct(std::string_view p) {
    if (!accept_punct(p)) {
      fail(peek(), "expected '" + std::string(p) + "' but found '" + peek().text + "'");
    }
  }
  void expect_keyword(std::string_view k) {
    if (!accept_keyword(k)) {
      fail(peek(), "expected '" + std::string(k) + "' but found '" + peek().text + "'");
    }
  }
  void expect_keyword_atom(std::string_view k) {
    if (peek().kind != Tok::Atom || peek().text != k) fail(peek(), "expected " + std::string(k));
    next();
  }
  const Token& expect_atom() {
    if (peek().kind != Tok::Atom) fail(peek(), "expected an atom");
    return next();
  }
  std::int64_t expect_int() {
    if (peek().kind != Tok::Int) fail(peek(), "expected an integer");
    return next().int_value;
  }

  // ---- module forms --------------------------------------------------------

  void form() {
    const Token& t = peek();
    if (t.punct("-")) {
      attribute();
      last_fun_.reset();
      return;
    }
    if (t.kind == Tok::Macro) {
      directive();
      return;
    }
    if (t.kind == Tok::Atom && peek(1).punct("(")) {
      function();
      return;
    }
    fail(t, "expected a function, attribute or contract directive");
  }

  void attribute() {
    const Token& dash = next();
    const Token& name = expect_atom();
    if (name.text != "spec") fail(name, "unsupported attribute -" + name.text);
    const Token& fname = expect_atom();
    expect_punct("(");
    contract::Spec spec;
    if (!peek().punct(")")) {
      spec.args.push_back(detail::parse_type_tokens(ts_, pos_));
      while (accept_punct(",")) spec.args.push_back(detail::parse_type_tokens(ts_, pos_));
    }
    expect_punct(")");
    expect_punct("->");
    spec.result = detail::parse_type_tokens(ts_, pos_);
    expect_punct(".");
    specs_.push_back(PendingSpec{fname.text, std::move(spec), dash});
  }

  std::vector<int> decreasing_params() {
    std::vector<int> params;
    auto one = [&] {
      const Token& m = peek();
      if (m.kind != Tok::Macro || m.text != "P") fail(m, "expected ?P(i) in decreasing contract");
      next();
      expect_punct("(");
      params.push_back(static_cast<int>(expect_int()));
      expect_punct(")");
    };
    if (accept_punct("[")) {
      one();
      while (accept_punct(",")) one();
      expect_punct("]");
    } else {
      one();
    }
    return params;
  }

  void directive() {
    const Token& t = next();
    const std::string& d = t.text;
    std::optional<Contract> c;
    bool is_post = false;
    if (d == "PURE") {
      c = contract::Pure{};
    } else {
      expect_punct("(");
      if (d == "PRE") {
        c = contract::Pre{expr()};
      } else if (d == "POST") {
        c = contract::Post{expr()};
        is_post = true;
      } else if (d == "DECREASES" || d == "DECREASE") {
        c = contract::Decreases{decreasing_params(), false};
      } else if (d == "SDECREASES" || d == "SDECREASE") {
        c = contract::Decreases{decreasing_params(), true};
      } else if (d == "EXPECTED_TIME") {
        c = contract::ExpectedTime{expr()};
      } else if (d == "TIMEOUT") {
        c = contract::Timeout{expr()};
      } else if (d == "INVARIANT") {
        ExprRef f = expr();
        expect_punct(")");
        expect_punct(".");
        if (m_.invariant) fail(t, "module declares more than one ?INVARIANT");
        m_.invariant = contract::Invariant{f};
        last_fun_.reset();
        return;
      } else {
        fail(t, "unknown contract directive ?" + d);
      }
      expect_punct(")");
    }
    expect_punct(".");

    if (is_post) {
      if (!last_fun_ || !pending_.empty()) {
        fail(t, "?POST must be placed right after the last clause of its function");
      }
      m_.fundefs[*last_fun_].contracts.push_back(std::move(*c));
      return;
    }
    if (pending_.empty()) pending_at_ = t;
    pending_.push_back(std::move(*c));
    last_fun_.reset();
  }

  void function() {
    const Token& first = peek();
    FunDef f;
    f.name = first.text;
    f.clauses.push_back(function_clause(f.name));
    f.arity = f.clauses.front().patterns.size();
    while (accept_punct(";")) {
      const Token& head = peek();
      Clause c = function_clause(f.name);
      if (c.patterns.size() != f.arity) fail(head, "clauses of " + f.name + " differ in arity");
      f.clauses.push_back(std::move(c));
    }
    expect_punct(".");
    if (m_.find(f.name, f.arity)) {
      fail(first, "function " + key_of(f.name, f.arity) + " already defined");
    }
    f.contracts = std::move(pending_);
    pending_.clear();
    m_.fundefs.push_back(std::move(f));
    last_fun_ = m_.fundefs.size() - 1;
  }

  Clause function_clause(const std::string& name) {
    const Token& head = expect_atom();
    if (head.text != name) fail(head, "function head mismatch: expected " + name);
    expect_punct("(");
    Clause c;
    if (!peek().punct(")")) {
      c.patterns.push_back(pattern());
      while (accept_punct(",")) c.patterns.push_back(pattern());
    }
    expect_punct(")");
    if (accept_keyword("when")) c.guard = guard();
    expect_punct("->");
    c.body = body();
    return c;
  }

  void attach_spec(PendingSpec& ps) {
    FunDef* target = nullptr;
    for (auto& f : m_.fundefs) {
      if (f.name == ps.name && f.arity == ps.spec.args.size()) target = &f;
    }
    if (!target) {
      fail(ps.at, "-spec for undefined function " + key_of(ps.name, ps.spec.args.size()));
    }
    for (const auto& c : target->contracts) {
      if (std::holds_alternative<contract::Spec>(c)) fail(ps.at, "duplicate -spec for " + ps.name);
    }
    target->contracts.insert(target->contracts.begin(), std::move(ps.spec));
  }

  // ---- expressions ---------------------------------------------------------

  std::vector<ExprRef> body() {
    std::vector<ExprRef> out;
    out.push_back(expr());
    while (accept_punct(",")) out.push_back(expr());
    return out;
  }

  ExprRef guard() {
    auto conj = [&] {
      ExprRef e = expr();
      while (accept_punct(",")) e = make_expr(expr::Binary{BinaryOp::AndAlso, e, expr()});
      return e;
    };
    ExprRef g = conj();
    while (accept_punct(";")) g = make_expr(expr::Binary{BinaryOp::OrElse, g, conj()});
    return g;
  }

  ExprRef expr() {
    const Token& start = peek();
    ExprRef lhs = orelse_expr();
    if (accept_punct("=")) {
      PatternRef p = to_pattern(lhs, start);
      return make_expr(expr::Match{p, expr()});
    }
    if (accept_punct("!")) return make_expr(expr::Binary{BinaryOp::Send, lhs, expr()});
    return lhs;
  }

  ExprRef orelse_expr() {
    ExprRef lhs = andalso_expr();
    if (accept_keyword("orelse")) return make_expr(expr::Binary{BinaryOp::OrElse, lhs, orelse_expr()});
    return lhs;
  }

  ExprRef andalso_expr() {
    ExprRef lhs = compare_expr();
    if (accept_keyword("andalso")) {
      return make_expr(expr::Binary{BinaryOp::AndAlso, lhs, andalso_expr()});
    }
    return lhs;
  }

  ExprRef compare_expr() {
    ExprRef lhs = append_expr();
    static const std::pair<std::string_view, BinaryOp> kOps[] = {
        {"==", BinaryOp::Eq},       {"/=", BinaryOp::Neq}, {"=:=", BinaryOp::ExactEq},
        {"=/=", BinaryOp::ExactNeq}, {"<", BinaryOp::Lt},   {"=<", BinaryOp::Le},
        {">", BinaryOp::Gt},        {">=", BinaryOp::Ge}};
    for (const auto& [text, op] : kOps) {
      if (accept_punct(text)) return make_expr(expr::Binary{op, lhs, append_expr()});
    }
    return lhs;
  }

  ExprRef append_expr() {
    ExprRef lhs = additive_expr();
    if (accept_punct("++")) return make_expr(expr::Binary{BinaryOp::Append, lhs, append_expr()});
    return lhs;
  }

  ExprRef additive_expr() {
    ExprRef lhs = multiplicative_expr();
    while (true) {
      if (accept_punct("+")) {
        lhs = make_expr(expr::Binary{BinaryOp::Add, lhs, multiplicative_expr()});
      } else if (accept_punct("-")) {
        lhs = make_expr(expr::Binary{BinaryOp::Sub, lhs, multiplicative_expr()});
      } else {
        return lhs;
      }
    }
  }

  ExprRef multiplicative_expr() {
    ExprRef lhs = unary_expr();
    while (true) {
      BinaryOp op;
      if (accept_punct("*")) {
        op = BinaryOp::Mul;
      } else if (accept_punct("/")) {
        op = BinaryOp::Div;
      } else if (accept_keyword("div")) {
        op = BinaryOp::IntDiv;
      } else if (accept_keyword("rem")) {
        op = BinaryOp::Rem;
      } else {
        return lhs;
      }
      lhs = make_expr(expr::Binary{op, lhs, unary_expr()});
    }
  }

  ExprRef unary_expr() {
    if (peek().punct("-")) {
      next();
      if (peek().kind == Tok::Int) return make_expr(expr::Lit{Value::integer(-next().int_value)});
      if (peek().kind == Tok::Float) return make_expr(expr::Lit{Value::flt(-next().float_value)});
      return make_expr(expr::Unary{UnaryOp::Neg, unary_expr()});
    }
    if (accept_keyword("not")) return make_expr(expr::Unary{UnaryOp::Not, unary_expr()});
    bool paren = peek().punct("(");
    ExprRef e = primary();
    bool callable = paren || std::holds_alternative<expr::Var>(e->node);
    while (callable && peek().punct("(")) e = make_expr(expr::Apply{e, call_args()});
    return e;
  }

  std::vector<ExprRef> call_args() {
    expect_punct("(");
    std::vector<ExprRef> args;
    if (!peek().punct(")")) {
      args.push_back(expr());
      while (accept_punct(",")) args.push_back(expr());
    }
    expect_punct(")");
    return args;
  }

  ExprRef primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Int: next(); return make_expr(expr::Lit{Value::integer(t.int_value)});
      case Tok::Float: next(); return make_expr(expr::Lit{Value::flt(t.float_value)});
      case Tok::String: next(); return make_expr(expr::Lit{Value::str(t.text)});
      case Tok::Var: next(); return make_expr(expr::Var{t.text});
      case Tok::Macro: return macro();
      case Tok::Atom: return atom_primary();
      case Tok::Punct:
        if (t.punct("(")) {
          next();
          ExprRef e = expr();
          expect_punct(")");
          return e;
        }
        if (t.punct("[")) return list();
        if (t.punct("{")) {
          next();
          std::vector<ExprRef> items;
          if (!peek().punct("}")) {
            items.push_back(expr());
            while (accept_punct(",")) items.push_back(expr());
          }
          expect_punct("}");
          return make_expr(expr::Tuple{std::move(items)});
        }
        break;
      case Tok::End: break;
    }
    fail(t, "unexpected '" + t.text + "'");
  }

  ExprRef macro() {
    const Token& t = next();
    if (t.text == "P") {
      expect_punct("(");
      auto i = expect_int();
      expect_punct(")");
      return make_expr(expr::ParamRef{static_cast<int>(i)});
    }
    if (t.text == "R") return make_expr(expr::ResultRef{});
    if (t.text == "MODULE" && !m_.name.empty()) return make_expr(expr::Lit{Value::atom(m_.name)});
    fail(t, "unknown macro ?" + t.text);
  }

  ExprRef atom_primary() {
    const Token& t = peek();
    if (!t.quoted) {
      if (t.text == "fun") return fun_expr();
      if (t.text == "case") return case_expr();
      if (t.text == "if") return if_expr();
      if (t.text == "true" || t.text == "false") {
        next();
        return make_expr(expr::Lit{Value::boolean(t.text == "true")});
      }
      if (detail::is_reserved_word(t.text)) fail(t, "unexpected keyword '" + t.text + "'");
    }
    next();
    if (peek().punct(":") && peek(1).kind == Tok::Atom) {
      next();
      const Token& fname = next();
      if (!peek().punct("(")) fail(peek(), "expected '(' after remote function name");
      return make_expr(expr::RemoteCall{t.text, fname.text, call_args()});
    }
    if (peek().punct("(")) return make_expr(expr::LocalCall{t.text, call_args()});
    return make_expr(expr::Lit{Value::atom(t.text)});
  }

  ExprRef fun_expr() {
    next();  // fun
    if (peek().kind == Tok::Atom) {
      const Token& first = next();
      std::string module;
      std::string name = first.text;
      if (accept_punct(":")) {
        module = name;
        name = expect_atom().text;
      }
      expect_punct("/");
      auto arity = expect_int();
      if (arity < 0) fail(first, "negative arity");
      return make_expr(expr::FunName{module, name, static_cast<std::size_t>(arity)});
    }
    std::vector<Clause> clauses;
    std::size_t arity = 0;
    do {
      const Token& at = peek();
      expect_punct("(");
      Clause c;
      if (!peek().punct(")")) {
        c.patterns.push_back(pattern());
        while (accept_punct(",")) c.patterns.push_back(pattern());
      }
      expect_punct(")");
      if (accept_keyword("when")) c.guard = guard();
      expect_punct("->");
      c.body = body();
      if (!clauses.empty() && c.patterns.size() != arity) fail(at, "fun clauses differ in arity");
      arity = c.patterns.size();
      clauses.push_back(std::move(c));
    } while (accept_punct(";"));
    expect_keyword("end");
    return make_fun(std::move(clauses));
  }

  ExprRef case_expr() {
    next();  // case
    ExprRef subject = expr();
    expect_keyword("of");
    std::vector<Clause> clauses;
    do {
      Clause c;
      c.patterns.push_back(pattern());
      if (accept_keyword("when")) c.guard = guard();
      expect_punct("->");
      c.body = body();
      clauses.push_back(std::move(c));
    } while (accept_punct(";"));
    expect_keyword("end");
    return make_expr(expr::Case{subject, std::move(clauses)});
  }

  ExprRef if_expr() {
    next();  // if
    std::vector<Clause> clauses;
    do {
      Clause c;
      c.guard = guard();
      expect_punct("->");
      c.body = body();
      clauses.push_back(std::move(c));
    } while (accept_punct(";"));
    expect_keyword("end");
    return make_expr(expr::If{std::move(clauses)});
  }

  ExprRef list() {
    next();  // [
    if (accept_punct("]")) return make_expr(expr::List{});
    ExprRef first = expr();
    if (accept_punct("||")) {
      const Token& at = peek();
      PatternRef p = to_pattern(orelse_expr(), at);
      expect_punct("<-");
      ExprRef source = expr();
      std::vector<ExprRef> filters;
      while (accept_punct(",")) {
        const Token& f = peek();
        filters.push_back(expr());
        if (peek().punct("<-")) fail(f, "only one generator per list comprehension is supported");
      }
      expect_punct("]");
      return make_expr(expr::ListComp{first, p, source, std::move(filters)});
    }
    expr::List l;
    l.elements.push_back(first);
    while (accept_punct(",")) l.elements.push_back(expr());
    if (accept_punct("|")) l.tail = expr();
    expect_punct("]");
    return make_expr(std::move(l));
  }

  // ---- patterns ------------------------------------------------------------

  PatternRef pattern() {
    const Token& at = peek();
    return to_pattern(orelse_expr(), at);
  }

  PatternRef to_pattern(const ExprRef& e, const Token& at) {
    const Expr& x = *e;
    if (const auto* v = std::get_if<expr::Var>(&x.node)) {
      if (v->name == "_") return make_pattern(pat::Wildcard{});
      return make_pattern(pat::Var{v->name});
    }
    if (const auto* l = std::get_if<expr::Lit>(&x.node)) return make_pattern(pat::Lit{l->value});
    if (const auto* t = std::get_if<expr::Tuple>(&x.node)) {
      pat::Tuple out;
      for (const auto& el : t->elements) out.elements.push_back(to_pattern(el, at));
      return make_pattern(std::move(out));
    }
    if (const auto* l = std::get_if<expr::List>(&x.node)) {
      PatternRef tail = l->tail ? to_pattern(*l->tail, at) : make_pattern(pat::Nil{});
      for (auto it = l->elements.rbegin(); it != l->elements.rend(); ++it) {
        tail = make_pattern(pat::Cons{to_pattern(*it, at), tail});
      }
      return tail;
    }
    fail(at, "illegal pattern");
  }

  std::vector<Token> ts_;
  std::size_t pos_ = 0;
  ModuleAst m_;
  std::vector<Contract> pending_;
  Token pending_at_;
  std::optional<std::size_t> last_fun_;
  std::vector<PendingSpec> specs_;
};

}  // namespace

ModuleAst parse_module(std::string_view source) {
  Parser p(detail::tokenize(source));
  ModuleAst m = p.module();
  validate_module(m);
  return m;
}

ExprRef parse_expr(std::string_view source) {
  Parser p(detail::tokenize(source));
  return p.single_expr();
}

std::vector<ExprRef> parse_expr_list(std::string_view source) {
  Parser p(detail::tokenize(source));
  return p.expr_list();
}

}  // namespace edbc
