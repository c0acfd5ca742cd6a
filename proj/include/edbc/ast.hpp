#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "edbc/ref.hpp"
#include "edbc/typespec.hpp"
#include "edbc/value.hpp"

namespace edbc {

struct Pattern;
struct Expr;
using PatternRef = Ref<Pattern>;
using ExprRef = Ref<Expr>;

namespace pat {
struct Wildcard {
  bool operator==(const Wildcard&) const = default;
};
struct Var {
  std::string name;
  bool operator==(const Var&) const = default;
};
/// Atom, integer, float, boolean or string literal.
struct Lit {
  Value value;
  bool operator==(const Lit&) const = default;
};
/// `[Head | Tail]`; `[a, b]` is Cons(a, Cons(b, Nil)).
struct Cons {
  PatternRef head;
  PatternRef tail;
  bool operator==(const Cons&) const = default;
};
struct Nil {
  bool operator==(const Nil&) const = default;
};
struct Tuple {
  std::vector<PatternRef> elements;
  bool operator==(const Tuple&) const = default;
};
}  // namespace pat

struct Pattern {
  std::variant<pat::Wildcard, pat::Var, pat::Lit, pat::Cons, pat::Nil, pat::Tuple> node;
  bool operator==(const Pattern&) const = default;
};

enum class BinaryOp {
  Add,
  Sub,
  Mul,
  Div,
  IntDiv,
  Rem,
  Eq,
  Neq,
  ExactEq,
  ExactNeq,
  Lt,
  Le,
  Gt,
  Ge,
  AndAlso,
  OrElse,
  Append,
  Send,
};

enum class UnaryOp { Neg, Not };

/// One clause of a function, fun literal, case or if.
/// Case clauses have exactly one pattern; if clauses have none.
struct Clause {
  std::vector<PatternRef> patterns;
  std::optional<ExprRef> guard;
  std::vector<ExprRef> body;
  bool operator==(const Clause&) const = default;
};

namespace expr {
struct Lit {
  Value value;
  bool operator==(const Lit&) const = default;
};
struct Var {
  std::string name;
  bool operator==(const Var&) const = default;
};
/// `[e1, ..., en | tail]`; tail absent means a proper list.
struct List {
  std::vector<ExprRef> elements;
  std::optional<ExprRef> tail;
  bool operator==(const List&) const = default;
};
struct Tuple {
  std::vector<ExprRef> elements;
  bool operator==(const Tuple&) const = default;
};
struct Binary {
  BinaryOp op;
  ExprRef lhs;
  ExprRef rhs;
  bool operator==(const Binary&) const = default;
};
struct Unary {
  UnaryOp op;
  ExprRef operand;
  bool operator==(const Unary&) const = default;
};
struct Match {
  PatternRef pattern;
  ExprRef value;
  bool operator==(const Match&) const = default;
};
struct LocalCall {
  std::string name;
  std::vector<ExprRef> args;
  bool operator==(const LocalCall&) const = default;
};
struct RemoteCall {
  std::string module;
  std::string name;
  std::vector<ExprRef> args;
  bool operator==(const RemoteCall&) const = default;
};
/// Call through an expression, e.g. `F(X)` or `(fun(Y) -> Y end)(1)`.
struct Apply {
  ExprRef fun;
  std::vector<ExprRef> args;
  bool operator==(const Apply&) const = default;
};
/// Anonymous `fun (...) -> ... end`. `vars` lists every variable name
/// mentioned inside, which bounds what a closure needs to capture.
struct FunLit {
  std::vector<Clause> clauses;
  std::shared_ptr<const std::vector<std::string>> vars;
  bool operator==(const FunLit& o) const { return clauses == o.clauses; }
};
/// `fun name/arity` (module empty) or `fun mod:name/arity`.
struct FunName {
  std::string module;
  std::string name;
  std::size_t arity = 0;
  bool operator==(const FunName&) const = default;
};
struct Case {
  ExprRef subject;
  std::vector<Clause> clauses;
  bool operator==(const Case&) const = default;
};
struct If {
  std::vector<Clause> clauses;
  bool operator==(const If&) const = default;
};
/// `[Template || Pattern <- Source, Filter...]` with a single generator.
struct ListComp {
  ExprRef templ;
  PatternRef pattern;
  ExprRef source;
  std::vector<ExprRef> filters;
  bool operator==(const ListComp&) const = default;
};
/// `?P(i)`, 1-based.
struct ParamRef {
  int index = 1;
  bool operator==(const ParamRef&) const = default;
};
/// `?R`
struct ResultRef {
  bool operator==(const ResultRef&) const = default;
};
}  // namespace expr

struct Expr {
  std::variant<expr::Lit, expr::Var, expr::List, expr::Tuple, expr::Binary, expr::Unary,
               expr::Match, expr::LocalCall, expr::RemoteCall, expr::Apply, expr::FunLit,
               expr::FunName, expr::Case, expr::If, expr::ListComp, expr::ParamRef,
               expr::ResultRef>
      node;
  bool operator==(const Expr&) const = default;
};

namespace contract {
struct Pre {
  ExprRef condition;
  bool operator==(const Pre&) const = default;
};
struct Post {
  ExprRef condition;
  bool operator==(const Post&) const = default;
};
struct Decreases {
  std::vector<int> params;
  bool strict = false;
  bool operator==(const Decreases&) const = default;
};
struct ExpectedTime {
  ExprRef budget;
  bool operator==(const ExpectedTime&) const = default;
};
struct Timeout {
  ExprRef budget;
  bool operator==(const Timeout&) const = default;
};
struct Pure {
  bool operator==(const Pure&) const = default;
};
struct Invariant {
  ExprRef function;
  bool operator==(const Invariant&) const = default;
};
struct Spec {
  std::vector<TypeSpec> args;
  TypeSpec result;
  bool operator==(const Spec&) const = default;
};
}  // namespace contract

using Contract = std::variant<contract::Pre, contract::Post, contract::Decreases,
                              contract::ExpectedTime, contract::Timeout, contract::Pure,
                              contract::Invariant, contract::Spec>;

struct FunDef {
  std::string name;
  std::size_t arity = 0;
  std::vector<Clause> clauses;
  std::vector<Contract> contracts;  // source order; a Spec, if any, comes first
  bool operator==(const FunDef&) const = default;
};

struct ModuleAst {
  std::string name;
  std::vector<FunDef> fundefs;
  std::optional<contract::Invariant> invariant;

  const FunDef* find(const std::string& fname, std::size_t arity) const;
  bool operator==(const ModuleAst&) const = default;
};

// Node construction helpers.
ExprRef make_expr(auto node) { return ExprRef(Expr{std::move(node)}); }
PatternRef make_pattern(auto node) { return PatternRef(Pattern{std::move(node)}); }
/// Builds a fun literal and records the variables it mentions.
ExprRef make_fun(std::vector<Clause> clauses);

/// Every variable name occurring in an expression / pattern (in any scope).
void collect_vars(const Expr& e, std::vector<std::string>& out);
void collect_vars(const Pattern& p, std::vector<std::string>& out);

std::string key_of(const std::string& name, std::size_t arity);

/// Pre-order walk over an expression and all nested expressions, including
/// clause guards and bodies.
void visit(const Expr& e, const std::function<void(const Expr&)>& fn);

/// Rebuilds `e` top-down. Where `fn` returns a replacement the subtree is
/// replaced without descending further; otherwise children are rewritten.
/// Leaf nodes that are not replaced are shared, not copied.
ExprRef rewrite(const ExprRef& e, const std::function<std::optional<ExprRef>(const Expr&)>& fn);
Clause rewrite(const Clause& c, const std::function<std::optional<ExprRef>(const Expr&)>& fn);

}  // namespace edbc
