#include "edbc/ast.hpp"

#include <algorithm>

namespace edbc {

namespace {

template <class... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

void visit_clause(const Clause& c, const std::function<void(const Expr&)>& fn) {
  if (c.guard) visit(**c.guard, fn);
  for (const auto& b : c.body) visit(*b, fn);
}

std::vector<ExprRef> rewrite_all(const std::vector<ExprRef>& xs,
                                 const std::function<std::optional<ExprRef>(const Expr&)>& fn) {
  std::vector<ExprRef> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(rewrite(x, fn));
  return out;
}

std::vector<Clause> rewrite_clauses(const std::vector<Clause>& cs,
                                    const std::function<std::optional<ExprRef>(const Expr&)>& fn) {
  std::vector<Clause> out;
  out.reserve(cs.size());
  for (const auto& c : cs) out.push_back(rewrite(c, fn));
  return out;
}

}  // namespace

const FunDef* ModuleAst::find(const std::string& fname, std::size_t arity) const {
  for (const auto& f : fundefs) {
    if (f.name == fname && f.arity == arity) return &f;
  }
  return nullptr;
}

std::string key_of(const std::string& name, std::size_t arity) {
  return name + "/" + std::to_string(arity);
}

ExprRef make_fun(std::vector<Clause> clauses) {
  std::vector<std::string> vars;
  for (const auto& c : clauses) {
    for (const auto& p : c.patterns) collect_vars(*p, vars);
    if (c.guard) collect_vars(**c.guard, vars);
    for (const auto& b : c.body) collect_vars(*b, vars);
  }
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  return make_expr(expr::FunLit{std::move(clauses),
                                std::make_shared<const std::vector<std::string>>(std::move(vars))});
}

void collect_vars(const Pattern& p, std::vector<std::string>& out) {
  std::visit(overloaded{
                 [&](const pat::Var& v) { out.push_back(v.name); },
                 [&](const pat::Cons& c) {
                   collect_vars(*c.head, out);
                   collect_vars(*c.tail, out);
                 },
                 [&](const pat::Tuple& t) {
                   for (const auto& e : t.elements) collect_vars(*e, out);
                 },
                 [](const auto&) {},
             },
             p.node);
}

void collect_vars(const Expr& e, std::vector<std::string>& out) {
  visit(e, [&](const Expr& x) {
    if (const auto* v = std::get_if<expr::Var>(&x.node)) out.push_back(v->name);
    if (const auto* m = std::get_if<expr::Match>(&x.node)) collect_vars(*m->pattern, out);
    if (const auto* lc = std::get_if<expr::ListComp>(&x.node)) collect_vars(*lc->pattern, out);
    auto clauses = [&](const std::vector<Clause>& cs) {
      for (const auto& c : cs) {
        for (const auto& p : c.patterns) collect_vars(*p, out);
      }
    };
    if (const auto* f = std::get_if<expr::FunLit>(&x.node)) clauses(f->clauses);
    if (const auto* c = std::get_if<expr::Case>(&x.node)) clauses(c->clauses);
  });
}

void visit(const Expr& e, const std::function<void(const Expr&)>& fn) {
  fn(e);
  std::visit(overloaded{
                 [&](const expr::List& l) {
                   for (const auto& x : l.elements) visit(*x, fn);
                   if (l.tail) visit(**l.tail, fn);
                 },
                 [&](const expr::Tuple& t) {
                   for (const auto& x : t.elements) visit(*x, fn);
                 },
                 [&](const expr::Binary& b) {
                   visit(*b.lhs, fn);
                   visit(*b.rhs, fn);
                 },
                 [&](const expr::Unary& u) { visit(*u.operand, fn); },
                 [&](const expr::Match& m) { visit(*m.value, fn); },
                 [&](const expr::LocalCall& c) {
                   for (const auto& x : c.args) visit(*x, fn);
                 },
                 [&](const expr::RemoteCall& c) {
                   for (const auto& x : c.args) visit(*x, fn);
                 },
                 [&](const expr::Apply& a) {
                   visit(*a.fun, fn);
                   for (const auto& x : a.args) visit(*x, fn);
                 },
                 [&](const expr::FunLit& f) {
                   for (const auto& c : f.clauses) visit_clause(c, fn);
                 },
                 [&](const expr::Case& c) {
                   visit(*c.subject, fn);
                   for (const auto& cl : c.clauses) visit_clause(cl, fn);
                 },
                 [&](const expr::If& i) {
                   for (const auto& cl : i.clauses) visit_clause(cl, fn);
                 },
                 [&](const expr::ListComp& lc) {
                   visit(*lc.templ, fn);
                   visit(*lc.source, fn);
                   for (const auto& x : lc.filters) visit(*x, fn);
                 },
                 [](const auto&) {},
             },
             e.node);
}

Clause rewrite(const Clause& c, const std::function<std::optional<ExprRef>(const Expr&)>& fn) {
  Clause out;
  out.patterns = c.patterns;
  if (c.guard) out.guard = rewrite(*c.guard, fn);
  out.body = rewrite_all(c.body, fn);
  return out;
}

ExprRef rewrite(const ExprRef& e, const std::function<std::optional<ExprRef>(const Expr&)>& fn) {
  if (auto replaced = fn(*e)) return *replaced;
  return std::visit(
      overloaded{
          [&](const expr::List& l) {
            expr::List out{rewrite_all(l.elements, fn), std::nullopt};
            if (l.tail) out.tail = rewrite(*l.tail, fn);
            return make_expr(std::move(out));
          },
          [&](const expr::Tuple& t) { return make_expr(expr::Tuple{rewrite_all(t.elements, fn)}); },
          [&](const expr::Binary& b) {
            return make_expr(expr::Binary{b.op, rewrite(b.lhs, fn), rewrite(b.rhs, fn)});
          },
          [&](const expr::Unary& u) {
            return make_expr(expr::Unary{u.op, rewrite(u.operand, fn)});
          },
          [&](const expr::Match& m) {
            return make_expr(expr::Match{m.pattern, rewrite(m.value, fn)});
          },
          [&](const expr::LocalCall& c) {
            return make_expr(expr::LocalCall{c.name, rewrite_all(c.args, fn)});
          },
          [&](const expr::RemoteCall& c) {
            return make_expr(expr::RemoteCall{c.module, c.name, rewrite_all(c.args, fn)});
          },
          [&](const expr::Apply& a) {
            return make_expr(expr::Apply{rewrite(a.fun, fn), rewrite_all(a.args, fn)});
          },
          [&](const expr::FunLit& f) { return make_fun(rewrite_clauses(f.clauses, fn)); },
          [&](const expr::Case& c) {
            return make_expr(expr::Case{rewrite(c.subject, fn), rewrite_clauses(c.clauses, fn)});
          },
          [&](const expr::If& i) { return make_expr(expr::If{rewrite_clauses(i.clauses, fn)}); },
          [&](const expr::ListComp& lc) {
            return make_expr(expr::ListComp{rewrite(lc.templ, fn), lc.pattern,
                                            rewrite(lc.source, fn), rewrite_all(lc.filters, fn)});
          },
          [&](const auto&) { return e; },
      },
      e->node);
}

}  // namespace edbc
