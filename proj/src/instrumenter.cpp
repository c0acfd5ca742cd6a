#include "edbc/instrumenter.hpp"

#include <algorithm>

namespace edbc {

namespace {

ExprRef atom_lit(const std::string& a) { return make_expr(expr::Lit{Value::atom(a)}); }
ExprRef str_lit(const std::string& s) { return make_expr(expr::Lit{Value::str(s)}); }
ExprRef var(const std::string& name) { return make_expr(expr::Var{name}); }
ExprRef list_of(std::vector<ExprRef> xs) { return make_expr(expr::List{std::move(xs), std::nullopt}); }
ExprRef call(const std::string& name, std::vector<ExprRef> args) {
  return make_expr(expr::LocalCall{name, std::move(args)});
}
ExprRef thunk(std::vector<ExprRef> body) { return make_fun({Clause{{}, std::nullopt, std::move(body)}}); }

std::string fv(const InstrumentState& st, std::size_t i) { return st.prefix + std::to_string(i); }

std::vector<ExprRef> fv_exprs(const InstrumentState& st, std::size_t n) {
  std::vector<ExprRef> out;
  for (std::size_t i = 1; i <= n; ++i) out.push_back(var(fv(st, i)));
  return out;
}

std::vector<PatternRef> fv_patterns(const InstrumentState& st, std::size_t n) {
  std::vector<PatternRef> out;
  for (std::size_t i = 1; i <= n; ++i) out.push_back(make_pattern(pat::Var{fv(st, i)}));
  return out;
}

PatternRef list_pattern(std::vector<PatternRef> items) {
  PatternRef out = make_pattern(pat::Nil{});
  for (auto it = items.rbegin(); it != items.rend(); ++it) out = make_pattern(pat::Cons{*it, out});
  return out;
}

// Body of a zero-argument condition function, with ?P/?R still in place.
std::vector<ExprRef> condition_body(const ExprRef& cond, const ModuleAst& m, const std::string& what) {
  const Clause* single = nullptr;
  if (const auto* f = std::get_if<expr::FunLit>(&cond->node)) {
    if (f->clauses.size() == 1) single = &f->clauses.front();
  } else if (const auto* r = std::get_if<expr::FunName>(&cond->node)) {
    const FunDef* def = m.find(r->name, r->arity);
    if (!def) throw InstrumentError(what + ": undefined function " + key_of(r->name, r->arity));
    if (def->clauses.size() != 1 || def->clauses.front().guard) {
      throw InstrumentError(what + ": contract function " + key_of(r->name, r->arity) +
                            " must have a single unguarded clause");
    }
    single = &def->clauses.front();
  }
  if (single && single->patterns.empty() && !single->guard) return single->body;
  return {make_expr(expr::Apply{cond, {}})};
}

std::vector<ExprRef> substitute(const std::vector<ExprRef>& body, const InstrumentState& st) {
  auto fn = [&](const Expr& e) -> std::optional<ExprRef> {
    if (const auto* p = std::get_if<expr::ParamRef>(&e.node)) {
      return var(fv(st, static_cast<std::size_t>(p->index)));
    }
    if (std::holds_alternative<expr::ResultRef>(e.node)) return var(st.prefix + "Res");
    return std::nullopt;
  };
  std::vector<ExprRef> out;
  for (const auto& b : body) out.push_back(rewrite(b, fn));
  return out;
}

std::string choose_prefix(const FunDef& f, const ModuleAst& m) {
  std::vector<std::string> vars;
  auto clauses = [&](const std::vector<Clause>& cs) {
    for (const auto& c : cs) {
      for (const auto& p : c.patterns) collect_vars(*p, vars);
      if (c.guard) collect_vars(**c.guard, vars);
      for (const auto& b : c.body) collect_vars(*b, vars);
    }
  };
  clauses(f.clauses);
  for (const auto& c : f.contracts) {
    std::visit(
        [&](const auto& k) {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, contract::Pre> || std::is_same_v<K, contract::Post>) {
            collect_vars(*k.condition, vars);
            if (const auto* r = std::get_if<expr::FunName>(&k.condition->node)) {
              if (const FunDef* def = m.find(r->name, r->arity)) clauses(def->clauses);
            }
          } else if constexpr (std::is_same_v<K, contract::ExpectedTime> ||
                               std::is_same_v<K, contract::Timeout>) {
            collect_vars(*k.budget, vars);
          }
        },
        c);
  }
  if (m.invariant) collect_vars(*m.invariant->function, vars);
  std::string prefix = "FV";
  auto taken = [&] {
    return std::any_of(vars.begin(), vars.end(),
                       [&](const std::string& v) { return v.rfind(prefix, 0) == 0; });
  };
  while (taken()) prefix += "_";
  return prefix;
}

bool is_invariant_target(const FunDef& f) {
  return (f.name == "init" && f.arity <= 1) || (f.name == "handle_call" && f.arity == 3) ||
         (f.name == "handle_cast" && f.arity == 2);
}

FunDef renamed(const FunDef& f, const std::string& name) {
  FunDef out = f;
  out.name = name;
  out.contracts.clear();
  return out;
}

// Head pattern as an expression; wildcards become fresh variables, which
// are also written back into the pattern.
std::pair<PatternRef, ExprRef> pattern_as_expr(const PatternRef& p, const InstrumentState& st, int& wild) {
  return std::visit(
      [&](const auto& n) -> std::pair<PatternRef, ExprRef> {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, pat::Wildcard>) {
          std::string name = st.prefix + "W" + std::to_string(++wild);
          return {make_pattern(pat::Var{name}), var(name)};
        } else if constexpr (std::is_same_v<N, pat::Var>) {
          return {p, var(n.name)};
        } else if constexpr (std::is_same_v<N, pat::Lit>) {
          return {p, make_expr(expr::Lit{n.value})};
        } else if constexpr (std::is_same_v<N, pat::Nil>) {
          return {p, list_of({})};
        } else if constexpr (std::is_same_v<N, pat::Cons>) {
          auto [hp, he] = pattern_as_expr(n.head, st, wild);
          auto [tp, te] = pattern_as_expr(n.tail, st, wild);
          return {make_pattern(pat::Cons{hp, tp}), make_expr(expr::List{{he}, te})};
        } else {
          std::vector<PatternRef> ps;
          std::vector<ExprRef> es;
          for (const auto& e : n.elements) {
            auto [ep, ee] = pattern_as_expr(e, st, wild);
            ps.push_back(ep);
            es.push_back(ee);
          }
          return {make_pattern(pat::Tuple{ps}), make_expr(expr::Tuple{es})};
        }
      },
      p->node);
}

bool calls(const Clause& c, const std::string& name, std::size_t arity) {
  bool found = false;
  auto probe = [&](const Expr& e) {
    if (const auto* lc = std::get_if<expr::LocalCall>(&e.node)) {
      if (lc->name == name && lc->args.size() == arity) found = true;
    }
  };
  if (c.guard) visit(**c.guard, probe);
  for (const auto& b : c.body) visit(*b, probe);
  return found;
}

}  // namespace

FreshNamer::FreshNamer(const ModuleAst& m) {
  for (const auto& f : m.fundefs) used_.insert(f.name);
}

std::string FreshNamer::get_free_name(const std::string& base) {
  int& k = next_[base];
  while (true) {
    std::string name = base + "__edbc" + std::to_string(k++);
    if (used_.insert(name).second) return name;
  }
}

std::string to_string(FunRole r) {
  switch (r) {
    case FunRole::Plain: return "plain";
    case FunRole::Entry: return "entry";
    case FunRole::PreWrapper: return "pre";
    case FunRole::PostWrapper: return "post";
    case FunRole::Original: return "original";
    case FunRole::DecreaseChecker: return "decrease";
  }
  return "plain";
}

FunRole InstrumentedModule::role_of(const std::string& name, std::size_t arity) const {
  auto it = roles.find(key_of(name, arity));
  return it == roles.end() ? FunRole::Plain : it->second;
}

ModuleAst InstrumentedModule::as_module() const {
  ModuleAst m;
  m.name = module;
  m.fundefs = fundefs;
  return m;
}

std::vector<LoweredContract> read_contracts(const FunDef& f, const ModuleAst& m) {
  using K = LoweredContract::Kind;
  const std::string where = key_of(f.name, f.arity);
  std::vector<LoweredContract> out;
  bool pure = false;
  bool timed = false;
  bool decreasing = false;
  for (const auto& c : f.contracts) {
    if (const auto* s = std::get_if<contract::Spec>(&c)) {
      std::vector<ExprRef> params;
      std::vector<ExprRef> types;
      for (std::size_t i = 0; i < s->args.size(); ++i) {
        params.push_back(make_expr(expr::ParamRef{static_cast<int>(i + 1)}));
        types.push_back(str_lit(to_string(s->args[i])));
      }
      // A spec becomes the first pre/post pair regardless of its position.
      out.insert(out.begin(),
                 {LoweredContract{K::Pre, "spec", {call("edbc_spec_args", {list_of(params), list_of(types)})}, {}},
                  LoweredContract{K::Post, "spec",
                                  {call("edbc_spec_result",
                                        {make_expr(expr::ResultRef{}), str_lit(to_string(s->result))})},
                                  {}}});
    } else if (const auto* p = std::get_if<contract::Pre>(&c)) {
      out.push_back({K::Pre, "", condition_body(p->condition, m, where), {}});
    } else if (const auto* p = std::get_if<contract::Post>(&c)) {
      out.push_back({K::Post, "", condition_body(p->condition, m, where), {}});
    } else if (const auto* d = std::get_if<contract::Decreases>(&c)) {
      if (decreasing) throw InstrumentError(where + ": more than one decreasing contract");
      decreasing = true;
      out.push_back({K::Decreases, "", {}, *d});
    } else if (const auto* t = std::get_if<contract::ExpectedTime>(&c)) {
      timed = true;
      out.push_back({K::Pre, "expected_time", condition_body(t->budget, m, where), {}});
    } else if (const auto* t = std::get_if<contract::Timeout>(&c)) {
      timed = true;
      out.push_back({K::Pre, "timeout", condition_body(t->budget, m, where), {}});
    } else if (std::holds_alternative<contract::Pure>(c)) {
      pure = true;
      out.push_back({K::Pre, "pure", {make_expr(expr::Lit{Value::boolean(true)})}, {}});
    }
  }
  if (pure && timed) {
    throw InstrumentError(where + ": ?PURE is not compatible with execution-time contracts");
  }
  return out;
}

void check_contracts(const ModuleAst& m) {
  for (const auto& f : m.fundefs) read_contracts(f, m);
}

FunDef inst_put_info(const FunDef& f, InstrumentState& st) {
  std::string fresh = st.namer.get_free_name(f.name);
  FunDef entry;
  entry.name = f.name;
  entry.arity = f.arity;
  entry.clauses.push_back(Clause{fv_patterns(st, f.arity), std::nullopt,
                                 {call("edbc_put_info", {atom_lit(f.name), list_of(fv_exprs(st, f.arity))}),
                                  call(fresh, fv_exprs(st, f.arity))}});
  st.roles[key_of(entry.name, entry.arity)] = FunRole::Entry;
  st.helpers.push_back(std::move(entry));
  return renamed(f, fresh);
}

FunDef inst_decr(const contract::Decreases& c, const FunDef& f, const std::string& original_name,
                 std::size_t arity, InstrumentState& st) {
  std::string checker_name = st.namer.get_free_name(original_name);
  const std::string prev = st.prefix + "P";

  std::vector<ExprRef> selected;
  for (int i : c.params) selected.push_back(var(fv(st, static_cast<std::size_t>(i))));
  FunDef checker;
  checker.name = checker_name;
  checker.arity = 2;
  checker.clauses.push_back(Clause{
      {make_pattern(pat::Var{prev}), list_pattern(fv_patterns(st, arity))},
      std::nullopt,
      {call("edbc_decrease_check",
            {var(prev), list_of(selected), make_expr(expr::Lit{Value::boolean(c.strict)}),
             list_of(fv_exprs(st, arity)), thunk({call(original_name, fv_exprs(st, arity))})})}});
  st.roles[key_of(checker.name, checker.arity)] = FunRole::DecreaseChecker;
  st.checkers.push_back(std::move(checker));

  FunDef out = f;
  for (auto& clause : out.clauses) {
    if (!calls(clause, original_name, arity)) continue;
    int wild = 0;
    std::vector<ExprRef> current;
    for (int i : c.params) {
      auto& pat = clause.patterns[static_cast<std::size_t>(i - 1)];
      auto [np, e] = pattern_as_expr(pat, st, wild);
      pat = np;
      current.push_back(e);
    }
    std::function<std::optional<ExprRef>(const Expr&)> fn;
    fn = [&](const Expr& e) -> std::optional<ExprRef> {
      const auto* lc = std::get_if<expr::LocalCall>(&e.node);
      if (!lc || lc->name != original_name || lc->args.size() != arity) return std::nullopt;
      std::vector<ExprRef> args;
      for (const auto& a : lc->args) args.push_back(rewrite(a, fn));
      return call(checker_name, {list_of(current), list_of(std::move(args))});
    };
    clause = rewrite(clause, fn);
  }
  return out;
}

namespace {

FunDef wrap(const LoweredContract& c, const FunDef& f, const std::string& base, InstrumentState& st,
            bool post) {
  std::string fresh = st.namer.get_free_name(base);
  std::vector<PatternRef> params;
  if (post) params.push_back(make_pattern(pat::Var{st.prefix + "Res"}));
  ExprRef cond = make_fun({Clause{params, std::nullopt, substitute(c.body, st)}});
  if (!c.tag.empty()) cond = make_expr(expr::Tuple{{atom_lit(c.tag), cond}});
  FunDef wrapper;
  wrapper.name = f.name;
  wrapper.arity = f.arity;
  wrapper.clauses.push_back(Clause{fv_patterns(st, f.arity), std::nullopt,
                                   {call(post ? "edbc_post" : "edbc_pre",
                                         {cond, thunk({call(fresh, fv_exprs(st, f.arity))})})}});
  st.roles[key_of(wrapper.name, wrapper.arity)] = post ? FunRole::PostWrapper : FunRole::PreWrapper;
  st.helpers.push_back(std::move(wrapper));
  return renamed(f, fresh);
}

}  // namespace

FunDef inst_pre(const LoweredContract& c, const FunDef& f, const std::string& base, InstrumentState& st) {
  return wrap(c, f, base, st, false);
}

FunDef inst_post(const LoweredContract& c, const FunDef& f, const std::string& base,
                 InstrumentState& st) {
  return wrap(c, f, base, st, true);
}

InstrumentedModule instrument_module(const ModuleAst& m, bool enabled) {
  InstrumentedModule out;
  out.module = m.name;
  if (!enabled) {
    for (const auto& f : m.fundefs) {
      out.fundefs.push_back(renamed(f, f.name));
      out.entry_points[key_of(f.name, f.arity)] = f.name;
    }
    return out;
  }

  InstrumentState st(m);
  for (const auto& f : m.fundefs) {
    const std::string key = key_of(f.name, f.arity);
    out.entry_points[key] = f.name;
    std::vector<LoweredContract> contracts = read_contracts(f, m);
    if (m.invariant && is_invariant_target(f)) {
      contracts.push_back({LoweredContract::Kind::Post,
                           "invariant",
                           {call("edbc_invariant", {m.invariant->function, atom_lit(f.name),
                                                    make_expr(expr::ResultRef{})})},
                           {}});
    }
    if (contracts.empty()) {
      out.fundefs.push_back(f);
      continue;
    }

    st.prefix = choose_prefix(f, m);
    st.helpers.clear();
    st.checkers.clear();
    FunDef cur = inst_put_info(f, st);
    for (const auto& c : contracts) {
      if (c.kind == LoweredContract::Kind::Decreases) {
        cur = inst_decr(c.decreases, cur, f.name, f.arity, st);
      }
    }
    for (const auto& c : contracts) {
      if (c.kind == LoweredContract::Kind::Pre) cur = inst_pre(c, cur, f.name, st);
      if (c.kind == LoweredContract::Kind::Post) cur = inst_post(c, cur, f.name, st);
    }
    st.roles[key_of(cur.name, cur.arity)] = FunRole::Original;
    for (auto& h : st.helpers) out.fundefs.push_back(std::move(h));
    out.fundefs.push_back(std::move(cur));
    for (auto& h : st.checkers) out.fundefs.push_back(std::move(h));
  }
  out.roles = st.roles;
  for (const auto& f : out.fundefs) out.roles.try_emplace(key_of(f.name, f.arity), FunRole::Plain);
  return out;
}

}  // namespace edbc
