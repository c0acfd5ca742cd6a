#include "interp.hpp"

#include <algorithm>
#include <cmath>

namespace edbc {

namespace {

template <class... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

const Value* lookup(const Env& env, const std::string& name) {
  for (auto it = env.rbegin(); it != env.rend(); ++it) {
    if (it->first == name) return &it->second;
  }
  return nullptr;
}

// Removes bindings for every variable a set of patterns introduces, so a
// fun head or generator binds fresh names instead of matching outer ones.
Env shadowed(const Env& env, const std::vector<PatternRef>& patterns) {
  std::vector<std::string> names;
  for (const auto& p : patterns) collect_vars(*p, names);
  if (names.empty()) return env;
  Env out;
  out.reserve(env.size());
  for (const auto& b : env) {
    if (std::find(names.begin(), names.end(), b.first) == names.end()) out.push_back(b);
  }
  return out;
}

[[noreturn]] void badarith(const std::string& what) { throw RuntimeError("badarith", what); }

Value arith(BinaryOp op, const Value& a, const Value& b) {
  if (!a.is_number() || !b.is_number()) {
    badarith(to_string(a) + " and " + to_string(b));
  }
  if (op == BinaryOp::IntDiv || op == BinaryOp::Rem) {
    if (!a.is_int() || !b.is_int()) badarith("integer division of non-integers");
    if (b.as_int() == 0) badarith("division by zero");
    if (a.as_int() == INT64_MIN && b.as_int() == -1) badarith("integer overflow");
    return Value::integer(op == BinaryOp::IntDiv ? a.as_int() / b.as_int() : a.as_int() % b.as_int());
  }
  if (op == BinaryOp::Div) {
    if (b.as_double() == 0) badarith("division by zero");
    return Value::flt(a.as_double() / b.as_double());
  }
  if (a.is_int() && b.is_int()) {
    std::int64_t r = 0;
    bool overflow = false;
    switch (op) {
      case BinaryOp::Add: overflow = __builtin_add_overflow(a.as_int(), b.as_int(), &r); break;
      case BinaryOp::Sub: overflow = __builtin_sub_overflow(a.as_int(), b.as_int(), &r); break;
      default: overflow = __builtin_mul_overflow(a.as_int(), b.as_int(), &r); break;
    }
    if (overflow) badarith("integer overflow");
    return Value::integer(r);
  }
  double x = a.as_double();
  double y = b.as_double();
  double r = op == BinaryOp::Add ? x + y : op == BinaryOp::Sub ? x - y : x * y;
  if (!std::isfinite(r)) badarith("float overflow");
  return Value::flt(r);
}

int order(const Value& a, const Value& b) {
  if (a.is_number() && b.is_number()) {
    if (a.is_int() && b.is_int()) return a.as_int() < b.as_int() ? -1 : a.as_int() > b.as_int();
    double x = a.as_double();
    double y = b.as_double();
    return x < y ? -1 : x > y;
  }
  auto c = compare(a, b);
  return c < 0 ? -1 : c > 0;
}

Value append(const Value& a, const Value& b) {
  if (a.is_str() && b.is_str()) return Value::str(a.as_str() + b.as_str());
  if (a.is_list() && b.is_list()) {
    std::vector<Value> items(a.elements().begin(), a.elements().end());
    items.insert(items.end(), b.elements().begin(), b.elements().end());
    return Value::list(std::move(items));
  }
  if (a.empty_list()) return b;
  throw RuntimeError("badarg", to_string(a) + " ++ " + to_string(b));
}

bool need_bool(const Value& v, const char* op) {
  if (!v.is_bool()) throw RuntimeError("badarg", std::string(op) + " on " + to_string(v));
  return v.as_bool();
}

struct DepthGuard {
  Process& p;
  std::size_t stack_size;
  DepthGuard(Process& proc, int max) : p(proc), stack_size(proc.call_stack.size()) {
    if (++p.depth > max) {
      --p.depth;
      throw RuntimeError("system_limit", "call depth limit of " + std::to_string(max) + " reached");
    }
  }
  ~DepthGuard() {
    --p.depth;
    // A put_info made during this call belongs to it.
    if (p.call_stack.size() > stack_size) p.call_stack.resize(stack_size);
  }
};

std::string describe_call(const std::string& module, const std::string& name, std::span<const Value> args) {
  return format_atom(module) + ":" + format_atom(name) + "(" + args_to_string(args) + ")";
}

}  // namespace

Interp::Interp(Runtime& rt) : rt_(rt) {}

void Interp::add_builtin(Builtin b, bool auto_import) {
  if (auto_import) auto_import_[key_of(b.name, b.arity)] = b.module;
  std::string k = b.key();
  builtins_[k] = std::move(b);
}

const Builtin* Interp::builtin(const std::string& module, const std::string& name,
                               std::size_t arity) const {
  auto it = builtins_.find(module + ":" + name + "/" + std::to_string(arity));
  return it == builtins_.end() ? nullptr : &it->second;
}

const Builtin* Interp::auto_imported(const std::string& name, std::size_t arity) const {
  auto it = auto_import_.find(key_of(name, arity));
  return it == auto_import_.end() ? nullptr : builtin(it->second, name, arity);
}

Value Interp::call_builtin(Process& p, const Builtin& b, const std::string& module_ctx,
                           std::span<const Value> args) {
  if (!b.pure) p.record_effect(b.module + ":" + format_atom(b.name) + "/" + std::to_string(b.arity));
  return b.fn(p, module_ctx, args);
}

bool Interp::match(const Pattern& pat, const Value& v, Env& env) const {
  return std::visit(overloaded{
                        [&](const pat::Wildcard&) { return true; },
                        [&](const pat::Var& x) {
                          if (const Value* bound = lookup(env, x.name)) return *bound == v;
                          env.emplace_back(x.name, v);
                          return true;
                        },
                        [&](const pat::Lit& l) { return l.value == v; },
                        [&](const pat::Nil&) { return v.empty_list(); },
                        [&](const pat::Cons& c) {
                          if (!v.is_list() || v.empty_list()) return false;
                          return match(*c.head, v.elements().front(), env) && match(*c.tail, v.tail(), env);
                        },
                        [&](const pat::Tuple& t) {
                          if (!v.is_tuple() || v.size() != t.elements.size()) return false;
                          auto items = v.elements();
                          for (std::size_t i = 0; i < items.size(); ++i) {
                            if (!match(*t.elements[i], items[i], env)) return false;
                          }
                          return true;
                        },
                    },
                    pat.node);
}

bool Interp::guard_holds(Process& p, const std::optional<ExprRef>& guard, Env& env,
                         const std::string& module) {
  if (!guard) return true;
  try {
    return is_true(eval(p, *guard, env, module));
  } catch (const RuntimeError&) {
    return false;  // an exception in a guard just makes it fail
  }
}

Value Interp::eval_body(Process& p, const std::vector<ExprRef>& body, Env& env,
                        const std::string& module) {
  Value last;
  for (const auto& e : body) last = eval(p, e, env, module);
  return last;
}

Value Interp::call_clauses(Process& p, const std::vector<Clause>& clauses, const Env& base,
                           std::span<const Value> args, const std::string& module, bool shadow,
                           const std::function<std::string()>& describe) {
  for (const auto& c : clauses) {
    Env env = shadow ? shadowed(base, c.patterns) : base;
    bool ok = true;
    for (std::size_t i = 0; i < args.size() && ok; ++i) ok = match(*c.patterns[i], args[i], env);
    if (!ok || !guard_holds(p, c.guard, env, module)) continue;
    return eval_body(p, c.body, env, module);
  }
  throw RuntimeError("function_clause", describe());
}

Value Interp::call_function(Process& p, const std::string& module, const std::string& name,
                            std::span<const Value> args) {
  const FunDef* f = rt_.find_function(module, name, args.size());
  if (!f) {
    if (const Builtin* b = builtin(module, name, args.size())) return call_builtin(p, *b, module, args);
    throw RuntimeError("undef", format_atom(module) + ":" + format_atom(name) + "/" +
                                    std::to_string(args.size()));
  }
  p.check_alive();
  if (rt_.options().call_tracer) rt_.options().call_tracer(module, name, args.size());
  DepthGuard guard(p, rt_.options().max_depth);
  return call_clauses(p, f->clauses, {}, args, module, false,
                      [&] { return describe_call(module, name, args); });
}

Value Interp::apply(Process& p, const Value& fun, std::span<const Value> args) {
  if (fun.is_closure()) {
    const Closure& c = fun.as_closure();
    const auto& lit = std::get<expr::FunLit>(c.fun->node);
    if (lit.clauses.front().patterns.size() != args.size()) {
      throw RuntimeError("badarity", to_string(fun) + " called with " + std::to_string(args.size()) +
                                         " arguments");
    }
    DepthGuard guard(p, rt_.options().max_depth);
    return call_clauses(p, lit.clauses, c.captured, args, c.module, true,
                        [&] { return to_string(fun) + "(" + args_to_string(args) + ")"; });
  }
  if (fun.is_fun_ref()) {
    const FunRef& r = fun.as_fun_ref();
    return call_function(p, r.module, r.name, args);
  }
  throw RuntimeError("badfun", to_string(fun));
}

Value Interp::eval_binary(Process& p, const expr::Binary& b, Env& env, const std::string& module) {
  switch (b.op) {
    case BinaryOp::AndAlso:
      if (!need_bool(eval(p, b.lhs, env, module), "andalso")) return Value::boolean(false);
      return eval(p, b.rhs, env, module);
    case BinaryOp::OrElse:
      if (need_bool(eval(p, b.lhs, env, module), "orelse")) return Value::boolean(true);
      return eval(p, b.rhs, env, module);
    default: break;
  }
  Value l = eval(p, b.lhs, env, module);
  Value r = eval(p, b.rhs, env, module);
  switch (b.op) {
    case BinaryOp::Add:
    case BinaryOp::Sub:
    case BinaryOp::Mul:
    case BinaryOp::Div:
    case BinaryOp::IntDiv:
    case BinaryOp::Rem: return arith(b.op, l, r);
    case BinaryOp::Eq: return Value::boolean(equal_numeric(l, r));
    case BinaryOp::Neq: return Value::boolean(!equal_numeric(l, r));
    case BinaryOp::ExactEq: return Value::boolean(l == r);
    case BinaryOp::ExactNeq: return Value::boolean(!(l == r));
    case BinaryOp::Lt: return Value::boolean(order(l, r) < 0);
    case BinaryOp::Le: return Value::boolean(order(l, r) <= 0);
    case BinaryOp::Gt: return Value::boolean(order(l, r) > 0);
    case BinaryOp::Ge: return Value::boolean(order(l, r) >= 0);
    case BinaryOp::Append: return append(l, r);
    case BinaryOp::Send: {
      if (!l.is_pid()) throw RuntimeError("badarg", "send to " + to_string(l));
      const Builtin* send = builtin("erlang", "send", 2);
      Value args[] = {l, r};
      return call_builtin(p, *send, module, args);
    }
    default: break;
  }
  throw RuntimeError("badarg", "unknown operator");
}

Value Interp::eval(Process& p, const ExprRef& ref, Env& env, const std::string& module) {
  p.check_alive();
  const Expr& e = *ref;
  auto eval_args = [&](const std::vector<ExprRef>& xs) {
    std::vector<Value> out;
    out.reserve(xs.size());
    for (const auto& x : xs) out.push_back(eval(p, x, env, module));
    return out;
  };
  return std::visit(
      overloaded{
          [&](const expr::Lit& l) { return l.value; },
          [&](const expr::Var& v) {
            if (const Value* bound = lookup(env, v.name)) return *bound;
            throw RuntimeError("unbound", "variable " + v.name + " is unbound");
          },
          [&](const expr::List& l) {
            Value out = Value::list(eval_args(l.elements));
            if (!l.tail) return out;
            Value tail = eval(p, *l.tail, env, module);
            if (!tail.is_list()) throw RuntimeError("badarg", "improper list tail " + to_string(tail));
            return append(out, tail);
          },
          [&](const expr::Tuple& t) { return Value::tuple(eval_args(t.elements)); },
          [&](const expr::Binary& b) { return eval_binary(p, b, env, module); },
          [&](const expr::Unary& u) {
            Value v = eval(p, u.operand, env, module);
            if (u.op == UnaryOp::Not) return Value::boolean(!need_bool(v, "not"));
            if (v.is_int()) {
              if (v.as_int() == INT64_MIN) badarith("integer overflow");
              return Value::integer(-v.as_int());
            }
            if (v.is_float()) return Value::flt(-v.as_float());
            badarith("-" + to_string(v));
          },
          [&](const expr::Match& m) {
            Value v = eval(p, m.value, env, module);
            std::size_t mark = env.size();
            if (!match(*m.pattern, v, env)) {
              env.resize(mark);
              throw RuntimeError("badmatch", to_string(v));
            }
            return v;
          },
          [&](const expr::LocalCall& c) {
            std::vector<Value> args = eval_args(c.args);
            if (rt_.find_function(module, c.name, args.size())) {
              return call_function(p, module, c.name, args);
            }
            if (const Builtin* b = auto_imported(c.name, args.size())) {
              return call_builtin(p, *b, module, args);
            }
            throw RuntimeError("undef", format_atom(module) + ":" + format_atom(c.name) + "/" +
                                            std::to_string(args.size()));
          },
          [&](const expr::RemoteCall& c) {
            std::vector<Value> args = eval_args(c.args);
            return call_function(p, c.module, c.name, args);
          },
          [&](const expr::Apply& a) {
            Value f = eval(p, a.fun, env, module);
            std::vector<Value> args = eval_args(a.args);
            return apply(p, f, args);
          },
          [&](const expr::FunLit& f) {
            auto c = std::make_shared<Closure>();
            c->module = module;
            c->fun = ref.shared();
            c->id = rt_.next_closure_id();
            for (const auto& name : *f.vars) {
              if (const Value* bound = lookup(env, name)) c->captured.emplace_back(name, *bound);
            }
            return Value::closure(std::move(c));
          },
          [&](const expr::FunName& f) {
            return Value::fun_ref(FunRef{f.module.empty() ? module : f.module, f.name, f.arity});
          },
          [&](const expr::Case& c) {
            Value subject = eval(p, c.subject, env, module);
            for (const auto& cl : c.clauses) {
              std::size_t mark = env.size();
              if (match(*cl.patterns.front(), subject, env) && guard_holds(p, cl.guard, env, module)) {
                return eval_body(p, cl.body, env, module);
              }
              env.resize(mark);
            }
            throw RuntimeError("case_clause", to_string(subject));
          },
          [&](const expr::If& i) {
            for (const auto& cl : i.clauses) {
              if (guard_holds(p, cl.guard, env, module)) return eval_body(p, cl.body, env, module);
            }
            throw RuntimeError("if_clause", "no true branch found");
          },
          [&](const expr::ListComp& lc) {
            Value source = eval(p, lc.source, env, module);
            if (!source.is_list()) throw RuntimeError("badarg", "generator over " + to_string(source));
            std::vector<Value> out;
            Env scope = shadowed(env, {lc.pattern});
            for (const auto& item : source.elements()) {
              Env local = scope;
              if (!match(*lc.pattern, item, local)) continue;
              bool keep = true;
              for (const auto& f : lc.filters) {
                if (!need_bool(eval(p, f, local, module), "filter")) {
                  keep = false;
                  break;
                }
              }
              if (keep) out.push_back(eval(p, lc.templ, local, module));
            }
            return Value::list(std::move(out));
          },
          [&](const expr::ParamRef& r) -> Value {
            throw RuntimeError("badarg", "?P(" + std::to_string(r.index) + ") outside a contract");
          },
          [&](const expr::ResultRef&) -> Value { throw RuntimeError("badarg", "?R outside a contract"); },
      },
      e.node);
}

}  // namespace edbc
