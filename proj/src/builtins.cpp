#include <mutex>
#include <random>

#include "interp.hpp"

namespace edbc {

namespace {

using Args = std::span<const Value>;

[[noreturn]] void badarg(const std::string& fn, Args args) {
  throw RuntimeError("badarg", fn + "(" + args_to_string(args) + ")");
}

const Value& need_list(const std::string& fn, Args args, std::size_t i) {
  if (!args[i].is_list()) badarg(fn, args);
  return args[i];
}

std::int64_t need_int(const std::string& fn, Args args, std::size_t i) {
  if (!args[i].is_int()) badarg(fn, args);
  return args[i].as_int();
}

bool need_bool_result(const std::string& fn, const Value& v) {
  if (!v.is_bool()) throw RuntimeError("badarg", fn + ": predicate returned " + to_string(v));
  return v.as_bool();
}

std::string format_text(const std::string& fmt, Args values) {
  std::string out;
  std::size_t next = 0;
  auto arg = [&]() -> const Value& {
    if (next >= values.size()) throw RuntimeError("badarg", "io:format: too few arguments");
    return values[next++];
  };
  for (std::size_t i = 0; i < fmt.size(); ++i) {
    if (fmt[i] != '~' || i + 1 == fmt.size()) {
      out += fmt[i];
      continue;
    }
    char d = fmt[++i];
    switch (d) {
      case 'n': out += '\n'; break;
      case '~': out += '~'; break;
      case 'p':
      case 'w': out += to_string(arg()); break;
      case 's': {
        const Value& v = arg();
        out += v.is_str() ? v.as_str() : v.is_atom() ? v.as_atom() : to_string(v);
        break;
      }
      default: throw RuntimeError("badarg", std::string("io:format: unknown directive ~") + d);
    }
  }
  return out;
}

}  // namespace

void install_builtins(Interp& in, Runtime& rt) {
  auto pure = [&](const std::string& m, const std::string& n, std::size_t a, BuiltinFn fn,
                  bool auto_import = false) {
    in.add_builtin(Builtin{m, n, a, true, std::move(fn)}, auto_import);
  };
  auto impure = [&](const std::string& m, const std::string& n, std::size_t a, BuiltinFn fn,
                    bool auto_import = false) {
    in.add_builtin(Builtin{m, n, a, false, std::move(fn)}, auto_import);
  };

  // erlang, auto-imported
  pure("erlang", "length", 1, [](Process&, const std::string&, Args a) {
    if (a[0].is_str()) return Value::integer(static_cast<std::int64_t>(a[0].as_str().size()));
    return Value::integer(static_cast<std::int64_t>(need_list("length", a, 0).size()));
  }, true);
  pure("erlang", "hd", 1, [](Process&, const std::string&, Args a) {
    if (!a[0].is_list() || a[0].empty_list()) badarg("hd", a);
    return a[0].elements().front();
  }, true);
  pure("erlang", "tl", 1, [](Process&, const std::string&, Args a) {
    if (!a[0].is_list() || a[0].empty_list()) badarg("tl", a);
    return a[0].tail();
  }, true);
  pure("erlang", "element", 2, [](Process&, const std::string&, Args a) {
    std::int64_t i = need_int("element", a, 0);
    if (!a[1].is_tuple() || i < 1 || static_cast<std::size_t>(i) > a[1].size()) badarg("element", a);
    return a[1].elements()[static_cast<std::size_t>(i - 1)];
  }, true);
  pure("erlang", "tuple_size", 1, [](Process&, const std::string&, Args a) {
    if (!a[0].is_tuple()) badarg("tuple_size", a);
    return Value::integer(static_cast<std::int64_t>(a[0].size()));
  }, true);
  pure("erlang", "abs", 1, [](Process&, const std::string&, Args a) {
    if (a[0].is_int()) {
      if (a[0].as_int() == INT64_MIN) throw RuntimeError("badarith", "integer overflow");
      return Value::integer(a[0].as_int() < 0 ? -a[0].as_int() : a[0].as_int());
    }
    if (a[0].is_float()) return Value::flt(a[0].as_float() < 0 ? -a[0].as_float() : a[0].as_float());
    badarg("abs", a);
  }, true);
  pure("erlang", "integer_to_list", 1, [](Process&, const std::string&, Args a) {
    return Value::str(std::to_string(need_int("integer_to_list", a, 0)));
  }, true);

  using Pred = bool (Value::*)() const;
  const std::pair<const char*, Pred> tests[] = {
      {"is_integer", &Value::is_int},     {"is_float", &Value::is_float},
      {"is_number", &Value::is_number},   {"is_boolean", &Value::is_bool},
      {"is_list", &Value::is_list},       {"is_tuple", &Value::is_tuple},
      {"is_function", &Value::is_function}, {"is_pid", &Value::is_pid},
  };
  for (const auto& [name, pred] : tests) {
    pure("erlang", name, 1, [pred](Process&, const std::string&, Args a) {
      return Value::boolean((a[0].*pred)());
    }, true);
  }
  // Booleans are atoms in Erlang.
  pure("erlang", "is_atom", 1, [](Process&, const std::string&, Args a) {
    return Value::boolean(a[0].is_atom() || a[0].is_bool());
  }, true);

  // Operators as functions, e.g. `fun erlang:'*'/2`.
  const std::pair<const char*, BinaryOp> ops[] = {
      {"+", BinaryOp::Add}, {"-", BinaryOp::Sub}, {"*", BinaryOp::Mul}, {"/", BinaryOp::Div}};
  for (const auto& [name, op] : ops) {
    pure("erlang", name, 2, [&in, op](Process& p, const std::string& module, Args a) {
      Env env{{"A", a[0]}, {"B", a[1]}};
      ExprRef e = make_expr(expr::Binary{op, make_expr(expr::Var{"A"}), make_expr(expr::Var{"B"})});
      return in.eval(p, e, env, module);
    });
  }

  // lists
  pure("lists", "nth", 2, [](Process&, const std::string&, Args a) {
    std::int64_t n = need_int("lists:nth", a, 0);
    const Value& l = need_list("lists:nth", a, 1);
    if (n < 1 || static_cast<std::size_t>(n) > l.size()) {
      throw RuntimeError("function_clause", "lists:nth(" + args_to_string(a) + ")");
    }
    return l.elements()[static_cast<std::size_t>(n - 1)];
  });
  pure("lists", "all", 2, [&rt](Process& p, const std::string&, Args a) {
    for (const auto& x : need_list("lists:all", a, 1).elements()) {
      Value arg[] = {x};
      if (!need_bool_result("lists:all", rt.apply(p, a[0], arg))) return Value::boolean(false);
    }
    return Value::boolean(true);
  });
  pure("lists", "any", 2, [&rt](Process& p, const std::string&, Args a) {
    for (const auto& x : need_list("lists:any", a, 1).elements()) {
      Value arg[] = {x};
      if (need_bool_result("lists:any", rt.apply(p, a[0], arg))) return Value::boolean(true);
    }
    return Value::boolean(false);
  });
  pure("lists", "map", 2, [&rt](Process& p, const std::string&, Args a) {
    std::vector<Value> out;
    for (const auto& x : need_list("lists:map", a, 1).elements()) {
      Value arg[] = {x};
      out.push_back(rt.apply(p, a[0], arg));
    }
    return Value::list(std::move(out));
  });
  pure("lists", "filter", 2, [&rt](Process& p, const std::string&, Args a) {
    std::vector<Value> out;
    for (const auto& x : need_list("lists:filter", a, 1).elements()) {
      Value arg[] = {x};
      if (need_bool_result("lists:filter", rt.apply(p, a[0], arg))) out.push_back(x);
    }
    return Value::list(std::move(out));
  });
  pure("lists", "foldl", 3, [&rt](Process& p, const std::string&, Args a) {
    Value acc = a[1];
    for (const auto& x : need_list("lists:foldl", a, 2).elements()) {
      Value args[] = {x, acc};
      acc = rt.apply(p, a[0], args);
    }
    return acc;
  });
  pure("lists", "sum", 1, [&in](Process& p, const std::string& module, Args a) {
    Value acc = Value::integer(0);
    const Builtin* add = in.builtin("erlang", "+", 2);
    for (const auto& x : need_list("lists:sum", a, 0).elements()) {
      Value args[] = {acc, x};
      acc = add->fn(p, module, args);
    }
    return acc;
  });
  pure("lists", "reverse", 1, [](Process&, const std::string&, Args a) {
    auto items = need_list("lists:reverse", a, 0).elements();
    return Value::list(std::vector<Value>(items.rbegin(), items.rend()));
  });
  pure("lists", "append", 2, [](Process&, const std::string&, Args a) {
    std::vector<Value> out;
    for (std::size_t i = 0; i < 2; ++i) {
      auto items = need_list("lists:append", a, i).elements();
      out.insert(out.end(), items.begin(), items.end());
    }
    return Value::list(std::move(out));
  });
  pure("lists", "member", 2, [](Process&, const std::string&, Args a) {
    for (const auto& x : need_list("lists:member", a, 1).elements()) {
      if (x == a[0]) return Value::boolean(true);
    }
    return Value::boolean(false);
  });
  pure("lists", "seq", 2, [](Process&, const std::string&, Args a) {
    std::int64_t from = need_int("lists:seq", a, 0);
    std::int64_t to = need_int("lists:seq", a, 1);
    if (to < from - 1) badarg("lists:seq", a);
    std::vector<Value> out;
    for (std::int64_t i = from; i <= to; ++i) out.push_back(Value::integer(i));
    return Value::list(std::move(out));
  });

  // effects
  impure("erlang", "put", 2, [](Process& p, const std::string&, Args a) {
    for (auto& [k, v] : p.dictionary) {
      if (k == a[0]) {
        Value old = v;
        v = a[1];
        return old;
      }
    }
    p.dictionary.emplace_back(a[0], a[1]);
    return Value::atom("undefined");
  }, true);
  impure("erlang", "get", 1, [](Process& p, const std::string&, Args a) {
    for (const auto& [k, v] : p.dictionary) {
      if (k == a[0]) return v;
    }
    return Value::atom("undefined");
  }, true);
  impure("erlang", "self", 0, [](Process& p, const std::string&, Args) { return Value::pid(p.pid()); },
         true);
  impure("erlang", "spawn", 1, [&rt](Process&, const std::string&, Args a) {
    if (!a[0].is_function()) badarg("spawn", a);
    Value fun = a[0];
    return Value::pid(rt.spawn([&rt, fun](Process& child) { return rt.apply(child, fun, {}); }));
  }, true);
  impure("erlang", "send", 2, [&rt](Process& p, const std::string&, Args a) {
    if (p.effects_forbidden) throw RuntimeError("cpre_effect", "send inside cpre");
    if (!a[0].is_pid()) badarg("erlang:send", a);
    rt.send(a[0].as_pid(), a[1]);
    return a[1];
  });
  impure("io", "format", 1, [&rt](Process&, const std::string&, Args a) {
    if (!a[0].is_str()) badarg("io:format", a);
    rt.emit_output(format_text(a[0].as_str(), {}));
    return Value::atom("ok");
  });
  impure("io", "format", 2, [&rt](Process&, const std::string&, Args a) {
    if (!a[0].is_str() || !a[1].is_list()) badarg("io:format", a);
    rt.emit_output(format_text(a[0].as_str(), a[1].elements()));
    return Value::atom("ok");
  });
  impure("timer", "sleep", 1, [](Process& p, const std::string&, Args a) {
    std::int64_t ms = need_int("timer:sleep", a, 0);
    if (ms < 0) badarg("timer:sleep", a);
    p.sleep_ms(ms);
    return Value::atom("ok");
  });
  impure("edbc", "log", 1, [&rt](Process&, const std::string&, Args a) {
    rt.emit_error("[edbc log] " + (a[0].is_str() ? a[0].as_str() : to_string(a[0])) + "\n");
    return Value::atom("ok");
  });

  auto rng = std::make_shared<std::pair<std::mutex, std::mt19937_64>>();
  rng->second.seed(rt.options().seed);
  impure("rand", "uniform", 1, [rng](Process&, const std::string&, Args a) {
    std::int64_t n = need_int("rand:uniform", a, 0);
    if (n < 1) badarg("rand:uniform", a);
    std::lock_guard lk(rng->first);
    std::uniform_int_distribution<std::int64_t> dist(1, n);
    return Value::integer(dist(rng->second));
  });
}

}  // namespace edbc
