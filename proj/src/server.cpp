#include "edbc/server.hpp"

#include "edbc/report.hpp"
#include "interp.hpp"

namespace edbc {

namespace {

const Value kStarted = Value::atom("$edbc_started");
const Value kDown = Value::atom("$edbc_down");

Value down_of(Pid pid) { return Value::tuple({kDown, Value::pid(pid)}); }

[[noreturn]] void server_gone(Runtime& rt, Pid server) {
  if (auto reason = rt.exit_reason(server)) std::rethrow_exception(reason);
  throw RuntimeError("noproc", "server " + to_string(Value::pid(server)) + " is not running");
}

[[noreturn]] void bad_return(const std::string& callback, const Value& v) {
  throw RuntimeError("bad_return_value", callback + " returned " + to_string(v));
}

struct Server {
  Runtime& rt;
  Process& p;
  const ServerCallbacks& cb;
  ServerPolicy policy;
  Value state;
  Value last_message = Value::atom("undefined");
  ServerQueues queues;
  // Resend policy: deferrals in a row without any state change.
  std::size_t streak = 0;
  std::uint64_t seen = 0;

  void adopt(Value s) {
    state = std::move(s);
    if (cb.on_state) cb.on_state(state);
  }

  void run() {
    while (true) {
      RequestEnvelope env;
      Value raw;
      if (policy == ServerPolicy::Fair && !queues.current.empty()) {
        env = std::move(queues.current.front());
        queues.current.pop_front();
        env.origin = RequestEnvelope::Origin::QueueCurrent;
      } else {
        raw = p.receive();
        if (raw.is_tagged("$gen_cast", 2)) {
          cast(raw.elements()[1]);
          continue;
        }
        if (!raw.is_tagged("$gen_call", 3)) continue;
        env = RequestEnvelope{raw.elements()[2], raw.elements()[1], RequestEnvelope::Origin::Mailbox};
      }
      consider(std::move(env), raw);
    }
  }

  void cast(const Value& request) {
    last_message = request;
    Value prior = state;
    Value result = cb.handle_cast(p, request, state);
    if (!result.is_tagged("noreply", 2)) bad_return("handle_cast", result);
    Value next = result.elements()[1];
    if (cb.invariant) check_invariant(cb, p, "handle_cast", request, prior, result, next);
    adopt(next);
    after_change(prior);
  }

  void consider(RequestEnvelope env, const Value& raw) {
    last_message = env.request;
    Value prior = state;
    bool ready = true;
    if (cb.cpre) {
      p.effects_forbidden = true;
      Value r;
      try {
        r = cb.cpre(p, env.request, env.from, state);
      } catch (...) {
        p.effects_forbidden = false;
        throw;
      }
      p.effects_forbidden = false;
      if (!r.is_tuple() || r.size() != 2 || !r.elements()[0].is_bool()) bad_return("cpre", r);
      ready = r.elements()[0].as_bool();
      adopt(r.elements()[1]);
    }
    if (!ready) {
      defer(std::move(env), raw, prior);
      return;
    }
    Value before_call = state;
    Value result = cb.handle_call(p, env.request, env.from, state);
    Value next;
    if (result.is_tagged("reply", 3)) {
      next = result.elements()[2];
    } else if (result.is_tagged("noreply", 2)) {
      next = result.elements()[1];
    } else {
      bad_return("handle_call", result);
    }
    if (cb.invariant) check_invariant(cb, p, "handle_call", env.request, before_call, result, next);
    adopt(next);
    if (result.is_tagged("reply", 3)) {
      auto from = env.from.elements();
      rt.send(from[0].as_pid(),
              Value::tuple({Value::atom("$edbc_reply"), from[1], result.elements()[1]}));
    }
    after_change(prior);
  }

  void defer(RequestEnvelope env, const Value& raw, const Value& prior) {
    if (policy == ServerPolicy::Fair) {
      queues.defer(std::move(env));
      return;
    }
    p.requeue(raw.is_tuple() ? raw
                             : Value::tuple({Value::atom("$gen_call"), env.from, env.request}));
    if (!(state == prior)) {
      streak = 0;
      seen = p.external_arrivals();
      return;
    }
    if (streak == 0) seen = p.external_arrivals();
    // Every queued request has been looked at since the last change: only
    // a new message can make one of them serveable.
    if (++streak > p.mailbox_size()) {
      p.wait_external_arrival(seen);
      streak = 0;
      seen = p.external_arrivals();
    }
  }

  void after_change(const Value& prior) {
    streak = 0;
    if (policy == ServerPolicy::Fair && !(state == prior)) queues.rebuild();
  }
};

}  // namespace

void ServerQueues::defer(RequestEnvelope env) {
  if (env.origin == RequestEnvelope::Origin::QueueCurrent) {
    old.push_back(std::move(env));
  } else {
    fresh.push_back(std::move(env));
  }
}

void ServerQueues::rebuild() {
  std::deque<RequestEnvelope> next;
  for (auto* q : {&old, &current, &fresh}) {
    for (auto& e : *q) next.push_back(std::move(e));
    q->clear();
  }
  current = std::move(next);
}

void check_invariant(const ServerCallbacks& cb, Process& p, const std::string& callback,
                     const Value& request, const Value& prior_state, const Value& result,
                     const Value& new_state) {
  Value r = cb.invariant(p, new_state);
  bool holds = false;
  std::optional<std::string> reason;
  if (r.is_bool()) {
    holds = r.as_bool();
  } else if (r.is_tuple() && r.size() == 2 && r.elements()[0].is_bool()) {
    holds = r.elements()[0].as_bool();
    const Value& why = r.elements()[1];
    reason = why.is_str() ? why.as_str() : to_string(why);
  } else {
    throw RuntimeError("bad_contract_return", "invariant returned " + to_string(r));
  }
  if (holds) return;
  Violation v;
  v.kind = ViolationKind::Invariant;
  v.callback = callback;
  v.request = request;
  v.prior_state = prior_state;
  v.result = result;
  v.user_reason = reason;
  v.call.module = cb.module;
  v.call.name = callback;
  if (callback == "handle_call") v.call.args = {request, Value::atom("..."), prior_state};
  if (callback == "handle_cast") v.call.args = {request, prior_state};
  throw make_violation(std::move(v));
}

Pid server_start(Runtime& rt, Process& caller, ServerCallbacks cb, ServerPolicy policy) {
  Pid self = caller.pid();
  Pid server = rt.spawn([&rt, cb = std::move(cb), policy, self](Process& p) -> Value {
    Server s{rt, p, cb, policy, Value::atom("undefined"), Value::atom("undefined"), {}, 0, 0};
    try {
      Value initial = cb.init(p);
      if (cb.invariant) check_invariant(cb, p, "init", Value(), Value(), initial, initial);
      s.adopt(initial);
      rt.send(self, Value::tuple({kStarted, Value::pid(p.pid())}));
      s.run();
    } catch (const ProcessExit&) {
      throw;
    } catch (const std::exception& e) {
      rt.emit_error(format_server_termination(cb.module, s.last_message, s.state, e.what()));
      throw;
    }
    return Value::atom("ok");
  });
  if (!rt.watch(server, self)) server_gone(rt, server);
  Value msg = caller.receive_match([&](const Value& m) {
    return (m.is_tagged("$edbc_started", 2) || m.is_tagged("$edbc_down", 2)) &&
           m.elements()[1] == Value::pid(server);
  });
  if (msg.is_tagged("$edbc_down", 2)) server_gone(rt, server);
  return server;
}

Value server_call(Runtime& rt, Process& caller, Pid server, const Value& request) {
  if (caller.effects_forbidden) throw RuntimeError("cpre_effect", "server_call inside cpre");
  if (!rt.watch(server, caller.pid())) server_gone(rt, server);
  Value tag = Value::integer(static_cast<std::int64_t>(rt.next_tag()));
  Value from = Value::tuple({Value::pid(caller.pid()), tag});
  rt.send(server, Value::tuple({Value::atom("$gen_call"), from, request}));
  Value down = down_of(server);
  Value msg = caller.receive_match([&](const Value& m) {
    return (m.is_tagged("$edbc_reply", 3) && m.elements()[1] == tag) || m == down;
  });
  if (msg == down) server_gone(rt, server);
  return msg.elements()[2];
}

void server_cast(Runtime& rt, Pid server, const Value& request) {
  rt.send(server, Value::tuple({Value::atom("$gen_cast"), request}));
}

ServerCallbacks callbacks_from_module(Runtime& rt, const std::string& module) {
  if (!rt.find_module(module)) throw RuntimeError("undef", "module " + module + " is not loaded");
  ServerCallbacks cb;
  cb.module = module;
  if (rt.find_function(module, "init", 0)) {
    cb.init = [&rt, module](Process& p) { return rt.call_function(p, module, "init", {}); };
  } else if (rt.find_function(module, "init", 1)) {
    cb.init = [&rt, module](Process& p) {
      Value args[] = {Value::nil()};
      return rt.call_function(p, module, "init", args);
    };
  } else {
    throw RuntimeError("undef", module + ":init/0");
  }
  cb.handle_call = [&rt, module](Process& p, const Value& req, const Value& from, const Value& st) {
    Value args[] = {req, from, st};
    return rt.call_function(p, module, "handle_call", args);
  };
  cb.handle_cast = [&rt, module](Process& p, const Value& req, const Value& st) {
    Value args[] = {req, st};
    return rt.call_function(p, module, "handle_cast", args);
  };
  if (rt.find_function(module, "cpre", 3)) {
    cb.cpre = [&rt, module](Process& p, const Value& req, const Value& from, const Value& st) {
      Value args[] = {req, from, st};
      return rt.call_function(p, module, "cpre", args);
    };
  }
  return cb;
}

void install_server_builtins(Interp& in, Runtime& rt) {
  auto policy_of = [&rt](const Value& v) {
    if (v.is_atom("fair")) return ServerPolicy::Fair;
    if (v.is_atom("resend")) return ServerPolicy::Resend;
    if (v.is_atom("default")) return rt.options().default_policy;
    throw RuntimeError("badarg", "unknown server policy " + to_string(v));
  };
  auto start = [&rt](Process& p, const Value& module, ServerPolicy policy) {
    if (!module.is_atom()) throw RuntimeError("badarg", "server_start(" + to_string(module) + ")");
    return Value::pid(server_start(rt, p, callbacks_from_module(rt, module.as_atom()), policy));
  };
  auto pid_arg = [](const Value& v) {
    if (!v.is_pid()) throw RuntimeError("badarg", "not a server: " + to_string(v));
    return v.as_pid();
  };
  auto add = [&](const std::string& name, std::size_t arity, BuiltinFn fn) {
    in.add_builtin(Builtin{"edbc", name, arity, false, std::move(fn)}, true);
  };
  add("server_start", 1, [&rt, start](Process& p, const std::string&, std::span<const Value> a) {
    return start(p, a[0], rt.options().default_policy);
  });
  add("server_start", 2, [start, policy_of](Process& p, const std::string&, std::span<const Value> a) {
    return start(p, a[0], policy_of(a[1]));
  });
  add("server_call", 2, [&rt, pid_arg](Process& p, const std::string&, std::span<const Value> a) {
    return server_call(rt, p, pid_arg(a[0]), a[1]);
  });
  add("server_cast", 2, [&rt, pid_arg](Process&, const std::string&, std::span<const Value> a) {
    server_cast(rt, pid_arg(a[0]), a[1]);
    return Value::atom("ok");
  });
}

}  // namespace edbc
