// Runtime side of instrumented code: the edbc_* builtins the instrumenter
// emits calls to.

#include <chrono>
#include <mutex>
#include <unordered_map>

#include "edbc/report.hpp"
#include "edbc/typespec.hpp"
#include "interp.hpp"

namespace edbc {

namespace {

struct SuspendTrace {
  Process& p;
  explicit SuspendTrace(Process& proc) : p(proc) { ++p.trace_suspend; }
  ~SuspendTrace() { --p.trace_suspend; }
};

const TypeSpec& cached_type(const std::string& text) {
  static std::mutex mu;
  static std::unordered_map<std::string, std::unique_ptr<TypeSpec>> cache;
  std::lock_guard lk(mu);
  auto& slot = cache[text];
  if (!slot) slot = std::make_unique<TypeSpec>(parse_typespec(text));
  return *slot;
}

CallInfo current_call(const Process& p) {
  if (p.call_stack.empty()) return CallInfo{"?", "?", {}};
  return p.call_stack.back();
}

Violation base_violation(const Process& p, ViolationKind kind) {
  Violation v;
  v.kind = kind;
  v.call = current_call(p);
  v.stack = p.call_stack;
  return v;
}

std::string reason_text(const Value& r) { return r.is_str() ? r.as_str() : to_string(r); }

[[noreturn]] void bad_return(const char* what, const Value& v) {
  throw RuntimeError("bad_contract_return", std::string(what) + " returned " + to_string(v));
}

struct Outcome {
  bool holds = true;
  std::optional<Value> reason;
};

// A condition yields a boolean or {Boolean, Reason}.
Outcome outcome_of(const Value& v, const char* what) {
  if (v.is_bool()) return {v.as_bool(), std::nullopt};
  if (v.is_tuple() && v.size() == 2 && v.elements()[0].is_bool()) {
    return {v.elements()[0].as_bool(), v.elements()[1]};
  }
  bad_return(what, v);
}

Value run_condition(Runtime& rt, Process& p, const Value& cond, std::span<const Value> args) {
  SuspendTrace suspend(p);
  return rt.apply(p, cond, args);
}

// A plain condition that crashes has not been shown to hold.
Outcome plain_outcome(Runtime& rt, Process& p, const Value& cond, std::span<const Value> args,
                      const char* what) {
  Value c;
  try {
    c = run_condition(rt, p, cond, args);
  } catch (const RuntimeError& e) {
    return {false, Value::str(std::string("the condition raised ") + e.what())};
  }
  return outcome_of(c, what);
}

std::pair<std::string, Value> split_tagged(const Value& cond) {
  if (cond.is_tuple() && cond.size() == 2 && cond.elements()[0].is_atom()) {
    return {cond.elements()[0].as_atom(), cond.elements()[1]};
  }
  return {"", cond};
}

std::int64_t budget_of(const Value& v) {
  if (!v.is_int() || v.as_int() < 0) bad_return("time contract", v);
  return v.as_int();
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

Value spec_failure(const Value& offending, const std::string& type_text) {
  return Value::tuple({Value::boolean(false), Value::tuple({offending, Value::str(type_text)})});
}

void raise_spec(const Process& p, ViolationKind kind, const Value& outcome) {
  Violation v = base_violation(p, kind);
  auto detail = outcome.elements()[1].elements();
  v.offending = detail[0];
  v.type_text = detail[1].as_str();
  throw make_violation(std::move(v));
}

Value run_pure(Runtime& rt, Process& p, const Value& delayed) {
  std::size_t mark = p.trace_log.size();
  ++p.trace_depth;
  Value result;
  try {
    result = rt.apply(p, delayed, {});
  } catch (...) {
    --p.trace_depth;
    p.trace_log.resize(mark);
    throw;
  }
  --p.trace_depth;
  if (p.trace_log.size() > mark) {
    Violation v = base_violation(p, ViolationKind::Purity);
    v.impure_bif = p.trace_log[mark];
    p.trace_log.resize(mark);
    throw make_violation(std::move(v));
  }
  if (p.trace_depth == 0) p.trace_log.clear();
  return result;
}

Value run_expected_time(Runtime& rt, Process& p, std::int64_t budget, const Value& delayed) {
  auto start = std::chrono::steady_clock::now();
  Value result = rt.apply(p, delayed, {});
  double real = elapsed_ms(start);
  if (real > static_cast<double>(budget) + rt.options().time_slack_ms) {
    Violation v = base_violation(p, ViolationKind::ExpectedTime);
    v.real_ms = real;
    v.expected_ms = budget;
    throw make_violation(std::move(v));
  }
  return result;
}

// The delayed call runs on its own process so it can be abandoned when the
// budget runs out.
Value run_timeout(Runtime& rt, Process& p, std::int64_t budget, const Value& delayed) {
  auto stack = p.call_stack;
  auto dictionary = p.dictionary;
  Pid strand = rt.spawn([&rt, delayed, stack, dictionary](Process& s) {
    s.call_stack = stack;
    s.dictionary = dictionary;
    return rt.apply(s, delayed, {});
  });
  std::optional<Value> result;
  try {
    result = rt.join_for(strand, p, static_cast<double>(budget));
  } catch (const ProcessExit&) {
    rt.kill(strand);
    throw;
  }
  if (result) return *result;
  rt.kill(strand);
  Violation v = base_violation(p, ViolationKind::Timeout);
  v.expected_ms = budget;
  throw make_violation(std::move(v));
}

Value edbc_pre(Runtime& rt, Process& p, std::span<const Value> args) {
  auto [tag, cond] = split_tagged(args[0]);
  const Value& delayed = args[1];
  if (tag.empty()) {
    Outcome o = plain_outcome(rt, p, cond, {}, "precondition");
    if (!o.holds) {
      Violation v = base_violation(p, ViolationKind::Precondition);
      if (o.reason) v.user_reason = reason_text(*o.reason);
      throw make_violation(std::move(v));
    }
    return rt.apply(p, delayed, {});
  }
  Value c = run_condition(rt, p, cond, {});
  if (tag == "pure") return run_pure(rt, p, delayed);
  if (tag == "expected_time") return run_expected_time(rt, p, budget_of(c), delayed);
  if (tag == "timeout") return run_timeout(rt, p, budget_of(c), delayed);
  if (tag == "spec") {
    if (!is_true(c)) raise_spec(p, ViolationKind::SpecPre, c);
    return rt.apply(p, delayed, {});
  }
  throw RuntimeError("bad_contract", "unknown contract tag " + tag);
}

Value edbc_post(Runtime& rt, Process& p, std::span<const Value> args) {
  auto [tag, cond] = split_tagged(args[0]);
  Value result = rt.apply(p, args[1], {});
  Value arg[] = {result};
  if (tag == "spec") {
    Value c = run_condition(rt, p, cond, arg);
    if (!is_true(c)) raise_spec(p, ViolationKind::SpecPost, c);
    return result;
  }
  if (tag == "invariant") {
    run_condition(rt, p, cond, arg);  // edbc_invariant raises by itself
    return result;
  }
  Outcome o = plain_outcome(rt, p, cond, arg, "postcondition");
  if (!o.holds) {
    Violation v = base_violation(p, ViolationKind::Postcondition);
    if (o.reason) v.user_reason = reason_text(*o.reason);
    throw make_violation(std::move(v));
  }
  return result;
}

std::int64_t measure(const Value& v) {
  if (v.is_int()) return v.as_int();
  if (v.is_list()) return static_cast<std::int64_t>(v.size());
  if (v.is_str()) return static_cast<std::int64_t>(v.as_str().size());
  throw RuntimeError("not_measurable", to_string(v));
}

// edbc_decrease_check(Prev, Next, Strict, AllNextArgs, Delayed)
Value edbc_decrease_check(Runtime& rt, Process& p, std::span<const Value> args) {
  auto prev = args[0].elements();
  auto next = args[1].elements();
  bool strict = is_true(args[2]);
  for (std::size_t i = 0; i < prev.size() && i < next.size(); ++i) {
    std::int64_t a = measure(prev[i]);
    std::int64_t b = measure(next[i]);
    if (strict ? b < a : b <= a) continue;
    Violation v = base_violation(p, ViolationKind::Decrease);
    v.prev_args = p.call_stack.empty() ? std::vector<Value>(prev.begin(), prev.end()) : v.call.args;
    auto all = args[3].elements();
    v.next_args.assign(all.begin(), all.end());
    throw make_violation(std::move(v));
  }
  return rt.apply(p, args[4], {});
}

Value edbc_spec_args(std::span<const Value> args) {
  auto values = args[0].elements();
  auto types = args[1].elements();
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::string& t = types[i].as_str();
    if (!type_check(values[i], cached_type(t))) return spec_failure(values[i], t);
  }
  return Value::boolean(true);
}

Value edbc_spec_result(std::span<const Value> args) {
  const std::string& t = args[1].as_str();
  if (!type_check(args[0], cached_type(t))) return spec_failure(args[0], t);
  return Value::boolean(true);
}

// The state a behaviour callback leaves behind, or nullopt for a malformed
// return (which the server reports on its own).
std::optional<Value> new_state(const std::string& callback, const Value& result) {
  if (callback == "init") return result;
  if (result.is_tagged("reply", 3)) return result.elements()[2];
  if (result.is_tagged("noreply", 2)) return result.elements()[1];
  return std::nullopt;
}

// edbc_invariant(InvFun, Callback, Result)
Value edbc_invariant(Runtime& rt, Process& p, std::span<const Value> args) {
  const std::string& callback = args[1].as_atom();
  auto state = new_state(callback, args[2]);
  if (!state) return Value::boolean(true);
  Value arg[] = {*state};
  Outcome o = outcome_of(run_condition(rt, p, args[0], arg), "invariant");
  if (o.holds) return Value::boolean(true);
  Violation v = base_violation(p, ViolationKind::Invariant);
  v.callback = callback;
  v.result = args[2];
  const auto& call_args = v.call.args;
  if (!call_args.empty() && callback != "init") {
    v.request = call_args.front();
    v.prior_state = call_args.back();
  }
  if (o.reason) v.user_reason = reason_text(*o.reason);
  throw make_violation(std::move(v));
}

}  // namespace

void install_contract_builtins(Interp& in, Runtime& rt) {
  auto add = [&](const std::string& name, std::size_t arity, BuiltinFn fn) {
    in.add_builtin(Builtin{"edbc_lib", name, arity, true, std::move(fn)}, true);
  };
  add("edbc_put_info", 2, [](Process& p, const std::string& module, std::span<const Value> args) {
    auto items = args[1].elements();
    p.call_stack.push_back(CallInfo{module, args[0].as_atom(), {items.begin(), items.end()}});
    return Value::atom("ok");
  });
  add("edbc_pre", 2, [&rt](Process& p, const std::string&, std::span<const Value> args) {
    return edbc_pre(rt, p, args);
  });
  add("edbc_post", 2, [&rt](Process& p, const std::string&, std::span<const Value> args) {
    return edbc_post(rt, p, args);
  });
  add("edbc_decrease_check", 5, [&rt](Process& p, const std::string&, std::span<const Value> args) {
    return edbc_decrease_check(rt, p, args);
  });
  add("edbc_spec_args", 2,
      [](Process&, const std::string&, std::span<const Value> args) { return edbc_spec_args(args); });
  add("edbc_spec_result", 2,
      [](Process&, const std::string&, std::span<const Value> args) { return edbc_spec_result(args); });
  add("edbc_invariant", 3, [&rt](Process& p, const std::string&, std::span<const Value> args) {
    return edbc_invariant(rt, p, args);
  });
}

}  // namespace edbc
