#pragma once

// Multi-step scenarios shared by the unit tests and the acceptance binary.

#include <atomic>
#include <cstdio>
#include <future>
#include <mutex>
#include <random>
#include <thread>

#include "edbc/server.hpp"
#include "support.hpp"

namespace test {

inline edbc::Value reply(const edbc::Value& r, const edbc::Value& s) {
  return edbc::Value::tuple({edbc::Value::atom("reply"), r, s});
}
inline edbc::Value noreply(const edbc::Value& s) {
  return edbc::Value::tuple({edbc::Value::atom("noreply"), s});
}

/// Sends a raw call request from `p`; the reply arrives later in p's mailbox.
inline edbc::Value post_call(edbc::Runtime& rt, edbc::Process& p, edbc::Pid server,
                             const edbc::Value& request) {
  using edbc::Value;
  Value tag = Value::integer(static_cast<std::int64_t>(rt.next_tag()));
  rt.send(server, Value::tuple({Value::atom("$gen_call"),
                                Value::tuple({Value::pid(p.pid()), tag}), request}));
  return tag;
}

inline edbc::Value await_reply(edbc::Process& p, const edbc::Value& tag) {
  edbc::Value m = p.receive_match(
      [&](const edbc::Value& v) { return v.is_tagged("$edbc_reply", 3) && v.elements()[1] == tag; });
  return m.elements()[2];
}

/// {state, Readers, Writer} with Readers >= 0 and (not Writer or Readers == 0).
inline bool rw_ok(const edbc::Value& s) {
  auto e = s.elements();
  return e.size() == 3 && e[1].is_int() && e[1].as_int() >= 0 && e[2].is_bool() &&
         (!e[2].as_bool() || e[1].as_int() == 0);
}

/// A generated ?PURE function g/2 and whether running it must violate.
struct PurityProgram {
  std::string source;
  std::string expected_bif;  // empty when the run is pure
};

inline std::vector<PurityProgram> purity_programs(int count, unsigned seed) {
  struct Step {
    const char* code;
    const char* effect;
  };
  // @0 is the previous binding, @1 the new one
  const std::vector<Step> steps = {
      {"@1 = @0 + 1", nullptr},
      {"@1 = length(lists:reverse([@0, @0]))", nullptr},
      {"@1 = lists:sum(lists:map(fun(E) -> E * 2 end, [@0]))", nullptr},
      {"@1 = @0, put(k, @0)", "erlang:put/2"},
      {"@1 = @0, get(k)", "erlang:get/1"},
      {"@1 = @0, self()", "erlang:self/0"},
      {"@1 = @0, Dest ! @0", "erlang:send/2"},
      {"@1 = @0, io:format(\"~p\", [@0])", "io:format/2"},
      {"@1 = @0, edbc:log(x)", "edbc:log/1"},
      {"@1 = @0, spawn(fun() -> ok end)", "erlang:spawn/1"},
      {"@1 = case @0 of -5 -> put(k, 1), @0; _ -> @0 end", nullptr},
      {"@1 = pure_helper(@0)", nullptr},
      {"@1 = impure_helper(@0)", "erlang:put/2"},
  };
  auto subst = [](std::string code, const std::string& from, const std::string& to) {
    for (std::size_t pos; (pos = code.find(from)) != std::string::npos;) code.replace(pos, from.size(), to);
    return code;
  };
  std::mt19937 rng(seed);
  std::vector<PurityProgram> out;
  for (int prog = 0; prog < count; ++prog) {
    int n = 1 + static_cast<int>(rng() % 4);
    std::string body;
    std::string expected;
    for (int i = 0; i < n; ++i) {
      const Step& s = steps[rng() % steps.size()];
      std::string code = subst(subst(s.code, "@1", "X" + std::to_string(i + 1)), "@0", "X" + std::to_string(i));
      body += "    " + code + ",\n";
      if (expected.empty() && s.effect) expected = s.effect;
    }
    out.push_back({"-module(gen).\n?PURE.\ng(X0, Dest) ->\n" + body + "    X" + std::to_string(n) +
                       ".\npure_helper(X) -> X * 3.\nimpure_helper(X) -> put(h, X), X.\n",
                   expected});
  }
  return out;
}

/// Runs g(2, Dest) of a generated program; true when the outcome agrees
/// with the program's expectation.
inline bool purity_agrees(const PurityProgram& prog) {
  Loaded m(prog.source);
  auto o = m("g", {edbc::Value::integer(2), edbc::Value::pid(edbc::Pid{999999})});
  if (prog.expected_bif.empty()) return o.value.has_value() && !o.violation;
  return o.violation && o.violation->kind == edbc::ViolationKind::Purity &&
         o.violation->impure_bif == prog.expected_bif;
}

/// Served order of a schedule in which a deferred request r1 and a newer
/// request r2 become serveable by the same cast.
inline std::vector<std::string> fairness_schedule(edbc::ServerPolicy policy) {
  using edbc::Value;
  std::mutex mu;
  std::vector<std::string> served;
  std::atomic<int> r1_checks{0};
  std::promise<void> entered;
  std::promise<void> release;
  std::shared_future<void> release_f = release.get_future().share();

  edbc::ServerCallbacks cb;
  cb.init = [](edbc::Process&) { return Value::atom("closed"); };
  cb.handle_call = [&](edbc::Process&, const Value& req, const Value&, const Value& s) {
    {
      std::lock_guard lk(mu);
      served.push_back(req.as_atom());
    }
    if (req.is_atom("block")) {
      entered.set_value();
      release_f.wait();
    }
    return reply(Value::atom("ok"), s);
  };
  cb.handle_cast = [](edbc::Process&, const Value& req, const Value&) { return noreply(req); };
  cb.cpre = [&](edbc::Process&, const Value& req, const Value&, const Value& s) {
    if (req.is_atom("r1")) ++r1_checks;
    bool ready = req.is_atom("block") || s.is_atom("open");
    return Value::tuple({Value::boolean(ready), s});
  };

  edbc::Runtime rt;
  rt.run([&](edbc::Process& p) {
    edbc::Pid s = edbc::server_start(rt, p, cb, policy);
    Value t1 = post_call(rt, p, s, Value::atom("r1"));
    while (r1_checks.load() == 0) std::this_thread::yield();
    Value tb = post_call(rt, p, s, Value::atom("block"));
    entered.get_future().wait();
    // r1 is deferred; open the gate and queue r2 behind it
    edbc::server_cast(rt, s, Value::atom("open"));
    Value t2 = post_call(rt, p, s, Value::atom("r2"));
    release.set_value();
    await_reply(p, tb);
    await_reply(p, t1);
    await_reply(p, t2);
    return Value();
  });
  return served;
}

struct StressResult {
  int ops = 0;
  std::size_t samples = 0;
  std::size_t bad_states = 0;
  std::string errors;
};

/// 20 clients, 25 read or write sessions each (one call and one cast per
/// session), against readers_writers.edl.
inline StressResult rw_stress(edbc::ServerPolicy policy, int clients = 20, int sessions = 25) {
  using edbc::Value;
  edbc::Runtime rt;
  rt.load(parse_program("readers_writers.edl"));
  StressResult res;
  std::mutex mu;
  edbc::ServerCallbacks cb = edbc::callbacks_from_module(rt, "readers_writers");
  cb.on_state = [&](const Value& s) {
    std::lock_guard lk(mu);
    ++res.samples;
    if (!rw_ok(s)) ++res.bad_states;
  };
  rt.run([&](edbc::Process& p) {
    edbc::Pid s = edbc::server_start(rt, p, cb, policy);
    std::vector<edbc::Pid> pids;
    for (int c = 0; c < clients; ++c) {
      pids.push_back(rt.spawn([&rt, s, c, sessions](edbc::Process& cp) {
        std::mt19937 rng(static_cast<unsigned>(1000 + c));
        int done = 0;
        for (int i = 0; i < sessions; ++i) {
          bool write = rng() % 4 == 0;
          edbc::server_call(rt, cp, s, Value::atom(write ? "request_write" : "request_read"));
          if (rng() % 3 == 0) cp.sleep_ms(1);
          edbc::server_cast(rt, s, Value::atom(write ? "finish_write" : "finish_read"));
          done += 2;
        }
        return Value::integer(done);
      }));
    }
    for (edbc::Pid c : pids) res.ops += static_cast<int>(rt.join(c).as_int());
    edbc::server_call(rt, p, s, Value::atom("request_read"));  // drain the casts
    return Value();
  });
  res.errors = rt.errors();
  return res;
}

struct MixResult {
  int ops = 0;
  int violations = 0;
  std::string first_report;
};

/// A seeded mix of session operations from one client holding several
/// sessions at once, against the cpre-less server. The server is restarted
/// after each violation.
inline MixResult rw_nocpre_mix(unsigned seed, int total_ops) {
  using edbc::Value;
  edbc::Runtime rt;
  rt.load(parse_program("readers_writers_nocpre.edl"));
  std::mt19937 rng(seed);
  MixResult res;
  rt.run([&](edbc::Process& p) {
    auto start = [&] {
      return edbc::server_start(rt, p, edbc::callbacks_from_module(rt, "readers_writers_nocpre"),
                                edbc::ServerPolicy::Fair);
    };
    edbc::Pid s = start();
    int readers = 0;
    int writers = 0;
    while (res.ops < total_ops) {
      ++res.ops;
      unsigned pick = rng() % 4;
      try {
        if (pick == 0) {
          edbc::server_call(rt, p, s, Value::atom("request_read"));
          ++readers;
        } else if (pick == 1) {
          edbc::server_call(rt, p, s, Value::atom("request_write"));
          ++writers;
        } else if (pick == 2 && readers > 0) {
          edbc::server_cast(rt, s, Value::atom("finish_read"));
          --readers;
        } else if (pick == 3 && writers > 0) {
          edbc::server_cast(rt, s, Value::atom("finish_write"));
          --writers;
        }
      } catch (const edbc::ContractViolation& v) {
        ++res.violations;
        if (res.first_report.empty()) res.first_report = v.violation().message;
        s = start();
        readers = writers = 0;
      }
    }
    return Value();
  });
  return res;
}

/// True when `report` mentions a state {state,N,true} with N >= 1.
inline bool has_writer_with_readers(const std::string& report) {
  for (auto pos = report.find("{state,"); pos != std::string::npos; pos = report.find("{state,", pos + 1)) {
    int n = 0;
    char flag[8] = {};
    if (std::sscanf(report.c_str() + pos, "{state,%d,%5[a-z]}", &n, flag) == 2 &&
        std::string(flag) == "true" && n >= 1) {
      return true;
    }
  }
  return false;
}

}  // namespace test
