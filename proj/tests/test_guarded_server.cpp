#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "scenarios.hpp"

using namespace edbc;
using test::await_reply;
using test::noreply;
using test::post_call;
using test::reply;
using test::rw_ok;

namespace {

Value I(std::int64_t v) { return Value::integer(v); }
Value A(const char* s) { return Value::atom(s); }

RequestEnvelope env(const char* name, RequestEnvelope::Origin origin = RequestEnvelope::Origin::Mailbox) {
  return RequestEnvelope{A(name), Value::tuple({Value::pid(Pid{1}), I(0)}), origin};
}

std::vector<std::string> request_names(const std::deque<RequestEnvelope>& q) {
  std::vector<std::string> out;
  for (const auto& e : q) out.push_back(e.request.as_atom());
  return out;
}

}  // namespace

TEST_CASE("ServerQueues") {
  ServerQueues q;
  q.defer(env("b", RequestEnvelope::Origin::QueueCurrent));
  q.defer(env("d"));
  q.current.push_back(env("c"));
  CHECK(request_names(q.old) == std::vector<std::string>{"b"});
  CHECK(request_names(q.fresh) == std::vector<std::string>{"d"});
  q.rebuild();
  CHECK(request_names(q.current) == std::vector<std::string>{"b", "c", "d"});
  CHECK(q.old.empty());
  CHECK(q.fresh.empty());
  q.rebuild();
  CHECK(request_names(q.current) == std::vector<std::string>{"b", "c", "d"});
}

TEST_CASE("selective receive serves results in order under both policies") {
  for (const char* policy : {"fair", "resend"}) {
    CAPTURE(std::string(policy));
    Runtime rt;
    rt.load(test::parse_program("selective_receive.edl"));
    Value r = rt.run([&](Process& p) {
      Value args[] = {A("selective_receive"), A(policy)};
      Value s = rt.call_function(p, "edbc", "server_start", args);
      Value t[] = {s, A("test")};
      CHECK(rt.call_function(p, "edbc", "server_call", t) == A("ok"));
      Value d[] = {s, A("done")};
      return rt.call_function(p, "edbc", "server_call", d);
    });
    CHECK(r == A("finished"));
    std::string expected;
    for (int i = 0; i <= 9; ++i) expected += "result: " + std::to_string(i) + "\n";
    CHECK(rt.output() == expected);
  }
}

TEST_CASE("a deferring cpre still updates the state") {
  ServerCallbacks cb;
  cb.init = [](Process&) { return I(0); };
  cb.handle_call = [](Process&, const Value& req, const Value&, const Value& s) {
    if (req.is_atom("peek")) return reply(s, s);
    return reply(A("served"), s);
  };
  cb.handle_cast = [](Process&, const Value& req, const Value& s) { return noreply(req.is_atom("open") ? I(100) : s); };
  cb.cpre = [](Process&, const Value& req, const Value&, const Value& s) {
    if (req.is_atom("gated") && s.as_int() < 100) return Value::tuple({Value::boolean(false), I(s.as_int() + 1)});
    return Value::tuple({Value::boolean(true), s});
  };
  for (auto policy : {ServerPolicy::Fair, ServerPolicy::Resend}) {
    Runtime rt;
    rt.run([&](Process& p) {
      Pid s = server_start(rt, p, cb, policy);
      Value gated = post_call(rt, p, s, A("gated"));
      // Poll until the gated request has been looked at at least once.
      Value seen = I(0);
      for (int i = 0; i < 1000 && seen.as_int() == 0; ++i) seen = server_call(rt, p, s, A("peek"));
      CHECK(seen.as_int() >= 1);
      // casts are never deferred and open the gate
      server_cast(rt, s, A("open"));
      CHECK(await_reply(p, gated) == A("served"));
      CHECK(server_call(rt, p, s, A("peek")) == I(100));
      return Value();
    });
  }
}

TEST_CASE("invariant violations") {
  ServerCallbacks cb;
  cb.module = "rw";
  cb.init = [](Process&) { return Value::tuple({A("state"), I(-1), Value::boolean(false)}); };
  cb.handle_call = [](Process&, const Value&, const Value&, const Value& s) { return reply(A("ok"), s); };
  cb.handle_cast = [](Process&, const Value&, const Value& s) { return noreply(s); };
  cb.invariant = [](Process&, const Value& s) { return Value::boolean(rw_ok(s)); };
  Runtime rt;
  Value r = rt.run([&](Process& p) {
    try {
      server_start(rt, p, cb, ServerPolicy::Fair);
    } catch (const ContractViolation& v) {
      CHECK(v.violation().kind == ViolationKind::Invariant);
      CHECK(v.violation().callback == "init");
      return A("caught");
    }
    return A("started");
  });
  CHECK(r == A("caught"));

  CHECK(rw_ok(Value::tuple({A("state"), I(3), Value::boolean(false)})));
  CHECK_FALSE(rw_ok(Value::tuple({A("state"), I(1), Value::boolean(true)})));
}

TEST_CASE("invariant report from a module server") {
  Runtime rt;
  rt.load(test::parse_program("readers_writers_nocpre.edl"));
  auto o = test::call(rt, "readers_writers_nocpre", "main", {});
  REQUIRE(o.violation);
  const std::string& msg = o.violation->message;
  CHECK(test::contains(msg, "The invariant does not hold."));
  CHECK(test::contains(rt.errors(), "When Server state == {state,0,true}"));
  CHECK(test::contains(msg, "Result: {reply, pass,{state,1,true}}"));
  CHECK(test::contains(rt.errors(), "terminating"));
}

TEST_CASE("server without cpre behaves as a plain server") {
  ServerCallbacks cb;
  cb.init = [](Process&) { return test::ints({}); };
  cb.handle_call = [](Process&, const Value& req, const Value&, const Value& s) {
    Value next = Value::cons(req, s);
    return reply(I(static_cast<std::int64_t>(next.size())), next);
  };
  cb.handle_cast = [](Process&, const Value&, const Value& s) { return noreply(s); };
  Runtime rt;
  rt.run([&](Process& p) {
    Pid s = server_start(rt, p, cb, ServerPolicy::Fair);
    for (int i = 1; i <= 5; ++i) CHECK(server_call(rt, p, s, I(i)) == I(i));
    return Value();
  });
}

TEST_CASE("cpre may not send") {
  Runtime rt;
  rt.load(load_source(R"(-module(noisy).
init() -> 0.
handle_call(_, _, S) -> {reply, ok, S}.
handle_cast(_, S) -> {noreply, S}.
cpre(_, _, S) -> self() ! hello, {true, S}.
main() -> S = server_start(noisy), server_call(S, go).
)"));
  auto o = test::call(rt, "noisy", "main", {});
  CHECK(o.error == "cpre_effect");
}

TEST_CASE("fair policy serves the older of two requests enabled together; resend may not") {
  CHECK(test::fairness_schedule(ServerPolicy::Fair) == std::vector<std::string>{"block", "r1", "r2"});
  CHECK(test::fairness_schedule(ServerPolicy::Resend) == std::vector<std::string>{"block", "r2", "r1"});
}

TEST_CASE("resend liveness: deferred requests are all served once enabled") {
  ServerCallbacks cb;
  cb.init = [](Process&) { return I(0); };
  cb.handle_call = [](Process&, const Value& req, const Value&, const Value& s) { return reply(req, s); };
  cb.handle_cast = [](Process&, const Value&, const Value& s) { return noreply(I(s.as_int() + 1)); };
  cb.cpre = [](Process&, const Value& req, const Value&, const Value& s) {
    return Value::tuple({Value::boolean(s.as_int() >= req.as_int()), s});
  };
  for (auto policy : {ServerPolicy::Resend, ServerPolicy::Fair}) {
    Runtime rt;
    rt.run([&](Process& p) {
      Pid s = server_start(rt, p, cb, policy);
      std::vector<Value> tags;
      for (int i = 1; i <= 8; ++i) tags.push_back(post_call(rt, p, s, I(i)));
      for (int i = 1; i <= 8; ++i) server_cast(rt, s, A("tick"));
      for (int i = 0; i < 8; ++i) CHECK(await_reply(p, tags[i]) == I(i + 1));
      return Value();
    });
  }
}

TEST_CASE("readers-writers with cpre: 1000 operations, 20 clients, no violation") {
  for (auto policy : {ServerPolicy::Fair, ServerPolicy::Resend}) {
    auto r = test::rw_stress(policy);
    CHECK(r.ops == 1000);
    CHECK(r.samples >= 1000);
    CHECK(r.bad_states == 0);
    CHECK_FALSE(test::contains(r.errors, "invariant"));
  }
}

TEST_CASE("readers-writers without cpre: a seeded mix violates the invariant") {
  auto r = test::rw_nocpre_mix(42, 200);
  CHECK(r.ops == 200);
  CHECK(r.violations >= 1);
  CHECK(test::contains(r.first_report, "The invariant does not hold."));
  CHECK(test::has_writer_with_readers(r.first_report));
  CHECK_FALSE(test::has_writer_with_readers("{state,0,true} {state,2,false}"));
}
