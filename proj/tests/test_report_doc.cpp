#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "support.hpp"

using namespace edbc;

namespace {

Value I(std::int64_t v) { return Value::integer(v); }
Value A(const char* s) { return Value::atom(s); }

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("report templates") {
  Violation pre;
  pre.kind = ViolationKind::Precondition;
  pre.call = CallInfo{"fib", "fib", {I(-1)}};
  CHECK(format_violation(pre) == "The precondition does not hold. Last call: fib:fib(-1).");
  pre.user_reason = "negative input";
  CHECK(format_violation(pre) == "The precondition does not hold. Last call: fib:fib(-1). Reason: negative input");

  Violation post;
  post.kind = ViolationKind::Postcondition;
  post.call = CallInfo{"find", "find", {test::atoms({"a"}), A("z")}};
  CHECK(format_violation(post) == "The postcondition does not hold. Last call: find:find([a], z).");

  Violation dec;
  dec.kind = ViolationKind::Decrease;
  dec.call = CallInfo{"ex", "fib", {I(2)}};
  dec.prev_args = {I(2)};
  dec.next_args = {I(4)};
  CHECK(format_violation(dec) ==
        "Decreasing condition does not hold. Previous call: fib(2). Current call: fib(4).");

  Violation pur;
  pur.kind = ViolationKind::Purity;
  pur.call = CallInfo{"ex", "g3", {}};
  pur.impure_bif = "erlang:put/2";
  CHECK(format_violation(pur) ==
        "The function is not pure. Last call: ex:g3(). It has call the impure BIF erlang:put/2 when "
        "evaluating g3().");

  Violation spec;
  spec.kind = ViolationKind::SpecPre;
  spec.call = CallInfo{"ex", "fib", {A("a")}};
  spec.offending = A("a");
  spec.type_text = "integer()";
  CHECK(format_violation(spec) ==
        "The spec precondition does not hold. Last call: ex:fib(a). The value a is not of type integer().");

  Violation time;
  time.kind = ViolationKind::ExpectedTime;
  time.call = CallInfo{"ex", "f_time", {test::ints({1, 2})}};
  time.real_ms = 150.9913;
  time.expected_ms = 102;
  CHECK(format_violation(time) ==
        "The execution of ex:f_time([1,2]) took too much time. Real: 150.991 ms. Expected: 102 ms. "
        "Difference: 48.991 ms)");

  Violation inv;
  inv.kind = ViolationKind::Invariant;
  inv.callback = "handle_call";
  inv.call = CallInfo{"rw", "handle_call", {}};
  inv.request = A("request_read");
  inv.prior_state = Value::tuple({A("state"), I(0), Value::boolean(true)});
  inv.result = Value::tuple({A("reply"), A("pass"), Value::tuple({A("state"), I(1), Value::boolean(true)})});
  CHECK(format_violation(inv) ==
        "The invariant does not hold.\nLast call: rw:handle_call(request_read, ..., {state,0,true}).\n"
        "Result: {reply, pass,{state,1,true}}");
}

TEST_CASE("server termination report") {
  std::string r = format_server_termination("rw", A("request_read"),
                                            Value::tuple({A("state"), I(0), Value::boolean(true)}), "boom");
  CHECK(test::contains(r, "** Generic server rw terminating"));
  CHECK(test::contains(r, "** Last message in was request_read"));
  CHECK(test::contains(r, "** When Server state == {state,0,true}"));
  CHECK(test::contains(r, "boom"));
}

TEST_CASE("violations from the corpus render distinctly") {
  struct Case {
    const char* file;
    const char* fn;
    std::vector<Value> args;
  };
  const std::vector<Case> cases = {
      {"fib.edl", "fib", {I(-1)}},
      {"fib.edl", "fib", {I(-7)}},
      {"fib_bug.edl", "fib", {I(2)}},
      {"find_bug.edl", "find", {test::atoms({"a", "b"}), A("z")}},
      {"fib_spec.edl", "fib", {A("a")}},
      {"fib_spec.edl", "half", {I(3)}},
      {"find_bug.edl", "find", {test::atoms({"a"}), A("z")}},
      {"find.edl", "find", {test::atoms({}), A("z")}},
      {"purity_g3.edl", "g3", {}},
      {"readers_writers_nocpre.edl", "main", {}},
  };
  std::set<std::string> seen;
  for (const auto& c : cases) {
    CAPTURE(std::string(c.file));
    CAPTURE(std::string(c.fn));
    Runtime rt;
    auto m = test::parse_program(c.file);
    rt.load(m);
    auto o = test::call(rt, m.name, c.fn, c.args);
    REQUIRE(o.violation);
    CHECK(o.violation->message == format_violation(*o.violation));
    CHECK(seen.insert(o.violation->message).second);
  }
}

TEST_CASE("docs for find list three contract blocks") {
  std::string md = generate_docs(test::parse_program("find.edl"));
  CHECK(test::contains(md, "# Module find"));
  CHECK(test::contains(md, "## find/2"));
  CHECK(test::contains(md, "## find/3"));
  CHECK(count(md, "```erlang") == 3);
  CHECK(count(md, "?PRE(") == 1);
  CHECK(count(md, "?POST(") == 2);
}

TEST_CASE("docs for fib show the precondition text") {
  std::string md = generate_docs(test::parse_program("fib.edl"));
  CHECK(test::contains(md, "?P(1) >= 0"));
  CHECK(test::contains(md, "?SDECREASES(?P(1))"));
}

TEST_CASE("docs of uncontracted modules carry headers only") {
  std::string md = generate_docs(load_source("-module(plain).\nf(X) -> X.\ng() -> 1.\n"));
  CHECK(test::contains(md, "# Module plain"));
  CHECK(test::contains(md, "## f/1"));
  CHECK(test::contains(md, "## g/0"));
  CHECK_FALSE(test::contains(md, "```"));
  CHECK(generate_docs(load_source("-module(empty).\n")) == "# Module empty\n\n");
}

TEST_CASE("docs are stable") {
  for (const char* file : {"find.edl", "fib.edl", "time.edl", "readers_writers.edl", "fib_spec.edl"}) {
    CAPTURE(file);
    CHECK(generate_docs(test::parse_program(file)) == generate_docs(test::parse_program(file)));
  }
  std::string spec = generate_docs(test::parse_program("fib_spec.edl"));
  CHECK(test::contains(spec, "-spec fib(integer()) -> integer()."));
}
