#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <set>

#include "edbc/instrumenter.hpp"
#include "edbc/printer.hpp"
#include "support.hpp"

using namespace edbc;

namespace {

const char* kFib = R"(-module(ex).
?PRE(fun() -> ?P(1) >= 0 end).
?SDECREASES(?P(1)).
fib(0) -> 0;
fib(1) -> 1;
fib(N) -> fib(N - 1) +  fib(N - 2).
)";

const FunDef* find_fun(const std::vector<FunDef>& fs, const std::string& name, std::size_t arity) {
  for (const auto& f : fs) {
    if (f.name == name && f.arity == arity) return &f;
  }
  return nullptr;
}

std::vector<std::string> names(const InstrumentedModule& im) {
  std::vector<std::string> out;
  for (const auto& f : im.fundefs) out.push_back(f.name + "/" + std::to_string(f.arity));
  return out;
}

bool is_call(const Expr& e) {
  return std::holds_alternative<expr::LocalCall>(e.node) || std::holds_alternative<expr::RemoteCall>(e.node);
}

}  // namespace

TEST_CASE("read_contracts") {
  ModuleAst fib = parse_module(kFib);
  auto cs = read_contracts(fib.fundefs[0], fib);
  REQUIRE(cs.size() == 2);
  CHECK(cs[0].kind == LoweredContract::Kind::Pre);
  CHECK(cs[0].tag.empty());
  CHECK(cs[1].kind == LoweredContract::Kind::Decreases);

  ModuleAst spec = parse_module("-module(m).\n?PRE(fun() -> true end).\n-spec f(integer()) -> atom().\nf(_) -> a.\n");
  cs = read_contracts(spec.fundefs[0], spec);
  REQUIRE(cs.size() == 3);
  CHECK(cs[0].kind == LoweredContract::Kind::Pre);
  CHECK(cs[0].tag == "spec");
  CHECK(cs[1].kind == LoweredContract::Kind::Post);
  CHECK(cs[1].tag == "spec");
  CHECK(cs[2].tag.empty());

  ModuleAst plain = parse_module("-module(m).\nf() -> 1.\n");
  CHECK(read_contracts(plain.fundefs[0], plain).empty());

  ModuleAst lowered = parse_module(
      "-module(m).\n?PURE.\nf() -> 1.\n?EXPECTED_TIME(fun() -> 5 end).\n?TIMEOUT(fun() -> 5 end).\ng() -> 1.\n");
  cs = read_contracts(lowered.fundefs[0], lowered);
  REQUIRE(cs.size() == 1);
  CHECK(cs[0].kind == LoweredContract::Kind::Pre);
  CHECK(cs[0].tag == "pure");
  cs = read_contracts(lowered.fundefs[1], lowered);
  REQUIRE(cs.size() == 2);
  CHECK(cs[0].tag == "expected_time");
  CHECK(cs[1].tag == "timeout");
}

TEST_CASE("rejected contract combinations") {
  ModuleAst pure_timeout = parse_module("-module(m).\n?PURE.\n?TIMEOUT(fun() -> 5 end).\nf() -> 1.\n");
  CHECK_THROWS_AS(check_contracts(pure_timeout), InstrumentError);
  ModuleAst pure_time = parse_module("-module(m).\n?EXPECTED_TIME(fun() -> 5 end).\n?PURE.\nf() -> 1.\n");
  CHECK_THROWS_AS(instrument_module(pure_time), InstrumentError);
  ModuleAst two = parse_module("-module(m).\n?DECREASES(?P(1)).\n?SDECREASES(?P(1)).\nf(X) -> X.\n");
  CHECK_THROWS_AS(check_contracts(two), InstrumentError);
}

TEST_CASE("inst_put_info") {
  ModuleAst m = parse_module(kFib);
  InstrumentState st(m);
  st.prefix = "FV";
  FunDef renamed = inst_put_info(m.fundefs[0], st);
  CHECK(renamed.name == "fib__edbc0");
  CHECK(renamed.clauses == m.fundefs[0].clauses);
  REQUIRE(st.helpers.size() == 1);
  CHECK(print_fundef(st.helpers[0]) == "fib(FV1) ->\n    edbc_put_info(fib, [FV1]),\n    fib__edbc0(FV1).\n");

  ModuleAst zero = parse_module("-module(m).\n?PURE.\nf() -> 1.\n");
  InstrumentState st0(zero);
  st0.prefix = "FV";
  inst_put_info(zero.fundefs[0], st0);
  CHECK(print_fundef(st0.helpers[0]) == "f() ->\n    edbc_put_info(f, []),\n    f__edbc0().\n");
}

TEST_CASE("inst_decr rewrites recursive calls") {
  ModuleAst m = parse_module(kFib);
  InstrumentState st(m);
  st.prefix = "FV";
  FunDef out = inst_decr(contract::Decreases{{1}, true}, m.fundefs[0], "fib", 1, st);
  CHECK(test::contains(print_fundef(out), "fib__edbc0([N], [N - 1]) + fib__edbc0([N], [N - 2])"));
  CHECK(out.clauses[0] == m.fundefs[0].clauses[0]);
  REQUIRE(st.checkers.size() == 1);
  CHECK(print_fundef(st.checkers[0]) ==
        "fib__edbc0(FVP, [FV1]) ->\n    edbc_decrease_check(FVP, [FV1], true, [FV1], fun() -> fib(FV1) end).\n");

  ModuleAst g = parse_module(
      "-module(m).\n?DECREASES([?P(1), ?P(3)]).\ng(A, B, C) when A > 0 -> g(A - 1, B, C);\ng(_, _, _) -> done.\n");
  InstrumentState sg(g);
  sg.prefix = "FV";
  FunDef gout = inst_decr(contract::Decreases{{1, 3}, false}, g.fundefs[0], "g", 3, sg);
  CHECK(test::contains(print_fundef(gout), "g__edbc0([A, C], [A - 1, B, C])"));
  CHECK(test::contains(print_fundef(sg.checkers[0]), "edbc_decrease_check(FVP, [FV1, FV3], false, [FV1, FV2, FV3]"));

  ModuleAst flat = parse_module("-module(m).\n?DECREASES(?P(1)).\nh(X) -> X + 1.\n");
  InstrumentState sf(flat);
  sf.prefix = "FV";
  FunDef fout = inst_decr(contract::Decreases{{1}, false}, flat.fundefs[0], "h", 1, sf);
  CHECK(fout.clauses == flat.fundefs[0].clauses);
  CHECK(sf.checkers.size() == 1);
}

TEST_CASE("wildcards in decreasing positions become variables") {
  ModuleAst m = parse_module("-module(m).\n?SDECREASES(?P(1)).\nc([_ | T]) -> c(T);\nc([]) -> 0.\n");
  InstrumentedModule im = instrument_module(m);
  std::string text = pretty_print(im.as_module());
  CHECK(test::contains(text, "c__edbc0([FVW1 | T]) ->"));
  CHECK(test::contains(text, "c__edbc1([[FVW1 | T]], [T])"));
}

TEST_CASE("inst_pre and inst_post substitute parameters") {
  ModuleAst m = parse_module(
      "-module(m).\n?PRE(fun() -> ?P(1) > 0 end).\nf(X, Y) -> X + Y.\n?POST(fun() -> ?R > ?P(2) end).\n");
  InstrumentedModule im = instrument_module(m);
  std::string text = pretty_print(im.as_module());
  CHECK(test::contains(text, "edbc_pre(fun() -> FV1 > 0 end, fun() -> f__edbc1(FV1, FV2) end)"));
  CHECK(test::contains(text, "edbc_post(fun(FVRes) -> FVRes > FV2 end, fun() -> f__edbc2(FV1, FV2) end)"));
}

TEST_CASE("instrument_module on fib") {
  ModuleAst m = parse_module(kFib);
  InstrumentedModule im = instrument_module(m);
  CHECK(names(im) == std::vector<std::string>{"fib/1", "fib__edbc0/1", "fib__edbc2/1", "fib__edbc1/2"});
  CHECK(im.role_of("fib", 1) == FunRole::Entry);
  CHECK(im.role_of("fib__edbc0", 1) == FunRole::PreWrapper);
  CHECK(im.role_of("fib__edbc2", 1) == FunRole::Original);
  CHECK(im.role_of("fib__edbc1", 2) == FunRole::DecreaseChecker);
  CHECK(im.entry_points.at("fib/1") == "fib");

  InstrumentedModule off = instrument_module(m, false);
  REQUIRE(off.fundefs.size() == 1);
  CHECK(off.fundefs[0].contracts.empty());
  CHECK(off.fundefs[0].clauses == m.fundefs[0].clauses);
}

TEST_CASE("modules without contracts are unchanged") {
  ModuleAst m = parse_module("-module(m).\nf(X) -> X.\ng() -> f(1).\n");
  InstrumentedModule im = instrument_module(m);
  CHECK(im.as_module() == m);
  CHECK(pretty_print(im.as_module()) == pretty_print(m));
}

TEST_CASE("two postconditions nest with the first outermost") {
  ModuleAst m = test::parse_program("find.edl");
  InstrumentedModule im = instrument_module(m);
  const FunDef* entry = find_fun(im.fundefs, "find", 2);
  REQUIRE(entry);
  // entry -> pre -> first post -> second post -> original
  CHECK(names(im)[0] == "find/2");
  CHECK(im.role_of("find__edbc0", 2) == FunRole::PreWrapper);
  CHECK(im.role_of("find__edbc1", 2) == FunRole::PostWrapper);
  CHECK(im.role_of("find__edbc2", 2) == FunRole::PostWrapper);
  CHECK(im.role_of("find__edbc3", 2) == FunRole::Original);
  CHECK(im.role_of("find", 3) == FunRole::Plain);
  std::string first = print_fundef(*find_fun(im.fundefs, "find__edbc1", 2));
  CHECK(test::contains(first, "lists:nth(FVRes, FV1)"));
  std::string second = print_fundef(*find_fun(im.fundefs, "find__edbc2", 2));
  CHECK(test::contains(second, "lists:all"));
}

TEST_CASE("helpers other than post wrappers end in a call") {
  for (const auto& entry : std::filesystem::directory_iterator(EDBC_PROGRAMS_DIR)) {
    if (entry.path().extension() != ".edl") continue;
    CAPTURE(entry.path().string());
    InstrumentedModule im = instrument_module(parse_module(read_file(entry.path().string())));
    for (const auto& f : im.fundefs) {
      FunRole r = im.role_of(f.name, f.arity);
      if (r != FunRole::Entry && r != FunRole::PreWrapper && r != FunRole::DecreaseChecker) continue;
      CAPTURE(f.name);
      for (const auto& c : f.clauses) CHECK(is_call(*c.body.back()));
    }
  }
}

TEST_CASE("fresh names never collide and output is deterministic") {
  for (const auto& entry : std::filesystem::directory_iterator(EDBC_PROGRAMS_DIR)) {
    if (entry.path().extension() != ".edl") continue;
    CAPTURE(entry.path().string());
    ModuleAst m = parse_module(read_file(entry.path().string()));
    InstrumentedModule a = instrument_module(m);
    InstrumentedModule b = instrument_module(m);
    CHECK(pretty_print(a.as_module()) == pretty_print(b.as_module()));
    std::set<std::string> seen;
    for (const auto& f : a.fundefs) CHECK(seen.insert(key_of(f.name, f.arity)).second);
    for (const auto& f : m.fundefs) {
      CHECK(seen.count(key_of(f.name, f.arity)) == 1);
      if (f.contracts.empty() && !(m.invariant && (f.name == "init" || f.name.rfind("handle_", 0) == 0))) {
        CHECK(print_fundef(*find_fun(a.fundefs, f.name, f.arity)) == print_fundef(f));
      }
    }
  }

  ModuleAst taken = parse_module(
      "-module(m).\nfib__edbc0(X) -> X.\n?PRE(fun() -> true end).\nfib(X) -> fib__edbc0(X).\n");
  InstrumentedModule im = instrument_module(taken);
  std::set<std::string> seen;
  for (const auto& f : im.fundefs) CHECK(seen.insert(f.name).second);
  CHECK(seen.count("fib__edbc1") == 1);
}

TEST_CASE("fresh variable prefix avoids user variables") {
  ModuleAst m = parse_module("-module(m).\n?PRE(fun() -> ?P(1) > 0 end).\nf(FV1) -> FV1.\n");
  std::string text = pretty_print(instrument_module(m).as_module());
  CHECK(test::contains(text, "f(FV_1) ->"));
}

TEST_CASE("invariant lowers onto behaviour callbacks") {
  ModuleAst m = test::parse_program("readers_writers.edl");
  InstrumentedModule im = instrument_module(m);
  for (auto [name, arity] : {std::pair{"init", 0}, {"handle_call", 3}, {"handle_cast", 2}}) {
    CHECK(im.role_of(name, arity) == FunRole::Entry);
  }
  CHECK(im.role_of("cpre", 3) == FunRole::Plain);
  CHECK(test::contains(pretty_print(im.as_module()), "edbc_invariant(fun invariant/1, handle_call, FVRes)"));
}
