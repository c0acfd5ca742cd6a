#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "edbc/parser.hpp"
#include "edbc/typespec.hpp"

using namespace edbc;
using K = TypeSpec::Kind;

namespace {

// Naive reference checker, written from the type descriptions alone.
bool oracle(const Value& v, const TypeSpec& t) {
  switch (t.kind) {
    case K::Any: return true;
    case K::Integer: return v.kind() == Value::Kind::Int;
    case K::NonNegInteger: return v.kind() == Value::Kind::Int && v.as_int() >= 0;
    case K::Float: return v.kind() == Value::Kind::Float;
    case K::Number: return v.kind() == Value::Kind::Int || v.kind() == Value::Kind::Float;
    case K::Boolean: return v.kind() == Value::Kind::Bool;
    case K::Atom: return v.kind() == Value::Kind::Atom || v.kind() == Value::Kind::Bool;
    case K::LiteralAtom:
      if (v.kind() == Value::Kind::Bool) return t.atom == (v.as_bool() ? "true" : "false");
      return v.kind() == Value::Kind::Atom && v.as_atom() == t.atom;
    case K::String: return v.kind() == Value::Kind::Str;
    case K::List: {
      if (v.kind() != Value::Kind::List) return false;
      bool all = true;
      for (std::size_t i = 0; i < v.size(); ++i) all = all && oracle(v.elements()[i], t.children[0]);
      return all;
    }
    case K::Tuple: {
      if (v.kind() != Value::Kind::Tuple || v.size() != t.children.size()) return false;
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (!oracle(v.elements()[i], t.children[i])) return false;
      }
      return true;
    }
    case K::Union: {
      int hits = 0;
      for (const auto& alt : t.children) hits += oracle(v, alt) ? 1 : 0;
      return hits > 0;
    }
  }
  return false;
}

std::vector<Value> values() {
  std::vector<Value> leaves = {Value::atom("a"),     Value::atom("b"),      Value::integer(-1),
                               Value::integer(0),    Value::integer(3),     Value::flt(3.0),
                               Value::boolean(true), Value::boolean(false), Value::str("s"),
                               Value::nil()};
  std::vector<Value> out = leaves;
  for (const auto& x : leaves) {
    out.push_back(Value::list({x}));
    out.push_back(Value::tuple({x}));
    for (const auto& y : {Value::integer(1), Value::atom("a")}) {
      out.push_back(Value::list({x, y}));
      out.push_back(Value::tuple({y, x}));
    }
  }
  out.push_back(Value::tuple({}));
  return out;
}

std::vector<TypeSpec> types() {
  std::vector<TypeSpec> leaves = {
      TypeSpec::simple(K::Any),     TypeSpec::simple(K::Integer), TypeSpec::simple(K::NonNegInteger),
      TypeSpec::simple(K::Float),   TypeSpec::simple(K::Number),  TypeSpec::simple(K::Boolean),
      TypeSpec::simple(K::Atom),    TypeSpec::literal("a"),       TypeSpec::literal("true"),
      TypeSpec::simple(K::String)};
  std::vector<TypeSpec> out = leaves;
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    out.push_back(TypeSpec::list_of(leaves[i]));
    out.push_back(TypeSpec::tuple_of({leaves[i]}));
    for (std::size_t j = i + 1; j < leaves.size(); j += 3) {
      out.push_back(TypeSpec::tuple_of({leaves[i], leaves[j]}));
      out.push_back(TypeSpec::union_of({leaves[i], leaves[j]}));
    }
  }
  out.push_back(TypeSpec::tuple_of({}));
  return out;
}

}  // namespace

TEST_CASE("parse_typespec examples") {
  CHECK(parse_typespec("integer()") == TypeSpec::simple(K::Integer));
  CHECK(parse_typespec("a | b") == TypeSpec::union_of({TypeSpec::literal("a"), TypeSpec::literal("b")}));
  CHECK_THROWS_AS(parse_typespec("frob()"), ParseError);
  CHECK(parse_typespec("[integer()]") == TypeSpec::list_of(TypeSpec::simple(K::Integer)));
  CHECK(parse_typespec("{atom(), any()}") ==
        TypeSpec::tuple_of({TypeSpec::simple(K::Atom), TypeSpec::simple(K::Any)}));
  CHECK_THROWS_AS(parse_typespec("fun((integer()) -> integer())"), ParseError);
}

TEST_CASE("to_string parses back") {
  for (const auto& t : types()) {
    CAPTURE(to_string(t));
    CHECK(parse_typespec(to_string(t)) == t);
  }
}

TEST_CASE("type_check examples") {
  CHECK_FALSE(type_check(Value::atom("a"), TypeSpec::simple(K::Integer)));
  CHECK(type_check(Value::integer(0), TypeSpec::simple(K::NonNegInteger)));
  CHECK_FALSE(type_check(Value::list({Value::integer(1), Value::atom("x")}),
                         TypeSpec::list_of(TypeSpec::simple(K::Integer))));
  CHECK_FALSE(type_check(Value::flt(3.0), TypeSpec::simple(K::Integer)));
  CHECK_FALSE(type_check(Value::list({Value::integer(115)}), TypeSpec::simple(K::String)));
}

TEST_CASE("type_check agrees with the naive oracle on all small values and types") {
  auto vs = values();
  auto ts = types();
  int compared = 0;
  for (const auto& t : ts) {
    for (const auto& v : vs) {
      CAPTURE(to_string(v));
      CAPTURE(to_string(t));
      CHECK(type_check(v, t) == oracle(v, t));
      ++compared;
    }
  }
  CHECK(compared > 3000);
}

TEST_CASE("type_check properties") {
  auto ts = types();
  for (const auto& v : values()) {
    CHECK(type_check(v, TypeSpec::simple(K::Any)));
    if (type_check(v, TypeSpec::simple(K::Integer))) CHECK(type_check(v, TypeSpec::simple(K::Number)));
    for (std::size_t i = 0; i + 1 < ts.size(); i += 7) {
      TypeSpec u = TypeSpec::union_of({ts[i], ts[i + 1]});
      CHECK(type_check(v, u) == (type_check(v, ts[i]) || type_check(v, ts[i + 1])));
    }
  }
}
