#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "edbc/value.hpp"

namespace edbc {

/// Runtime type language used by `-spec` contracts.
struct TypeSpec {
  enum class Kind {
    Any,
    Integer,
    NonNegInteger,
    Float,
    Number,
    Boolean,
    Atom,
    LiteralAtom,
    String,
    List,
    Tuple,
    Union,
  };

  Kind kind = Kind::Any;
  std::string atom;                // LiteralAtom only
  std::vector<TypeSpec> children;  // List: 1 element, Tuple: fields, Union: >= 2 alternatives

  static TypeSpec simple(Kind k) { return TypeSpec{k, {}, {}}; }
  static TypeSpec literal(std::string name) { return TypeSpec{Kind::LiteralAtom, std::move(name), {}}; }
  static TypeSpec list_of(TypeSpec elem) { return TypeSpec{Kind::List, {}, {std::move(elem)}}; }
  static TypeSpec tuple_of(std::vector<TypeSpec> fields) {
    return TypeSpec{Kind::Tuple, {}, std::move(fields)};
  }
  /// Builds a union, flattening a single alternative to itself.
  static TypeSpec union_of(std::vector<TypeSpec> alternatives);

  bool operator==(const TypeSpec&) const = default;
};

/// Parses Erlang type syntax: `integer()`, `[atom()]`, `{a, any()}`, `a | b`.
/// Throws ParseError on unknown type names and on function types.
TypeSpec parse_typespec(std::string_view text);

/// True iff `v` inhabits `t`. Total: never throws.
bool type_check(const Value& v, const TypeSpec& t);

/// Canonical source text, e.g. `integer()` or `[atom()] | {a,b}`.
std::string to_string(const TypeSpec& t);

}  // namespace edbc
