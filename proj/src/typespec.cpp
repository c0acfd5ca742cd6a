#include "edbc/typespec.hpp"

#include "edbc/parser.hpp"
#include "lexer.hpp"

namespace edbc {

using detail::Tok;
using detail::Token;

namespace detail {

namespace {

[[noreturn]] void fail(const Token& t, const std::string& msg) {
  throw ParseError(t.line, t.column, msg);
}

void expect(const std::vector<Token>& ts, std::size_t& pos, std::string_view p) {
  if (!ts[pos].punct(p)) fail(ts[pos], "expected '" + std::string(p) + "' in type");
  ++pos;
}

TypeSpec named_type(const Token& name, std::vector<TypeSpec> args) {
  using K = TypeSpec::Kind;
  const std::string& n = name.text;
  if (n == "list") {
    if (args.size() > 1) fail(name, "list/1 takes one type argument");
    return TypeSpec::list_of(args.empty() ? TypeSpec::simple(K::Any) : std::move(args[0]));
  }
  if (!args.empty()) fail(name, "type " + n + "() takes no arguments");
  if (n == "any" || n == "term") return TypeSpec::simple(K::Any);
  if (n == "integer") return TypeSpec::simple(K::Integer);
  if (n == "non_neg_integer") return TypeSpec::simple(K::NonNegInteger);
  if (n == "float") return TypeSpec::simple(K::Float);
  if (n == "number") return TypeSpec::simple(K::Number);
  if (n == "boolean") return TypeSpec::simple(K::Boolean);
  if (n == "atom") return TypeSpec::simple(K::Atom);
  if (n == "string") return TypeSpec::simple(K::String);
  fail(name, "unknown type " + n + "()");
}

TypeSpec primary(const std::vector<Token>& ts, std::size_t& pos) {
  const Token& t = ts[pos];
  if (t.keyword("fun")) fail(t, "function types are not supported in specs");
  if (t.kind == Tok::Atom) {
    ++pos;
    if (ts[pos].punct("(")) {
      ++pos;
      std::vector<TypeSpec> args;
      if (!ts[pos].punct(")")) {
        args.push_back(parse_type_tokens(ts, pos));
        while (ts[pos].punct(",")) {
          ++pos;
          args.push_back(parse_type_tokens(ts, pos));
        }
      }
      expect(ts, pos, ")");
      return named_type(t, std::move(args));
    }
    return TypeSpec::literal(t.text);
  }
  if (t.punct("[")) {
    ++pos;
    TypeSpec elem = parse_type_tokens(ts, pos);
    expect(ts, pos, "]");
    return TypeSpec::list_of(std::move(elem));
  }
  if (t.punct("{")) {
    ++pos;
    std::vector<TypeSpec> fields;
    if (!ts[pos].punct("}")) {
      fields.push_back(parse_type_tokens(ts, pos));
      while (ts[pos].punct(",")) {
        ++pos;
        fields.push_back(parse_type_tokens(ts, pos));
      }
    }
    expect(ts, pos, "}");
    return TypeSpec::tuple_of(std::move(fields));
  }
  fail(t, "expected a type");
}

}  // namespace

TypeSpec parse_type_tokens(const std::vector<Token>& tokens, std::size_t& pos) {
  std::vector<TypeSpec> alts;
  alts.push_back(primary(tokens, pos));
  while (tokens[pos].punct("|")) {
    ++pos;
    alts.push_back(primary(tokens, pos));
  }
  return TypeSpec::union_of(std::move(alts));
}

}  // namespace detail

TypeSpec TypeSpec::union_of(std::vector<TypeSpec> alternatives) {
  if (alternatives.size() == 1) return std::move(alternatives.front());
  return TypeSpec{Kind::Union, {}, std::move(alternatives)};
}

TypeSpec parse_typespec(std::string_view text) {
  auto tokens = detail::tokenize(text);
  std::size_t pos = 0;
  TypeSpec t = detail::parse_type_tokens(tokens, pos);
  if (tokens[pos].kind != Tok::End) {
    throw ParseError(tokens[pos].line, tokens[pos].column, "trailing input after type");
  }
  return t;
}

bool type_check(const Value& v, const TypeSpec& t) {
  using K = TypeSpec::Kind;
  switch (t.kind) {
    case K::Any: return true;
    case K::Integer: return v.is_int();
    case K::NonNegInteger: return v.is_int() && v.as_int() >= 0;
    case K::Float: return v.is_float();
    case K::Number: return v.is_number();
    case K::Boolean: return v.is_bool();
    // Booleans are the atoms true/false.
    case K::Atom: return v.is_atom() || v.is_bool();
    case K::LiteralAtom:
      if (v.is_bool()) return t.atom == (v.as_bool() ? "true" : "false");
      return v.is_atom(t.atom);
    case K::String: return v.is_str();
    case K::List: {
      if (!v.is_list()) return false;
      for (const auto& e : v.elements()) {
        if (!type_check(e, t.children.front())) return false;
      }
      return true;
    }
    case K::Tuple: {
      if (!v.is_tuple() || v.size() != t.children.size()) return false;
      auto items = v.elements();
      for (std::size_t i = 0; i < items.size(); ++i) {
        if (!type_check(items[i], t.children[i])) return false;
      }
      return true;
    }
    case K::Union:
      for (const auto& alt : t.children) {
        if (type_check(v, alt)) return true;
      }
      return false;
  }
  return false;
}

std::string to_string(const TypeSpec& t) {
  using K = TypeSpec::Kind;
  switch (t.kind) {
    case K::Any: return "any()";
    case K::Integer: return "integer()";
    case K::NonNegInteger: return "non_neg_integer()";
    case K::Float: return "float()";
    case K::Number: return "number()";
    case K::Boolean: return "boolean()";
    case K::Atom: return "atom()";
    case K::LiteralAtom: return format_atom(t.atom);
    case K::String: return "string()";
    case K::List: return "[" + to_string(t.children.front()) + "]";
    case K::Tuple: {
      std::string out = "{";
      for (std::size_t i = 0; i < t.children.size(); ++i) {
        if (i) out += ",";
        out += to_string(t.children[i]);
      }
      return out + "}";
    }
    case K::Union: {
      std::string out;
      for (std::size_t i = 0; i < t.children.size(); ++i) {
        if (i) out += " | ";
        out += to_string(t.children[i]);
      }
      return out;
    }
  }
  return "any()";
}

}  // namespace edbc
