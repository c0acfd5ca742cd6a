#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace edbc::detail {

enum class Tok {
  Atom,     // lowercase identifier or quoted atom; keywords included
  Var,      // Uppercase or _-prefixed identifier
  Int,
  Float,
  String,
  Macro,    // ?NAME, text holds NAME
  Punct,
  End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  bool quoted = false;  // quoted atoms are never keywords
  std::int64_t int_value = 0;
  double float_value = 0;
  int line = 1;
  int column = 1;

  bool is(Tok k, std::string_view t) const { return kind == k && text == t; }
  bool punct(std::string_view t) const { return kind == Tok::Punct && text == t; }
  bool keyword(std::string_view t) const { return kind == Tok::Atom && !quoted && text == t; }
};

/// Splits source into tokens; `%` starts a comment to end of line.
/// Throws ParseError on malformed input.
std::vector<Token> tokenize(std::string_view src);

bool is_reserved_word(std::string_view s);

}  // namespace edbc::detail

#include "edbc/typespec.hpp"

namespace edbc::detail {

/// Parses a type starting at tokens[pos]; advances pos past it.
TypeSpec parse_type_tokens(const std::vector<Token>& tokens, std::size_t& pos);

}  // namespace edbc::detail
