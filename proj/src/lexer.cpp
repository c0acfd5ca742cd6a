#include "lexer.hpp"

#include <cctype>
#include <charconv>

#include "edbc/parser.hpp"

namespace edbc::detail {

namespace {

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '@';
}

// Longest first.
constexpr std::string_view kPuncts[] = {
    "=:=", "=/=", "||", "->", "<-", "==", "/=", "=<", ">=", "++", "(", ")", "[", "]",
    "{",   "}",   ",",  ";",  ".",  ":",  "|",  "=",  "<",  ">",  "+",  "-", "*", "/", "!", "#",
};

}  // namespace

bool is_reserved_word(std::string_view s) {
  static constexpr std::string_view kWords[] = {
      "after", "and", "andalso", "begin", "case", "catch", "div", "end", "fun", "if",
      "not",   "of",  "or",      "orelse", "receive", "rem", "try", "when", "xor"};
  for (auto w : kWords) {
    if (w == s) return true;
  }
  return false;
}

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  int line = 1;
  int col = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  auto escape = [&](char c) -> char {
    switch (c) {
      case 'n': return '\n';
      case 't': return '\t';
      case 'r': return '\r';
      case 's': return ' ';
      default: return c;
    }
  };

  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '%') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.column = col;
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      bool is_float = false;
      if (j + 1 < src.size() && src[j] == '.' && std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
        is_float = true;
        ++j;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
        if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
          std::size_t k = j + 1;
          if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
          if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
            j = k;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
          }
        }
      }
      t.text = std::string(src.substr(i, j - i));
      if (is_float) {
        t.kind = Tok::Float;
        t.float_value = std::stod(t.text);
      } else {
        t.kind = Tok::Int;
        auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.int_value);
        if (res.ec != std::errc()) throw ParseError(line, col, "integer literal out of range");
      }
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      t.text = std::string(src.substr(i, j - i));
      t.kind = (std::isupper(static_cast<unsigned char>(c)) || c == '_') ? Tok::Var : Tok::Atom;
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }
    if (c == '\'' || c == '"') {
      char q = c;
      advance(1);
      std::string text;
      while (true) {
        if (i >= src.size()) throw ParseError(t.line, t.column, "unterminated literal");
        char d = src[i];
        if (d == q) {
          advance(1);
          break;
        }
        if (d == '\\' && i + 1 < src.size()) {
          text += escape(src[i + 1]);
          advance(2);
          continue;
        }
        text += d;
        advance(1);
      }
      t.text = std::move(text);
      t.kind = q == '"' ? Tok::String : Tok::Atom;
      t.quoted = q == '\'';
      out.push_back(std::move(t));
      continue;
    }
    if (c == '?') {
      std::size_t j = i + 1;
      while (j < src.size() && ident_char(src[j])) ++j;
      if (j == i + 1) throw ParseError(line, col, "expected macro name after '?'");
      t.kind = Tok::Macro;
      t.text = std::string(src.substr(i + 1, j - i - 1));
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }
    bool matched = false;
    for (auto p : kPuncts) {
      if (src.substr(i, p.size()) == p) {
        t.kind = Tok::Punct;
        t.text = std::string(p);
        advance(p.size());
        out.push_back(std::move(t));
        matched = true;
        break;
      }
    }
    if (!matched) {
      throw ParseError(line, col, std::string("unexpected character '") + c + "'");
    }
  }
  Token end;
  end.kind = Tok::End;
  end.line = line;
  end.column = col;
  out.push_back(end);
  return out;
}

}  // namespace edbc::detail
