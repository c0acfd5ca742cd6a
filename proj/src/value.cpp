#include "edbc/value.hpp"

#include <charconv>
#include <stdexcept>

namespace edbc {

namespace {

const std::vector<Value>& empty_items() {
  static const std::vector<Value> empty;
  return empty;
}

int kind_rank(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::Int:
    case Value::Kind::Float:
      return 0;
    case Value::Kind::Atom:
    case Value::Kind::Bool:
      return 1;
    case Value::Kind::Closure:
    case Value::Kind::FunRef:
      return 2;
    case Value::Kind::Pid:
      return 3;
    case Value::Kind::Tuple:
      return 4;
    case Value::Kind::List:
      return 5;
    case Value::Kind::Str:
      return 6;
  }
  return 7;
}

std::string atom_text(const Value& v) {
  if (v.is_bool()) return v.as_bool() ? "true" : "false";
  return v.as_atom();
}

bool is_keyword(std::string_view s) {
  static constexpr std::string_view kKeywords[] = {
      "after", "and",  "andalso", "band", "begin", "bnot",    "bor",  "bsl",     "bsr", "bxor",
      "case",  "catch", "cond",   "div",  "end",   "fun",     "if",   "let",     "not", "of",
      "or",    "orelse", "receive", "rem", "try",  "when",    "xor"};
  for (auto k : kKeywords) {
    if (k == s) return true;
  }
  return false;
}

std::string quote_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += '"';
  return out;
}

void render(const Value& v, std::string& out);

void render_seq(std::span<const Value> items, std::string& out) {
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ',';
    render(items[i], out);
  }
}

void render(const Value& v, std::string& out) {
  switch (v.kind()) {
    case Value::Kind::Atom: out += format_atom(v.as_atom()); break;
    case Value::Kind::Int: out += std::to_string(v.as_int()); break;
    case Value::Kind::Float: out += format_float(v.as_float()); break;
    case Value::Kind::Bool: out += v.as_bool() ? "true" : "false"; break;
    case Value::Kind::Str: out += quote_string(v.as_str()); break;
    case Value::Kind::List:
      out += '[';
      render_seq(v.elements(), out);
      out += ']';
      break;
    case Value::Kind::Tuple:
      out += '{';
      render_seq(v.elements(), out);
      out += '}';
      break;
    case Value::Kind::Closure: {
      const auto& c = v.as_closure();
      out += "#Fun<" + c.module + "." + std::to_string(c.id) + ">";
      break;
    }
    case Value::Kind::FunRef: {
      const auto& f = v.as_fun_ref();
      out += "fun ";
      if (!f.module.empty()) out += format_atom(f.module) + ":";
      out += format_atom(f.name) + "/" + std::to_string(f.arity);
      break;
    }
    case Value::Kind::Pid:
      out += "<0." + std::to_string(v.as_pid().id) + ".0>";
      break;
  }
}

}  // namespace

Value Value::list(std::vector<Value> items) {
  return Value(ListV{std::make_shared<const std::vector<Value>>(std::move(items)), 0});
}

Value Value::tuple(std::vector<Value> items) {
  return Value(TupleV{std::make_shared<const std::vector<Value>>(std::move(items))});
}

Value Value::cons(Value head, const Value& tail) {
  auto rest = tail.elements();
  std::vector<Value> items;
  items.reserve(rest.size() + 1);
  items.push_back(std::move(head));
  items.insert(items.end(), rest.begin(), rest.end());
  return list(std::move(items));
}

std::span<const Value> Value::elements() const {
  if (const auto* l = std::get_if<ListV>(&data_)) {
    const auto& items = l->items ? *l->items : empty_items();
    return std::span<const Value>(items).subspan(l->offset);
  }
  if (const auto* t = std::get_if<TupleV>(&data_)) {
    return std::span<const Value>(t->items ? *t->items : empty_items());
  }
  throw std::logic_error("elements() on a non-sequence value");
}

Value Value::tail() const {
  const auto& l = std::get<ListV>(data_);
  if (elements().empty()) throw std::logic_error("tail of empty list");
  return Value(ListV{l.items, l.offset + 1});
}

bool Value::is_tagged(std::string_view tag, std::size_t arity) const {
  if (!is_tuple()) return false;
  auto items = elements();
  return items.size() == arity && arity > 0 && items[0].is_atom(tag);
}

bool operator==(const Value& a, const Value& b) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Value::Kind::Atom: return a.as_atom() == b.as_atom();
    case Value::Kind::Int: return a.as_int() == b.as_int();
    case Value::Kind::Float: return a.as_float() == b.as_float();
    case Value::Kind::Bool: return a.as_bool() == b.as_bool();
    case Value::Kind::Str: return a.as_str() == b.as_str();
    case Value::Kind::List:
    case Value::Kind::Tuple: {
      auto x = a.elements();
      auto y = b.elements();
      if (x.size() != y.size()) return false;
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] == y[i])) return false;
      }
      return true;
    }
    case Value::Kind::Closure: {
      const auto& x = a.as_closure();
      const auto& y = b.as_closure();
      return x.fun == y.fun && x.module == y.module && x.captured == y.captured;
    }
    case Value::Kind::FunRef: return a.as_fun_ref() == b.as_fun_ref();
    case Value::Kind::Pid: return a.as_pid() == b.as_pid();
  }
  return false;
}

std::strong_ordering compare(const Value& a, const Value& b) {
  int ra = kind_rank(a);
  int rb = kind_rank(b);
  if (ra != rb) return ra <=> rb;
  switch (ra) {
    case 0: {
      if (a.is_int() && b.is_int()) return a.as_int() <=> b.as_int();
      double x = a.as_double();
      double y = b.as_double();
      if (x < y) return std::strong_ordering::less;
      if (x > y) return std::strong_ordering::greater;
      // 1 and 1.0 are equal numerically but distinct terms; ints sort first.
      return a.is_int() == b.is_int() ? std::strong_ordering::equal
                                      : (a.is_int() ? std::strong_ordering::less
                                                    : std::strong_ordering::greater);
    }
    case 1: return atom_text(a) <=> atom_text(b);
    case 2: {
      std::string x = to_string(a);
      std::string y = to_string(b);
      return x <=> y;
    }
    case 3: return a.as_pid() <=> b.as_pid();
    case 4:
    case 5: {
      auto x = a.elements();
      auto y = b.elements();
      if (ra == 4 && x.size() != y.size()) return x.size() <=> y.size();
      std::size_t n = std::min(x.size(), y.size());
      for (std::size_t i = 0; i < n; ++i) {
        auto c = compare(x[i], y[i]);
        if (c != std::strong_ordering::equal) return c;
      }
      return x.size() <=> y.size();
    }
    default: return a.as_str() <=> b.as_str();
  }
}

bool equal_numeric(const Value& a, const Value& b) {
  if (a.is_number() && b.is_number()) return a.as_double() == b.as_double();
  if ((a.is_list() && b.is_list()) || (a.is_tuple() && b.is_tuple())) {
    auto x = a.elements();
    auto y = b.elements();
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!equal_numeric(x[i], y[i])) return false;
    }
    return true;
  }
  return a == b;
}

std::string format_atom(std::string_view name) {
  bool plain = !name.empty() && name[0] >= 'a' && name[0] <= 'z' && !is_keyword(name);
  for (char c : name) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
              c == '_' || c == '@';
    if (!ok) plain = false;
  }
  if (plain) return std::string(name);
  std::string out = "'";
  for (char c : name) {
    if (c == '\'' || c == '\\') out += '\\';
    out += c;
  }
  out += '\'';
  return out;
}

std::string format_float(double d) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, d);
  std::string s(buf, res.ptr);
  auto e = s.find('e');
  std::string mantissa = e == std::string::npos ? s : s.substr(0, e);
  std::string exponent = e == std::string::npos ? "" : s.substr(e + 1);
  if (mantissa.find('.') == std::string::npos && mantissa.find("inf") == std::string::npos &&
      mantissa.find("nan") == std::string::npos) {
    mantissa += ".0";
  }
  if (!exponent.empty() && exponent[0] == '+') exponent.erase(0, 1);
  return exponent.empty() ? mantissa : mantissa + "e" + exponent;
}

std::string to_string(const Value& v) {
  std::string out;
  render(v, out);
  return out;
}

std::string args_to_string(std::span<const Value> args) {
  std::string out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out += ", ";
    render(args[i], out);
  }
  return out;
}

}  // namespace edbc
