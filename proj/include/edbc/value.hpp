#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace edbc {

struct Expr;
template <class T>
class Ref;

/// Process identifier. Equality is identity of the numeric id.
struct Pid {
  std::uint64_t id = 0;
  auto operator<=>(const Pid&) const = default;
};

/// `fun Module:Name/Arity` value. An empty module never survives evaluation:
/// local references are resolved against the defining module.
struct FunRef {
  std::string module;
  std::string name;
  std::size_t arity = 0;
  bool operator==(const FunRef&) const = default;
};

class Value;
using Bindings = std::vector<std::pair<std::string, Value>>;

struct Closure;

/// Dynamic runtime term of the mini-language.
class Value {
 public:
  enum class Kind { Atom, Int, Float, Bool, Str, List, Tuple, Closure, FunRef, Pid };

  Value() : data_(AtomV{"undefined"}) {}

  static Value atom(std::string name) { return Value(AtomV{std::move(name)}); }
  static Value integer(std::int64_t v) { return Value(v); }
  static Value flt(double v) { return Value(v); }
  static Value boolean(bool v) { return Value(v); }
  static Value str(std::string s) { return Value(std::move(s)); }
  static Value list(std::vector<Value> items);
  static Value nil() { return list({}); }
  static Value tuple(std::vector<Value> items);
  static Value closure(std::shared_ptr<const Closure> c) { return Value(std::move(c)); }
  static Value fun_ref(FunRef f) { return Value(std::move(f)); }
  static Value pid(Pid p) { return Value(p); }

  /// Prepends `head` to the list `tail` (which must be a list).
  static Value cons(Value head, const Value& tail);

  Kind kind() const { return static_cast<Kind>(data_.index()); }
  bool is_atom() const { return kind() == Kind::Atom; }
  bool is_atom(std::string_view name) const { return is_atom() && as_atom() == name; }
  bool is_int() const { return kind() == Kind::Int; }
  bool is_float() const { return kind() == Kind::Float; }
  bool is_number() const { return is_int() || is_float(); }
  bool is_bool() const { return kind() == Kind::Bool; }
  bool is_str() const { return kind() == Kind::Str; }
  bool is_list() const { return kind() == Kind::List; }
  bool is_tuple() const { return kind() == Kind::Tuple; }
  bool is_closure() const { return kind() == Kind::Closure; }
  bool is_fun_ref() const { return kind() == Kind::FunRef; }
  bool is_function() const { return is_closure() || is_fun_ref(); }
  bool is_pid() const { return kind() == Kind::Pid; }

  const std::string& as_atom() const { return std::get<AtomV>(data_).name; }
  std::int64_t as_int() const { return std::get<std::int64_t>(data_); }
  double as_float() const { return std::get<double>(data_); }
  double as_double() const { return is_int() ? static_cast<double>(as_int()) : as_float(); }
  bool as_bool() const { return std::get<bool>(data_); }
  const std::string& as_str() const { return std::get<std::string>(data_); }
  const Closure& as_closure() const { return *std::get<std::shared_ptr<const Closure>>(data_); }
  const FunRef& as_fun_ref() const { return std::get<FunRef>(data_); }
  Pid as_pid() const { return std::get<Pid>(data_); }

  /// Elements of a list or tuple.
  std::span<const Value> elements() const;
  std::size_t size() const { return elements().size(); }
  bool empty_list() const { return is_list() && elements().empty(); }
  /// Tail of a non-empty list in O(1).
  Value tail() const;
  /// True for a tuple of the given arity whose first element is `tag`.
  bool is_tagged(std::string_view tag, std::size_t arity) const;

  /// Structural (exact) equality: 1 and 1.0 differ, pids by identity.
  friend bool operator==(const Value& a, const Value& b);

 private:
  struct AtomV {
    std::string name;
  };
  struct ListV {
    std::shared_ptr<const std::vector<Value>> items;
    std::size_t offset = 0;
  };
  struct TupleV {
    std::shared_ptr<const std::vector<Value>> items;
  };
  using Data = std::variant<AtomV, std::int64_t, double, bool, std::string, ListV, TupleV,
                            std::shared_ptr<const Closure>, FunRef, Pid>;

  template <class T>
  explicit Value(T v) : data_(std::move(v)) {}

  Data data_;
};

/// Anonymous function value: the literal's clauses plus captured bindings.
struct Closure {
  std::string module;
  std::shared_ptr<const Expr> fun;  // always an expr::FunLit node
  Bindings captured;
  std::uint64_t id = 0;
};

/// Erlang term order: number < atom < fun < pid < tuple < list < string.
std::strong_ordering compare(const Value& a, const Value& b);
/// `==` semantics: numbers compare by value across int/float.
bool equal_numeric(const Value& a, const Value& b);

/// Erlang-style rendering: atoms bare, tuples `{a,b}`, lists `[1,2]`.
std::string to_string(const Value& v);
/// Renders an argument list as `a, b, c` (used in call descriptions).
std::string args_to_string(std::span<const Value> args);
std::string format_atom(std::string_view name);
std::string format_float(double d);

}  // namespace edbc
