#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>

#include "edbc/runtime.hpp"

namespace edbc {

using Env = Bindings;

using BuiltinFn =
    std::function<Value(Process&, const std::string& module_ctx, std::span<const Value> args)>;

struct Builtin {
  std::string module;
  std::string name;
  std::size_t arity = 0;
  bool pure = true;
  BuiltinFn fn;

  std::string key() const { return module + ":" + name + "/" + std::to_string(arity); }
};

/// Tree-walking evaluator. Holds the builtin table; module code is looked
/// up through the runtime.
class Interp {
 public:
  explicit Interp(Runtime& rt);

  void add_builtin(Builtin b, bool auto_import);
  const Builtin* builtin(const std::string& module, const std::string& name, std::size_t arity) const;
  const Builtin* auto_imported(const std::string& name, std::size_t arity) const;

  Value call_function(Process& p, const std::string& module, const std::string& name,
                      std::span<const Value> args);
  Value apply(Process& p, const Value& fun, std::span<const Value> args);
  Value call_builtin(Process& p, const Builtin& b, const std::string& module_ctx,
                     std::span<const Value> args);

  Value eval(Process& p, const ExprRef& e, Env& env, const std::string& module);
  Value eval_body(Process& p, const std::vector<ExprRef>& body, Env& env, const std::string& module);
  bool match(const Pattern& pat, const Value& v, Env& env) const;

 private:
  bool guard_holds(Process& p, const std::optional<ExprRef>& guard, Env& env, const std::string& module);
  Value eval_binary(Process& p, const expr::Binary& b, Env& env, const std::string& module);
  Value call_clauses(Process& p, const std::vector<Clause>& clauses, const Env& base,
                     std::span<const Value> args, const std::string& module, bool shadow,
                     const std::function<std::string()>& describe);

  Runtime& rt_;
  std::map<std::string, Builtin> builtins_;
  std::map<std::string, std::string> auto_import_;  // name/arity -> module
};

void install_builtins(Interp& in, Runtime& rt);
void install_contract_builtins(Interp& in, Runtime& rt);
void install_server_builtins(Interp& in, Runtime& rt);

/// Erlang truthiness is strict: only the boolean true counts.
inline bool is_true(const Value& v) { return v.is_bool() && v.as_bool(); }

}  // namespace edbc
