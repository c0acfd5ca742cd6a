#include "edbc/runtime.hpp"

#include <iostream>

#include "interp.hpp"

namespace edbc {

Runtime::Runtime(RuntimeOptions opts) : opts_(std::move(opts)), interp_(std::make_unique<Interp>(*this)) {
  install_builtins(*interp_, *this);
  install_contract_builtins(*interp_, *this);
  install_server_builtins(*interp_, *this);
}

Runtime::~Runtime() { shutdown(); }

void Runtime::load(const ModuleAst& m, bool contracts_enabled) {
  check_contracts(m);
  load(instrument_module(m, contracts_enabled));
}

void Runtime::load(InstrumentedModule m) {
  std::string name = m.module;
  auto& slot = modules_[name] = std::move(m);
  auto& table = functions_[name];
  table.clear();
  for (const auto& f : slot.fundefs) table[key_of(f.name, f.arity)] = &f;
}

const InstrumentedModule* Runtime::find_module(const std::string& name) const {
  auto it = modules_.find(name);
  return it == modules_.end() ? nullptr : &it->second;
}

const FunDef* Runtime::find_function(const std::string& module, const std::string& name,
                                     std::size_t arity) const {
  auto m = functions_.find(module);
  if (m == functions_.end()) return nullptr;
  auto f = m->second.find(key_of(name, arity));
  return f == m->second.end() ? nullptr : f->second;
}

Value Runtime::call(const std::string& module, const std::string& name, std::vector<Value> args) {
  return run([&, args = std::move(args)](Process& p) { return call_function(p, module, name, args); });
}

Value Runtime::call_function(Process& p, const std::string& module, const std::string& name,
                             std::span<const Value> args) {
  return interp_->call_function(p, module, name, args);
}

Value Runtime::apply(Process& p, const Value& fun, std::span<const Value> args) {
  return interp_->apply(p, fun, args);
}

void Runtime::emit_output(const std::string& text) {
  std::lock_guard lk(log_mu_);
  output_ += text;
  if (opts_.echo_output) std::cout << text << std::flush;
}

void Runtime::emit_error(const std::string& text) {
  std::lock_guard lk(log_mu_);
  errors_ += text;
  if (opts_.echo_errors) std::cerr << text << std::flush;
}

std::string Runtime::output() const {
  std::lock_guard lk(log_mu_);
  return output_;
}

std::string Runtime::errors() const {
  std::lock_guard lk(log_mu_);
  return errors_;
}

}  // namespace edbc
