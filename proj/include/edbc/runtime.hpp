#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <exception>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "edbc/ast.hpp"
#include "edbc/instrumenter.hpp"
#include "edbc/violation.hpp"

namespace edbc {

class Runtime;
class Interp;

enum class ServerPolicy { Fair, Resend };

struct RuntimeOptions {
  /// Extra milliseconds an ?EXPECTED_TIME call may take before it counts as
  /// a violation.
  double time_slack_ms = 0;
  ServerPolicy default_policy = ServerPolicy::Fair;
  /// Nested user-function calls allowed per process before a RuntimeError.
  int max_depth = 20000;
  /// io:format output and server reports are always logged; these also
  /// echo them to stdout / stderr.
  bool echo_output = false;
  bool echo_errors = false;
  /// Seed of rand:uniform/1.
  std::uint64_t seed = 1;
  /// Invoked on every user-function call with (module, name, arity).
  std::function<void(const std::string&, const std::string&, std::size_t)> call_tracer;
};

/// Thrown inside a process that was killed (shutdown or timeout abort).
class ProcessExit : public std::exception {
 public:
  const char* what() const noexcept override { return "process killed"; }
};

/// One lightweight process: an OS thread with a FIFO mailbox.
/// Fields below the mailbox API belong to the process' own thread.
class Process {
 public:
  Process(Runtime& rt, Pid pid) : rt_(rt), pid_(pid) {}

  Pid pid() const { return pid_; }
  Runtime& runtime() { return rt_; }

  /// Oldest message; blocks while the mailbox is empty.
  Value receive();
  /// Oldest message satisfying `pred`; others stay queued in order.
  Value receive_match(const std::function<bool(const Value&)>& pred);
  /// Blocks until a message arrives that was not re-queued by the process
  /// itself after `seen` external arrivals.
  void wait_external_arrival(std::uint64_t seen);
  std::uint64_t external_arrivals() const;
  /// Appends to the own mailbox without counting as an external arrival.
  void requeue(Value msg);
  std::size_t mailbox_size() const;

  void sleep_ms(std::int64_t ms);
  bool killed() const { return killed_.load(std::memory_order_relaxed); }
  void check_alive() const {
    if (killed()) throw ProcessExit();
  }

  std::vector<CallInfo> call_stack;
  int depth = 0;
  // Purity tracing: active while trace_depth > 0 and trace_suspend == 0.
  int trace_depth = 0;
  int trace_suspend = 0;
  std::vector<std::string> trace_log;
  /// Set while a cpre callback runs: sends and receives are errors.
  bool effects_forbidden = false;
  std::vector<std::pair<Value, Value>> dictionary;

  void record_effect(const std::string& what) {
    if (trace_depth > 0 && trace_suspend == 0) trace_log.push_back(what);
  }

 private:
  friend class Runtime;

  Runtime& rt_;
  Pid pid_;
  std::deque<Value> mailbox_;
  std::uint64_t external_ = 0;
  bool blocked_ = false;
  bool finished_ = false;
  std::atomic<bool> killed_{false};
  std::condition_variable cv_;
  std::vector<Pid> watchers_;
  std::optional<Value> result_;
  std::exception_ptr error_;
};

/// Loaded modules plus the set of running processes.
class Runtime {
 public:
  explicit Runtime(RuntimeOptions opts = {});
  ~Runtime();
  Runtime(const Runtime&) = delete;
  Runtime& operator=(const Runtime&) = delete;

  /// Instruments (or strips, when disabled) and installs a module. Modules
  /// must be loaded before processes that use them are started.
  void load(const ModuleAst& m, bool contracts_enabled = true);
  void load(InstrumentedModule m);
  const InstrumentedModule* find_module(const std::string& name) const;
  const FunDef* find_function(const std::string& module, const std::string& name,
                              std::size_t arity) const;

  Pid spawn(std::function<Value(Process&)> body);
  /// Waits for the process to finish; returns its value or rethrows.
  Value join(Pid pid);
  /// Like join, but gives up after `ms`. Returns nullopt on expiry and
  /// throws ProcessExit if `waiter` is killed meanwhile.
  std::optional<Value> join_for(Pid pid, const Process& waiter, double ms);
  Value run(std::function<Value(Process&)> body) { return join(spawn(std::move(body))); }
  /// Evaluates module:name(args) on a fresh root process.
  Value call(const std::string& module, const std::string& name, std::vector<Value> args);

  void send(Pid to, Value msg);
  bool alive(Pid pid) const;
  /// Registers `watcher` to get {'$edbc_down', Pid} when `target` ends.
  /// Returns false if the target is already gone.
  bool watch(Pid target, Pid watcher);
  /// The exception a finished process ended with, if any.
  std::exception_ptr exit_reason(Pid pid) const;
  void kill(Pid pid);
  /// Blocks until every process is finished or waiting for a message.
  void quiesce();
  void shutdown();

  Value call_function(Process& p, const std::string& module, const std::string& name,
                      std::span<const Value> args);
  Value apply(Process& p, const Value& fun, std::span<const Value> args);

  const RuntimeOptions& options() const { return opts_; }
  void emit_output(const std::string& text);
  void emit_error(const std::string& text);
  std::string output() const;
  std::string errors() const;
  std::uint64_t next_tag() { return tag_.fetch_add(1) + 1; }
  std::uint64_t next_closure_id() { return closure_id_.fetch_add(1) + 1; }
  Interp& interp() { return *interp_; }

 private:
  friend class Process;

  std::shared_ptr<Process> get(Pid pid) const;
  void finish(Process& p);

  RuntimeOptions opts_;
  std::unique_ptr<Interp> interp_;
  std::map<std::string, InstrumentedModule> modules_;
  std::map<std::string, std::map<std::string, const FunDef*>> functions_;

  mutable std::mutex mu_;
  std::condition_variable state_cv_;
  std::map<std::uint64_t, std::shared_ptr<Process>> procs_;
  std::vector<unsigned long> threads_;
  std::uint64_t next_pid_ = 1;
  int active_ = 0;
  bool shutting_down_ = false;

  mutable std::mutex log_mu_;
  std::string output_;
  std::string errors_;
  std::atomic<std::uint64_t> tag_{0};
  std::atomic<std::uint64_t> closure_id_{0};
};

}  // namespace edbc
