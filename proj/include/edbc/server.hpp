#pragma once

#include <deque>
#include <functional>
#include <string>

#include "edbc/runtime.hpp"

namespace edbc {

/// Behaviour callbacks of a guarded server. cpre and invariant are optional.
struct ServerCallbacks {
  std::string module = "server";
  std::function<Value(Process&)> init;
  /// (request, from, state) -> {reply, R, S} | {noreply, S}
  std::function<Value(Process&, const Value&, const Value&, const Value&)> handle_call;
  /// (request, state) -> {noreply, S}
  std::function<Value(Process&, const Value&, const Value&)> handle_cast;
  /// (request, from, state) -> {Boolean, S}
  std::function<Value(Process&, const Value&, const Value&, const Value&)> cpre;
  /// state -> Boolean | {Boolean, Reason}. Only for natively supplied
  /// callbacks; module invariants are compiled into the callbacks.
  std::function<Value(Process&, const Value&)> invariant;
  /// Sees every state the server adopts, on the server's thread.
  std::function<void(const Value&)> on_state;
};

/// Callbacks that call init/0 (or init/1 with []), handle_call/3,
/// handle_cast/2 and, if defined, cpre/3 of a loaded module.
ServerCallbacks callbacks_from_module(Runtime& rt, const std::string& module);

struct RequestEnvelope {
  enum class Origin { Mailbox, QueueCurrent };
  Value request;
  Value from;  // {Pid, Tag}
  Origin origin = Origin::Mailbox;
};

/// Deferred requests of the fair policy.
struct ServerQueues {
  std::deque<RequestEnvelope> current;
  std::deque<RequestEnvelope> old;
  std::deque<RequestEnvelope> fresh;  // "new"

  void defer(RequestEnvelope env);
  /// current := old ++ current ++ new
  void rebuild();
};

/// Starts a server process and waits for init. A failing init (including
/// an invariant violation) is rethrown in the caller.
Pid server_start(Runtime& rt, Process& caller, ServerCallbacks cb, ServerPolicy policy);
Value server_call(Runtime& rt, Process& caller, Pid server, const Value& request);
void server_cast(Runtime& rt, Pid server, const Value& request);

/// Evaluates the native invariant on `new_state` and raises an invariant
/// violation describing the callback that produced `result`.
void check_invariant(const ServerCallbacks& cb, Process& p, const std::string& callback,
                     const Value& request, const Value& prior_state, const Value& result,
                     const Value& new_state);

}  // namespace edbc
