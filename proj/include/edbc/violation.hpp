#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "edbc/typespec.hpp"
#include "edbc/value.hpp"

namespace edbc {

/// What put_info records for one logical call of a contracted function.
struct CallInfo {
  std::string module;
  std::string name;
  std::vector<Value> args;

  std::string describe() const;           // m:f(a, b)
  std::string describe_local() const;     // f(a, b)
};

enum class ViolationKind {
  Precondition,
  Postcondition,
  Decrease,
  ExpectedTime,
  Timeout,
  Purity,
  Invariant,
  SpecPre,
  SpecPost,
};

std::string to_string(ViolationKind k);

struct Violation {
  ViolationKind kind = ViolationKind::Precondition;
  std::string message;  // filled by format_violation
  CallInfo call;
  std::optional<std::string> user_reason;
  std::vector<CallInfo> stack;  // innermost last

  // decrease
  std::vector<Value> prev_args;
  std::vector<Value> next_args;
  // purity, e.g. "erlang:put/2"
  std::string impure_bif;
  // spec
  Value offending;
  std::string type_text;
  // expected_time / timeout
  double real_ms = 0;
  std::int64_t expected_ms = 0;
  // invariant: callback is init, handle_call or handle_cast
  std::string callback;
  Value request;
  Value prior_state;
  Value result;
};

/// Thrown when a contract check fails. Unwinds the raising process.
class ContractViolation : public std::runtime_error {
 public:
  explicit ContractViolation(Violation v);
  const Violation& violation() const { return v_; }

 private:
  Violation v_;
};

/// Erlang-style runtime error (function_clause, badarith, undef, ...).
class RuntimeError : public std::runtime_error {
 public:
  RuntimeError(std::string reason, const std::string& detail);
  const std::string& reason() const { return reason_; }

 private:
  std::string reason_;
};

}  // namespace edbc
