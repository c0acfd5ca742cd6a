#include "edbc/report.hpp"

#include <cstdio>

namespace edbc {

std::string CallInfo::describe() const { return format_atom(module) + ":" + describe_local(); }

std::string CallInfo::describe_local() const {
  return format_atom(name) + "(" + args_to_string(args) + ")";
}

std::string to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::Precondition: return "precondition";
    case ViolationKind::Postcondition: return "postcondition";
    case ViolationKind::Decrease: return "decrease";
    case ViolationKind::ExpectedTime: return "expected_time";
    case ViolationKind::Timeout: return "timeout";
    case ViolationKind::Purity: return "purity";
    case ViolationKind::Invariant: return "invariant";
    case ViolationKind::SpecPre: return "spec_pre";
    case ViolationKind::SpecPost: return "spec_post";
  }
  return "unknown";
}

ContractViolation::ContractViolation(Violation v) : std::runtime_error(v.message), v_(std::move(v)) {}

RuntimeError::RuntimeError(std::string reason, const std::string& detail)
    : std::runtime_error(detail.empty() ? reason : reason + ": " + detail), reason_(std::move(reason)) {}

namespace {

std::string ms(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string callback_result(const Value& r) {
  if (r.is_tagged("reply", 3)) {
    auto e = r.elements();
    return "{reply, " + to_string(e[1]) + "," + to_string(e[2]) + "}";
  }
  if (r.is_tagged("noreply", 2)) return "{noreply, " + to_string(r.elements()[1]) + "}";
  return to_string(r);
}

std::string invariant_call(const Violation& v) {
  std::string m = format_atom(v.call.module) + ":";
  if (v.callback == "handle_call") {
    return m + "handle_call(" + to_string(v.request) + ", ..., " + to_string(v.prior_state) + ")";
  }
  if (v.callback == "handle_cast") {
    return m + "handle_cast(" + to_string(v.request) + ", " + to_string(v.prior_state) + ")";
  }
  return v.call.describe();
}

}  // namespace

std::string format_violation(const Violation& v) {
  std::string reason = v.user_reason ? " Reason: " + *v.user_reason : "";
  switch (v.kind) {
    case ViolationKind::Precondition:
    case ViolationKind::Postcondition:
      return "The " + to_string(v.kind) + " does not hold. Last call: " + v.call.describe() + "." +
             reason;
    case ViolationKind::Decrease:
      return "Decreasing condition does not hold. Previous call: " + format_atom(v.call.name) + "(" +
             args_to_string(v.prev_args) + "). Current call: " + format_atom(v.call.name) + "(" +
             args_to_string(v.next_args) + ").";
    case ViolationKind::Purity:
      return "The function is not pure. Last call: " + v.call.describe() +
             ". It has call the impure BIF " + v.impure_bif + " when evaluating " +
             v.call.describe_local() + ".";
    case ViolationKind::SpecPre:
    case ViolationKind::SpecPost:
      return std::string("The spec ") + (v.kind == ViolationKind::SpecPre ? "pre" : "post") +
             "condition does not hold. Last call: " + v.call.describe() + ". The value " +
             to_string(v.offending) + " is not of type " + v.type_text + ".";
    case ViolationKind::ExpectedTime:
      return "The execution of " + v.call.describe() + " took too much time. Real: " +
             ms(v.real_ms) + " ms. Expected: " + std::to_string(v.expected_ms) +
             " ms. Difference: " + ms(v.real_ms - static_cast<double>(v.expected_ms)) + " ms)";
    case ViolationKind::Timeout:
      return "The execution of " + v.call.describe() + " reached the timeout. Timeout: " +
             std::to_string(v.expected_ms) + " ms.";
    case ViolationKind::Invariant: {
      std::string out = "The invariant does not hold.\nLast call: " + invariant_call(v) +
                        ".\nResult: " + callback_result(v.result);
      if (v.user_reason) out += "\nReason: " + *v.user_reason;
      return out;
    }
  }
  return "Contract violation.";
}

ContractViolation make_violation(Violation v) {
  v.message = format_violation(v);
  return ContractViolation(std::move(v));
}

std::string format_server_termination(const std::string& module, const Value& last_message,
                                      const Value& state, const std::string& reason) {
  return "=ERROR REPORT====\n** Generic server " + format_atom(module) +
         " terminating\n** Last message in was " + to_string(last_message) +
         "\n** When Server state == " + to_string(state) + "\n** Reason for termination == \n** " +
         reason + "\n";
}

}  // namespace edbc
