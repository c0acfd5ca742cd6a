#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "edbc/ast.hpp"

namespace edbc {

/// Load-time rejection of a contract combination (e.g. ?PURE with ?TIMEOUT).
class InstrumentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A contract after lowering. Pre and Post carry the body of the condition
/// function, still mentioning ?P(i) and ?R; `tag` selects the runtime
/// behaviour: "" (plain), "spec", "expected_time", "timeout", "pure",
/// "invariant".
struct LoweredContract {
  enum class Kind { Pre, Post, Decreases };
  Kind kind = Kind::Pre;
  std::string tag;
  std::vector<ExprRef> body;
  contract::Decreases decreases;
};

/// Hands out `<base>__edbc<k>` names that are not yet defined in the module.
class FreshNamer {
 public:
  explicit FreshNamer(const ModuleAst& m);
  std::string get_free_name(const std::string& base);

 private:
  std::set<std::string> used_;
  std::map<std::string, int> next_;
};

enum class FunRole { Plain, Entry, PreWrapper, PostWrapper, Original, DecreaseChecker };

std::string to_string(FunRole r);

struct InstrumentedModule {
  std::string module;
  std::vector<FunDef> fundefs;
  std::map<std::string, std::string> entry_points;  // original name/arity -> entry name
  std::map<std::string, FunRole> roles;             // name/arity -> role

  FunRole role_of(const std::string& name, std::size_t arity) const;
  ModuleAst as_module() const;
};

/// The contracts of `f` in source order, with a Spec lowered first into a
/// (Pre, Post) pair and time/purity contracts lowered to Pre form. Named
/// contract functions (`fun pre/0`) are inlined from `m`.
/// Throws InstrumentError on ?PURE together with a time contract, or on a
/// second decreasing contract.
std::vector<LoweredContract> read_contracts(const FunDef& f, const ModuleAst& m);

/// Runs read_contracts over every function (and the invariant lowering) so
/// rejections happen even when instrumentation is disabled.
void check_contracts(const ModuleAst& m);

struct InstrumentState {
  explicit InstrumentState(const ModuleAst& m) : namer(m) {}
  FreshNamer namer;
  std::string prefix;  // fresh variable prefix, "FV" unless taken
  std::vector<FunDef> helpers;   // entry, then wrappers outermost first
  std::vector<FunDef> checkers;
  std::map<std::string, FunRole> roles;
};

/// Entry keeps f's name: `f(FV1..) -> edbc_put_info(f, [FV1..]), f'(FV1..)`.
/// Returns the renamed original; the entry goes to st.helpers.
FunDef inst_put_info(const FunDef& f, InstrumentState& st);
/// Emits the checker and rewrites recursive calls to `original_name`.
FunDef inst_decr(const contract::Decreases& c, const FunDef& f, const std::string& original_name,
                 std::size_t arity, InstrumentState& st);
/// Wrapper keeps f's current name; returns f renamed fresh.
FunDef inst_pre(const LoweredContract& c, const FunDef& f, const std::string& base, InstrumentState& st);
FunDef inst_post(const LoweredContract& c, const FunDef& f, const std::string& base,
                 InstrumentState& st);

/// Whole-module transformation. With enabled=false all contracts and the
/// invariant are dropped and nothing else changes.
InstrumentedModule instrument_module(const ModuleAst& m, bool enabled = true);

}  // namespace edbc
