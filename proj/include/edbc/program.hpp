#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "edbc/runtime.hpp"

namespace edbc {

/// A source file could not be read or an output file could not be written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

/// Parses and validates one module, including the load-time contract checks
/// that apply even when instrumentation is off.
ModuleAst load_source(const std::string& text);

/// Reads, parses and installs every file. Returns the parsed modules in
/// argument order.
std::vector<ModuleAst> load_files(Runtime& rt, const std::vector<std::string>& paths,
                                  bool contracts_enabled);

/// Evaluates comma-separated literal terms (e.g. `10, [1,2], {a,b}`) on
/// process `p`. Throws ParseError on bad syntax or non-literal terms.
std::vector<Value> eval_terms(Runtime& rt, Process& p, const std::string& text);

}  // namespace edbc
