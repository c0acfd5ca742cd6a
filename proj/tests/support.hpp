#pragma once

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include "edbc/parser.hpp"
#include "edbc/program.hpp"
#include "edbc/report.hpp"
#include "edbc/runtime.hpp"

namespace test {

inline std::string program_path(const std::string& name) {
  return std::string(EDBC_PROGRAMS_DIR) + "/" + name;
}

inline edbc::ModuleAst parse_program(const std::string& name) {
  return edbc::load_source(edbc::read_file(program_path(name)));
}

inline edbc::Value ints(std::initializer_list<std::int64_t> xs) {
  std::vector<edbc::Value> out;
  for (auto x : xs) out.push_back(edbc::Value::integer(x));
  return edbc::Value::list(std::move(out));
}

inline edbc::Value atoms(std::initializer_list<const char*> xs) {
  std::vector<edbc::Value> out;
  for (auto x : xs) out.push_back(edbc::Value::atom(x));
  return edbc::Value::list(std::move(out));
}

/// Result of one call: a value, a violation or a runtime error.
struct Outcome {
  std::optional<edbc::Value> value;
  std::optional<edbc::Violation> violation;
  std::optional<std::string> error;  // RuntimeError reason
  std::string error_text;
};

inline Outcome call(edbc::Runtime& rt, const std::string& module, const std::string& fn,
                    std::vector<edbc::Value> args) {
  Outcome o;
  try {
    o.value = rt.call(module, fn, std::move(args));
  } catch (const edbc::ContractViolation& v) {
    o.violation = v.violation();
  } catch (const edbc::RuntimeError& e) {
    o.error = e.reason();
    o.error_text = e.what();
  }
  return o;
}

/// Module source given inline, loaded into a fresh runtime.
struct Loaded {
  explicit Loaded(const std::string& source, bool enabled = true, edbc::RuntimeOptions opts = {})
      : rt(std::move(opts)) {
    auto m = edbc::load_source(source);
    name = m.name;
    rt.load(m, enabled);
  }
  Outcome operator()(const std::string& fn, std::vector<edbc::Value> args = {}) {
    return call(rt, name, fn, std::move(args));
  }
  edbc::Runtime rt;
  std::string name;
};

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Runs the edbc executable with a shell-quoted argument string.
inline CliResult run_cli(const std::string& args, const std::string& env = "") {
  static int counter = 0;
  auto dir = std::filesystem::temp_directory_path() /
             ("edbc_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  std::filesystem::create_directories(dir);
  std::string cmd = env + " '" + std::string(EDBC_CLI_PATH) + "' " + args + " >'" +
                    (dir / "out").string() + "' 2>'" + (dir / "err").string() + "'";
  int status = std::system(cmd.c_str());
  CliResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(dir / "out");
  r.err = slurp(dir / "err");
  std::filesystem::remove_all(dir);
  return r;
}

inline bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

}  // namespace test
