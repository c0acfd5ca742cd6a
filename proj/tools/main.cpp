#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "edbc/parser.hpp"
#include "edbc/printer.hpp"
#include "edbc/program.hpp"
#include "edbc/report.hpp"

namespace {

enum Exit { kOk = 0, kViolation = 1, kRuntime = 2, kLoad = 3, kIo = 4 };

struct EntrySpec {
  std::string module;
  std::string name;
  std::size_t arity = 0;
};

EntrySpec parse_entry(const std::string& text, const std::string& default_module) {
  EntrySpec e;
  auto slash = text.rfind('/');
  if (slash == std::string::npos) throw edbc::ParseError("--entry must look like [mod:]name/arity");
  std::string head = text.substr(0, slash);
  auto colon = head.find(':');
  e.module = colon == std::string::npos ? default_module : head.substr(0, colon);
  e.name = colon == std::string::npos ? head : head.substr(colon + 1);
  try {
    std::size_t used = 0;
    e.arity = std::stoul(text.substr(slash + 1), &used);
    if (used != text.size() - slash - 1) throw std::invalid_argument("arity");
  } catch (const std::exception&) {
    throw edbc::ParseError("bad arity in --entry " + text);
  }
  return e;
}

struct RunArgs {
  std::vector<std::string> files;
  std::string entry;
  std::string args;
  bool no_contracts = false;
  std::string policy = "fair";
  double slack = 20;
  std::uint64_t seed = 1;
};

int cmd_run(const RunArgs& a) {
  edbc::RuntimeOptions opts;
  opts.time_slack_ms = a.slack;
  opts.default_policy = a.policy == "resend" ? edbc::ServerPolicy::Resend : edbc::ServerPolicy::Fair;
  opts.seed = a.seed;
  opts.echo_output = true;
  opts.echo_errors = true;
  edbc::Runtime rt(opts);

  const char* env = std::getenv("EDBC_NO_CONTRACTS");
  bool enabled = !a.no_contracts && !(env && std::string(env) == "1");
  EntrySpec entry;
  try {
    auto modules = edbc::load_files(rt, a.files, enabled);
    entry = parse_entry(a.entry, modules.front().name);
    if (!rt.find_function(entry.module, entry.name, entry.arity)) {
      throw edbc::ParseError("entry " + entry.module + ":" + entry.name + "/" +
                             std::to_string(entry.arity) + " is not defined");
    }
  } catch (const edbc::IoError& e) {
    std::cerr << "edbc: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "edbc: " << e.what() << "\n";
    return kLoad;
  }

  int code = kOk;
  try {
    edbc::Pid root = rt.spawn([&](edbc::Process& p) {
      std::vector<edbc::Value> args;
      try {
        args = edbc::eval_terms(rt, p, a.args);
      } catch (const edbc::ParseError& e) {
        throw std::invalid_argument(e.what());
      }
      if (args.size() != entry.arity) {
        throw std::invalid_argument("--entry expects " + std::to_string(entry.arity) +
                                    " arguments, got " + std::to_string(args.size()));
      }
      return rt.call_function(p, entry.module, entry.name, args);
    });
    edbc::Value result = rt.join(root);
    rt.quiesce();
    std::cout << edbc::to_string(result) << "\n";
  } catch (const edbc::ContractViolation& v) {
    std::cerr << v.violation().message << "\n";
    code = kViolation;
  } catch (const edbc::RuntimeError& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    code = kRuntime;
  } catch (const std::invalid_argument& e) {
    std::cerr << "edbc: " << e.what() << "\n";
    code = kLoad;
  }
  rt.shutdown();
  return code;
}

int cmd_instrument(const std::string& file) {
  try {
    edbc::ModuleAst m = edbc::load_source(edbc::read_file(file));
    std::cout << edbc::pretty_print(edbc::instrument_module(m).as_module());
    return kOk;
  } catch (const edbc::IoError& e) {
    std::cerr << "edbc: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "edbc: " << e.what() << "\n";
    return kLoad;
  }
}

int cmd_doc(const std::string& file, const std::string& out_dir) {
  try {
    edbc::ModuleAst m = edbc::load_source(edbc::read_file(file));
    std::filesystem::path dir =
        out_dir.empty() ? std::filesystem::path(file).parent_path() : std::filesystem::path(out_dir);
    std::filesystem::path target = dir / (m.name + ".md");
    if (!out_dir.empty()) {
      std::error_code ec;
      std::filesystem::create_directories(dir, ec);
      if (ec) throw edbc::IoError("cannot create " + dir.string() + ": " + ec.message());
    }
    edbc::write_file(target.string(), edbc::generate_docs(m));
    std::cout << target.string() << "\n";
    return kOk;
  } catch (const edbc::IoError& e) {
    std::cerr << "edbc: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "edbc: " << e.what() << "\n";
    return kLoad;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Runtime contract checking for edl programs"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Evaluate an entry function");
  run_cmd->add_option("files", run.files, "Source modules")->required();
  run_cmd->add_option("--entry", run.entry, "[module:]name/arity")->required();
  run_cmd->add_option("--args", run.args, "Comma-separated literal arguments");
  run_cmd->add_flag("--no-contracts", run.no_contracts, "Run without instrumentation");
  run_cmd->add_option("--policy", run.policy, "Default server policy")
      ->check(CLI::IsMember({"fair", "resend"}));
  run_cmd->add_option("--slack", run.slack, "Extra ms allowed for time contracts");
  run_cmd->add_option("--seed", run.seed, "Seed of rand:uniform/1");

  std::string inst_file;
  bool dump = false;
  auto* inst_cmd = app.add_subcommand("instrument", "Print the instrumented module");
  inst_cmd->add_option("file", inst_file)->required();
  inst_cmd->add_flag("--dump", dump, "Print as source (the only format)");

  std::string doc_file;
  std::string out_dir;
  auto* doc_cmd = app.add_subcommand("doc", "Write markdown contract documentation");
  doc_cmd->add_option("file", doc_file)->required();
  doc_cmd->add_option("--out", out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kLoad;
  }

  if (*run_cmd) return cmd_run(run);
  if (*inst_cmd) return cmd_instrument(inst_file);
  return cmd_doc(doc_file, out_dir);
}
