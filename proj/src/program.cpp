#include "edbc/program.hpp"

#include <fstream>
#include <sstream>

#include "edbc/parser.hpp"
#include "interp.hpp"

namespace edbc {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text) || !out.flush()) throw IoError("cannot write " + path);
}

ModuleAst load_source(const std::string& text) {
  ModuleAst m = parse_module(text);
  check_contracts(m);
  return m;
}

std::vector<ModuleAst> load_files(Runtime& rt, const std::vector<std::string>& paths,
                                  bool contracts_enabled) {
  std::vector<ModuleAst> out;
  for (const auto& path : paths) {
    ModuleAst m = load_source(read_file(path));
    if (rt.find_module(m.name)) throw ParseError("module " + m.name + " is defined twice");
    rt.load(m, contracts_enabled);
    out.push_back(std::move(m));
  }
  return out;
}

namespace {

// Only data: no calls, funs or variables.
bool is_literal(const Expr& e) {
  bool ok = true;
  visit(e, [&](const Expr& x) {
    ok = ok && (std::holds_alternative<expr::Lit>(x.node) || std::holds_alternative<expr::List>(x.node) ||
                std::holds_alternative<expr::Tuple>(x.node) ||
                (std::holds_alternative<expr::Unary>(x.node) &&
                 std::get<expr::Unary>(x.node).op == UnaryOp::Neg));
  });
  return ok;
}

}  // namespace

std::vector<Value> eval_terms(Runtime& rt, Process& p, const std::string& text) {
  std::vector<Value> out;
  for (const auto& e : parse_expr_list(text)) {
    if (!is_literal(*e)) throw ParseError("argument is not a literal term: " + text);
    Env env;
    out.push_back(rt.interp().eval(p, e, env, "shell"));
  }
  return out;
}

}  // namespace edbc
