// Copyright 2026 The Cologne Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "cologne/lang.hpp"

namespace cologne {

std::string Diagnostic::render() const {
  static const char* names[] = {"error", "warning", "note"};
  std::ostringstream os;
  os << file << ':' << line << ':' << col << ": " << names[static_cast<int>(severity)] << ": "
     << message;
  return os.str();
}

std::string render_diagnostics(const std::vector<Diagnostic>& diags) {
  std::string out;
  for (const auto& d : diags) out += d.render() + "\n";
  return out;
}

namespace {

class Checker {
public:
  Checker(const ast::Program& p, std::string file) : p_(p), file_(std::move(file)) {}

  std::vector<Diagnostic> run() {
    if (p_.goal && p_.goal->table) {
      note_predicate(*p_.goal->table);
      std::vector<std::string> vars;
      for (const auto& a : p_.goal->table->args) a.collect_vars(vars);
      if (std::find(vars.begin(), vars.end(), p_.goal->attr) == vars.end())
        error(p_.goal->pos, "goal attribute " + p_.goal->attr + " does not appear in " +
                                p_.goal->table->name);
    }
    for (const auto& v : p_.vars) check_var_decl(v);
    for (size_t i = 0; i < p_.rules.size(); ++i) check_rule(p_.rules[i], i);
    return std::move(diags_);
  }

private:
  void error(const ast::SourcePos& pos, std::string msg) {
    diags_.push_back({file_, pos.line, pos.col, Severity::Error, std::move(msg)});
  }

  void note_predicate(const ast::Predicate& p) {
    auto [it, fresh] = arity_.try_emplace(p.name, p.arity());
    if (!fresh && it->second != p.arity())
      error(p.pos, "arity mismatch for predicate '" + p.name + "': used with arity " +
                       std::to_string(it->second) + " and " + std::to_string(p.arity()));
    auto [lt, lfresh] = located_.try_emplace(p.name, p.located);
    if (!lfresh && lt->second != p.located)
      error(p.pos, "predicate '" + p.name + "' used both with and without a location specifier");
    if (p.located) {
      const auto& loc = p.args.front();
      if (loc.kind != ast::Expr::Kind::Var && loc.kind != ast::Expr::Kind::Const &&
          loc.kind != ast::Expr::Kind::Int && loc.kind != ast::Expr::Kind::Str)
        error(p.pos, "location specifier of '" + p.name + "' must be a variable or constant");
    }
  }

  void check_var_decl(const ast::VarDecl& v) {
    note_predicate(v.var);
    note_predicate(v.bound);
    std::vector<std::string> var_vars, bound_vars;
    for (const auto& a : v.var.args) a.collect_vars(var_vars);
    for (const auto& a : v.bound.args) a.collect_vars(bound_vars);
    for (const auto& b : bound_vars)
      if (std::find(var_vars.begin(), var_vars.end(), b) == var_vars.end())
        error(v.pos, "forall attribute " + b + " of " + v.bound.name + " is missing from " +
                         v.var.name);
    if (v.solver_positions().empty())
      error(v.pos, "var declaration of " + v.var.name + " has no solver attribute");
  }

  static void vars_of(const ast::Literal& lit, std::vector<std::string>& out) {
    if (const auto* p = std::get_if<ast::Predicate>(&lit)) {
      for (const auto& a : p->args) a.collect_vars(out);
    } else {
      std::get<ast::Expr>(lit).collect_vars(out);
    }
  }

  void check_rule(const ast::Rule& r, size_t index) {
    const std::string label = rule_label(r, index);
    note_predicate(r.head);
    bool any_located = r.head.located;
    bool any_unlocated = !r.head.located;
    for (const auto* p : r.body_predicates()) {
      note_predicate(*p);
      any_located |= p->located;
      any_unlocated |= !p->located;
    }
    if (any_located && any_unlocated)
      error(r.pos, "rule '" + label + "' mixes located and unlocated predicates");

    std::vector<std::string> head_vars, body_vars;
    for (const auto& a : r.head.args) a.collect_vars(head_vars);
    for (const auto& lit : r.body) vars_of(lit, body_vars);

    if (r.arrow == ast::Arrow::Derive) {
      for (const auto& h : head_vars)
        if (std::find(body_vars.begin(), body_vars.end(), h) == body_vars.end())
          error(r.pos, "unsafe rule '" + label + "': head variable " + h +
                           " does not appear in the body");
      return;
    }

    std::set<std::string> bound(head_vars.begin(), head_vars.end());
    for (const auto* p : r.body_predicates())
      for (const auto& a : p->args) {
        std::vector<std::string> vs;
        a.collect_vars(vs);
        bound.insert(vs.begin(), vs.end());
      }
    for (bool changed = true; changed;) {
      changed = false;
      for (const auto& lit : r.body) {
        const auto* e = std::get_if<ast::Expr>(&lit);
        if (!e || e->kind != ast::Expr::Kind::Binary ||
            (e->op != ast::Op::Assign && e->op != ast::Op::Eq))
          continue;
        for (int side = 0; side < 2; ++side) {
          const auto& target = e->args[side];
          if (!target.is_var() || bound.count(target.name)) continue;
          std::vector<std::string> rhs;
          e->args[1 - side].collect_vars(rhs);
          if (std::all_of(rhs.begin(), rhs.end(), [&](const auto& v) { return bound.count(v) > 0; })) {
            bound.insert(target.name);
            changed = true;
          }
        }
      }
    }
    for (const auto& b : body_vars)
      if (!bound.count(b))
        error(r.pos, "unsafe rule '" + label + "': variable " + b +
                         " is not bound by the head or a body predicate");
  }

  const ast::Program& p_;
  std::string file_;
  std::map<std::string, size_t> arity_;
  std::map<std::string, bool> located_;
  std::vector<Diagnostic> diags_;
};

}  // namespace

std::vector<Diagnostic> check_program(const ast::Program& p, std::string_view filename) {
  return Checker(p, std::string(filename)).run();
}

}  // namespace cologne
