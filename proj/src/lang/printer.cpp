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

#include <sstream>

#include "cologne/lang.hpp"

namespace cologne {

namespace {

int precedence(const ast::Expr& e) {
  using K = ast::Expr::Kind;
  switch (e.kind) {
    case K::Binary:
      if (ast::is_comparison(e.op)) return 1;
      if (e.op == ast::Op::Add || e.op == ast::Op::Sub) return 2;
      return 3;
    case K::Neg:
      return 4;
    case K::Int:
      return e.value < 0 ? 4 : 5;
    default:
      return 5;
  }
}

void print(std::ostream& os, const ast::Expr& e, int min_prec) {
  using K = ast::Expr::Kind;
  bool paren = precedence(e) < min_prec;
  if (paren) os << '(';
  switch (e.kind) {
    case K::Var:
    case K::Const:
      os << e.name;
      break;
    case K::Int:
      os << e.value;
      break;
    case K::Str:
      os << Value(e.name).to_literal();
      break;
    case K::Binary: {
      int p = precedence(e);
      if (p == 1) {
        print(os, e.args[0], 2);
        os << op_text(e.op);
        print(os, e.args[1], 2);
      } else {
        print(os, e.args[0], p);
        os << op_text(e.op);
        print(os, e.args[1], p + 1);
      }
      break;
    }
    case K::Neg:
      os << '-';
      // a bare `-5` is the literal, so a negated literal keeps its parens
      print(os, e.args[0], e.args[0].kind == K::Int ? 6 : 4);
      break;
    case K::Abs:
      os << '|';
      print(os, e.args[0], 2);
      os << '|';
      break;
    case K::Max:
    case K::Min:
      os << (e.kind == K::Max ? "max(" : "min(");
      print(os, e.args[0], 0);
      os << ',';
      print(os, e.args[1], 0);
      os << ')';
      break;
  }
  if (paren) os << ')';
}

}  // namespace

std::string print_expr(const ast::Expr& e) {
  std::ostringstream os;
  print(os, e, 0);
  return os.str();
}

std::string print_predicate(const ast::Predicate& p) {
  std::ostringstream os;
  os << p.name << '(';
  for (size_t i = 0; i < p.args.size(); ++i) {
    if (i) os << ',';
    if (i == 0 && p.located) os << '@';
    if (p.agg && p.agg->position == i) {
      os << ast::agg_name(p.agg->fn) << '<' << p.args[i].name << '>';
    } else {
      print(os, p.args[i], 0);
    }
  }
  os << ')';
  return os.str();
}

std::string print_rule(const ast::Rule& r) {
  std::ostringstream os;
  if (!r.label.empty()) os << r.label << ' ';
  os << print_predicate(r.head) << (r.arrow == ast::Arrow::Derive ? " <- " : " -> ");
  for (size_t i = 0; i < r.body.size(); ++i) {
    if (i) os << ", ";
    if (const auto* p = std::get_if<ast::Predicate>(&r.body[i])) os << print_predicate(*p);
    else os << print_expr(std::get<ast::Expr>(r.body[i]));
  }
  os << '.';
  return os.str();
}

std::string print_program(const ast::Program& p) {
  std::ostringstream os;
  if (p.goal) {
    static const char* kinds[] = {"minimize", "maximize", "satisfy"};
    os << "goal " << kinds[static_cast<int>(p.goal->kind)];
    if (p.goal->table) os << ' ' << p.goal->attr << " in " << print_predicate(*p.goal->table);
    os << ".\n";
  }
  for (const auto& v : p.vars) {
    os << "var " << print_predicate(v.var) << " forall " << print_predicate(v.bound);
    if (v.domain) os << " in [" << v.domain->lo << ',' << v.domain->hi << ']';
    os << ".\n";
  }
  for (const auto& r : p.rules) os << print_rule(r) << '\n';
  return os.str();
}

}  // namespace cologne
