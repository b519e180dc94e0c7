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

#include "cologne/ast.hpp"

#include <algorithm>

namespace cologne::ast {

bool is_comparison(Op op) {
  switch (op) {
    case Op::Assign:
    case Op::Eq:
    case Op::Ne:
    case Op::Lt:
    case Op::Le:
    case Op::Gt:
    case Op::Ge:
      return true;
    default:
      return false;
  }
}

const char* op_text(Op op) {
  switch (op) {
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Mul: return "*";
    case Op::Div: return "/";
    case Op::Assign: return "=";
    case Op::Eq: return "==";
    case Op::Ne: return "!=";
    case Op::Lt: return "<";
    case Op::Le: return "<=";
    case Op::Gt: return ">";
    case Op::Ge: return ">=";
  }
  return "?";
}

Expr Expr::var(std::string n) {
  Expr e;
  e.kind = Kind::Var;
  e.name = std::move(n);
  return e;
}

Expr Expr::integer(int64_t v) {
  Expr e;
  e.kind = Kind::Int;
  e.value = v;
  return e;
}

Expr Expr::str(std::string s) {
  Expr e;
  e.kind = Kind::Str;
  e.name = std::move(s);
  return e;
}

Expr Expr::constant(std::string n) {
  Expr e;
  e.kind = Kind::Const;
  e.name = std::move(n);
  return e;
}

Expr Expr::binary(Op op, Expr l, Expr r) {
  Expr e;
  e.kind = Kind::Binary;
  e.op = op;
  e.args.push_back(std::move(l));
  e.args.push_back(std::move(r));
  return e;
}

Expr Expr::neg(Expr x) {
  Expr e;
  e.kind = Kind::Neg;
  e.args.push_back(std::move(x));
  return e;
}

Expr Expr::abs(Expr x) {
  Expr e;
  e.kind = Kind::Abs;
  e.args.push_back(std::move(x));
  return e;
}

void Expr::collect_vars(std::vector<std::string>& out) const {
  if (kind == Kind::Var) {
    if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
    return;
  }
  for (const auto& a : args) a.collect_vars(out);
}

const char* agg_name(AggFn fn) {
  switch (fn) {
    case AggFn::Sum: return "SUM";
    case AggFn::Min: return "MIN";
    case AggFn::Max: return "MAX";
    case AggFn::Count: return "COUNT";
    case AggFn::Stdev: return "STDEV";
    case AggFn::SumAbs: return "SUMABS";
    case AggFn::Unique: return "UNIQUE";
  }
  return "?";
}

std::optional<AggFn> agg_from_name(const std::string& s) {
  static const std::pair<const char*, AggFn> table[] = {
      {"SUM", AggFn::Sum},     {"MIN", AggFn::Min},       {"MAX", AggFn::Max},
      {"COUNT", AggFn::Count}, {"STDEV", AggFn::Stdev},   {"SUMABS", AggFn::SumAbs},
      {"UNIQUE", AggFn::Unique}};
  for (const auto& [n, f] : table)
    if (s == n) return f;
  return std::nullopt;
}

std::string Predicate::location_var() const {
  if (!located || args.empty() || !args[0].is_var()) return {};
  return args[0].name;
}

std::vector<const Predicate*> Rule::body_predicates() const {
  std::vector<const Predicate*> out;
  for (const auto& lit : body)
    if (const auto* p = std::get_if<Predicate>(&lit)) out.push_back(p);
  return out;
}

std::vector<size_t> VarDecl::solver_positions() const {
  std::vector<std::string> bound_vars;
  for (const auto& a : bound.args) a.collect_vars(bound_vars);
  std::vector<size_t> out;
  for (size_t i = 0; i < var.args.size(); ++i) {
    const auto& a = var.args[i];
    if (a.is_var() && std::find(bound_vars.begin(), bound_vars.end(), a.name) == bound_vars.end())
      out.push_back(i);
  }
  return out;
}

const Rule* Program::find_rule(const std::string& label) const {
  for (const auto& r : rules)
    if (r.label == label) return &r;
  return nullptr;
}

const VarDecl* Program::find_var_decl(const std::string& table) const {
  for (const auto& v : vars)
    if (v.var.name == table) return &v;
  return nullptr;
}

std::set<std::string> Program::predicate_names() const {
  std::set<std::string> out;
  if (goal && goal->table) out.insert(goal->table->name);
  for (const auto& v : vars) {
    out.insert(v.var.name);
    out.insert(v.bound.name);
  }
  for (const auto& r : rules) {
    out.insert(r.head.name);
    for (const auto* p : r.body_predicates()) out.insert(p->name);
  }
  return out;
}

}  // namespace cologne::ast
