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

#include "datalog/compiled.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>

namespace cologne::datalog::detail {

namespace {

struct Compiler {
  std::map<std::string, int> slots;
  std::vector<std::string> names;

  int slot_of(const std::string& n) {
    auto it = slots.find(n);
    if (it != slots.end()) return it->second;
    int s = static_cast<int>(names.size());
    slots.emplace(n, s);
    names.push_back(n);
    return s;
  }

  CExpr expr(const ast::Expr& e) {
    CExpr c;
    switch (e.kind) {
      case ast::Expr::Kind::Var:
        c.kind = CExpr::Kind::Slot;
        c.slot = slot_of(e.name);
        return c;
      case ast::Expr::Kind::Int: c.kind = CExpr::Kind::Lit; c.value = e.value; return c;
      case ast::Expr::Kind::Str: c.kind = CExpr::Kind::Lit; c.value = e.name; return c;
      case ast::Expr::Kind::Const: c.kind = CExpr::Kind::Const; c.name = e.name; return c;
      case ast::Expr::Kind::Binary: c.kind = CExpr::Kind::Binary; c.op = e.op; break;
      case ast::Expr::Kind::Neg: c.kind = CExpr::Kind::Neg; break;
      case ast::Expr::Kind::Abs: c.kind = CExpr::Kind::Abs; break;
      case ast::Expr::Kind::Max: c.kind = CExpr::Kind::Max; break;
      case ast::Expr::Kind::Min: c.kind = CExpr::Kind::Min; break;
    }
    for (const auto& a : e.args) c.args.push_back(expr(a));
    return c;
  }

  CPred pred(const ast::Predicate& p) {
    CPred c;
    c.name = p.name;
    for (const auto& a : p.args) c.args.push_back(expr(a));
    return c;
  }
};

void mark_bound(const CExpr& e, std::vector<bool>& bound) {
  if (e.kind == CExpr::Kind::Slot) bound[e.slot] = true;
}

std::vector<Step> plan(const CRule& r, int trigger) {
  std::vector<bool> bound(r.nslots, false);
  std::vector<bool> pred_done(r.preds.size(), false), expr_done(r.exprs.size(), false);
  std::vector<Step> steps;
  if (trigger >= 0) {
    pred_done[trigger] = true;
    for (const auto& a : r.preds[trigger].args) mark_bound(a, bound);
  }
  for (;;) {
    bool progress = false;
    for (size_t k = 0; k < r.exprs.size(); ++k) {
      if (expr_done[k]) continue;
      const CExpr& e = r.exprs[k];
      if (expr_bound(e, bound)) {
        steps.push_back({Step::Kind::Filter, static_cast<int>(k), -1, -1, {}});
        expr_done[k] = progress = true;
        continue;
      }
      bool defn = e.kind == CExpr::Kind::Binary && (e.op == ast::Op::Assign || e.op == ast::Op::Eq);
      if (!defn) continue;
      for (int side = 0; side < 2 && !expr_done[k]; ++side) {
        const CExpr& t = e.args[side];
        if (t.kind == CExpr::Kind::Slot && !bound[t.slot] && expr_bound(e.args[1 - side], bound)) {
          steps.push_back({Step::Kind::Assign, static_cast<int>(k), t.slot, 1 - side, {}});
          bound[t.slot] = true;
          expr_done[k] = progress = true;
        }
      }
    }
    if (progress) continue;
    size_t next = r.preds.size();
    for (size_t j = 0; j < r.preds.size(); ++j)
      if (!pred_done[j]) {
        next = j;
        break;
      }
    if (next == r.preds.size()) break;
    Step s{Step::Kind::Pred, static_cast<int>(next), -1, -1, {}};
    for (size_t p = 0; p < r.preds[next].args.size(); ++p)
      if (expr_bound(r.preds[next].args[p], bound)) s.key_positions.push_back(p);
    for (const auto& a : r.preds[next].args) mark_bound(a, bound);
    pred_done[next] = true;
    steps.push_back(std::move(s));
  }
  for (size_t k = 0; k < r.exprs.size(); ++k)
    if (!expr_done[k])
      throw Error("rule '" + r.label + "': body expression can never be evaluated (unbound variable)");
  for (const auto& a : r.head.args)
    if (!expr_bound(a, bound))
      throw Error("rule '" + r.label + "': head argument is not bound by the body");
  return steps;
}

}  // namespace

bool expr_bound(const CExpr& e, const std::vector<bool>& bound) {
  if (e.kind == CExpr::Kind::Slot) return bound[e.slot];
  for (const auto& a : e.args)
    if (!expr_bound(a, bound)) return false;
  return true;
}

bool truthy(const Value& v) { return v.is_int() ? v.as_int() != 0 : !v.as_string().empty(); }

int64_t apply_arith(ast::Op op, int64_t a, int64_t b) {
  switch (op) {
    case ast::Op::Add: return a + b;
    case ast::Op::Sub: return a - b;
    case ast::Op::Mul: return a * b;
    case ast::Op::Div:
      if (b == 0) throw Error("division by zero");
      return a / b;  // truncates toward zero
    default: throw Error(std::string("not an arithmetic operator: ") + ast::op_text(op));
  }
}

bool compare(ast::Op op, const Value& a, const Value& b) {
  switch (op) {
    case ast::Op::Assign:
    case ast::Op::Eq: return a == b;
    case ast::Op::Ne: return a != b;
    case ast::Op::Lt: return a < b;
    case ast::Op::Le: return a <= b;
    case ast::Op::Gt: return a > b;
    case ast::Op::Ge: return a >= b;
    default: throw Error(std::string("not a comparison: ") + ast::op_text(op));
  }
}

Value eval(const CExpr& e, const Binding& b, const Consts& consts) {
  switch (e.kind) {
    case CExpr::Kind::Slot:
      if (!b[e.slot]) throw Error("unbound variable during evaluation");
      return *b[e.slot];
    case CExpr::Kind::Lit: return e.value;
    case CExpr::Kind::Const: {
      auto it = consts.find(e.name);
      if (it == consts.end()) throw Error("unknown named constant '" + e.name + "'");
      return it->second;
    }
    case CExpr::Kind::Binary: {
      Value l = eval(e.args[0], b, consts), r = eval(e.args[1], b, consts);
      if (ast::is_comparison(e.op) || e.op == ast::Op::Assign) return int64_t{compare(e.op, l, r)};
      return apply_arith(e.op, l.as_int(), r.as_int());
    }
    case CExpr::Kind::Neg: return -eval(e.args[0], b, consts).as_int();
    case CExpr::Kind::Abs: return static_cast<int64_t>(std::llabs(eval(e.args[0], b, consts).as_int()));
    case CExpr::Kind::Max:
    case CExpr::Kind::Min: {
      int64_t acc = eval(e.args[0], b, consts).as_int();
      for (size_t i = 1; i < e.args.size(); ++i) {
        int64_t v = eval(e.args[i], b, consts).as_int();
        acc = e.kind == CExpr::Kind::Max ? std::max(acc, v) : std::min(acc, v);
      }
      return acc;
    }
  }
  return int64_t{0};
}

CRule compile_rule(const ast::Rule& r, const std::string& label) {
  Compiler c;
  CRule out;
  out.label = label;
  for (const auto& lit : r.body) {
    if (const auto* p = std::get_if<ast::Predicate>(&lit)) {
      out.preds.push_back(c.pred(*p));
    } else {
      out.exprs.push_back(c.expr(std::get<ast::Expr>(lit)));
    }
  }
  out.head = c.pred(r.head);
  out.agg = r.head.agg;
  out.nslots = static_cast<int>(c.names.size());
  out.slot_names = c.names;
  for (size_t i = 0; i < out.preds.size(); ++i) out.trigger_plans.push_back(plan(out, static_cast<int>(i)));
  out.full_plan = plan(out, -1);
  return out;
}

}  // namespace cologne::datalog::detail
