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

// Reference evaluator for tests: recomputes every regular table from the
// base facts by stratified naive iteration. Deliberately shares no code with
// the incremental store.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>

#include "cologne/datalog.hpp"

namespace cologne::datalog {

namespace {

using Env = std::map<std::string, Value>;
using Db = std::map<std::string, std::set<Row>>;

std::optional<Value> value_of(const ast::Expr& e, const Env& env, const Consts& consts) {
  using K = ast::Expr::Kind;
  switch (e.kind) {
    case K::Var: {
      auto it = env.find(e.name);
      if (it == env.end()) return std::nullopt;
      return it->second;
    }
    case K::Int: return Value(e.value);
    case K::Str: return Value(e.name);
    case K::Const: {
      auto it = consts.find(e.name);
      if (it == consts.end()) throw Error("unknown named constant '" + e.name + "'");
      return Value(it->second);
    }
    default: break;
  }
  std::vector<Value> xs;
  for (const auto& a : e.args) {
    auto v = value_of(a, env, consts);
    if (!v) return std::nullopt;
    xs.push_back(*v);
  }
  if (e.kind == K::Neg) return Value(-xs[0].as_int());
  if (e.kind == K::Abs) return Value(static_cast<int64_t>(std::llabs(xs[0].as_int())));
  if (e.kind == K::Max || e.kind == K::Min) {
    int64_t acc = xs[0].as_int();
    for (const auto& x : xs) acc = e.kind == K::Max ? std::max(acc, x.as_int()) : std::min(acc, x.as_int());
    return Value(acc);
  }
  const Value& l = xs[0];
  const Value& r = xs[1];
  switch (e.op) {
    case ast::Op::Add: return Value(l.as_int() + r.as_int());
    case ast::Op::Sub: return Value(l.as_int() - r.as_int());
    case ast::Op::Mul: return Value(l.as_int() * r.as_int());
    case ast::Op::Div:
      if (r.as_int() == 0) throw Error("division by zero");
      return Value(l.as_int() / r.as_int());
    case ast::Op::Assign:
    case ast::Op::Eq: return Value(int64_t{l == r});
    case ast::Op::Ne: return Value(int64_t{l != r});
    case ast::Op::Lt: return Value(int64_t{l < r});
    case ast::Op::Le: return Value(int64_t{l <= r});
    case ast::Op::Gt: return Value(int64_t{l > r});
    case ast::Op::Ge: return Value(int64_t{l >= r});
  }
  return std::nullopt;
}

// Enumerates all satisfying environments of a rule body. Literals are tried
// in any order in which they become evaluable.
void solve_body(const std::vector<ast::Literal>& body, std::vector<bool>& used, Env& env, const Db& db,
                const Consts& consts, const std::function<void(const Env&)>& out) {
  bool all = std::all_of(used.begin(), used.end(), [](bool u) { return u; });
  if (all) {
    out(env);
    return;
  }
  for (size_t i = 0; i < body.size(); ++i) {
    if (used[i]) continue;
    const auto* e = std::get_if<ast::Expr>(&body[i]);
    if (!e) continue;
    if (auto v = value_of(*e, env, consts)) {
      used[i] = true;
      if (v->is_int() ? v->as_int() != 0 : true) solve_body(body, used, env, db, consts, out);
      used[i] = false;
      return;
    }
    if (e->kind == ast::Expr::Kind::Binary && (e->op == ast::Op::Assign || e->op == ast::Op::Eq))
      for (int side = 0; side < 2; ++side) {
        const auto& t = e->args[side];
        if (!t.is_var() || env.count(t.name)) continue;
        auto v = value_of(e->args[1 - side], env, consts);
        if (!v) continue;
        used[i] = true;
        env[t.name] = *v;
        solve_body(body, used, env, db, consts, out);
        env.erase(t.name);
        used[i] = false;
        return;
      }
  }
  for (size_t i = 0; i < body.size(); ++i) {
    if (used[i]) continue;
    const auto* p = std::get_if<ast::Predicate>(&body[i]);
    if (!p) continue;
    used[i] = true;
    auto it = db.find(p->name);
    if (it != db.end()) {
      for (const auto& row : it->second) {
        if (row.size() != p->args.size()) continue;
        Env next = env;
        bool ok = true;
        for (size_t k = 0; k < row.size() && ok; ++k) {
          const auto& a = p->args[k];
          if (a.is_var() && !next.count(a.name)) {
            next[a.name] = row[k];
            continue;
          }
          auto v = value_of(a, next, consts);
          ok = v && *v == row[k];
        }
        if (ok) solve_body(body, used, next, db, consts, out);
      }
    }
    used[i] = false;
    return;
  }
  throw Error("naive evaluation: body cannot be evaluated");
}

std::vector<Env> bindings(const ast::Rule& r, const Db& db, const Consts& consts) {
  std::vector<Env> out;
  std::vector<bool> used(r.body.size(), false);
  Env env;
  solve_body(r.body, used, env, db, consts, [&](const Env& e) { out.push_back(e); });
  return out;
}

Row head_of(const ast::Predicate& h, const Env& env, const Consts& consts) {
  Row row;
  for (const auto& a : h.args) row.push_back(*value_of(a, env, consts));
  return row;
}

}  // namespace

std::vector<Tuple> naive_fixpoint(const AnnotatedProgram& a, const std::vector<Tuple>& base, const Consts& consts) {
  std::vector<const ast::Rule*> rules;
  for (size_t i = 0; i < a.program.rules.size(); ++i)
    if (a.class_of(i) == RuleClass::Regular) rules.push_back(&a.program.rules[i]);

  // level(p) counts the aggregation steps p depends on
  std::map<std::string, int> level;
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto* r : rules) {
      int need = 0;
      for (const auto* b : r->body_predicates()) need = std::max(need, level[b->name] + (r->head.agg ? 1 : 0));
      if (need > level[r->head.name]) {
        level[r->head.name] = need;
        changed = true;
        if (need > 1000) throw Error("naive evaluation: aggregation inside recursion");
      }
    }
  }
  int top = 0;
  for (const auto& [_, l] : level) top = std::max(top, l);

  Db db;
  for (const auto& t : base) db[t.pred].insert(t.values);
  for (int l = 0; l <= top; ++l) {
    for (const auto* r : rules) {
      if (!r->head.agg || level[r->head.name] != l) continue;
      std::map<Row, std::vector<Value>> groups;
      const size_t pos = r->head.agg->position;
      for (const auto& env : bindings(*r, db, consts)) {
        Row row = head_of(r->head, env, consts);
        Value v = row[pos];
        row.erase(row.begin() + static_cast<long>(pos));
        groups[row].push_back(v);
      }
      for (auto& [g, vals] : groups) {
        Value out;
        std::set<Value> distinct(vals.begin(), vals.end());
        switch (r->head.agg->fn) {
          case ast::AggFn::Count: out = static_cast<int64_t>(vals.size()); break;
          case ast::AggFn::Unique: out = static_cast<int64_t>(distinct.size()); break;
          case ast::AggFn::Min: out = *distinct.begin(); break;
          case ast::AggFn::Max: out = *distinct.rbegin(); break;
          case ast::AggFn::Sum:
          case ast::AggFn::SumAbs: {
            int64_t s = 0;
            for (const auto& v : vals) s += r->head.agg->fn == ast::AggFn::Sum ? v.as_int() : std::llabs(v.as_int());
            out = s;
            break;
          }
          case ast::AggFn::Stdev: {
            double mean = 0, sq = 0;
            for (const auto& v : vals) mean += static_cast<double>(v.as_int());
            mean /= static_cast<double>(vals.size());
            for (const auto& v : vals) sq += (static_cast<double>(v.as_int()) - mean) * (static_cast<double>(v.as_int()) - mean);
            out = static_cast<int64_t>(std::llround(std::sqrt(sq / static_cast<double>(vals.size()))));
            break;
          }
        }
        Row row = g;
        row.insert(row.begin() + static_cast<long>(pos), out);
        db[r->head.name].insert(row);
      }
    }
    for (bool grew = true; grew;) {
      grew = false;
      for (const auto* r : rules) {
        if (r->head.agg || level[r->head.name] != l) continue;
        for (const auto& env : bindings(*r, db, consts)) grew |= db[r->head.name].insert(head_of(r->head, env, consts)).second;
      }
    }
  }
  std::vector<Tuple> out;
  for (const auto& [pred, rows] : db)
    for (const auto& row : rows) out.push_back({pred, row});
  return out;
}

}  // namespace cologne::datalog
