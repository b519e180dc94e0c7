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

#include "cologne/ground.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "cologne/lang.hpp"
#include "datalog/compiled.hpp"

namespace cologne::solver {

SymValue SymValue::of(LinExpr e) {
  if (e.is_constant()) return plain(Value(e.constant));
  return {true, Value(), std::move(e)};
}

double stdev_from_scaled(int64_t scaled, int64_t n) {
  if (n <= 0) return 0;
  const double nn = static_cast<double>(n);
  return std::sqrt(static_cast<double>(scaled) / (nn * nn * nn));
}

namespace {

using ast::Expr;
using ast::Op;

struct Env {
  std::map<std::string, SymValue> vals;
  std::vector<Constraint> pending;
};

class Grounder {
public:
  Grounder(const AnnotatedProgram& a, const datalog::Store& s, const Config& cfg) : a_(a), s_(s), cfg_(cfg) {}

  Grounding run() {
    make_vars();
    derive_all();
    for (size_t i = 0; i < a_.program.rules.size(); ++i)
      if (a_.class_of(i) == RuleClass::SolverConstraint) eval_rule(a_.program.rules[i], i, true);
    make_objective();
    return std::move(g_);
  }

private:
  // --- sources ------------------------------------------------------------
  const std::vector<SymRow>& source(const std::string& pred) {
    if (g_.var_tables.count(pred) || a_.solver_tables.count(pred)) return g_.tables[pred];
    auto it = regular_.find(pred);
    if (it != regular_.end()) return it->second;
    auto& out = regular_[pred];
    for (const auto& row : s_.rows(pred)) {
      SymRow r;
      for (const auto& v : row) r.push_back(SymValue::plain(v));
      out.push_back(std::move(r));
    }
    return out;
  }

  int64_t constant(const std::string& name) const {
    auto it = cfg_.consts.find(name);
    if (it == cfg_.consts.end()) throw Error("unknown constant '" + name + "'");
    return it->second;
  }

  // --- variables ------------------------------------------------------------
  void domain_for(const ast::VarDecl& d, FDVar& v) const {
    const std::string& table = d.var.name;
    if (d.domain) {
      v.lo = d.domain->lo;
      v.hi = d.domain->hi;
      return;
    }
    auto it = cfg_.domains.find(table);
    if (it != cfg_.domains.end()) {
      if (!it->second.channels) {
        v.lo = it->second.lo;
        v.hi = it->second.hi;
        return;
      }
      if (cfg_.channels.empty()) throw Error("domain." + table + "=channels but no channel list is configured");
      std::set<int64_t> ch(cfg_.channels.begin(), cfg_.channels.end());
      v.lo = *ch.begin();
      v.hi = *ch.rbegin();
      for (int64_t x = v.lo; x <= v.hi; ++x)
        if (!ch.count(x)) v.excluded.push_back(x);
      return;
    }
    if (cfg_.default_domain_lo && cfg_.default_domain_hi) {
      v.lo = *cfg_.default_domain_lo;
      v.hi = *cfg_.default_domain_hi;
      return;
    }
    throw Error("unbounded variable domain for var table '" + table + "'");
  }

  void make_vars() {
    for (const auto& d : a_.program.vars) {
      g_.var_tables.insert(d.var.name);
      auto& table = g_.tables[d.var.name];
      const auto sp = d.solver_positions();
      for (const auto& row : s_.rows(d.bound.name)) {
        if (row.size() != d.bound.args.size()) continue;
        Env env;
        bool ok = true;
        for (size_t i = 0; i < row.size() && ok; ++i) ok = unify(d.bound.args[i], SymValue::plain(row[i]), env, false);
        if (!ok) continue;
        SymRow out(d.var.args.size());
        std::string label = d.var.name + "(";
        for (size_t i = 0; i < d.var.args.size(); ++i) {
          if (std::count(sp.begin(), sp.end(), i)) continue;
          out[i] = eval(d.var.args[i], env);
        }
        for (size_t i = 0; i < out.size(); ++i)
          label += (i ? "," : "") + (std::count(sp.begin(), sp.end(), i) ? std::string("_") : out[i].value.to_literal());
        label += ")";
        for (size_t i : sp) {
          FDVar proto;
          domain_for(d, proto);
          int v = g_.model.add_var(proto.lo, proto.hi, label, true);
          g_.model.vars[v].excluded = proto.excluded;
          out[i] = SymValue::of(LinExpr::var(v));
        }
        table.push_back(std::move(out));
      }
    }
  }

  // --- expressions ----------------------------------------------------------
  void bounds(const LinExpr& e, int64_t& lo, int64_t& hi) const {
    lo = hi = e.constant;
    for (const auto& t : e.terms) {
      const auto& v = g_.model.vars[t.var];
      lo += t.coef > 0 ? t.coef * v.lo : t.coef * v.hi;
      hi += t.coef > 0 ? t.coef * v.hi : t.coef * v.lo;
    }
  }

  static LinExpr lin(const SymValue& v) {
    if (v.symbolic) return v.expr;
    if (!v.value.is_int()) throw Error("string value " + v.value.to_literal() + " used in arithmetic");
    return LinExpr::of(v.value.as_int());
  }

  int abs_var(const LinExpr& e) {
    int x;
    if (e.terms.size() == 1 && e.terms[0].coef == 1 && e.constant == 0) {
      x = e.terms[0].var;
    } else {
      int64_t lo, hi;
      bounds(e, lo, hi);
      x = g_.model.add_var(lo, hi, "t");
      Constraint c;
      c.kind = ConKind::LinearEq;
      c.lin = LinExpr::var(x) - e;
      c.origin = origin_;
      post(c);
    }
    auto it = abs_cache_.find(x);
    if (it != abs_cache_.end()) return it->second;
    const auto& v = g_.model.vars[x];
    int64_t lo = v.lo > 0 ? v.lo : v.hi < 0 ? -v.hi : 0;
    int64_t hi = std::max(std::abs(v.lo), std::abs(v.hi));
    int y = g_.model.add_var(lo, hi, "|" + v.name + "|");
    Constraint c;
    c.kind = ConKind::AbsValue;
    c.result = y;
    c.a = x;
    c.origin = origin_;
    post(c);
    abs_cache_[x] = y;
    return y;
  }

  LinExpr abs_of(const LinExpr& e) {
    if (e.terms.size() == 1 && e.constant == 0) {
      int64_t k = e.terms[0].coef;
      return LinExpr::var(abs_var(LinExpr::var(e.terms[0].var)), k < 0 ? -k : k);
    }
    return LinExpr::var(abs_var(e));
  }

  // The relation `l op r` as (lin, rel) with lin rel 0.
  static std::pair<LinExpr, Rel> relation(Op op, const LinExpr& l, const LinExpr& r) {
    LinExpr d = l - r;
    switch (op) {
      case Op::Lt: return {d + LinExpr::of(1), Rel::Le};
      case Op::Le: return {d, Rel::Le};
      case Op::Gt: return {d.scaled(-1) + LinExpr::of(1), Rel::Le};
      case Op::Ge: return {d.scaled(-1), Rel::Le};
      case Op::Eq:
      case Op::Assign: return {d, Rel::Eq};
      case Op::Ne: return {d, Rel::Ne};
      default: break;
    }
    throw Error("not a comparison");
  }

  bool is_bool_var(const LinExpr& e) const {
    if (e.terms.size() != 1 || e.constant != 0 || e.terms[0].coef != 1) return false;
    const auto& v = g_.model.vars[e.terms[0].var];
    return v.lo >= 0 && v.hi <= 1;
  }

  SymValue indicator(Op op, const SymValue& l, const SymValue& r) {
    if (!l.symbolic && !r.symbolic) return SymValue::plain(Value(datalog::detail::compare(op, l.value, r.value) ? 1 : 0));
    const LinExpr L = lin(l), R = lin(r);
    if (op == Op::Eq || op == Op::Ne) {
      const LinExpr* b = is_bool_var(L) && R.is_constant() ? &L : is_bool_var(R) && L.is_constant() ? &R : nullptr;
      if (b) {
        int64_t k = (b == &L ? R : L).constant;
        bool eq = op == Op::Eq;
        if (k == 1) return SymValue::of(eq ? *b : LinExpr::of(1) - *b);
        if (k == 0) return SymValue::of(eq ? LinExpr::of(1) - *b : *b);
        return SymValue::plain(Value(eq ? 0 : 1));
      }
    }
    auto [d, rel] = relation(op, L, R);
    int b = g_.model.add_var(0, 1, "reif");
    Constraint c;
    c.kind = ConKind::Reified;
    c.result = b;
    c.lin = d;
    c.rel = rel;
    c.origin = origin_;
    post(c);
    return SymValue::of(LinExpr::var(b));
  }

  SymValue eval(const Expr& e, Env& env) {
    switch (e.kind) {
      case Expr::Kind::Var: {
        auto it = env.vals.find(e.name);
        if (it == env.vals.end()) throw Error("unbound variable " + e.name + " in rule " + origin_);
        return it->second;
      }
      case Expr::Kind::Int: return SymValue::plain(Value(e.value));
      case Expr::Kind::Str: return SymValue::plain(Value(e.name));
      case Expr::Kind::Const: return SymValue::plain(Value(constant(e.name)));
      case Expr::Kind::Neg: {
        SymValue v = eval(e.args.at(0), env);
        return SymValue::of(lin(v).scaled(-1));
      }
      case Expr::Kind::Abs: {
        SymValue v = eval(e.args.at(0), env);
        if (!v.symbolic) return SymValue::plain(Value(std::abs(lin(v).constant)));
        return SymValue::of(abs_of(v.expr));
      }
      case Expr::Kind::Max:
      case Expr::Kind::Min: {
        std::vector<SymValue> vs;
        for (const auto& a : e.args) vs.push_back(eval(a, env));
        for (const auto& v : vs)
          if (v.symbolic) throw Error("unsupported expression: max/min over solver variables in rule " + origin_);
        int64_t out = lin(vs.at(0)).constant;
        for (const auto& v : vs)
          out = e.kind == Expr::Kind::Max ? std::max(out, lin(v).constant) : std::min(out, lin(v).constant);
        return SymValue::plain(Value(out));
      }
      case Expr::Kind::Binary: break;
    }
    SymValue l = eval(e.args.at(0), env);
    SymValue r = eval(e.args.at(1), env);
    if (ast::is_comparison(e.op) || e.op == Op::Assign) return indicator(e.op == Op::Assign ? Op::Eq : e.op, l, r);
    if (!l.symbolic && !r.symbolic) return SymValue::plain(Value(datalog::detail::apply_arith(e.op, lin(l).constant, lin(r).constant)));
    LinExpr L = lin(l), R = lin(r);
    switch (e.op) {
      case Op::Add: return SymValue::of(L + R);
      case Op::Sub: return SymValue::of(L - R);
      case Op::Mul:
        if (R.is_constant()) return SymValue::of(L.scaled(R.constant));
        if (L.is_constant()) return SymValue::of(R.scaled(L.constant));
        throw Error("unsupported expression: product of solver variables in rule " + origin_);
      default: throw Error("unsupported expression: division of a solver variable in rule " + origin_);
    }
  }

  void post(Constraint c) {
    if (c.origin.empty()) c.origin = origin_;
    g_.model.post(std::move(c));
  }

  // Top-level body expression. Returns false when a plain comparison fails.
  bool apply(const Expr& e, Env& env, bool hard) {
    if (e.kind == Expr::Kind::Binary && (e.op == Op::Assign || e.op == Op::Eq)) {
      for (int side = 0; side < 2; ++side) {
        const Expr& v = e.args[side];
        if (v.is_var() && !env.vals.count(v.name)) {
          env.vals[v.name] = eval(e.args[1 - side], env);
          return true;
        }
      }
    }
    if (!e.is_comparison() && !(e.kind == Expr::Kind::Binary && e.op == Op::Assign))
      throw Error("body expression is not a comparison in rule " + origin_);
    SymValue l = eval(e.args.at(0), env);
    SymValue r = eval(e.args.at(1), env);
    Op op = e.op == Op::Assign ? Op::Eq : e.op;
    if (!l.symbolic && !r.symbolic) {
      bool ok = datalog::detail::compare(op, l.value, r.value);
      if (!ok && hard) {
        g_.model.trivially_unsat = true;
        if (g_.model.unsat_reason.empty()) g_.model.unsat_reason = "constraint " + origin_ + " is violated by input facts";
      }
      return ok || hard;
    }
    auto [d, rel] = relation(op, lin(l), lin(r));
    Constraint c;
    c.kind = rel == Rel::Le ? ConKind::LinearLe : rel == Rel::Eq ? ConKind::LinearEq : ConKind::LinearNe;
    c.lin = d;
    c.origin = origin_;
    env.pending.push_back(std::move(c));
    return true;
  }

  bool unify(const Expr& pat, const SymValue& v, Env& env, bool hard) {
    auto equate = [&](const SymValue& b) {
      if (!b.symbolic && !v.symbolic) return b.value == v.value;
      if (b == v) return true;
      if (!hard) throw Error("join on solver attribute in rule " + origin_);
      Constraint c;
      c.kind = ConKind::LinearEq;
      c.lin = lin(b) - lin(v);
      c.origin = origin_;
      env.pending.push_back(std::move(c));
      return true;
    };
    switch (pat.kind) {
      case Expr::Kind::Var: {
        auto it = env.vals.find(pat.name);
        if (it == env.vals.end()) {
          env.vals[pat.name] = v;
          return true;
        }
        return equate(it->second);
      }
      case Expr::Kind::Int:
      case Expr::Kind::Str:
      case Expr::Kind::Const: return equate(eval(pat, env));
      default: throw Error("unsupported predicate argument in rule " + origin_);
    }
  }

  // --- rules ----------------------------------------------------------------
  // `later` holds the variables of literals not joined yet; an assignment
  // waits for them so that a literal binding the same variable joins first.
  static bool ready(const Expr& e, const Env& env, const std::set<std::string>& later) {
    std::vector<std::string> vs;
    e.collect_vars(vs);
    size_t unbound = 0;
    for (const auto& v : vs) unbound += !env.vals.count(v);
    if (unbound == 0) return true;
    if (e.kind == Expr::Kind::Binary && (e.op == Op::Assign || e.op == Op::Eq) && unbound == 1)
      for (int side = 0; side < 2; ++side)
        if (e.args[side].is_var() && !env.vals.count(e.args[side].name) && !later.count(e.args[side].name)) return true;
    return false;
  }

  // Domain for a body variable no literal binds: 0/1 when it is only compared to 0 or 1.
  std::pair<int64_t, int64_t> fresh_domain(const ast::Rule& r, const std::string& name) const {
    bool only_bool = true;
    std::function<void(const Expr&, bool)> walk = [&](const Expr& e, bool ok_here) {
      if (e.is_var() && e.name == name && !ok_here) only_bool = false;
      bool cmp01 = e.kind == Expr::Kind::Binary && (e.op == Op::Eq || e.op == Op::Ne) &&
                   ((e.args[0].kind == Expr::Kind::Int && (e.args[0].value == 0 || e.args[0].value == 1)) ||
                    (e.args[1].kind == Expr::Kind::Int && (e.args[1].value == 0 || e.args[1].value == 1)));
      for (const auto& a : e.args) walk(a, cmp01);
    };
    for (const auto& lit : r.body)
      if (const auto* e = std::get_if<Expr>(&lit)) walk(*e, false);
    if (only_bool) return {0, 1};
    if (cfg_.default_domain_lo && cfg_.default_domain_hi) return {*cfg_.default_domain_lo, *cfg_.default_domain_hi};
    throw Error("unbounded variable domain for " + name + " in rule " + origin_);
  }

  struct RuleCtx {
    const ast::Rule* rule;
    std::vector<const ast::Predicate*> preds;
    std::vector<const Expr*> exprs;
    bool hard;
    std::function<void(Env&)> done;
  };

  void step(RuleCtx& ctx, size_t pi, Env env, std::vector<char> used) {
    std::set<std::string> later;
    for (size_t k = pi; k < ctx.preds.size(); ++k)
      for (const auto& arg : ctx.preds[k]->args)
        if (arg.is_var()) later.insert(arg.name);
    for (bool progress = true; progress;) {
      progress = false;
      for (size_t j = 0; j < ctx.exprs.size(); ++j) {
        if (used[j] || !ready(*ctx.exprs[j], env, later)) continue;
        used[j] = 1;
        progress = true;
        if (!apply(*ctx.exprs[j], env, ctx.hard)) return;
      }
    }
    if (pi < ctx.preds.size()) {
      const ast::Predicate& p = *ctx.preds[pi];
      for (const auto& row : source(p.name)) {
        if (row.size() != p.args.size()) continue;
        Env e2 = env;
        bool ok = true;
        for (size_t i = 0; i < row.size() && ok; ++i) ok = unify(p.args[i], row[i], e2, ctx.hard);
        if (ok) step(ctx, pi + 1, std::move(e2), used);
      }
      return;
    }
    // all literals joined: invent variables nothing binds, then finish
    for (size_t j = 0; j < ctx.exprs.size(); ++j) {
      if (used[j]) continue;
      std::vector<std::string> vs;
      ctx.exprs[j]->collect_vars(vs);
      for (const auto& v : vs) {
        if (env.vals.count(v)) continue;
        if (ctx.hard) throw Error("variable " + v + " is not bound in constraint rule " + origin_);
        auto [lo, hi] = fresh_domain(*ctx.rule, v);
        env.vals[v] = SymValue::of(LinExpr::var(g_.model.add_var(lo, hi, v + "@" + origin_)));
      }
      used[j] = 1;
      if (!apply(*ctx.exprs[j], env, ctx.hard)) return;
    }
    ctx.done(env);
  }

  void eval_rule(const ast::Rule& r, size_t index, bool constraint) {
    origin_ = rule_label(r, index);
    RuleCtx ctx;
    ctx.rule = &r;
    ctx.hard = constraint;
    if (constraint) ctx.preds.push_back(&r.head);
    for (const auto& lit : r.body) {
      if (const auto* p = std::get_if<ast::Predicate>(&lit)) ctx.preds.push_back(p);
      else ctx.exprs.push_back(&std::get<Expr>(lit));
    }
    if (constraint) {
      ctx.done = [&](Env& env) {
        for (auto& c : env.pending) post(std::move(c));
      };
      step(ctx, 0, Env{}, std::vector<char>(ctx.exprs.size(), 0));
      return;
    }
    const auto& head = r.head;
    std::set<SymRow> rows;
    std::map<SymRow, std::vector<SymValue>> groups;
    ctx.done = [&](Env& env) {
      for (auto& c : env.pending) post(std::move(c));
      SymRow out(head.args.size());
      for (size_t i = 0; i < head.args.size(); ++i) out[i] = eval(head.args[i], env);
      if (!head.agg) {
        rows.insert(std::move(out));
        return;
      }
      SymValue v = out[head.agg->position];
      out[head.agg->position] = SymValue::plain(Value(0));
      for (const auto& k : out)
        if (k.symbolic) throw Error("aggregate grouped by a solver attribute in rule " + origin_);
      groups[out].push_back(std::move(v));
    };
    step(ctx, 0, Env{}, std::vector<char>(ctx.exprs.size(), 0));
    auto& table = g_.tables[head.name];
    if (!head.agg) {
      table.insert(table.end(), rows.begin(), rows.end());
    } else {
      for (auto& [key, vals] : groups) {
        SymRow row = key;
        row[head.agg->position] = aggregate(head.agg->fn, vals);
        table.push_back(std::move(row));
      }
    }
  }

  int as_var(const SymValue& v) {
    LinExpr e = lin(v);
    if (e.terms.size() == 1 && e.terms[0].coef == 1 && e.constant == 0) return e.terms[0].var;
    int64_t lo, hi;
    bounds(e, lo, hi);
    int x = g_.model.add_var(lo, hi, "t");
    Constraint c;
    c.kind = ConKind::LinearEq;
    c.lin = LinExpr::var(x) - e;
    post(c);
    return x;
  }

  SymValue aggregate(ast::AggFn fn, const std::vector<SymValue>& vals) {
    bool symbolic = std::any_of(vals.begin(), vals.end(), [](const SymValue& v) { return v.symbolic; });
    switch (fn) {
      case ast::AggFn::Count: return SymValue::plain(Value(static_cast<int64_t>(vals.size())));
      case ast::AggFn::Sum: {
        LinExpr s;
        for (const auto& v : vals) s.add(lin(v));
        return SymValue::of(s);
      }
      case ast::AggFn::SumAbs: {
        LinExpr s;
        for (const auto& v : vals) {
          LinExpr e = lin(v);
          if (e.is_constant()) s.constant += std::abs(e.constant);
          else s.add(abs_of(e));
        }
        return SymValue::of(s);
      }
      case ast::AggFn::Min:
      case ast::AggFn::Max: {
        if (symbolic) throw Error("unsupported aggregate: MIN/MAX over solver variables in rule " + origin_);
        Value best = vals.front().value;
        for (const auto& v : vals) best = fn == ast::AggFn::Min ? std::min(best, v.value) : std::max(best, v.value);
        return SymValue::plain(best);
      }
      case ast::AggFn::Unique: {
        if (!symbolic) {
          std::set<Value> s;
          for (const auto& v : vals) s.insert(v.value);
          return SymValue::plain(Value(static_cast<int64_t>(s.size())));
        }
        Constraint c;
        c.kind = ConKind::CountDistinct;
        std::set<int64_t> universe(cfg_.channels.begin(), cfg_.channels.end());
        for (const auto& v : vals) {
          int x = as_var(v);
          c.vars.push_back(x);
          if (cfg_.channels.empty()) {
            const auto& fv = g_.model.vars[x];
            if (fv.hi - fv.lo > 4096) throw Error("UNIQUE over a variable with a huge domain in rule " + origin_);
            for (int64_t k = fv.lo; k <= fv.hi; ++k) universe.insert(k);
          }
        }
        c.universe.assign(universe.begin(), universe.end());
        int64_t n = static_cast<int64_t>(c.vars.size());
        c.result = g_.model.add_var(1, std::min<int64_t>(n, static_cast<int64_t>(universe.size())), "unique@" + origin_);
        int y = c.result;
        post(c);
        return SymValue::of(LinExpr::var(y));
      }
      case ast::AggFn::Stdev: {
        const int64_t n = static_cast<int64_t>(vals.size());
        if (!symbolic) {
          std::vector<int64_t> xs;
          for (const auto& v : vals) xs.push_back(lin(v).constant);
          int64_t s = 0, sc = 0;
          for (int64_t x : xs) s += x;
          for (int64_t x : xs) sc += (n * x - s) * (n * x - s);
          return SymValue::plain(Value(static_cast<int64_t>(std::llround(stdev_from_scaled(sc, n)))));
        }
        Constraint c;
        c.kind = ConKind::ScaledVariance;
        double total = 0;
        std::vector<double> mags;
        for (const auto& v : vals) {
          c.members.push_back(lin(v));
          int64_t lo, hi;
          bounds(c.members.back(), lo, hi);
          mags.push_back(static_cast<double>(std::max(std::abs(lo), std::abs(hi))));
          total += mags.back();
        }
        double upper = 0;
        for (double mg : mags) upper += (static_cast<double>(n) * mg + total) * (static_cast<double>(n) * mg + total);
        int64_t hi = upper > 4e18 ? int64_t{4'000'000'000'000'000'000} : static_cast<int64_t>(upper);
        int y = g_.model.add_var(0, hi, "scaledVariance@" + origin_);
        c.result = y;
        post(c);
        g_.stdev_of[y] = n;
        return SymValue::of(LinExpr::var(y));
      }
    }
    throw Error("unknown aggregate");
  }

  // Evaluates solver derivation rules so that every table a rule reads is
  // complete before the rule runs.
  void derive_all() {
    std::map<std::string, std::vector<size_t>> by_head;
    for (size_t i = 0; i < a_.program.rules.size(); ++i)
      if (a_.class_of(i) == RuleClass::SolverDerivation) by_head[a_.program.rules[i].head.name].push_back(i);
    std::set<std::string> done;
    while (done.size() < by_head.size()) {
      bool progress = false;
      for (const auto& [pred, rules] : by_head) {
        if (done.count(pred)) continue;
        bool ok = true;
        for (size_t i : rules)
          for (const auto* p : a_.program.rules[i].body_predicates())
            if (by_head.count(p->name) && !done.count(p->name) && !g_.var_tables.count(p->name)) ok = false;
        if (!ok) continue;
        for (size_t i : rules) eval_rule(a_.program.rules[i], i, false);
        done.insert(pred);
        progress = true;
      }
      if (!progress) throw Error("recursive solver derivation rules cannot be grounded");
    }
  }

  void make_objective() {
    const auto& goal = a_.program.goal;
    if (!goal || goal->kind == ast::GoalKind::Satisfy || !goal->table) return;
    g_.goal_table = goal->table->name;
    size_t pos = goal->table->args.size();
    for (size_t i = 0; i < goal->table->args.size(); ++i)
      if (goal->table->args[i].is_var() && goal->table->args[i].name == goal->attr) pos = i;
    if (pos == goal->table->args.size()) throw Error("goal attribute " + goal->attr + " not in goal table");
    Objective obj;
    obj.sense = goal->kind == ast::GoalKind::Minimize ? Sense::Minimize : Sense::Maximize;
    for (const auto& row : source(g_.goal_table))
      if (pos < row.size()) obj.expr.add(lin(row[pos]));
    g_.model.objective = obj;
  }

  const AnnotatedProgram& a_;
  const datalog::Store& s_;
  const Config& cfg_;
  Grounding g_;
  std::map<std::string, std::vector<SymRow>> regular_;
  std::map<int, int> abs_cache_;
  std::string origin_;
};

Value solved_value(const Grounding& g, const SymValue& v, const std::vector<int64_t>& values) {
  if (!v.symbolic) return v.value;
  const auto& e = v.expr;
  if (e.terms.size() == 1 && e.terms[0].coef == 1 && e.constant == 0) {
    auto it = g.stdev_of.find(e.terms[0].var);
    if (it != g.stdev_of.end())
      return Value(static_cast<int64_t>(std::llround(stdev_from_scaled(values.at(e.terms[0].var), it->second))));
  }
  return Value(e.eval(values));
}

}  // namespace

Grounding ground_model(const AnnotatedProgram& a, const datalog::Store& s, const Config& cfg) {
  return Grounder(a, s, cfg).run();
}

std::vector<Tuple> solved_rows(const Grounding& g, const std::string& pred, const std::vector<int64_t>& values) {
  std::vector<Tuple> out;
  auto it = g.tables.find(pred);
  if (it == g.tables.end()) return out;
  for (const auto& row : it->second) {
    Tuple t{pred, {}};
    for (const auto& v : row) t.values.push_back(solved_value(g, v, values));
    out.push_back(std::move(t));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<datalog::FactOp> materialize(const Grounding& g, const std::vector<int64_t>& values) {
  std::vector<datalog::FactOp> ops;
  for (const auto& t : g.var_tables)
    for (auto& tup : solved_rows(g, t, values)) ops.push_back({datalog::OpKind::Upsert, std::move(tup)});
  if (!g.goal_table.empty() && !g.var_tables.count(g.goal_table))
    for (auto& tup : solved_rows(g, g.goal_table, values)) ops.push_back({datalog::OpKind::Upsert, std::move(tup)});
  return ops;
}

}  // namespace cologne::solver
