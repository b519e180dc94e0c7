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
#include <cmath>
#include <deque>
#include <functional>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "cologne/datalog.hpp"
#include "datalog/compiled.hpp"

namespace cologne::datalog {

using detail::Binding;
using detail::CExpr;
using detail::CRule;
using detail::Step;

namespace {

using RowSet = std::unordered_set<Row, RowHash>;

struct Entry {
  int64_t count = 0;
  int64_t base = 0;
};

uint64_t mask_of(const std::vector<size_t>& positions) {
  uint64_t m = 0;
  for (size_t p : positions) m |= uint64_t{1} << p;
  return m;
}

Row project(const Row& r, const std::vector<size_t>& positions) {
  Row k;
  k.reserve(positions.size());
  for (size_t p : positions) k.push_back(r[p]);
  return k;
}

struct Table {
  size_t arity = 0;
  std::unordered_map<Row, Entry, RowHash> entries;
  RowSet visible;
  struct Index {
    std::vector<size_t> positions;
    std::unordered_map<Row, RowSet, RowHash> buckets;
  };
  std::unordered_map<uint64_t, Index> indexes;

  Index& index(const std::vector<size_t>& positions) {
    uint64_t m = mask_of(positions);
    auto it = indexes.find(m);
    if (it != indexes.end()) return it->second;
    Index& ix = indexes[m];
    ix.positions = positions;
    for (const auto& r : visible) ix.buckets[project(r, positions)].insert(r);
    return ix;
  }

  void show(const Row& r) {
    visible.insert(r);
    for (auto& [_, ix] : indexes) ix.buckets[project(r, ix.positions)].insert(r);
  }
  void hide(const Row& r) {
    visible.erase(r);
    for (auto& [_, ix] : indexes) {
      auto it = ix.buckets.find(project(r, ix.positions));
      if (it == ix.buckets.end()) continue;
      it->second.erase(r);
      if (it->second.empty()) ix.buckets.erase(it);
    }
  }
};

struct Item {
  enum class Kind { Derive, Base, Upsert } kind = Kind::Derive;
  std::string pred;
  Row row;
  int sign = 1;
};

struct AggGroup {
  std::map<Value, int64_t> values;  // value -> multiplicity
  int64_t mult = 0;
  std::optional<Value> out;
};

struct RuleInfo {
  CRule rule;
  bool event = false;
  std::set<size_t> event_triggers;  // body predicate indices that fire an event rule
  int head_scc = -1;
  std::map<Row, AggGroup> groups;
};

Value aggregate(ast::AggFn fn, const AggGroup& g) {
  switch (fn) {
    case ast::AggFn::Count: return g.mult;
    case ast::AggFn::Unique: return static_cast<int64_t>(g.values.size());
    case ast::AggFn::Min: return g.values.begin()->first;
    case ast::AggFn::Max: return g.values.rbegin()->first;
    case ast::AggFn::Sum:
    case ast::AggFn::SumAbs: {
      int64_t s = 0;
      for (const auto& [v, m] : g.values) {
        int64_t x = v.as_int();
        s += (fn == ast::AggFn::SumAbs ? std::llabs(x) : x) * m;
      }
      return s;
    }
    case ast::AggFn::Stdev: {
      double n = 0, s = 0, sq = 0;
      for (const auto& [v, m] : g.values) {
        double x = static_cast<double>(v.as_int());
        n += m;
        s += x * m;
        sq += x * x * m;
      }
      double var = std::max(0.0, sq / n - (s / n) * (s / n));
      return static_cast<int64_t>(std::llround(std::sqrt(var)));
    }
  }
  return int64_t{0};
}

}  // namespace

struct Store::Impl {
  StoreOptions opts;
  std::map<std::string, Table> tables;
  std::vector<RuleInfo> rules;
  std::map<std::string, std::vector<std::pair<size_t, size_t>>> uses;  // pred -> (rule, literal)
  std::set<std::string> located;
  std::map<std::string, std::vector<size_t>> keys;
  std::set<std::string> var_tables;
  std::map<std::string, int> scc_of;
  std::vector<bool> scc_recursive;
  std::set<int> scc_dirty;
  std::deque<Item> queue;
  std::vector<Change> changes;
  std::unordered_map<Tuple, int64_t, TupleHash> remote_support;
  std::vector<FactOp> outbox;
  uint64_t derivations = 0;
  bool registered = false;

  Table& table(const std::string& pred) { return tables[pred]; }

  bool is_remote(const std::string& pred, const Row& row) const {
    return opts.local && located.count(pred) && !row.empty() && row[0] != *opts.local;
  }

  void count_derivation() {
    if (++derivations > opts.max_derivations)
      throw Error("derivation budget exceeded (" + std::to_string(opts.max_derivations) +
                  "); the program may not terminate");
  }

  // --- scans -------------------------------------------------------------

  struct ScanContext {
    const std::string* delta_pred = nullptr;
    const Row* delta_row = nullptr;
    int sign = 0;
    int trigger = -1;
    const std::map<std::string, RowSet>* override_tables = nullptr;
    std::vector<const Row*> matched;  // per body predicate
  };

  template <class F>
  void scan(const std::string& pred, const std::vector<size_t>& positions, const Row& key,
            const ScanContext& ctx, F&& fn) {
    if (ctx.override_tables) {
      auto it = ctx.override_tables->find(pred);
      if (it != ctx.override_tables->end()) {
        for (const auto& r : it->second)
          if (project(r, positions) == key) fn(r);
        return;
      }
    }
    auto tit = tables.find(pred);
    if (tit == tables.end()) return;
    Table& t = tit->second;
    if (positions.empty()) {
      std::vector<const Row*> snapshot;
      snapshot.reserve(t.visible.size());
      for (const auto& r : t.visible) snapshot.push_back(&r);
      for (const Row* r : snapshot) fn(*r);
      return;
    }
    if (t.arity && positions.size() == t.arity) {
      auto e = t.visible.find(key);
      if (e != t.visible.end()) fn(*e);
      return;
    }
    auto& ix = t.index(positions);
    auto b = ix.buckets.find(key);
    if (b == ix.buckets.end()) return;
    for (const auto& r : b->second) fn(r);
  }

  bool unify(const detail::CPred& p, const Row& row, Binding& b) const {
    if (row.size() != p.args.size()) return false;
    for (size_t i = 0; i < row.size(); ++i) {
      const CExpr& a = p.args[i];
      if (a.kind == CExpr::Kind::Slot && !b[a.slot]) {
        b[a.slot] = row[i];
      } else if (detail::eval(a, b, opts.consts) != row[i]) {
        return false;
      }
    }
    return true;
  }

  void exec(const CRule& r, const std::vector<Step>& steps, size_t k, Binding& b, ScanContext& ctx,
            const std::function<void(const Binding&)>& out) {
    if (k == steps.size()) {
      out(b);
      return;
    }
    const Step& s = steps[k];
    switch (s.kind) {
      case Step::Kind::Filter:
        if (detail::truthy(detail::eval(r.exprs[s.index], b, opts.consts))) exec(r, steps, k + 1, b, ctx, out);
        return;
      case Step::Kind::Assign: {
        const CExpr& src = r.exprs[s.index].args[s.source];
        b[s.slot] = detail::eval(src, b, opts.consts);
        exec(r, steps, k + 1, b, ctx, out);
        b[s.slot].reset();
        return;
      }
      case Step::Kind::Pred: {
        const auto& p = r.preds[s.index];
        Row key;
        key.reserve(s.key_positions.size());
        for (size_t pos : s.key_positions) key.push_back(detail::eval(p.args[pos], b, opts.consts));
        const bool adjust = ctx.delta_pred && *ctx.delta_pred == p.name && s.index > ctx.trigger;
        auto visit = [&](const Row& row) {
          if (adjust && ctx.sign > 0 && row == *ctx.delta_row) return;  // old state lacks the new tuple
          Binding nb = b;
          if (!unify(p, row, nb)) return;
          ctx.matched[s.index] = &row;
          exec(r, steps, k + 1, nb, ctx, out);
        };
        scan(p.name, s.key_positions, key, ctx, visit);
        if (adjust && ctx.sign < 0 && project(*ctx.delta_row, s.key_positions) == key)
          visit(*ctx.delta_row);  // old state still holds the deleted tuple
        return;
      }
    }
  }

  Row head_row(const CRule& r, const Binding& b) const {
    Row row;
    row.reserve(r.head.args.size());
    for (const auto& a : r.head.args) row.push_back(detail::eval(a, b, opts.consts));
    return row;
  }

  // --- updates -----------------------------------------------------------

  void enqueue(Item it) { queue.push_back(std::move(it)); }

  void emit(RuleInfo& ri, const Binding& b, int sign) {
    const CRule& r = ri.rule;
    Row row = head_row(r, b);
    if (!r.agg) {
      enqueue({Item::Kind::Derive, r.head.name, std::move(row), sign});
      return;
    }
    const size_t pos = r.agg->position;
    Value v = row[pos];
    Row group = row;
    group.erase(group.begin() + static_cast<long>(pos));
    AggGroup& g = ri.groups[group];
    if (r.agg->fn != ast::AggFn::Count && r.agg->fn != ast::AggFn::Unique && !v.is_int())
      throw Error("rule '" + r.label + "': aggregate over a non-integer value");
    int64_t& m = g.values[v];
    m += sign;
    if (m == 0) g.values.erase(v);
    g.mult += sign;
    std::optional<Value> next;
    if (g.mult > 0 && !g.values.empty()) next = aggregate(r.agg->fn, g);
    if (next == g.out) {
      if (g.mult <= 0 && g.values.empty()) ri.groups.erase(group);
      return;
    }
    auto with = [&](const Value& x) {
      Row h = group;
      h.insert(h.begin() + static_cast<long>(pos), x);
      return h;
    };
    if (g.out) enqueue({Item::Kind::Derive, r.head.name, with(*g.out), -1});
    if (next) enqueue({Item::Kind::Derive, r.head.name, with(*next), +1});
    g.out = next;
    if (!next && g.values.empty()) ri.groups.erase(group);
  }

  void fire_event(RuleInfo& ri, size_t lit, const Row& row) {
    const CRule& r = ri.rule;
    Binding b(r.nslots);
    if (!unify(r.preds[lit], row, b)) return;
    ScanContext ctx;
    ctx.matched.assign(r.preds.size(), nullptr);
    ctx.matched[lit] = &row;
    int self = -1;
    // a var-table head is a new tuple (symmetry), any other head rewrites the matched fact
    if (!var_tables.count(r.head.name))
      for (size_t j = 0; j < r.preds.size(); ++j)
        if (r.preds[j].name == r.head.name) self = static_cast<int>(j);
    std::vector<std::pair<std::optional<Row>, Row>> updates;
    exec(r, r.trigger_plans[lit], 0, b, ctx, [&](const Binding& full) {
      std::optional<Row> old;
      if (self >= 0) old = *ctx.matched[self];
      updates.emplace_back(old, head_row(r, full));
    });
    for (auto& [old, next] : updates) {
      if (old && *old == next) continue;
      if (is_remote(r.head.name, next)) {
        outbox.push_back({keys.count(r.head.name) ? OpKind::Upsert : OpKind::Insert, {r.head.name, next}});
        continue;
      }
      if (old) {
        enqueue({Item::Kind::Base, r.head.name, *old, -1});
        enqueue({Item::Kind::Base, r.head.name, std::move(next), +1});
      } else if (keys.count(r.head.name)) {
        enqueue({Item::Kind::Upsert, r.head.name, std::move(next), +1});
      } else {
        enqueue({Item::Kind::Base, r.head.name, std::move(next), +1});
      }
    }
  }

  void fire(const std::string& pred, const Row& row, int sign, int skip_scc) {
    auto it = uses.find(pred);
    if (it == uses.end()) return;
    for (auto [ri_index, lit] : it->second) {
      RuleInfo& ri = rules[ri_index];
      if (ri.event) {
        if (sign > 0 && ri.event_triggers.count(lit)) fire_event(ri, lit, row);
        continue;
      }
      if (skip_scc >= 0 && ri.head_scc == skip_scc) continue;
      const CRule& r = ri.rule;
      Binding b(r.nslots);
      if (!unify(r.preds[lit], row, b)) continue;
      ScanContext ctx;
      ctx.delta_pred = &pred;
      ctx.delta_row = &row;
      ctx.sign = sign;
      ctx.trigger = static_cast<int>(lit);
      ctx.matched.assign(r.preds.size(), nullptr);
      std::vector<Binding> found;
      exec(r, r.trigger_plans[lit], 0, b, ctx, [&](const Binding& full) { found.push_back(full); });
      for (const auto& f : found) emit(ri, f, sign);
    }
  }

  void set_visibility(const std::string& pred, Table& t, const Row& row, bool was, bool now, int skip_scc) {
    if (was == now) return;
    const int sign = now ? 1 : -1;
    if (now) {
      t.show(row);
    } else {
      t.hide(row);
    }
    changes.push_back({{pred, row}, sign});
    fire(pred, row, sign, skip_scc);
  }

  void touch_arity(Table& t, const std::string& pred, size_t n) {
    if (t.arity == 0 && t.entries.empty()) t.arity = n;
    if (t.arity != n)
      throw Error("arity mismatch for predicate " + pred + ": " + std::to_string(n) + " vs " +
                  std::to_string(t.arity));
  }

  void adjust(const std::string& pred, const Row& row, int64_t dcount, int64_t dbase) {
    Table& t = table(pred);
    touch_arity(t, pred, row.size());
    if (dcount < 0) {
      // Inside a cycle, counting deletions can chase self-support forever;
      // the stratum is re-derived at quiescence instead.
      auto s = scc_of.find(pred);
      if (s != scc_of.end() && scc_recursive[s->second]) {
        scc_dirty.insert(s->second);
        auto e = t.entries.find(row);
        if (e != t.entries.end()) e->second.base += dbase;
        return;
      }
    }
    Entry& e = t.entries[row];
    const bool was = e.count > 0;
    e.count += dcount;
    e.base += dbase;
    const bool now = e.count > 0;
    if (e.count == 0 && e.base == 0) t.entries.erase(row);
    set_visibility(pred, t, row, was, now, -1);
  }

  void process(Item& it) {
    count_derivation();
    switch (it.kind) {
      case Item::Kind::Derive: {
        if (is_remote(it.pred, it.row)) {
          Tuple tup{it.pred, it.row};
          int64_t& c = remote_support[tup];
          const bool was = c > 0;
          c += it.sign;
          const bool now = c > 0;
          if (c == 0) remote_support.erase(tup);
          if (was != now) outbox.push_back({now ? OpKind::Insert : OpKind::Delete, std::move(tup)});
          return;
        }
        adjust(it.pred, it.row, it.sign, 0);
        return;
      }
      case Item::Kind::Base: {
        if (is_remote(it.pred, it.row)) {
          outbox.push_back({it.sign > 0 ? OpKind::Insert : OpKind::Delete, {it.pred, it.row}});
          return;
        }
        if (it.sign < 0) {
          auto& t = table(it.pred);
          auto e = t.entries.find(it.row);
          if (e == t.entries.end() || e->second.base <= 0) return;  // not a base fact: no-op
        }
        adjust(it.pred, it.row, it.sign, it.sign);
        return;
      }
      case Item::Kind::Upsert: {
        if (is_remote(it.pred, it.row)) {
          outbox.push_back({OpKind::Upsert, {it.pred, it.row}});
          return;
        }
        Table& t = table(it.pred);
        touch_arity(t, it.pred, it.row.size());
        const auto positions = key_positions(it.pred, it.row.size());
        const Row key = project(it.row, positions);
        std::vector<std::pair<Row, int64_t>> stale;
        for (const auto& [row, e] : t.entries)
          if (e.base > 0 && row != it.row && project(row, positions) == key) stale.emplace_back(row, e.base);
        std::sort(stale.begin(), stale.end());
        for (const auto& [row, base] : stale) adjust(it.pred, row, -base, -base);
        auto e = t.entries.find(it.row);
        if (e == t.entries.end() || e->second.base == 0) adjust(it.pred, it.row, 1, 1);
        return;
      }
    }
  }

  std::vector<size_t> key_positions(const std::string& pred, size_t arity) const {
    auto it = keys.find(pred);
    if (it != keys.end()) return it->second;
    std::vector<size_t> all(arity);
    for (size_t i = 0; i < arity; ++i) all[i] = i;
    return all;
  }

  // --- recursive strata ----------------------------------------------------

  void recompute(int scc) {
    std::map<std::string, RowSet> temp;
    for (const auto& [pred, s] : scc_of)
      if (s == scc) {
        auto& dst = temp[pred];
        auto t = tables.find(pred);
        if (t == tables.end()) continue;
        for (const auto& [row, e] : t->second.entries)
          if (e.base > 0) dst.insert(row);
      }
    std::vector<size_t> members;
    for (size_t i = 0; i < rules.size(); ++i)
      if (!rules[i].event && rules[i].head_scc == scc) members.push_back(i);

    auto run_rule = [&](size_t i, const std::function<void(Row)>& out) {
      const CRule& r = rules[i].rule;
      Binding b(r.nslots);
      ScanContext ctx;
      ctx.override_tables = &temp;
      ctx.matched.assign(r.preds.size(), nullptr);
      exec(r, r.full_plan, 0, b, ctx, [&](const Binding& full) {
        count_derivation();
        out(head_row(r, full));
      });
    };
    for (bool grew = true; grew;) {
      grew = false;
      for (size_t i : members) {
        std::vector<Row> fresh;
        run_rule(i, [&](Row row) {
          if (!temp[rules[i].rule.head.name].count(row)) fresh.push_back(std::move(row));
        });
        for (auto& row : fresh) grew |= temp[rules[i].rule.head.name].insert(std::move(row)).second;
      }
    }
    std::map<std::string, std::unordered_map<Row, int64_t, RowHash>> tally;
    for (size_t i : members)
      run_rule(i, [&](Row row) { ++tally[rules[i].rule.head.name][std::move(row)]; });

    struct Fix {
      std::string pred;
      Row row;
      int64_t count;
    };
    std::vector<Fix> fixes;
    for (const auto& [pred, rows] : temp) {
      Table& t = table(pred);
      std::set<Row> all;
      for (const auto& [row, _] : t.entries) all.insert(row);
      for (const auto& row : rows) all.insert(row);
      for (const auto& row : all) {
        int64_t base = 0;
        auto e = t.entries.find(row);
        if (e != t.entries.end()) base = e->second.base;
        int64_t c = base;
        auto tp = tally.find(pred);
        if (rows.count(row) && tp != tally.end()) {
          auto x = tp->second.find(row);
          if (x != tp->second.end()) c += x->second;
        }
        fixes.push_back({pred, row, c});
      }
    }
    for (auto& f : fixes) {
      Table& t = table(f.pred);
      touch_arity(t, f.pred, f.row.size());
      Entry& e = t.entries[f.row];
      const bool was = e.count > 0;
      e.count = f.count;
      const bool now = e.count > 0;
      if (e.count == 0 && e.base == 0) t.entries.erase(f.row);
      set_visibility(f.pred, t, f.row, was, now, scc);
    }
  }

  void compute_sccs() {
    std::map<std::string, std::set<std::string>> graph;
    std::set<std::string> nodes;
    for (const auto& ri : rules) {
      if (ri.event) continue;
      nodes.insert(ri.rule.head.name);
      for (const auto& p : ri.rule.preds) {
        nodes.insert(p.name);
        graph[p.name].insert(ri.rule.head.name);
      }
    }
    std::map<std::string, int> index, low;
    std::vector<std::string> stack;
    std::set<std::string> on_stack;
    int counter = 0, next_scc = 0;
    std::function<void(const std::string&)> visit = [&](const std::string& v) {
      index[v] = low[v] = counter++;
      stack.push_back(v);
      on_stack.insert(v);
      for (const auto& w : graph[v]) {
        if (!index.count(w)) {
          visit(w);
          low[v] = std::min(low[v], low[w]);
        } else if (on_stack.count(w)) {
          low[v] = std::min(low[v], index[w]);
        }
      }
      if (low[v] == index[v]) {
        std::vector<std::string> comp;
        for (;;) {
          std::string w = stack.back();
          stack.pop_back();
          on_stack.erase(w);
          comp.push_back(w);
          if (w == v) break;
        }
        bool recursive = comp.size() > 1 || graph[v].count(v);
        for (const auto& w : comp) scc_of[w] = next_scc;
        scc_recursive.push_back(recursive);
        ++next_scc;
      }
    };
    for (const auto& n : nodes)
      if (!index.count(n)) visit(n);
    for (auto& ri : rules) {
      if (ri.event) continue;
      ri.head_scc = scc_of[ri.rule.head.name];
      if (!ri.rule.agg || !scc_recursive[ri.head_scc]) continue;
      for (const auto& p : ri.rule.preds)
        if (scc_of[p.name] == ri.head_scc)
          throw Error("rule '" + ri.rule.label + "': aggregation inside a recursive cycle is not supported");
    }
  }
};

Store::Store(StoreOptions opts) : impl_(std::make_unique<Impl>()) { impl_->opts = std::move(opts); }
Store::~Store() = default;
Store::Store(Store&&) noexcept = default;
Store& Store::operator=(Store&&) noexcept = default;

void Store::register_program(const AnnotatedProgram& a) {
  auto& m = *impl_;
  if (m.registered) throw Error("a program is already registered with this store");
  m.registered = true;
  m.located = a.located_predicates;
  m.var_tables = a.var_tables;
  for (const auto& v : a.program.vars) {
    const auto solver = v.solver_positions();
    std::vector<size_t> key;
    for (size_t i = 0; i < v.var.args.size(); ++i)
      if (std::find(solver.begin(), solver.end(), i) == solver.end()) key.push_back(i);
    m.keys[v.var.name] = key;
  }
  if (a.program.goal && a.program.goal->table) {
    const auto& t = *a.program.goal->table;
    std::vector<size_t> key;
    for (size_t i = 0; i < t.args.size(); ++i)
      if (!(t.args[i].is_var() && t.args[i].name == a.program.goal->attr)) key.push_back(i);
    m.keys[t.name] = key;
  }
  for (size_t i = 0; i < a.program.rules.size(); ++i) {
    const auto& r = a.program.rules[i];
    const RuleClass cls = a.class_of(i);
    if (cls != RuleClass::Regular && cls != RuleClass::SolutionUpdate) continue;
    RuleInfo ri;
    ri.rule = detail::compile_rule(r, rule_label(r, i));
    ri.event = cls == RuleClass::SolutionUpdate;
    if (ri.event) {
      if (ri.rule.agg) throw Error("rule '" + ri.rule.label + "': aggregates in update rules are not supported");
      for (size_t j = 0; j < ri.rule.preds.size(); ++j) {
        const auto& n = ri.rule.preds[j].name;
        if (a.solver_tables.count(n) && (n != ri.rule.head.name || a.var_tables.count(n))) ri.event_triggers.insert(j);
      }
    }
    m.rules.push_back(std::move(ri));
  }
  for (size_t i = 0; i < m.rules.size(); ++i)
    for (size_t j = 0; j < m.rules[i].rule.preds.size(); ++j) m.uses[m.rules[i].rule.preds[j].name].push_back({i, j});
  m.compute_sccs();
}

void Store::set_consts(Consts c) { impl_->opts.consts = std::move(c); }
const Consts& Store::consts() const { return impl_->opts.consts; }

void Store::apply(const FactOp& op) {
  Item it;
  it.pred = op.tuple.pred;
  it.row = op.tuple.values;
  switch (op.kind) {
    case OpKind::Insert: it.kind = Item::Kind::Base; it.sign = 1; break;
    case OpKind::Delete: it.kind = Item::Kind::Base; it.sign = -1; break;
    case OpKind::Upsert: it.kind = Item::Kind::Upsert; it.sign = 1; break;
  }
  impl_->enqueue(std::move(it));
}

std::vector<Change> Store::run_to_fixpoint() {
  auto& m = *impl_;
  for (;;) {
    while (!m.queue.empty()) {
      Item it = std::move(m.queue.front());
      m.queue.pop_front();
      m.process(it);
    }
    if (m.scc_dirty.empty()) break;
    int scc = *m.scc_dirty.begin();
    m.scc_dirty.erase(m.scc_dirty.begin());
    m.recompute(scc);
  }
  return std::exchange(m.changes, {});
}

bool Store::pending() const { return !impl_->queue.empty(); }

bool Store::contains(const Tuple& t) const {
  auto it = impl_->tables.find(t.pred);
  return it != impl_->tables.end() && it->second.visible.count(t.values);
}

std::vector<Row> Store::rows(const std::string& pred) const {
  std::vector<Row> out;
  auto it = impl_->tables.find(pred);
  if (it == impl_->tables.end()) return out;
  out.assign(it->second.visible.begin(), it->second.visible.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Tuple> Store::all_tuples() const {
  std::vector<Tuple> out;
  for (const auto& [pred, _] : impl_->tables)
    for (auto& r : rows(pred)) out.push_back({pred, std::move(r)});
  return out;
}

std::set<std::string> Store::predicates() const {
  std::set<std::string> out;
  for (const auto& [pred, t] : impl_->tables)
    if (!t.visible.empty()) out.insert(pred);
  return out;
}

int64_t Store::derivation_count(const Tuple& t) const {
  auto it = impl_->tables.find(t.pred);
  if (it == impl_->tables.end()) return 0;
  auto e = it->second.entries.find(t.values);
  return e == it->second.entries.end() ? 0 : e->second.count;
}

int64_t Store::base_count(const Tuple& t) const {
  auto it = impl_->tables.find(t.pred);
  if (it == impl_->tables.end()) return 0;
  auto e = it->second.entries.find(t.values);
  return e == it->second.entries.end() ? 0 : e->second.base;
}

std::vector<FactOp> Store::take_outbox() { return std::exchange(impl_->outbox, {}); }

uint64_t Store::derivations() const { return impl_->derivations; }

std::vector<size_t> Store::key_positions(const std::string& pred, size_t arity) const {
  return impl_->key_positions(pred, arity);
}

}  // namespace cologne::datalog
