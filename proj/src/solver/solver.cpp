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

#include "cologne/solver.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <chrono>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "cologne/value.hpp"

namespace cologne::solver {

// --- model ----------------------------------------------------------------

LinExpr LinExpr::of(int64_t c) {
  LinExpr e;
  e.constant = c;
  return e;
}

LinExpr LinExpr::var(int v, int64_t coef) {
  LinExpr e;
  if (coef != 0) e.terms.push_back({v, coef});
  return e;
}

LinExpr& LinExpr::add(const LinExpr& o, int64_t scale) {
  constant += scale * o.constant;
  std::vector<LinTerm> merged;
  merged.reserve(terms.size() + o.terms.size());
  size_t i = 0, j = 0;
  while (i < terms.size() || j < o.terms.size()) {
    if (j == o.terms.size() || (i < terms.size() && terms[i].var < o.terms[j].var)) {
      merged.push_back(terms[i++]);
    } else if (i == terms.size() || o.terms[j].var < terms[i].var) {
      merged.push_back({o.terms[j].var, scale * o.terms[j].coef});
      ++j;
    } else {
      int64_t c = terms[i].coef + scale * o.terms[j].coef;
      if (c != 0) merged.push_back({terms[i].var, c});
      ++i;
      ++j;
    }
  }
  std::erase_if(merged, [](const LinTerm& t) { return t.coef == 0; });
  terms = std::move(merged);
  return *this;
}

LinExpr LinExpr::scaled(int64_t k) const {
  LinExpr e;
  return e.add(*this, k);
}

int64_t LinExpr::eval(const std::vector<int64_t>& values) const {
  int64_t s = constant;
  for (const auto& t : terms) s += t.coef * values.at(t.var);
  return s;
}

int Model::add_var(int64_t lo, int64_t hi, std::string name, bool decision) {
  if (lo > hi) throw Error("empty domain for variable " + name);
  vars.push_back({lo, hi, {}, std::move(name), decision});
  return static_cast<int>(vars.size()) - 1;
}

const char* con_kind_name(ConKind k) {
  switch (k) {
    case ConKind::LinearEq: return "linearEq";
    case ConKind::LinearLe: return "linearLe";
    case ConKind::LinearNe: return "linearNe";
    case ConKind::Reified: return "reified";
    case ConKind::ReifiedEquiv: return "reifiedEquiv";
    case ConKind::AbsValue: return "absValue";
    case ConKind::CountDistinct: return "countDistinctDef";
    case ConKind::ScaledVariance: return "scaledVarianceDef";
  }
  return "?";
}

const char* status_name(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::FeasibleTimeout: return "feasibleTimeout";
    case Status::Unsat: return "unsat";
    case Status::Unknown: return "unknown";
  }
  return "?";
}

namespace {

std::string lin_text(const LinExpr& e) {
  std::ostringstream os;
  bool first = true;
  for (const auto& t : e.terms) {
    if (!first) os << (t.coef < 0 ? " - " : " + ");
    else if (t.coef < 0) os << '-';
    int64_t c = t.coef < 0 ? -t.coef : t.coef;
    if (c != 1) os << c << '*';
    os << 'x' << t.var;
    first = false;
  }
  if (first) return std::to_string(e.constant);
  if (e.constant > 0) os << " + " << e.constant;
  if (e.constant < 0) os << " - " << -e.constant;
  return os.str();
}

const char* rel_text(Rel r) { return r == Rel::Le ? "<=" : r == Rel::Eq ? "==" : "!="; }

}  // namespace

std::string Model::dump() const {
  std::ostringstream os;
  os << "# cologne-model v1\n";
  for (size_t i = 0; i < vars.size(); ++i) {
    const auto& v = vars[i];
    os << "var x" << i << " [" << v.lo << "," << v.hi << "]";
    if (!v.excluded.empty()) {
      os << " \\ {";
      for (size_t k = 0; k < v.excluded.size(); ++k) os << (k ? "," : "") << v.excluded[k];
      os << "}";
    }
    os << (v.decision ? " decision " : " aux ") << v.name << '\n';
  }
  for (const auto& c : constraints) {
    os << "con " << con_kind_name(c.kind) << ' ';
    switch (c.kind) {
      case ConKind::LinearEq: os << lin_text(c.lin) << " == 0"; break;
      case ConKind::LinearLe: os << lin_text(c.lin) << " <= 0"; break;
      case ConKind::LinearNe: os << lin_text(c.lin) << " != 0"; break;
      case ConKind::Reified: os << 'x' << c.result << " <-> (" << lin_text(c.lin) << ' ' << rel_text(c.rel) << " 0)"; break;
      case ConKind::ReifiedEquiv:
        if (c.result >= 0) os << 'x' << c.result << " <-> ";
        os << "(x" << c.a << " <-> x" << c.b << ')';
        break;
      case ConKind::AbsValue: os << 'x' << c.result << " == |x" << c.a << '|'; break;
      case ConKind::CountDistinct:
        os << 'x' << c.result << " == distinct(";
        for (size_t k = 0; k < c.vars.size(); ++k) os << (k ? "," : "") << 'x' << c.vars[k];
        os << ") over {";
        for (size_t k = 0; k < c.universe.size(); ++k) os << (k ? "," : "") << c.universe[k];
        os << '}';
        break;
      case ConKind::ScaledVariance:
        os << 'x' << c.result << " == scaledVariance(";
        for (size_t k = 0; k < c.members.size(); ++k) os << (k ? "; " : "") << lin_text(c.members[k]);
        os << ')';
        break;
    }
    if (!c.origin.empty()) os << "  # " << c.origin;
    os << '\n';
  }
  if (objective)
    os << "objective " << (objective->sense == Sense::Minimize ? "minimize " : "maximize ") << lin_text(objective->expr)
       << '\n';
  else
    os << "objective satisfy\n";
  if (trivially_unsat) os << "# trivially unsat: " << unsat_reason << '\n';
  return os.str();
}

SolveOptions SolveOptions::from(const Config& c) {
  SolveOptions o;
  o.budget_millis = c.budget_millis;
  o.branching = c.branching;
  o.value_order = c.value_order;
  return o;
}

// --- independent checker --------------------------------------------------

namespace {

int64_t scaled_variance(const std::vector<int64_t>& xs) {
  const int64_t n = static_cast<int64_t>(xs.size());
  int64_t s = 0;
  for (int64_t x : xs) s += x;
  int64_t out = 0;
  for (int64_t x : xs) out += (n * x - s) * (n * x - s);
  return out;
}

bool holds(Rel r, int64_t v) { return r == Rel::Le ? v <= 0 : r == Rel::Eq ? v == 0 : v != 0; }

}  // namespace

std::vector<std::string> check_assignment(const Model& m, const std::vector<int64_t>& x) {
  std::vector<std::string> bad;
  if (x.size() != m.vars.size()) {
    bad.push_back("assignment has " + std::to_string(x.size()) + " values for " + std::to_string(m.vars.size()) +
                  " variables");
    return bad;
  }
  for (size_t i = 0; i < x.size(); ++i) {
    const auto& v = m.vars[i];
    if (x[i] < v.lo || x[i] > v.hi || std::count(v.excluded.begin(), v.excluded.end(), x[i]))
      bad.push_back("x" + std::to_string(i) + "=" + std::to_string(x[i]) + " outside its domain");
  }
  auto val = [&](int v) { return x.at(v); };
  for (size_t k = 0; k < m.constraints.size(); ++k) {
    const auto& c = m.constraints[k];
    bool ok = true;
    switch (c.kind) {
      case ConKind::LinearEq: ok = c.lin.eval(x) == 0; break;
      case ConKind::LinearLe: ok = c.lin.eval(x) <= 0; break;
      case ConKind::LinearNe: ok = c.lin.eval(x) != 0; break;
      case ConKind::Reified: ok = val(c.result) == (holds(c.rel, c.lin.eval(x)) ? 1 : 0); break;
      case ConKind::ReifiedEquiv: {
        bool same = (val(c.a) != 0) == (val(c.b) != 0);
        ok = c.result < 0 ? same : val(c.result) == (same ? 1 : 0);
        break;
      }
      case ConKind::AbsValue: ok = val(c.result) == std::abs(val(c.a)); break;
      case ConKind::CountDistinct: {
        std::set<int64_t> seen;
        for (int v : c.vars) seen.insert(val(v));
        ok = val(c.result) == static_cast<int64_t>(seen.size());
        break;
      }
      case ConKind::ScaledVariance: {
        std::vector<int64_t> xs;
        for (const auto& e : c.members) xs.push_back(e.eval(x));
        ok = val(c.result) == scaled_variance(xs);
        break;
      }
    }
    if (!ok) bad.push_back("constraint " + std::to_string(k) + " (" + con_kind_name(c.kind) + ", " + c.origin + ") violated");
  }
  return bad;
}

// --- search engine ----------------------------------------------------------

namespace {

using Clock = std::chrono::steady_clock;

int64_t floor_div(int64_t a, int64_t b) {
  int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}
int64_t ceil_div(int64_t a, int64_t b) { return -floor_div(-a, b); }

constexpr int64_t kSmallDomain = 256;

struct Dom {
  int64_t lo = 0, hi = 0;
  int64_t off = 0;
  bool bits_on = false;
  std::array<uint64_t, 4> bits{};

  bool bit(int64_t v) const {
    int64_t i = v - off;
    return (bits[static_cast<size_t>(i >> 6)] >> (i & 63)) & 1;
  }
  bool contains(int64_t v) const { return v >= lo && v <= hi && (!bits_on || bit(v)); }
  bool fixed() const { return lo == hi; }
  int64_t size() const {
    if (!bits_on) return hi - lo + 1;
    int64_t n = 0;
    for (int64_t v = lo; v <= hi; ++v) n += bit(v);
    return n;
  }
  void normalize() {
    if (!bits_on) return;
    while (lo <= hi && !bit(lo)) ++lo;
    while (hi >= lo && !bit(hi)) --hi;
  }
};

struct Item {
  int64_t a = 0;
  int x = -1;
  int64_t ca = 0;  // coefficient of |x| when the expression also holds y = |x|
  int y = -1;
};

struct Prop {
  enum class Kind { Le, Ne, Reified, Equiv, Abs, Count, Variance, Objective } kind;
  std::vector<Item> items;
  int64_t c = 0;
  Rel rel = Rel::Le;
  int r = -1, a = -1, b = -1;
  std::vector<int> vars;
  std::vector<int64_t> universe;
  std::vector<std::vector<Item>> members;
  std::vector<int64_t> member_consts;
  std::optional<int64_t> fixed_sum;
};

class Engine {
public:
  Engine(const Model& m, const SolveOptions& o) : m_(m), opts_(o), start_(Clock::now()) {}

  Solution run() {
    Solution sol;
    if (m_.trivially_unsat) {
      sol.status = Status::Unsat;
      return sol;
    }
    init_domains();
    build();
    bool ok = propagate_all();
    if (ok) search(sol);
    sol.nodes = nodes_;
    sol.failures = failures_;
    sol.solve_millis = std::chrono::duration<double, std::milli>(Clock::now() - start_).count();
    if (found_) {
      sol.values = best_;
      if (m_.objective) sol.objective = m_.objective->expr.eval(best_);
      sol.status = stopped_ ? Status::FeasibleTimeout : Status::Optimal;
    } else {
      sol.status = stopped_ ? Status::Unknown : Status::Unsat;
    }
    return sol;
  }

private:
  // domain updates --------------------------------------------------------
  bool changed(int v, const Dom& old) {
    trail_.emplace_back(v, old);
    for (int p : watch_[v]) schedule(p);
    return doms_[v].lo <= doms_[v].hi;
  }
  bool set_min(int v, int64_t x) {
    Dom& d = doms_[v];
    if (x <= d.lo) return true;
    Dom old = d;
    d.lo = x;
    d.normalize();
    return changed(v, old);
  }
  bool set_max(int v, int64_t x) {
    Dom& d = doms_[v];
    if (x >= d.hi) return true;
    Dom old = d;
    d.hi = x;
    d.normalize();
    return changed(v, old);
  }
  bool remove(int v, int64_t x) {
    Dom& d = doms_[v];
    if (!d.contains(x)) return true;
    if (x == d.lo) return set_min(v, x + 1);
    if (x == d.hi) return set_max(v, x - 1);
    if (!d.bits_on) return true;  // interval domains cannot hold holes
    Dom old = d;
    int64_t i = x - d.off;
    d.bits[static_cast<size_t>(i >> 6)] &= ~(uint64_t{1} << (i & 63));
    return changed(v, old);
  }
  bool fix(int v, int64_t x) {
    if (!doms_[v].contains(x)) {
      Dom old = doms_[v];
      doms_[v].lo = 1;
      doms_[v].hi = 0;
      trail_.emplace_back(v, old);
      return false;
    }
    return set_min(v, x) && set_max(v, x);
  }

  void schedule(int p) {
    if (queued_[p]) return;
    queued_[p] = true;
    queue_.push_back(p);
  }

  void init_domains() {
    doms_.resize(m_.vars.size());
    for (size_t i = 0; i < m_.vars.size(); ++i) {
      const auto& v = m_.vars[i];
      Dom d;
      d.lo = v.lo;
      d.hi = v.hi;
      d.off = v.lo;
      if (v.hi - v.lo < kSmallDomain) {
        d.bits_on = true;
        for (int64_t k = 0; k <= v.hi - v.lo; ++k) d.bits[static_cast<size_t>(k >> 6)] |= uint64_t{1} << (k & 63);
        for (int64_t e : v.excluded)
          if (e >= v.lo && e <= v.hi) d.bits[static_cast<size_t>((e - v.lo) >> 6)] &= ~(uint64_t{1} << ((e - v.lo) & 63));
        d.normalize();
      }
      doms_[i] = d;
    }
    watch_.assign(m_.vars.size(), {});
  }

  // model compilation ------------------------------------------------------
  std::vector<Item> items_of(const LinExpr& e, bool pair_abs) const {
    std::vector<Item> out;
    std::map<int, size_t> at;
    for (const auto& t : e.terms) {
      at[t.var] = out.size();
      out.push_back({t.coef, t.var, 0, -1});
    }
    if (!pair_abs) return out;
    std::vector<bool> drop(out.size(), false);
    for (size_t i = 0; i < out.size(); ++i) {
      auto ab = abs_of_.find(out[i].x);
      if (ab == abs_of_.end()) continue;
      auto xi = at.find(ab->second);
      if (xi == at.end() || drop[xi->second] || out[xi->second].y >= 0) continue;
      out[xi->second].ca = out[i].a;
      out[xi->second].y = out[i].x;
      drop[i] = true;
    }
    std::vector<Item> kept;
    for (size_t i = 0; i < out.size(); ++i)
      if (!drop[i]) kept.push_back(out[i]);
    return kept;
  }

  int add_prop(Prop p) {
    props_.push_back(std::move(p));
    queued_.push_back(false);
    const int id = static_cast<int>(props_.size()) - 1;
    std::set<int> vs;
    const Prop& q = props_.back();
    for (const auto& it : q.items) {
      vs.insert(it.x);
      if (it.y >= 0) vs.insert(it.y);
    }
    for (int v : {q.r, q.a, q.b})
      if (v >= 0) vs.insert(v);
    for (int v : q.vars) vs.insert(v);
    for (const auto& mem : q.members)
      for (const auto& it : mem) vs.insert(it.x);
    for (int v : vs) watch_[v].push_back(id);
    return id;
  }

  std::optional<int64_t> invariant_sum(const LinExpr& total) const {
    std::map<int, int64_t> rem;
    for (const auto& t : total.terms) rem[t.var] = t.coef;
    int64_t k = total.constant;
    for (bool progress = true; progress && !rem.empty();) {
      progress = false;
      for (const auto& c : m_.constraints) {
        if (c.kind != ConKind::LinearEq || c.lin.terms.empty()) continue;
        const auto& first = c.lin.terms.front();
        auto f = rem.find(first.var);
        if (f == rem.end() || f->second % first.coef != 0) continue;
        int64_t lambda = f->second / first.coef;
        bool all = true;
        for (const auto& t : c.lin.terms) {
          auto r = rem.find(t.var);
          if (r == rem.end() || r->second != lambda * t.coef) {
            all = false;
            break;
          }
        }
        if (!all) continue;
        for (const auto& t : c.lin.terms) rem.erase(t.var);
        k -= lambda * c.lin.constant;
        progress = true;
      }
    }
    if (!rem.empty()) return std::nullopt;
    return k;
  }

  void build() {
    for (const auto& c : m_.constraints)
      if (c.kind == ConKind::AbsValue) abs_of_[c.result] = c.a;
    for (const auto& c : m_.constraints) {
      Prop p{};
      switch (c.kind) {
        case ConKind::LinearLe:
          p.kind = Prop::Kind::Le;
          p.items = items_of(c.lin, true);
          p.c = c.lin.constant;
          add_prop(std::move(p));
          break;
        case ConKind::LinearEq: {
          p.kind = Prop::Kind::Le;
          p.items = items_of(c.lin, true);
          p.c = c.lin.constant;
          add_prop(p);
          Prop q{};
          q.kind = Prop::Kind::Le;
          LinExpr neg = c.lin.scaled(-1);
          q.items = items_of(neg, true);
          q.c = neg.constant;
          add_prop(std::move(q));
          break;
        }
        case ConKind::LinearNe:
          p.kind = Prop::Kind::Ne;
          p.items = items_of(c.lin, false);
          p.c = c.lin.constant;
          add_prop(std::move(p));
          break;
        case ConKind::Reified:
          p.kind = Prop::Kind::Reified;
          p.items = items_of(c.lin, false);
          p.c = c.lin.constant;
          p.rel = c.rel;
          p.r = c.result;
          if (!set_min(c.result, 0) || !set_max(c.result, 1)) infeasible_ = true;
          add_prop(std::move(p));
          break;
        case ConKind::ReifiedEquiv:
          p.kind = Prop::Kind::Equiv;
          p.r = c.result;
          p.a = c.a;
          p.b = c.b;
          add_prop(std::move(p));
          break;
        case ConKind::AbsValue:
          p.kind = Prop::Kind::Abs;
          p.r = c.result;
          p.a = c.a;
          add_prop(std::move(p));
          break;
        case ConKind::CountDistinct:
          p.kind = Prop::Kind::Count;
          p.r = c.result;
          p.vars = c.vars;
          p.universe = c.universe;
          std::sort(p.universe.begin(), p.universe.end());
          add_prop(std::move(p));
          break;
        case ConKind::ScaledVariance: {
          p.kind = Prop::Kind::Variance;
          p.r = c.result;
          LinExpr total;
          for (const auto& mem : c.members) {
            p.members.push_back(items_of(mem, false));
            p.member_consts.push_back(mem.constant);
            total.add(mem);
          }
          p.fixed_sum = invariant_sum(total);
          add_prop(std::move(p));
          break;
        }
      }
    }
    trail_.clear();  // root-level changes are permanent
    if (m_.objective) {
      Prop p{};
      p.kind = Prop::Kind::Objective;
      LinExpr e = m_.objective->sense == Sense::Minimize ? m_.objective->expr : m_.objective->expr.scaled(-1);
      p.items = items_of(e, true);
      p.c = e.constant;
      objective_prop_ = add_prop(std::move(p));
    }
    // branching order: declared variables first, then the rest by index
    for (size_t i = 0; i < m_.vars.size(); ++i)
      if (m_.vars[i].decision) order_.push_back(static_cast<int>(i));
    decisions_ = order_.size();
    for (size_t i = 0; i < m_.vars.size(); ++i)
      if (!m_.vars[i].decision) order_.push_back(static_cast<int>(i));
  }

  // propagators -----------------------------------------------------------
  int64_t item_min(const Item& it) const {
    const Dom& d = doms_[it.x];
    auto f = [&](int64_t v) { return it.a * v + it.ca * (v < 0 ? -v : v); };
    int64_t best = std::min(f(d.lo), f(d.hi));
    if (it.y >= 0 && d.lo < 0 && d.hi > 0) best = std::min(best, f(0));
    return best;
  }

  // enforces f(x) = a*x + ca*|x| <= s on x
  bool item_restrict(const Item& it, int64_t s) {
    const Dom& d = doms_[it.x];
    if (it.y < 0) {
      if (it.a > 0) return set_max(it.x, floor_div(s, it.a));
      if (it.a < 0) return set_min(it.x, ceil_div(s, it.a));
      return s >= 0;
    }
    int64_t nlo = std::numeric_limits<int64_t>::max(), nhi = std::numeric_limits<int64_t>::min();
    auto half = [&](int64_t lo, int64_t hi, int64_t k) {
      if (lo > hi) return;
      if (k > 0) hi = std::min(hi, floor_div(s, k));
      else if (k < 0) lo = std::max(lo, ceil_div(s, k));
      else if (s < 0) return;
      if (lo > hi) return;
      nlo = std::min(nlo, lo);
      nhi = std::max(nhi, hi);
    };
    half(std::max<int64_t>(d.lo, 0), d.hi, it.a + it.ca);
    half(d.lo, std::min<int64_t>(d.hi, 0), it.a - it.ca);
    if (nlo > nhi) return fix(it.x, d.hi + 1);  // wipe out
    return set_min(it.x, nlo) && set_max(it.x, nhi);
  }

  bool prop_le(const std::vector<Item>& items, int64_t c) {
    int64_t lb = c;
    for (const auto& it : items) lb += item_min(it);
    if (lb > 0) return false;
    std::vector<int64_t> mins;
    mins.reserve(items.size());
    for (const auto& it : items) mins.push_back(item_min(it));
    for (size_t i = 0; i < items.size(); ++i)
      if (!item_restrict(items[i], mins[i] - lb)) return false;
    return true;
  }

  void lin_bounds(const std::vector<Item>& items, int64_t c, int64_t& lo, int64_t& hi) const {
    lo = hi = c;
    for (const auto& it : items) {
      const Dom& d = doms_[it.x];
      lo += it.a > 0 ? it.a * d.lo : it.a * d.hi;
      hi += it.a > 0 ? it.a * d.hi : it.a * d.lo;
    }
  }

  bool prop_ne(const std::vector<Item>& items, int64_t c) {
    int free = -1;
    int64_t rest = c;
    for (size_t i = 0; i < items.size(); ++i) {
      const Dom& d = doms_[items[i].x];
      if (d.fixed()) {
        rest += items[i].a * d.lo;
      } else if (free >= 0) {
        return true;
      } else {
        free = static_cast<int>(i);
      }
    }
    if (free < 0) return rest != 0;
    const Item& it = items[free];
    if (-rest % it.a != 0) return true;
    return remove(it.x, -rest / it.a);
  }

  bool prop_eq(const std::vector<Item>& items, int64_t c) {
    if (!prop_le(items, c)) return false;
    std::vector<Item> neg = items;
    for (auto& it : neg) it.a = -it.a;
    return prop_le(neg, -c);
  }

  bool prop_reified(const Prop& p) {
    int64_t lo, hi;
    lin_bounds(p.items, p.c, lo, hi);
    const Dom& r = doms_[p.r];
    bool can_true = true, can_false = true;
    switch (p.rel) {
      case Rel::Le: can_true = lo <= 0; can_false = hi > 0; break;
      case Rel::Eq: can_true = lo <= 0 && hi >= 0; can_false = !(lo == 0 && hi == 0); break;
      case Rel::Ne: can_true = !(lo == 0 && hi == 0); can_false = lo <= 0 && hi >= 0; break;
    }
    if (!can_true && !fix(p.r, 0)) return false;
    if (!can_false && !fix(p.r, 1)) return false;
    if (!r.fixed()) return true;
    const bool want = r.lo == 1;
    Rel rel = p.rel;
    if (!want) rel = rel == Rel::Le ? Rel::Le : rel == Rel::Eq ? Rel::Ne : Rel::Eq;
    if (!want && p.rel == Rel::Le) {  // not (lin <= 0)  <=>  -lin + 1 <= 0
      std::vector<Item> neg = p.items;
      for (auto& it : neg) it.a = -it.a;
      return prop_le(neg, -p.c + 1);
    }
    switch (rel) {
      case Rel::Le: return prop_le(p.items, p.c);
      case Rel::Eq: return prop_eq(p.items, p.c);
      case Rel::Ne: return prop_ne(p.items, p.c);
    }
    return true;
  }

  bool prop_equiv(const Prop& p) {
    const Dom& a = doms_[p.a];
    const Dom& b = doms_[p.b];
    auto truth = [](const Dom& d) -> int { return d.lo > 0 || d.hi < 0 ? 1 : (d.fixed() && d.lo == 0 ? 0 : -1); };
    int ta = truth(a), tb = truth(b);
    int need = 1;
    if (p.r >= 0) {
      const Dom& r = doms_[p.r];
      if (ta >= 0 && tb >= 0) return fix(p.r, ta == tb ? 1 : 0);
      if (!r.fixed()) return true;
      need = static_cast<int>(r.lo);
    }
    if (ta >= 0 && tb < 0) return need ? (ta ? remove(p.b, 0) : fix(p.b, 0)) : (ta ? fix(p.b, 0) : remove(p.b, 0));
    if (tb >= 0 && ta < 0) return need ? (tb ? remove(p.a, 0) : fix(p.a, 0)) : (tb ? fix(p.a, 0) : remove(p.a, 0));
    if (ta >= 0 && tb >= 0) return (ta == tb) == (need == 1);
    return true;
  }

  bool prop_abs(const Prop& p) {
    const int y = p.r, x = p.a;
    for (int round = 0; round < 2; ++round) {
      const Dom& dx = doms_[x];
      int64_t ylo = dx.lo > 0 ? dx.lo : dx.hi < 0 ? -dx.hi : 0;
      int64_t yhi = std::max(std::abs(dx.lo), std::abs(dx.hi));
      if (!set_min(y, std::max<int64_t>(ylo, 0)) || !set_max(y, yhi)) return false;
      const Dom& dy = doms_[y];
      if (!set_min(x, -dy.hi) || !set_max(x, dy.hi)) return false;
      const Dom& dx2 = doms_[x];
      if (dy.lo > 0) {
        if (dx2.lo > -dy.lo && !set_min(x, dy.lo)) return false;
        if (doms_[x].hi < dy.lo && !set_max(x, -dy.lo)) return false;
      }
      if (doms_[x].fixed()) return fix(y, std::abs(doms_[x].lo));
    }
    return true;
  }

  bool prop_count(const Prop& p) {
    std::set<int64_t> forced;
    int unfixed = 0;
    for (int v : p.vars) {
      if (doms_[v].fixed()) forced.insert(doms_[v].lo);
      else ++unfixed;
    }
    int64_t possible = 0;
    for (int64_t u : p.universe) {
      if (forced.count(u)) {
        ++possible;
        continue;
      }
      for (int v : p.vars)
        if (!doms_[v].fixed() && doms_[v].contains(u)) {
          ++possible;
          break;
        }
    }
    const int64_t nforced = static_cast<int64_t>(forced.size());
    if (!set_min(p.r, nforced) || !set_max(p.r, std::min<int64_t>(possible, nforced + unfixed))) return false;
    if (unfixed > 0 && doms_[p.r].hi == nforced) {
      for (int v : p.vars) {
        if (doms_[v].fixed()) continue;
        for (int64_t u = doms_[v].lo; u <= doms_[v].hi; ++u)
          if (!forced.count(u) && !remove(v, u)) return false;
      }
    }
    return true;
  }

  // lower bound of Σ (N x_i − S)² over the box, S restricted to [slo, shi]
  static double variance_bound(const std::vector<int64_t>& lo, const std::vector<int64_t>& hi, double slo, double shi) {
    const size_t n = lo.size();
    const double N = static_cast<double>(n);
    auto fixed_sum = [&](double s) {
      double tl = static_cast<double>(*std::min_element(lo.begin(), lo.end()));
      double th = static_cast<double>(*std::max_element(hi.begin(), hi.end()));
      for (int it = 0; it < 100; ++it) {
        double t = (tl + th) / 2, sum = 0;
        for (size_t i = 0; i < n; ++i) sum += std::clamp(t, static_cast<double>(lo[i]), static_cast<double>(hi[i]));
        if (sum < s) tl = t;
        else th = t;
      }
      double t = (tl + th) / 2, out = 0;
      for (size_t i = 0; i < n; ++i) {
        double xi = std::clamp(t, static_cast<double>(lo[i]), static_cast<double>(hi[i]));
        out += (N * xi - s) * (N * xi - s);
      }
      return out;
    };
    if (shi - slo < 0.5) return fixed_sum(slo);
    double a = slo, b = shi;
    for (int it = 0; it < 80; ++it) {
      double m1 = a + (b - a) / 3, m2 = b - (b - a) / 3;
      if (fixed_sum(m1) <= fixed_sum(m2)) b = m2;
      else a = m1;
    }
    return std::min({fixed_sum(slo), fixed_sum(shi), fixed_sum((a + b) / 2)});
  }

  bool prop_variance(const Prop& p) {
    const size_t n = p.members.size();
    std::vector<int64_t> lo(n), hi(n);
    bool all_fixed = true;
    for (size_t i = 0; i < n; ++i) {
      int64_t l, h;
      lin_bounds(p.members[i], p.member_consts[i], l, h);
      lo[i] = l;
      hi[i] = h;
      all_fixed &= l == h;
    }
    if (n == 0) return fix(p.r, 0);
    if (all_fixed) return fix(p.r, scaled_variance(lo));
    double slo = 0, shi = 0;
    for (size_t i = 0; i < n; ++i) {
      slo += static_cast<double>(lo[i]);
      shi += static_cast<double>(hi[i]);
    }
    if (p.fixed_sum) {
      double s = static_cast<double>(*p.fixed_sum);
      if (s < slo - 0.5 || s > shi + 0.5) return false;
      slo = shi = s;
    }
    double bound = variance_bound(lo, hi, slo, shi);
    int64_t ib = static_cast<int64_t>(std::ceil(bound - 1e-6 * std::max(1.0, bound)));
    return set_min(p.r, std::max<int64_t>(ib, 0));
  }

  bool run_prop(int id) {
    const Prop& p = props_[id];
    switch (p.kind) {
      case Prop::Kind::Le: return prop_le(p.items, p.c);
      case Prop::Kind::Ne: return prop_ne(p.items, p.c);
      case Prop::Kind::Reified: return prop_reified(p);
      case Prop::Kind::Equiv: return prop_equiv(p);
      case Prop::Kind::Abs: return prop_abs(p);
      case Prop::Kind::Count: return prop_count(p);
      case Prop::Kind::Variance: return prop_variance(p);
      case Prop::Kind::Objective:
        if (!bound_) return true;
        return prop_le(p.items, p.c - *bound_);
    }
    return true;
  }

  bool propagate() {
    while (!queue_.empty()) {
      int id = queue_.front();
      queue_.pop_front();
      queued_[id] = false;
      if (!run_prop(id)) {
        for (int q : queue_) queued_[q] = false;
        queue_.clear();
        return false;
      }
    }
    return true;
  }

  bool propagate_all() {
    if (infeasible_) return false;
    for (size_t i = 0; i < props_.size(); ++i) schedule(static_cast<int>(i));
    bool ok = propagate();
    trail_.clear();
    return ok;
  }

  // search ------------------------------------------------------------------
  void undo(size_t mark) {
    while (trail_.size() > mark) {
      auto& [v, d] = trail_.back();
      doms_[v] = d;
      trail_.pop_back();
    }
  }

  bool out_of_time() {
    if (stopped_) return true;
    if (opts_.max_nodes && nodes_ >= opts_.max_nodes) stopped_ = true;
    if (opts_.budget_millis > 0 && (nodes_ & 15) == 0) {
      auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start_).count();
      if (ms >= opts_.budget_millis) stopped_ = true;
    }
    return stopped_;
  }

  int pick() const {
    if (opts_.branching == Branching::FirstFail) {
      int best = -1;
      int64_t size = 0;
      for (size_t i = 0; i < decisions_; ++i) {
        int v = order_[i];
        if (doms_[v].fixed()) continue;
        int64_t s = doms_[v].size();
        if (best < 0 || s < size) {
          best = v;
          size = s;
        }
      }
      if (best >= 0) return best;
    }
    for (int v : order_)
      if (!doms_[v].fixed()) return v;
    return -1;
  }

  std::vector<int64_t> values_of(int v) const {
    std::vector<int64_t> vals;
    const Dom& d = doms_[v];
    for (int64_t x = d.lo; x <= d.hi; ++x) {
      if (d.contains(x)) vals.push_back(x);
      if (!d.bits_on && vals.size() > 1'000'000) throw Error("variable " + m_.vars[v].name + " has a huge domain to enumerate");
    }
    if (opts_.value_order == ValueOrder::Descending) std::reverse(vals.begin(), vals.end());
    if (opts_.value_order == ValueOrder::ZeroOut)
      std::stable_sort(vals.begin(), vals.end(), [](int64_t a, int64_t b) {
        return std::abs(a) != std::abs(b) ? std::abs(a) < std::abs(b) : a > b;
      });
    return vals;
  }

  void record(Solution& sol) {
    found_ = true;
    best_.resize(doms_.size());
    for (size_t i = 0; i < doms_.size(); ++i) best_[i] = doms_[i].lo;
    if (!m_.objective) {
      done_ = true;
      return;
    }
    int64_t obj = m_.objective->expr.eval(best_);
    sol.incumbents.push_back(obj);
    int64_t internal = m_.objective->sense == Sense::Minimize ? obj : -obj;
    bound_ = internal - 1;
  }

  void search(Solution& sol) {
    struct Frame {
      int var;
      std::vector<int64_t> vals;
      size_t next;
      size_t mark;
    };
    std::vector<Frame> stack;
    auto node = [&]() -> bool {  // propagate at the current node; true if consistent
      ++nodes_;
      if (objective_prop_ >= 0) schedule(objective_prop_);
      if (!propagate()) {
        ++failures_;
        return false;
      }
      return true;
    };
    if (!node()) return;
    for (;;) {
      if (done_ || out_of_time()) return;
      int v = pick();
      if (v < 0) {
        record(sol);
      } else {
        stack.push_back({v, values_of(v), 0, trail_.size()});
      }
      // advance to the next consistent child
      bool descended = false;
      while (!stack.empty() && !descended) {
        Frame& f = stack.back();
        undo(f.mark);
        if (f.next >= f.vals.size() || done_ || out_of_time()) {
          stack.pop_back();
          continue;
        }
        int64_t val = f.vals[f.next++];
        if (fix(f.var, val) && node()) {
          descended = true;
        } else {
          for (int q : queue_) queued_[q] = false;
          queue_.clear();
        }
      }
      if (!descended) return;
    }
  }

  const Model& m_;
  SolveOptions opts_;
  Clock::time_point start_;
  std::vector<Dom> doms_;
  std::vector<std::pair<int, Dom>> trail_;
  std::vector<std::vector<int>> watch_;
  std::vector<Prop> props_;
  std::vector<bool> queued_;
  std::deque<int> queue_;
  std::map<int, int> abs_of_;
  std::vector<int> order_;
  size_t decisions_ = 0;
  int objective_prop_ = -1;
  bool infeasible_ = false;
  std::optional<int64_t> bound_;
  std::vector<int64_t> best_;
  bool stopped_ = false;
  bool found_ = false;
  bool done_ = false;
  uint64_t nodes_ = 0, failures_ = 0;
};

}  // namespace

Solution solve(const Model& m, const SolveOptions& opts) { return Engine(m, opts).run(); }

// --- brute force ------------------------------------------------------------

namespace {

// Derives auxiliary values that are functions of already known ones.
bool derive(const Model& m, std::vector<std::optional<int64_t>>& x) {
  auto known = [&](const LinExpr& e) {
    return std::all_of(e.terms.begin(), e.terms.end(), [&](const LinTerm& t) { return x[t.var].has_value(); });
  };
  auto eval = [&](const LinExpr& e) {
    int64_t s = e.constant;
    for (const auto& t : e.terms) s += t.coef * *x[t.var];
    return s;
  };
  for (bool progress = true; progress;) {
    progress = false;
    for (const auto& c : m.constraints) {
      auto set = [&](int v, int64_t val) {
        if (v >= 0 && !x[v]) {
          x[v] = val;
          progress = true;
        }
      };
      switch (c.kind) {
        case ConKind::LinearEq: {
          int unknown = -1, count = 0;
          for (const auto& t : c.lin.terms)
            if (!x[t.var]) {
              unknown = t.var;
              ++count;
            }
          if (count != 1) break;
          int64_t coef = 0, rest = c.lin.constant;
          for (const auto& t : c.lin.terms) {
            if (t.var == unknown) coef = t.coef;
            else rest += t.coef * *x[t.var];
          }
          if (-rest % coef == 0) set(unknown, -rest / coef);
          break;
        }
        case ConKind::Reified:
          if (known(c.lin)) set(c.result, holds(c.rel, eval(c.lin)) ? 1 : 0);
          break;
        case ConKind::ReifiedEquiv:
          if (c.result >= 0 && x[c.a] && x[c.b]) set(c.result, (*x[c.a] != 0) == (*x[c.b] != 0) ? 1 : 0);
          if (c.result < 0 && x[c.a] && !x[c.b]) set(c.b, *x[c.a]);
          if (c.result < 0 && x[c.b] && !x[c.a]) set(c.a, *x[c.b]);
          break;
        case ConKind::AbsValue:
          if (x[c.a]) set(c.result, std::abs(*x[c.a]));
          break;
        case ConKind::CountDistinct: {
          std::set<int64_t> seen;
          bool all = true;
          for (int v : c.vars) {
            if (!x[v]) all = false;
            else seen.insert(*x[v]);
          }
          if (all) set(c.result, static_cast<int64_t>(seen.size()));
          break;
        }
        case ConKind::ScaledVariance: {
          std::vector<int64_t> xs;
          bool all = true;
          for (const auto& e : c.members) {
            if (!known(e)) all = false;
            else xs.push_back(eval(e));
          }
          if (all) set(c.result, scaled_variance(xs));
          break;
        }
        default: break;
      }
    }
  }
  return std::all_of(x.begin(), x.end(), [](const auto& v) { return v.has_value(); });
}

}  // namespace

std::optional<std::vector<int64_t>> complete_assignment(const Model& m,
                                                        const std::vector<std::optional<int64_t>>& decisions) {
  std::vector<std::optional<int64_t>> x(m.vars.size());
  for (size_t i = 0; i < x.size() && i < decisions.size(); ++i)
    if (m.vars[i].decision) x[i] = decisions[i];
  if (!derive(m, x)) return std::nullopt;
  std::vector<int64_t> full(x.size());
  for (size_t i = 0; i < x.size(); ++i) full[i] = *x[i];
  if (!check_assignment(m, full).empty()) return std::nullopt;
  return full;
}

Solution brute_force(const Model& m, uint64_t limit) {
  Solution sol;
  sol.status = Status::Unsat;
  if (m.trivially_unsat) return sol;
  std::vector<int> order;
  for (size_t i = 0; i < m.vars.size(); ++i)
    if (m.vars[i].decision) order.push_back(static_cast<int>(i));
  double space = 1;
  for (int v : order) space *= static_cast<double>(m.vars[v].hi - m.vars[v].lo + 1);
  if (space > static_cast<double>(limit)) throw Error("brute force: search space too large");
  std::vector<std::optional<int64_t>> x(m.vars.size());
  std::function<void(size_t)> rec;
  std::function<void(std::vector<std::optional<int64_t>>&)> leaf = [&](std::vector<std::optional<int64_t>>& cur) {
    auto y = cur;
    if (!derive(m, y)) {
      // enumerate the first underived auxiliary variable
      for (size_t i = 0; i < y.size(); ++i)
        if (!y[i]) {
          if (m.vars[i].hi - m.vars[i].lo > 1000) throw Error("brute force: auxiliary variable not derivable");
          for (int64_t v = m.vars[i].lo; v <= m.vars[i].hi; ++v) {
            auto z = y;
            z[i] = v;
            leaf(z);
          }
          return;
        }
    }
    std::vector<int64_t> full(y.size());
    for (size_t i = 0; i < y.size(); ++i) full[i] = *y[i];
    ++sol.nodes;
    if (!check_assignment(m, full).empty()) return;
    int64_t obj = m.objective ? m.objective->expr.eval(full) : 0;
    bool better = sol.values.empty() ||
                  (m.objective && (m.objective->sense == Sense::Minimize ? obj < *sol.objective : obj > *sol.objective));
    if (better) {
      sol.values = full;
      sol.objective = m.objective ? std::optional<int64_t>(obj) : std::nullopt;
      sol.status = Status::Optimal;
    }
  };
  rec = [&](size_t k) {
    if (k == order.size()) {
      leaf(x);
      return;
    }
    const auto& v = m.vars[order[k]];
    for (int64_t val = v.lo; val <= v.hi; ++val) {
      if (std::count(v.excluded.begin(), v.excluded.end(), val)) continue;
      x[order[k]] = val;
      rec(k + 1);
    }
    x[order[k]].reset();
  };
  rec(0);
  return sol;
}

}  // namespace cologne::solver
