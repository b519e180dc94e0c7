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
#include <random>

#include "cologne/analysis.hpp"
#include "cologne/ground.hpp"
#include "cologne/lang.hpp"
#include "doctest.h"

using namespace cologne;
using namespace cologne::solver;

namespace {

Model random_model(std::mt19937& rng) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  Model m;
  const int n = pick(2, 6);
  for (int i = 0; i < n; ++i) {
    int lo = pick(-3, 1);
    m.add_var(lo, lo + pick(1, 4), "d" + std::to_string(i), true);
  }
  auto any = [&]() { return pick(0, n - 1); };
  const int ncons = pick(1, 5);
  for (int k = 0; k < ncons; ++k) {
    Constraint c;
    c.origin = "k" + std::to_string(k);
    LinExpr e = LinExpr::var(any(), pick(-3, 3)) + LinExpr::var(any(), pick(-3, 3)) + LinExpr::of(pick(-4, 4));
    switch (pick(0, 6)) {
      case 0: c.kind = ConKind::LinearLe; c.lin = e; break;
      case 1: c.kind = ConKind::LinearNe; c.lin = e; break;
      case 2: c.kind = ConKind::LinearEq; c.lin = e; break;
      case 3: {
        int x = any();
        c.kind = ConKind::AbsValue;
        c.a = x;
        c.result = m.add_var(0, 8, "abs");
        break;
      }
      case 4:
        c.kind = ConKind::Reified;
        c.lin = e;
        c.rel = static_cast<Rel>(pick(0, 2));
        c.result = m.add_var(0, 1, "b");
        break;
      case 5:
        c.kind = ConKind::CountDistinct;
        for (int j = pick(2, 3); j > 0; --j) c.vars.push_back(any());
        for (int u = -3; u <= 5; ++u) c.universe.push_back(u);
        c.result = m.add_var(0, 3, "cnt");
        break;
      default:
        c.kind = ConKind::ScaledVariance;
        for (int j = pick(2, 3); j > 0; --j) c.members.push_back(LinExpr::var(any(), pick(1, 2)));
        c.result = m.add_var(0, 100000, "var");
        break;
    }
    m.post(c);
  }
  if (pick(0, 4) > 0) {
    Objective o;
    o.sense = pick(0, 1) ? Sense::Minimize : Sense::Maximize;
    for (size_t v = 0; v < m.vars.size(); ++v)
      if (pick(0, 1)) o.expr.add(LinExpr::var(static_cast<int>(v), pick(-3, 3)));
    m.objective = o;
  }
  return m;
}

AnnotatedProgram annotated(const std::string& src) { return annotate(parse_program(src)); }

datalog::Store store_for(const AnnotatedProgram& a, const std::string& facts, const Config& cfg) {
  datalog::StoreOptions o;
  o.consts = cfg.consts;
  datalog::Store s(o);
  s.register_program(a);
  for (const auto& t : datalog::parse_facts(facts)) s.insert(t);
  s.run_to_fixpoint();
  return s;
}

const char* kACloud =
    "goal minimize C in hostStdevCpu(C).\n"
    "var assign(Vid,Hid,V) forall toAssign(Vid,Hid).\n"
    "r1 toAssign(Vid,Hid) <- vm(Vid,Cpu,Mem), host(Hid,Cpu2,Mem2).\n"
    "d1 hostCpu(Hid,SUM<C>) <- assign(Vid,Hid,V), vm(Vid,Cpu,Mem), C=V*Cpu.\n"
    "d2 hostStdevCpu(STDEV<C>) <- host(Hid,Cpu,Mem), hostCpu(Hid,Cpu2), C=Cpu+Cpu2.\n"
    "d3 assignCount(Vid,SUM<V>) <- assign(Vid,Hid,V).\n"
    "c1 assignCount(Vid,V) -> V=1.\n"
    "d4 hostMem(Hid,SUM<M>) <- assign(Vid,Hid,V), vm(Vid,Cpu,Mem), M=V*Mem.\n"
    "c2 hostMem(Hid,Mem) -> hostMemThres(Hid,M), Mem<=M.\n";

}  // namespace

TEST_CASE("solver agrees with exhaustive enumeration on random models") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 400; ++trial) {
    Model m = random_model(rng);
    CAPTURE(m.dump());
    Solution bf = brute_force(m);
    Solution s = solve(m);
    REQUIRE(s.status == bf.status);
    if (!s.has_assignment()) continue;
    CHECK(check_assignment(m, s.values).empty());
    if (m.objective) CHECK(*s.objective == *bf.objective);
    for (size_t k = 1; k < s.incumbents.size(); ++k) {
      if (m.objective->sense == Sense::Minimize) CHECK(s.incumbents[k] < s.incumbents[k - 1]);
      else CHECK(s.incumbents[k] > s.incumbents[k - 1]);
    }
  }
}

TEST_CASE("value orders and first-fail reach the same optimum") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    Model m = random_model(rng);
    if (!m.objective) continue;
    Solution ref = solve(m);
    for (auto vo : {ValueOrder::Descending, ValueOrder::ZeroOut}) {
      SolveOptions o;
      o.value_order = vo;
      o.branching = Branching::FirstFail;
      Solution s = solve(m, o);
      REQUIRE(s.status == ref.status);
      if (s.has_assignment()) CHECK(*s.objective == *ref.objective);
    }
  }
}

TEST_CASE("checker reports violated constraints") {
  Model m;
  int x = m.add_var(0, 3, "x", true);
  int y = m.add_var(0, 3, "y");
  m.post({ConKind::AbsValue, {}, Rel::Le, y, x, -1, {}, {}, {}, "a"});
  m.post({ConKind::LinearLe, LinExpr::var(x) - LinExpr::of(2), Rel::Le, -1, -1, -1, {}, {}, {}, "b"});
  CHECK(check_assignment(m, {2, 2}).empty());
  CHECK(check_assignment(m, {2, 1}).size() == 1);
  CHECK(check_assignment(m, {3, 3}).size() == 1);
  CHECK(check_assignment(m, {5, 5}).size() == 3);
}

TEST_CASE("scaled variance ranks assignments like the standard deviation") {
  // enumerate all load vectors of up to 4 hosts with a fixed total
  for (int n = 2; n <= 4; ++n) {
    std::vector<std::vector<int64_t>> loads;
    std::vector<int64_t> cur(n, 0);
    std::function<void(int, int64_t)> rec = [&](int i, int64_t left) {
      if (i == n - 1) {
        cur[i] = left;
        loads.push_back(cur);
        return;
      }
      for (int64_t v = 0; v <= left; ++v) {
        cur[i] = v;
        rec(i + 1, left - v);
      }
    };
    rec(0, 9);
    auto scaled = [&](const std::vector<int64_t>& xs) {
      int64_t s = 0, out = 0;
      for (auto x : xs) s += x;
      for (auto x : xs) out += (n * x - s) * (n * x - s);
      return out;
    };
    auto sd = [&](const std::vector<int64_t>& xs) {
      double mean = 0, v = 0;
      for (auto x : xs) mean += static_cast<double>(x) / n;
      for (auto x : xs) v += (static_cast<double>(x) - mean) * (static_cast<double>(x) - mean) / n;
      return std::sqrt(v);
    };
    for (size_t i = 0; i < loads.size(); ++i)
      for (size_t j = 0; j < loads.size(); ++j) {
        if (scaled(loads[i]) < scaled(loads[j])) CHECK(sd(loads[i]) < sd(loads[j]));
        CHECK(std::abs(stdev_from_scaled(scaled(loads[i]), n) - sd(loads[i])) < 1e-9);
      }
  }
}

TEST_CASE("node budget stops the search with the incumbent") {
  Model m;
  std::vector<int> xs;
  for (int i = 0; i < 12; ++i) xs.push_back(m.add_var(0, 5, "x" + std::to_string(i), true));
  Constraint c;
  c.kind = ConKind::ScaledVariance;
  for (int x : xs) c.members.push_back(LinExpr::var(x));
  c.result = m.add_var(0, 1'000'000, "v");
  m.post(c);
  Constraint sum;
  sum.kind = ConKind::LinearEq;
  for (int x : xs) sum.lin.add(LinExpr::var(x, static_cast<int64_t>(1 + x % 3)));
  sum.lin.constant = -37;
  m.post(sum);
  m.objective = Objective{Sense::Minimize, LinExpr::var(c.result)};
  SolveOptions o;
  o.max_nodes = 50;
  Solution s = solve(m, o);
  REQUIRE(s.status == Status::FeasibleTimeout);
  CHECK(check_assignment(m, s.values).empty());
}

TEST_CASE("grounding ACloud with two VMs and two hosts") {
  Config cfg;
  cfg.domains["assign"] = {0, 1, false};
  auto a = annotated(kACloud);
  auto s = store_for(a,
                     "vm(1,30,2). vm(2,20,2).\n"
                     "host(\"h1\",10,8). host(\"h2\",0,8).\n"
                     "hostMemThres(\"h1\",8). hostMemThres(\"h2\",8).\n",
                     cfg);
  Grounding g = ground_model(a, s, cfg);
  int decisions = 0;
  for (const auto& v : g.model.vars)
    if (v.decision) {
      ++decisions;
      CHECK(v.lo == 0);
      CHECK(v.hi == 1);
    }
  CHECK(decisions == 4);
  int sum_one = 0;
  for (const auto& c : g.model.constraints)
    if (c.origin == "c1") {
      CHECK(c.kind == ConKind::LinearEq);
      CHECK(c.lin.constant == -1);
      CHECK(c.lin.terms.size() == 2);
      ++sum_one;
    }
  CHECK(sum_one == 2);
  Solution sol = solve(g.model);
  REQUIRE(sol.status == Status::Optimal);
  CHECK(*sol.objective == *brute_force(g.model).objective);
  auto cpu = solved_rows(g, "hostCpu", sol.values);
  // h1 starts at 10, so the 20 VM goes there and the 30 VM to h2: loads 30/30
  CHECK(cpu == std::vector<Tuple>{{"hostCpu", {"h1", 20}}, {"hostCpu", {"h2", 30}}});
  CHECK(solved_rows(g, "hostStdevCpu", sol.values) == std::vector<Tuple>{{"hostStdevCpu", {0}}});
  auto ops = materialize(g, sol.values);
  CHECK(ops.size() == 5);
}

TEST_CASE("empty forall table gives an empty model") {
  Config cfg;
  cfg.domains["assign"] = {0, 1, false};
  auto a = annotated(kACloud);
  auto s = store_for(a, "host(\"h1\",0,8).\n", cfg);
  Grounding g = ground_model(a, s, cfg);
  CHECK(g.model.vars.empty());
  CHECK(g.model.objective->expr.is_constant());
  int decisions = 0;
  for (const auto& v : g.model.vars) decisions += v.decision;
  CHECK(decisions == 0);
  CHECK(solve(g.model).status == Status::Optimal);
}

TEST_CASE("memory threshold of zero makes ACloud unsat") {
  Config cfg;
  cfg.domains["assign"] = {0, 1, false};
  auto a = annotated(kACloud);
  auto s = store_for(a, "vm(1,30,2). host(\"h1\",0,8). hostMemThres(\"h1\",0).\n", cfg);
  Grounding g = ground_model(a, s, cfg);
  CHECK(solve(g.model).status == Status::Unsat);
}

TEST_CASE("missing domain is an error") {
  auto a = annotated(kACloud);
  Config cfg;
  auto s = store_for(a, "vm(1,30,2). host(\"h1\",0,8).\n", cfg);
  CHECK_THROWS_WITH_AS(ground_model(a, s, cfg), doctest::Contains("unbounded variable domain"), Error);
}

TEST_CASE("reified channel penalty is forced by fixed channels") {
  const char* src =
      "goal minimize C in totalCost(C)\n"
      "var assign(X,Y,C) forall link(X,Y)\n"
      "d1 cost(X,Y,Z,C) <- assign(X,Y,C1), assign(X,Z,C2), Y!=Z, (C==1)==(|C1-C2|<F_mindiff).\n"
      "d2 totalCost(SUM<C>) <- cost(X,Y,Z,C).\n"
      "c9 assign(X,Y,C) -> want(X,Y,K), C==K.\n";
  Config cfg;
  cfg.channels = {1, 2, 3};
  cfg.domains["assign"] = {0, 0, true};
  cfg.consts["F_mindiff"] = 2;
  auto a = annotated(src);
  auto s = store_for(a, "link(1,2). link(1,3). want(1,2,1). want(1,3,2).\n", cfg);
  Grounding g = ground_model(a, s, cfg);
  Solution sol = solve(g.model);
  REQUIRE(sol.status == Status::Optimal);
  // |1-2| = 1 < 2: both ordered pairs at node 1 pay the penalty
  CHECK(*sol.objective == 2);
  cfg.consts["F_mindiff"] = 1;
  g = ground_model(a, s, cfg);
  sol = solve(g.model);
  CHECK(*sol.objective == 0);
}

TEST_CASE("product of two solver variables is rejected") {
  const char* src =
      "goal minimize C in t(C)\n"
      "var a(X,V) forall k(X)\n"
      "d1 t(SUM<C>) <- a(X,V), a(Y,W), X!=Y, C=V*W.\n";
  Config cfg;
  cfg.default_domain_lo = 0;
  cfg.default_domain_hi = 2;
  auto a = annotated(src);
  auto s = store_for(a, "k(1). k(2).\n", cfg);
  CHECK_THROWS_WITH_AS(ground_model(a, s, cfg), doctest::Contains("unsupported expression"), Error);
}
