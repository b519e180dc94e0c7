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

#include "cologne/datalog.hpp"
#include "doctest.h"

using namespace cologne;
using namespace cologne::datalog;

namespace {

AnnotatedProgram prog(const std::string& src) { return annotate(parse_program(src)); }

std::vector<Tuple> visible(const Store& s) { return s.all_tuples(); }

const char* kReach =
    "p1 path(X,Y) <- link(X,Y).\n"
    "p2 path(X,Z) <- link(X,Y), path(Y,Z).\n";

}  // namespace

TEST_CASE("empty program and empty store") {
  Store s;
  s.register_program(prog(kReach));
  CHECK(s.run_to_fixpoint().empty());
  CHECK(s.all_tuples().empty());
}

TEST_CASE("cross join of vm and host facts") {
  Store s;
  s.register_program(prog("r1 toAssign(Vid,Hid) <- vm(Vid,Cpu,Mem), host(Hid,Cpu2,Mem2)."));
  s.insert({"vm", {1, 10, 2}});
  s.insert({"vm", {2, 20, 4}});
  s.insert({"host", {"h1", 0, 8}});
  s.insert({"host", {"h2", 0, 8}});
  s.run_to_fixpoint();
  CHECK(s.rows("toAssign").size() == 4);
}

TEST_CASE("sum view over a group") {
  Store s;
  s.register_program(prog("a1 total(H,SUM<C>) <- load(H,J,C)."));
  s.insert({"load", {"h1", 1, 10}});
  s.insert({"load", {"h1", 2, 5}});
  s.run_to_fixpoint();
  CHECK(s.rows("total") == std::vector<Row>{{"h1", 15}});
  s.remove({"load", {"h1", 2, 5}});
  s.run_to_fixpoint();
  CHECK(s.rows("total") == std::vector<Row>{{"h1", 10}});
  s.remove({"load", {"h1", 1, 10}});
  s.run_to_fixpoint();
  CHECK(s.rows("total").empty());
}

TEST_CASE("transitive closure insert and delete") {
  Store s;
  s.register_program(prog(kReach));
  s.insert({"link", {"b", "c"}});
  s.run_to_fixpoint();
  s.insert({"link", {"a", "b"}});
  s.run_to_fixpoint();
  CHECK(s.contains({"path", {"a", "b"}}));
  CHECK(s.contains({"path", {"a", "c"}}));
  s.remove({"link", {"b", "c"}});
  s.run_to_fixpoint();
  CHECK_FALSE(s.contains({"path", {"a", "c"}}));
  CHECK(s.contains({"path", {"a", "b"}}));
}

TEST_CASE("deleting a cycle retracts every path") {
  Store s;
  s.register_program(prog(kReach));
  s.insert({"link", {1, 2}});
  s.insert({"link", {2, 1}});
  s.run_to_fixpoint();
  CHECK(s.rows("path").size() == 4);
  s.remove({"link", {2, 1}});
  s.run_to_fixpoint();
  CHECK(s.rows("path") == std::vector<Row>{{1, 2}});
}

TEST_CASE("base multiplicity") {
  Store s;
  s.register_program(prog(kReach));
  s.insert({"link", {1, 2}});
  s.insert({"link", {1, 2}});
  s.run_to_fixpoint();
  s.remove({"link", {1, 2}});
  s.run_to_fixpoint();
  CHECK(s.contains({"link", {1, 2}}));
  CHECK(s.contains({"path", {1, 2}}));
  s.remove({"link", {1, 2}});
  s.run_to_fixpoint();
  CHECK(s.all_tuples().empty());
  s.remove({"link", {1, 2}});  // deleting a missing fact is a no-op
  CHECK(s.run_to_fixpoint().empty());
}

TEST_CASE("self-referential update rule replaces the old fact") {
  auto a = prog(
      "var migVm(@X,Y,D,R) forall toMigVm(@X,Y,D).\n"
      "r1 toMigVm(@X,Y,D) <- setLink(@X,Y), dc(@X,D).\n"
      "r3 curVm(@X,D,R) <- curVm(@X,D,R1), migVm(@X,Y,D,R2), R=R1-R2.\n");
  CHECK(a.rule_class.at("r3") == RuleClass::SolutionUpdate);
  Store s;
  s.register_program(a);
  s.insert({"curVm", {1, 7, 10}});
  s.run_to_fixpoint();
  s.upsert({"migVm", {1, 2, 7, 4}});
  s.run_to_fixpoint();
  CHECK(s.rows("curVm") == std::vector<Row>{{1, 7, 6}});
  s.upsert({"migVm", {1, 2, 7, 4}});  // identical solution: no further change
  CHECK(s.run_to_fixpoint().empty());
  CHECK(s.rows("curVm") == std::vector<Row>{{1, 7, 6}});
}

TEST_CASE("remote heads go to the outbox with support counting") {
  StoreOptions o;
  o.local = Value(2);
  Store s(o);
  s.register_program(prog("t1 tmp(@X,Y,R) <- link(@Y,X), res(@Y,R)."));
  s.insert({"link", {2, 1}});
  s.insert({"res", {2, 40}});
  s.run_to_fixpoint();
  auto out = s.take_outbox();
  REQUIRE(out.size() == 1);
  CHECK(out[0].kind == OpKind::Insert);
  CHECK(out[0].tuple == Tuple{"tmp", {1, 2, 40}});
  s.remove({"res", {2, 40}});
  s.run_to_fixpoint();
  out = s.take_outbox();
  REQUIRE(out.size() == 1);
  CHECK(out[0].kind == OpKind::Delete);
}

TEST_CASE("derivation budget guard") {
  StoreOptions o;
  o.max_derivations = 50;
  Store s(o);
  s.register_program(prog("n1 nat(Y) <- nat(X), Y=X+1."));
  s.insert({"nat", {0}});
  CHECK_THROWS_AS(s.run_to_fixpoint(), Error);
}

TEST_CASE("facts file round trip") {
  auto facts = parse_facts("// c\nvm(1, 30, 2).\n@host(\"h 1\",-5)\nname(abc)\n");
  REQUIRE(facts.size() == 3);
  CHECK(facts[1].values[0] == Value("h 1"));
  CHECK(facts[1].values[1] == Value(-5));
  CHECK(facts[2].values[0] == Value("abc"));
  CHECK(parse_facts(format_facts(facts)) == facts);
  CHECK_THROWS_AS(parse_facts("vm(1,"), ParseError);
}

// Random reachability-style programs with aggregates: the incremental
// store must match naive recomputation after every batch, under several
// orderings of the same batch.
TEST_CASE("property: incremental evaluation equals naive recomputation") {
  const char* programs[] = {
      kReach,
      "p1 path(X,Y) <- edge(X,Y,C).\n"
      "p2 path(X,Z) <- path(X,Y), edge(Y,Z,C).\n"
      "a1 deg(X,COUNT<Y>) <- edge(X,Y,C).\n"
      "a2 wsum(X,SUM<C>) <- edge(X,Y,C).\n"
      "a3 best(X,MIN<C>) <- edge(X,Y,C).\n"
      "a4 reach(X,COUNT<Y>) <- path(X,Y).\n",
      "q1 two(X,Z) <- edge(X,Y,C), edge(Y,Z,D), X!=Z.\n"
      "q2 heavy(X,Y) <- edge(X,Y,C), C>=3.\n"
      "q3 spread(STDEV<C>) <- edge(X,Y,C).\n"
      "q4 hi(X,MAX<C>) <- edge(X,Y,C), heavy(X,Y).\n"
      "q5 kinds(UNIQUE<C>) <- edge(X,Y,C).\n",
  };
  std::mt19937 rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    auto a = prog(programs[trial % 3]);
    const bool binary = trial % 3 == 0;
    std::vector<Tuple> present;
    StoreOptions so;
    so.max_derivations = 2'000'000;
    Store s(so);
    s.register_program(a);
    for (int batch = 0; batch < 6; ++batch) {
      std::vector<FactOp> ops;
      size_t old = present.size();  // a batch touches each tuple once, so its ops commute
      for (int k = 0; k < 8; ++k) {
        if (old > 0 && rng() % 3 == 0) {
          size_t i = rng() % old;
          ops.push_back({OpKind::Delete, present[i]});
          present.erase(present.begin() + static_cast<long>(i));
          --old;
        } else {
          Tuple t{binary ? "link" : "edge", {int64_t(rng() % 6), int64_t(rng() % 6)}};
          if (!binary) t.values.push_back(int64_t(rng() % 5));
          if (std::find(present.begin(), present.end(), t) != present.end()) continue;
          ops.push_back({OpKind::Insert, t});
          present.push_back(t);
        }
      }
      std::shuffle(ops.begin(), ops.end(), rng);
      for (const auto& op : ops) s.apply(op);
      INFO("trial " << trial << " batch " << batch);
      s.run_to_fixpoint();
      auto got = visible(s);
      auto want = naive_fixpoint(a, present);
      if (got != want) {
        MESSAGE("trial " << trial << " batch " << batch);
        for (auto& t : got) if (!std::count(want.begin(), want.end(), t)) MESSAGE("extra " << t.to_string());
        for (auto& t : want) if (!std::count(got.begin(), got.end(), t)) MESSAGE("missing " << t.to_string());
      }
      REQUIRE(got == want);
    }
  }
}
