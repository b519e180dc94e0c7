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

#include "cologne/experiments.hpp"
#include "cologne/netsim.hpp"
#include "cologne/runtime.hpp"
#include "cologne/scenarios.hpp"
#include "doctest.h"

using namespace cologne;
using namespace cologne::runtime;
using datalog::OpKind;

namespace {

struct Compiled {
  AnnotatedProgram annotated;
  AnnotatedProgram localized;
  explicit Compiled(const ast::Program& p) : annotated(annotate(p)) {
    localized = annotate_localized(annotated, localize_program(annotated));
  }
};

Value random_value(std::mt19937_64& rng) {
  static const std::vector<std::string> awkward = {
      "", "|", "\"", "\\", "a|b", "12", "-3", "1:2", "!msg", "!ctl|done", "line\nbreak", "tab\there", "x\\\"y", " "};
  std::uniform_int_distribution<int> pick(0, 3);
  switch (pick(rng)) {
    case 0: return static_cast<int64_t>(rng());
    case 1: return std::uniform_int_distribution<int64_t>(-100, 100)(rng);
    case 2: return awkward[std::uniform_int_distribution<size_t>(0, awkward.size() - 1)(rng)];
    default: {
      std::string s;
      for (int i = std::uniform_int_distribution<int>(0, 8)(rng); i > 0; --i)
        s += static_cast<char>(std::uniform_int_distribution<int>(1, 126)(rng));
      return s;
    }
  }
}

scenarios::FtsInstance one_sided_instance() {
  // DC1 serves location 0 at a high communication cost; DC0 is local to it.
  scenarios::FtsInstance fi;
  fi.n = 2;
  fi.alloc = {{0, 0}, {5, 0}};
  fi.op_cost = {10, 10};
  fi.comm_cost = {{0, 100}, {100, 0}};
  fi.mig_cost = {{{0, 1}, 10}};
  fi.links = {{0, 1}};
  return fi;
}

bool has_row(const std::vector<Row>& rows, const Row& r) { return std::find(rows.begin(), rows.end(), r) != rows.end(); }

}  // namespace

TEST_CASE("property: message codec round trip") {
  std::mt19937_64 rng(11);
  const OpKind kinds[] = {OpKind::Insert, OpKind::Delete, OpKind::Upsert};
  const Control controls[] = {Control::None, Control::Propose, Control::Accept, Control::Done};
  for (int i = 0; i < 2000; ++i) {
    Message m;
    m.src = random_value(rng);
    m.dst = random_value(rng);
    m.control = controls[rng() % 4];
    for (int k = static_cast<int>(rng() % 5); k > 0; --k) {
      datalog::FactOp op;
      op.kind = kinds[rng() % 3];
      op.tuple.pred = "p" + std::to_string(rng() % 7);
      for (int a = static_cast<int>(rng() % 5); a > 0; --a) op.tuple.values.push_back(random_value(rng));
      m.ops.push_back(op);
    }
    const std::string wire = encode(m);
    CHECK(decode(wire) == m);
  }
}

TEST_CASE("malformed wire input") {
  const Message m{1, 2, {{OpKind::Insert, {"curVm", {1, 0, 5}}}}, Control::Done};
  const std::string wire = encode(m);
  CHECK_THROWS_AS(decode(""), Error);
  CHECK_THROWS_AS(decode("garbage"), Error);
  CHECK_THROWS_AS(decode(wire.substr(0, wire.size() - 1)), Error);
  CHECK_THROWS_AS(decode("3:!ms"), Error);
  CHECK_THROWS_AS(decode("99999:x"), Error);
}

TEST_CASE("only the larger endpoint initiates") {
  Compiled fts(experiments::shipped_program({"follow_the_sun"}));
  const Config cfg = scenarios::program_config("follow_the_sun");
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    Node n(7, fts.localized, cfg, seed);
    n.add_fact({"link", {7, 3}});
    n.add_fact({"link", {7, 9}});
    Reaction r = n.start(0);
    CHECK(r.out.empty());
    REQUIRE(r.timer_at);
    CHECK(*r.timer_at >= 1);
    CHECK(*r.timer_at <= cfg.negotiation_period_ms);
    Reaction t = n.on_timer(*r.timer_at);
    REQUIRE(t.out.size() == 1);
    CHECK(t.out[0].dst == Value(3));
    CHECK(t.out[0].control == Control::Propose);
    CHECK(n.links().at(3) == LinkState::Proposed);
    CHECK(n.links().at(9) == LinkState::Idle);
  }
  Node low(3, fts.localized, cfg, 1);
  low.add_fact({"link", {3, 7}});
  CHECK_FALSE(low.start(0).timer_at);
}

TEST_CASE("unknown predicates are dropped") {
  Compiled fts(experiments::shipped_program({"follow_the_sun"}));
  Node n(1, fts.localized, scenarios::program_config("follow_the_sun"), 1);
  n.start(0);
  Reaction r = n.on_message({0, 1, {{OpKind::Insert, {"bogus", {1, 2}}}}, Control::None}, 1);
  CHECK(n.dropped_tuples() == 1);
  CHECK(r.out.empty());
  CHECK_FALSE(r.notes.empty());
}

TEST_CASE("two nodes negotiate their link exactly once") {
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    auto run = experiments::run_fts(scenarios::gen_fts_instance(2, seed), seed);
    CHECK(run.records.size() == 1);
    CHECK(run.violations.empty());
    CHECK(run.final_cost <= run.initial_cost);
  }
}

TEST_CASE("a solved migration updates both ends") {
  auto fi = one_sided_instance();
  Config cfg = scenarios::program_config("follow_the_sun");
  cfg.fixed_solve_cost_ms = 5;
  netsim::Sim sim(experiments::shipped_program({"follow_the_sun", "follow_the_sun_guards"}),
                  netsim::topology_from_edges(2, fi.links), scenarios::fts_facts(fi), cfg, 3);
  sim.run_until(1'000'000);
  REQUIRE(sim.negotiations().size() == 1);
  const auto& x = sim.node(1).store();
  const auto& y = sim.node(0).store();
  CHECK(has_row(x.rows("migVm"), {1, 0, 0, 5}));
  CHECK(has_row(y.rows("migVm"), {0, 1, 0, -5}));
  CHECK(has_row(x.rows("curVm"), {1, 0, 0}));
  CHECK(has_row(y.rows("curVm"), {0, 0, 5}));
  CHECK(experiments::fts_invariant_violations(sim).empty());

  // every link is done; a later timer sends nothing
  Reaction r = sim.node(1).on_timer(sim.now() + 10'000);
  CHECK(r.out.empty());
  CHECK(sim.node(1).finished());
}

TEST_CASE("identical re-solve leaves the store unchanged") {
  Compiled acloud(experiments::shipped_program({"acloud"}));
  auto ai = scenarios::gen_acloud_instance(2, 3, 5);
  Node n(0, acloud.localized, scenarios::program_config("acloud"), 1);
  for (const auto& t : scenarios::acloud_facts(ai)) n.add_fact(t);
  n.start(0);
  REQUIRE_FALSE(n.store().rows("assign").empty());
  const auto before = n.store().all_tuples();
  Reaction r = n.on_message({0, 0, {{OpKind::Insert, {"invokeSolver", {}}}}, Control::None}, 10);
  auto after = n.store().all_tuples();
  after.erase(std::remove_if(after.begin(), after.end(), [](const Tuple& t) { return t.pred == "invokeSolver"; }),
              after.end());
  CHECK(after == before);
  CHECK(r.out.empty());
}

TEST_CASE("a program without solver tables never solves") {
  Compiled reach(parse_program("p1 path(X,Y) <- link(X,Y).\np2 path(X,Z) <- link(X,Y), path(Y,Z)."));
  Node n(0, reach.localized, Config{}, 1);
  n.add_fact({"link", {1, 2}});
  n.add_fact({"link", {2, 3}});
  Reaction r = n.start(0);
  CHECK_FALSE(r.timer_at);
  CHECK(r.busy_ms == 0);
  CHECK(n.store().contains({"path", {1, 3}}));
  CHECK(n.idle());
}
