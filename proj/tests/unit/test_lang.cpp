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

#include <random>

#include "cologne/experiments.hpp"
#include "cologne/lang.hpp"
#include "cologne/scenarios.hpp"
#include "doctest.h"
#include "../common/random_programs.hpp"

using namespace cologne;

namespace {

bool has_message(const std::vector<Diagnostic>& ds, const std::string& needle) {
  for (const auto& d : ds)
    if (d.message.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("goal declaration") {
  auto p = parse_program("goal minimize C in hostStdevCpu(C).");
  REQUIRE(p.goal);
  CHECK(p.goal->kind == ast::GoalKind::Minimize);
  CHECK(p.goal->attr == "C");
  REQUIRE(p.goal->table);
  CHECK(p.goal->table->name == "hostStdevCpu");
  CHECK(p.rules.empty());
}

TEST_CASE("empty input") {
  auto p = parse_program("");
  CHECK_FALSE(p.goal);
  CHECK(p.vars.empty());
  CHECK(p.rules.empty());
  CHECK(parse_program("// only a comment\n\n") == p);
}

TEST_CASE("labelled derivation rule") {
  auto p = parse_program("r1 toAssign(Vid,Hid) <- vm(Vid,Cpu,Mem), host(Hid,Cpu2,Mem2).");
  REQUIRE(p.rules.size() == 1);
  const auto& r = p.rules[0];
  CHECK(r.label == "r1");
  CHECK(r.arrow == ast::Arrow::Derive);
  CHECK(r.head.name == "toAssign");
  CHECK(r.head.arity() == 2);
  auto body = r.body_predicates();
  REQUIRE(body.size() == 2);
  CHECK(body[0]->name == "vm");
  CHECK(body[0]->arity() == 3);
  CHECK(body[1]->name == "host");
  CHECK(body[1]->arity() == 3);
}

TEST_CASE("var declaration with location and aggregate head") {
  auto p = parse_program(
      "var migVm(@X,Y,D,R) forall toMigVm(@X,Y,D).\n"
      "d7 aggMigCost(@X,SUMABS<Cost>) <- migVm(@X,Y,D,R), migCost(@X,Y,C), Cost==R*C.\n");
  REQUIRE(p.vars.size() == 1);
  CHECK(p.vars[0].var.located);
  CHECK(p.vars[0].solver_positions() == std::vector<size_t>{3});
  REQUIRE(p.rules[0].head.agg);
  CHECK(p.rules[0].head.agg->fn == ast::AggFn::SumAbs);
  CHECK(p.rules[0].head.agg->position == 1);
}

TEST_CASE("syntax errors carry a position") {
  try {
    parse_program("a(X) <- b(X).\nc(X) <- d(X) ?", "bad.clg");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.diagnostic().file == "bad.clg");
    CHECK(e.diagnostic().line == 2);
    CHECK(e.diagnostic().col > 0);
  }
  CHECK_THROWS_AS(parse_program("r1 a(X) <- b(X).\nr1 c(X) <- b(X)."), ParseError);
  CHECK_THROWS_AS(parse_program("goal minimize C in t(C).\ngoal maximize C in t(C)."), ParseError);
}

TEST_CASE("unsafe rule") {
  auto ds = check_program(parse_program("r1 p(X,Y) <- q(X)."));
  CHECK(has_message(ds, "unsafe rule"));
}

TEST_CASE("arity mismatch") {
  auto ds = check_program(parse_program("r1 a(X) <- vm(X,Y,Z).\nr2 b(X) <- vm(X,Y)."));
  CHECK(has_message(ds, "arity mismatch"));
}

TEST_CASE("shipped programs are clean") {
  for (const auto& stem : scenarios::program_names()) {
    CAPTURE(stem);
    auto p = parse_program(scenarios::program_text(stem), stem);
    CHECK(check_program(p).empty());
  }
}

TEST_CASE("property: printing then parsing is the identity") {
  for (const auto& stem : scenarios::program_names()) {
    CAPTURE(stem);
    auto p = parse_program(scenarios::program_text(stem));
    CHECK(parse_program(print_program(p)) == p);
  }
  std::mt19937_64 rng(7);
  for (int i = 0; i < 300; ++i) {
    const std::string src = testing::random_program(rng);
    CAPTURE(src);
    auto p = parse_program(src);
    const std::string printed = print_program(p);
    CHECK(parse_program(printed) == p);
    CHECK(print_program(parse_program(printed)) == printed);
  }
}
