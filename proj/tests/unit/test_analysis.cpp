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

#include "cologne/analysis.hpp"
#include "cologne/scenarios.hpp"
#include "doctest.h"

using namespace cologne;

namespace {

AnnotatedProgram shipped(const std::string& stem) {
  return annotate(parse_program(scenarios::program_text(stem), stem));
}

bool has_message(const std::vector<Diagnostic>& ds, const std::string& needle) {
  for (const auto& d : ds)
    if (d.message.find(needle) != std::string::npos) return true;
  return false;
}

const ast::Rule* find(const LocalizedProgram& lp, const std::string& head) {
  for (const auto& r : lp.rules)
    if (r.head.name == head) return &r;
  return nullptr;
}

size_t errors(const std::vector<Diagnostic>& ds) {
  return static_cast<size_t>(std::count_if(ds.begin(), ds.end(), [](const Diagnostic& d) {
    return d.severity == Severity::Error;
  }));
}

std::string printed(const std::string& rule) { return print_rule(parse_program(rule).rules.at(0)); }

}  // namespace

TEST_CASE("ACloud solver tables") {
  auto a = shipped("acloud");
  CHECK(a.solver_tables == std::set<std::string>{"assign", "hostCpu", "hostStdevCpu", "assignCount", "hostMem"});
  CHECK(a.var_tables == std::set<std::string>{"assign"});
  CHECK(a.is_solver_attr("assign", 2));
  CHECK_FALSE(a.is_solver_attr("assign", 0));
  CHECK(a.is_solver_attr("vm", 1) == false);
}

TEST_CASE("no var declaration means no solver tables") {
  auto a = annotate(parse_program("p1 path(X,Y) <- link(X,Y).\np2 path(X,Z) <- link(X,Y), path(Y,Z)."));
  CHECK(a.solver_tables.empty());
  CHECK(a.class_of(0) == RuleClass::Regular);
  CHECK(a.class_of(1) == RuleClass::Regular);
}

TEST_CASE("solver attribute flows through arithmetic") {
  auto a = shipped("acloud");
  CHECK(a.is_solver_attr("hostCpu", 1));
  CHECK(a.is_solver_attr("hostStdevCpu", 0));
  CHECK_FALSE(a.is_solver_attr("host", 1));
}

TEST_CASE("ACloud rule classes") {
  auto a = shipped("acloud");
  for (const char* d : {"d1", "d2", "d3", "d4"}) CHECK(a.rule_class.at(d) == RuleClass::SolverDerivation);
  CHECK(a.rule_class.at("c1") == RuleClass::SolverConstraint);
  CHECK(a.rule_class.at("c2") == RuleClass::SolverConstraint);
  CHECK(a.rule_class.at("r1") == RuleClass::Regular);
  CHECK(a.distributed_rules.empty());
  CHECK(check_safety(a).empty());
}

TEST_CASE("distributed constraint rule") {
  auto a = shipped("follow_the_sun");
  CHECK(a.rule_class.at("c2") == RuleClass::SolverConstraint);
  CHECK(a.distributed_rules.count("c2"));
  CHECK(a.distributed_rules.count("d2"));
  CHECK_FALSE(a.distributed_rules.count("d1"));
  CHECK(a.rule_class.at("r2") == RuleClass::SolutionUpdate);
  CHECK(a.rule_class.at("r3") == RuleClass::SolutionUpdate);
}

TEST_CASE("constraint rule without solver table") {
  auto a = annotate(parse_program("c1 p(X) -> q(X), X<3."));
  CHECK(has_message(a.diagnostics, "involves no solver table"));
}

TEST_CASE("join on solver attribute") {
  auto a = annotate(parse_program(
      "var s(K,V) forall k(K).\n"
      "var t(K,V) forall k(K).\n"
      "d1 both(K,J) <- s(K,V), t(J,V).\n"));
  CHECK(has_message(check_safety(a), "join on solver attribute"));
}

TEST_CASE("goal not solver-dependent") {
  auto a = annotate(parse_program(
      "goal minimize C in cost(C).\n"
      "var s(K,V) forall k(K).\n"
      "d1 total(SUM<V>) <- s(K,V).\n"));
  CHECK(has_message(check_safety(a), "goal not solver-dependent"));
}

TEST_CASE("shipped programs pass the safety checks") {
  const std::vector<std::vector<std::string>> sets = {
      {"acloud"}, {"acloud_migration_limit"}, {"channel_centralized"}, {"channel_centralized_twohop"},
      {"channel_distributed"}, {"follow_the_sun"}, {"follow_the_sun", "follow_the_sun_guards"},
      {"follow_the_sun", "follow_the_sun_limits"}};
  for (const auto& stems : sets) {
    std::string text;
    for (const auto& s : stems) text += scenarios::program_text(s) + "\n";
    CAPTURE(text);
    auto a = annotate(parse_program(text));
    CHECK(errors(a.diagnostics) == 0);
    CHECK(errors(check_safety(a)) == 0);
    CHECK(errors(localize_program(a).diagnostics) == 0);
  }
}

TEST_CASE("localizing d2") {
  auto lp = localize_program(shipped("follow_the_sun"));
  const auto* tmp = find(lp, "d2_tmp");
  REQUIRE(tmp);
  CHECK(print_rule(*tmp) == printed("d2_tmp d2_tmp(@X,Y,D,R1) <- link(@Y,X), curVm(@Y,D,R1)."));
  const auto* res = find(lp, "nborNextVm");
  REQUIRE(res);
  CHECK(print_rule(*res) == printed("d2 nborNextVm(@X,Y,D,R) <- d2_tmp(@X,Y,D,R1), migVm(@X,Y,D,R2), R=R1+R2."));
  CHECK(lp.generated_tmp_tables.count("d2_tmp"));
  CHECK(lp.tmp_origin.at("d2_tmp") == "d2");
}

TEST_CASE("localizing c2 ships the remote fragment") {
  auto lp = localize_program(shipped("follow_the_sun"));
  const auto* tmp = find(lp, "c2_tmp");
  REQUIRE(tmp);
  CHECK(print_rule(*tmp) == printed("c2_tmp c2_tmp(@X,Y,R2) <- link(@Y,X), resource(@Y,R2)."));
  const ast::Rule* residual = nullptr;
  for (const auto& r : lp.rules)
    if (r.label == "c2") residual = &r;
  REQUIRE(residual);
  CHECK(print_rule(*residual) == printed("c2 aggNborNextVm(@X,Y,R1) -> c2_tmp(@X,Y,R2), R1<=R2."));
}

TEST_CASE("local rules are unchanged") {
  auto a = shipped("follow_the_sun");
  auto lp = localize_program(a);
  for (const char* label : {"d1", "d3", "d7", "d8", "r3"}) {
    const auto* orig = a.program.find_rule(label);
    REQUIRE(orig);
    auto it = std::find_if(lp.rules.begin(), lp.rules.end(), [&](const ast::Rule& r) { return r.label == label; });
    REQUIRE(it != lp.rules.end());
    CHECK(*it == *orig);
  }
  auto acloud = shipped("acloud");
  CHECK(localize_program(acloud).rules == acloud.program.rules);
}

TEST_CASE("remote fragment with solver attributes is rejected") {
  auto a = annotate(parse_program(
      "var m(@X,Y,R) forall t(@X,Y).\n"
      "d0 ms(@X,SUM<R>) <- m(@X,Y,R).\n"
      "d1 s(@X,Y,R) <- t(@X,Y), link(@Y,X), ms(@Y,R).\n"));
  CHECK_FALSE(localize_program(a).diagnostics.empty());
}

TEST_CASE("explain lists every rule") {
  auto text = explain(shipped("acloud"));
  CHECK(text.find("c2\tsolverConstraint") != std::string::npos);
  CHECK(text.find("r1\tregular") != std::string::npos);
}
