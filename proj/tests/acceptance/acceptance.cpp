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

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "../common/random_programs.hpp"
#include "cologne/analysis.hpp"
#include "cologne/datalog.hpp"
#include "cologne/experiments.hpp"
#include "cologne/ground.hpp"
#include "cologne/lang.hpp"
#include "cologne/scenarios.hpp"

using namespace cologne;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v, int prec = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

// --- 1 ----------------------------------------------------------------------

Outcome classification() {
  auto t0 = Clock::now();
  auto a = classify_rules(infer_solver_tables(parse_program(scenarios::program_text("acloud"))));
  const std::set<std::string> want_tables{"assign", "hostCpu", "hostStdevCpu", "assignCount", "hostMem"};
  const std::map<std::string, RuleClass> want_rules{
      {"r1", RuleClass::Regular},          {"d1", RuleClass::SolverDerivation},
      {"d2", RuleClass::SolverDerivation}, {"d3", RuleClass::SolverDerivation},
      {"d4", RuleClass::SolverDerivation}, {"c1", RuleClass::SolverConstraint},
      {"c2", RuleClass::SolverConstraint}};
  const double secs = seconds_since(t0);
  std::string got;
  for (const auto& t : a.solver_tables) got += (got.empty() ? "" : ",") + t;
  Outcome o;
  o.pass = a.solver_tables == want_tables && a.rule_class == want_rules && secs < 1.0;
  o.detail = "solver tables {" + got + "}, " + std::to_string(a.rule_class.size()) + " rules classified in " +
             fmt(secs) + " s";
  return o;
}

// --- 2 ----------------------------------------------------------------------

// Rules equal up to labels, the name of the shipped table and `=` vs `==`.
void normalize(ast::Expr& e) {
  if (e.kind == ast::Expr::Kind::Binary && e.op == ast::Op::Assign) e.op = ast::Op::Eq;
  for (auto& a : e.args) normalize(a);
}

ast::Rule normalized(ast::Rule r, const std::string& tmp) {
  r.label.clear();
  auto fix = [&](ast::Predicate& p) {
    if (p.name == tmp) p.name = "TMP";
    for (auto& a : p.args) normalize(a);
  };
  fix(r.head);
  for (auto& lit : r.body) {
    if (auto* p = std::get_if<ast::Predicate>(&lit)) fix(*p);
    else normalize(std::get<ast::Expr>(lit));
  }
  return r;
}

Outcome localization() {
  auto a = annotate(parse_program(scenarios::program_text("follow_the_sun")));
  auto lp = localize_program(a);
  const auto expected = parse_program(
      "d21 tmp(@X,Y,D,R1) <- link(@Y,X), curVm(@Y,D,R1).\n"
      "d22 nborNextVm(@X,Y,D,R) <- tmp(@X,Y,D,R1),\n"
      "    migVm(@X,Y,D,R2), R==R1+R2.\n");
  std::vector<ast::Rule> from_d2;
  std::string tmp;
  for (const auto& r : lp.rules) {
    auto it = lp.tmp_origin.find(r.head.name);
    if (it != lp.tmp_origin.end() && it->second == "d2") tmp = r.head.name;
    if (r.label == "d2" || (it != lp.tmp_origin.end() && it->second == "d2")) from_d2.push_back(r);
  }
  Outcome o;
  if (from_d2.size() != 2 || tmp.empty()) {
    o.detail = "d2 produced " + std::to_string(from_d2.size()) + " rules";
    return o;
  }
  o.pass = normalized(from_d2[0], tmp) == normalized(expected.rules[0], "tmp") &&
           normalized(from_d2[1], tmp) == normalized(expected.rules[1], "tmp");
  o.detail = print_rule(from_d2[0]) + " | " + print_rule(from_d2[1]);
  return o;
}

// --- 3 ----------------------------------------------------------------------

Outcome channel_optimality() {
  auto t0 = Clock::now();
  std::mt19937_64 rng(2026);
  int instances = 0, checks = 0, mismatches = 0, violations = 0, infeasible = 0;
  std::string first_problem;
  while (instances < 60) {
    scenarios::ChannelParams p;
    p.kind = static_cast<scenarios::ChannelTopology>(rng() % 3);
    p.size = 3 + static_cast<int>(rng() % 4);
    p.channels = 2 + static_cast<int>(rng() % 3);
    p.primary_density = 0.25;
    p.interfaces = 1 + static_cast<int64_t>(rng() % 2);
    p.mindiff = 1 + static_cast<int64_t>(rng() % 2);
    p.max_edges = 6;
    auto ci = scenarios::gen_channel_instance(p, rng());
    if (ci.edges.empty() || ci.edges.size() > 6) continue;
    ++instances;
    for (auto model : {scenarios::Interference::OneHop, scenarios::Interference::TwoHop}) {
      ++checks;
      auto want = scenarios::oracle_channel(ci, model);
      auto got = experiments::run_channel_centralized(ci, model);
      bool ok;
      if (!want.feasible) {
        ++infeasible;
        ok = got.status == solver::Status::Unsat;
      } else {
        ok = got.status == solver::Status::Optimal && got.objective && *got.objective == want.optimum;
        if (!got.violations.empty()) {
          ++violations;
          ok = false;
        }
      }
      if (!ok) {
        ++mismatches;
        if (first_problem.empty())
          first_problem = " first mismatch: instance " + std::to_string(instances) + " oracle " +
                          (want.feasible ? std::to_string(want.optimum) : "infeasible") + " solver " +
                          solver::status_name(got.status) +
                          (got.objective ? " " + std::to_string(*got.objective) : std::string()) +
                          (got.violations.empty() ? "" : " " + got.violations.front());
      }
    }
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = mismatches == 0 && secs < 60;
  o.detail = std::to_string(instances) + " instances x 2 models: " + std::to_string(checks - mismatches) + "/" +
             std::to_string(checks) + " equal to the oracle (" + std::to_string(infeasible) +
             " infeasible), constraint violations " + std::to_string(violations) + ", " + fmt(secs, 1) + " s" +
             first_problem;
  return o;
}

// --- 4 ----------------------------------------------------------------------

Outcome acloud_quality() {
  Outcome o{true, ""};
  Config cfg = scenarios::program_config("acloud");
  for (uint64_t seed : {1, 2, 3}) {
    auto ai = scenarios::gen_acloud_instance(4, 12, seed);
    auto t0 = Clock::now();
    auto r = experiments::run_acloud(ai, cfg);
    const double secs = seconds_since(t0);
    double random_min = INFINITY;
    for (int i = 0; i < 1000; ++i)
      random_min = std::min(random_min, scenarios::load_stdev(scenarios::host_loads(
                                            ai, scenarios::random_feasible_placement(ai, seed * 100'000 + i))));
    const double heur = scenarios::load_stdev(scenarios::host_loads(ai, scenarios::heuristic_placement(ai, 1.05)));
    const bool ok = r.status == solver::Status::Optimal && r.violations.empty() && r.stdev <= random_min + 1e-9 &&
                    r.stdev <= heur + 1e-9 && secs < 30;
    o.pass = o.pass && ok;
    o.detail += "seed " + std::to_string(seed) + ": cop " + fmt(r.stdev) + " random-min " + fmt(random_min) +
                " heuristic " + fmt(heur) + " (" + fmt(secs, 2) + " s" +
                (r.violations.empty() ? "" : ", " + r.violations.front()) + "); ";
  }
  return o;
}

// --- 5 ----------------------------------------------------------------------

Outcome migration_cap() {
  Config cfg = scenarios::program_config("acloud");
  cfg.budget_millis = 10000;
  scenarios::WorkloadParams wp;
  int intervals = 0, worst = 0, solved = 0;
  std::vector<std::string> problems;
  for (uint64_t seed : {1, 2, 3}) {
    for (const auto& r : experiments::run_acloud_workload(wp, seed, cfg, 3)) {
      ++intervals;
      solved += r.status == solver::Status::Optimal || r.status == solver::Status::FeasibleTimeout;
      worst = std::max(worst, r.migrations);
      for (const auto& v : r.violations) problems.push_back(v);
    }
  }
  Outcome o;
  o.pass = worst <= 3 && solved == intervals && problems.empty();
  o.detail = std::to_string(intervals) + " intervals, " + std::to_string(solved) + " solved, max migrations " +
             std::to_string(worst) + (problems.empty() ? "" : ", " + problems.front());
  return o;
}

// --- 6 ----------------------------------------------------------------------

Outcome fts_two_nodes() {
  auto t0 = Clock::now();
  int equal = 0, runs = 0;
  std::string detail;
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    auto fi = scenarios::gen_fts_instance(2, seed);
    auto run = experiments::run_fts(fi, seed);
    auto best = scenarios::oracle_fts(fi);
    ++runs;
    if (run.final_cost == best.optimum && run.violations.empty()) ++equal;
    else if (detail.empty())
      detail = "; seed " + std::to_string(seed) + " distributed " + std::to_string(run.final_cost) + " oracle " +
               std::to_string(best.optimum);
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = equal == runs && secs < 20;
  o.detail = std::to_string(equal) + "/" + std::to_string(runs) + " seeds equal to the global optimum, " +
             fmt(secs, 2) + " s" + detail;
  return o;
}

// --- 7, 8 -------------------------------------------------------------------

struct Sweep {
  std::map<int, std::vector<experiments::FtsRun>> runs;
  double secs = 0;
};

const Sweep& fts_sweep() {
  static Sweep sweep = [] {
    Sweep s;
    auto t0 = Clock::now();
    for (int n : {2, 4, 6, 8, 10})
      for (uint64_t seed = 1; seed <= 20; ++seed) {
        auto run = experiments::run_fts(scenarios::gen_fts_instance(n, seed), seed);
        run.trace_csv.clear();
        run.metrics_csv.clear();
        s.runs[n].push_back(std::move(run));
      }
    s.secs = seconds_since(t0);
    return s;
  }();
  return sweep;
}

Outcome fts_convergence() {
  const auto& s = fts_sweep();
  int total = 0, improved = 0, monotone = 0, exact_count = 0;
  std::map<int, double> mean_reduction;
  for (const auto& [n, runs] : s.runs) {
    double sum = 0;
    for (const auto& r : runs) {
      ++total;
      improved += r.final_cost < r.initial_cost;
      bool mono = true;
      for (size_t i = 1; i < r.normalized.size(); ++i) mono = mono && r.normalized[i] <= r.normalized[i - 1];
      monotone += mono;
      std::set<std::pair<Value, Value>> links;
      for (const auto& rec : r.records) links.insert({std::min(rec.initiator, rec.peer), std::max(rec.initiator, rec.peer)});
      exact_count += r.records.size() == r.links && links.size() == r.links;
      sum += 1.0 - r.normalized.back();
    }
    mean_reduction[n] = sum / static_cast<double>(runs.size());
  }
  Outcome o;
  o.pass = monotone == total && improved * 100 >= 95 * total && mean_reduction[2] > mean_reduction[10] &&
           exact_count == total && s.secs < 600;
  o.detail = "monotone " + std::to_string(monotone) + "/" + std::to_string(total) + ", improved " +
             std::to_string(improved) + "/" + std::to_string(total) + ", negotiations = |E| in " +
             std::to_string(exact_count) + "/" + std::to_string(total) + ", mean reduction";
  for (const auto& [n, v] : mean_reduction) o.detail += " n=" + std::to_string(n) + ":" + fmt(100 * v, 1) + "%";
  o.detail += ", " + fmt(s.secs, 1) + " s";
  return o;
}

Outcome fts_invariants() {
  const auto& s = fts_sweep();
  uint64_t points = 0, bad = 0;
  std::string first;
  for (const auto& [n, runs] : s.runs)
    for (const auto& r : runs) {
      points += r.quiescent_points;
      bad += r.violations.size();
      if (first.empty() && !r.violations.empty()) first = "; n=" + std::to_string(n) + " " + r.violations.front();
    }
  Outcome o;
  o.pass = bad == 0 && points > 0;
  o.detail = std::to_string(points) + " quiescent points checked, " + std::to_string(bad) + " violations" + first;
  return o;
}

// --- 9 ----------------------------------------------------------------------

Outcome psn_equivalence() {
  auto t0 = Clock::now();
  std::mt19937_64 rng(9);
  int programs = 0, failures = 0, orderings = 0;
  std::string first;
  while (programs < 200) {
    const std::string src = testing::random_program(rng);
    ast::Program p = parse_program(src);
    if (!check_program(p).empty()) continue;
    AnnotatedProgram a = annotate(p);
    ++programs;
    std::vector<std::vector<Tuple>> snapshots;
    const auto stream = testing::random_stream(rng, 6, 10, &snapshots);
    std::vector<std::vector<Tuple>> expected;
    for (const auto& base : snapshots) expected.push_back(datalog::naive_fixpoint(a, base));
    for (int ord = 0; ord < 3; ++ord) {
      ++orderings;
      datalog::StoreOptions so;
      so.max_derivations = 5'000'000;
      datalog::Store s(so);
      s.register_program(a);
      std::mt19937_64 shuffle_rng(rng());
      bool ok = true;
      for (size_t b = 0; b < stream.size() && ok; ++b) {
        auto ops = stream[b];
        std::shuffle(ops.begin(), ops.end(), shuffle_rng);
        // ordering 2 reaches a fixpoint after every single operation
        for (const auto& op : ops) {
          s.apply(op);
          if (ord == 2) s.run_to_fixpoint();
        }
        s.run_to_fixpoint();
        ok = s.all_tuples() == expected[b];
      }
      if (!ok) {
        ++failures;
        if (first.empty()) first = "; first failing program:\n" + src;
      }
    }
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = failures == 0 && secs < 120;
  o.detail = std::to_string(programs) + " programs x 3 orderings (" + std::to_string(orderings) + " runs), " +
             std::to_string(failures) + " mismatches, " + fmt(secs, 1) + " s" + first;
  return o;
}

// --- 10 ---------------------------------------------------------------------

Outcome solver_budget() {
  auto ai = scenarios::gen_acloud_instance(10, 40, 1);
  auto a = annotate(parse_program(scenarios::program_text("acloud")));
  Config cfg = scenarios::program_config("acloud");
  cfg.budget_millis = 10000;
  datalog::Store s;
  s.register_program(a);
  for (const auto& t : scenarios::acloud_facts(ai)) s.insert(t);
  s.run_to_fixpoint();
  auto g = solver::ground_model(a, s, cfg);
  auto t0 = Clock::now();
  auto sol = solver::solve(g.model, solver::SolveOptions::from(cfg));
  const double secs = seconds_since(t0);
  std::vector<std::string> bad;
  if (sol.has_assignment()) {
    bad = solver::check_assignment(g.model, sol.values);
    auto placement = scenarios::placement_from_assign(ai, solver::solved_rows(g, "assign", sol.values));
    if (!scenarios::placement_feasible(ai, placement)) bad.push_back("memory capacity exceeded");
  }
  Outcome o;
  o.pass = sol.status == solver::Status::FeasibleTimeout && secs <= 10.5 && bad.empty();
  o.detail = std::string("10 hosts / 40 VMs: ") + solver::status_name(sol.status) + " after " + fmt(secs, 2) +
             " s, " + std::to_string(g.model.vars.size()) + " variables, incumbent violations " +
             std::to_string(bad.size());
  return o;
}

// --- 11 ---------------------------------------------------------------------

Outcome bandwidth_trend() {
  auto t0 = Clock::now();
  auto pts = experiments::run_bandwidth({2, 3, 4, 5, 6, 7, 8, 9, 10}, 5, 300000);
  std::vector<double> x, y;
  std::map<int, double> mean;
  size_t problems = 0;
  for (const auto& p : pts) {
    x.push_back(p.n);
    y.push_back(p.per_node_bps);
    mean[p.n] += p.per_node_bps / 5;
    problems += p.violations.size();
  }
  auto f = experiments::fit_quadratic(x, y);
  // one-sided t test at 95% for a positive quadratic term, df = points - 3
  const double t_crit = 1.682;  // df = 42
  Outcome o;
  o.pass = f.a <= t_crit * f.se_a && problems == 0;
  o.detail = "quadratic coefficient " + fmt(f.a, 4) + " (se " + fmt(f.se_a, 4) + "), linear R^2 " +
             fmt(f.r2_linear, 3) + ", bytes/s per node:";
  for (const auto& [n, v] : mean) o.detail += " " + std::to_string(n) + ":" + fmt(v, 1);
  o.detail += ", " + fmt(seconds_since(t0), 1) + " s";
  return o;
}

// --- 12 ---------------------------------------------------------------------

Outcome determinism() {
  experiments::FtsRunOptions opts;
  opts.fixed_solve_cost_ms = 5;
  opts.duration_ms = 300000;
  auto fi = scenarios::gen_fts_instance(8, 42);
  auto a = experiments::run_fts(fi, 42, opts);
  auto b = experiments::run_fts(fi, 42, opts);
  auto c = experiments::run_fts(fi, 43, opts);
  Outcome o;
  o.pass = !a.trace_csv.empty() && a.trace_csv == b.trace_csv && a.metrics_csv.size() > 0;
  o.detail = std::to_string(a.trace_csv.size()) + " trace bytes, identical: " +
             (a.trace_csv == b.trace_csv ? "yes" : "no") +
             ", different seed differs: " + (a.trace_csv != c.trace_csv ? "yes" : "no");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"solver-table classification", classification},
      {"localization of d2", localization},
      {"channel selection optimality", channel_optimality},
      {"ACloud quality", acloud_quality},
      {"ACloud(M) migration cap", migration_cap},
      {"Follow-the-Sun n=2 optimum", fts_two_nodes},
      {"Follow-the-Sun convergence trend", fts_convergence},
      {"migration symmetry and capacity", fts_invariants},
      {"incremental evaluation equivalence", psn_equivalence},
      {"solver budget", solver_budget},
      {"bandwidth trend", bandwidth_trend},
      {"determinism", determinism},
  };
  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first << ": " << o.detail
              << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed ? 1 : 0;
}
