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

#include "cologne/experiments.hpp"

#include <cmath>
#include <cstdlib>
#include <set>
#include <tuple>

#include "cologne/ground.hpp"
#include "cologne/lang.hpp"

namespace cologne::experiments {

ast::Program shipped_program(const std::vector<std::string>& stems) {
  std::string text;
  for (const auto& s : stems) text += scenarios::program_text(s) + "\n";
  return parse_program(text, stems.empty() ? "<none>" : stems.front() + ".clg");
}

// --- Follow-the-Sun ---------------------------------------------------------

namespace {

int64_t as_int(const Value& v) { return v.as_int(); }

}  // namespace

std::vector<std::string> fts_invariant_violations(const netsim::Sim& sim) {
  std::vector<std::string> out;
  std::map<std::tuple<Value, Value, Value>, int64_t> mig;
  for (auto* n : sim.nodes()) {
    for (const auto& r : n->store().rows("migVm")) mig[{r[0], r[1], r[2]}] = as_int(r[3]);
    int64_t total = 0;
    for (const auto& r : n->store().rows("curVm")) {
      total += as_int(r[2]);
      if (as_int(r[2]) < 0) out.push_back("negative curVm at " + n->id().to_plain());
    }
    auto res = n->store().rows("resource");
    if (!res.empty() && total > as_int(res.front()[1]))
      out.push_back("capacity exceeded at " + n->id().to_plain() + ": " + std::to_string(total));
  }
  for (const auto& [k, v] : mig) {
    const auto& [x, y, d] = k;
    auto it = mig.find({y, x, d});
    if (it == mig.end() || it->second != -v)
      out.push_back("migVm not antisymmetric on (" + x.to_plain() + "," + y.to_plain() + "," + d.to_plain() + ")");
  }
  return out;
}

FtsRun run_fts(const scenarios::FtsInstance& fi, uint64_t seed, const FtsRunOptions& opts) {
  FtsRun run;
  run.n = fi.n;
  run.seed = seed;
  run.links = fi.links.size();
  run.initial_cost = scenarios::fts_placement_cost(fi, fi.alloc);

  Config cfg = scenarios::program_config("follow_the_sun");
  if (opts.fixed_solve_cost_ms > 0) cfg.fixed_solve_cost_ms = opts.fixed_solve_cost_ms;
  if (opts.budget_millis) cfg.budget_millis = *opts.budget_millis;
  netsim::Sim sim(shipped_program({"follow_the_sun", "follow_the_sun_guards"}),
                  netsim::topology_from_edges(fi.n, fi.links, opts.latency_ms), scenarios::fts_facts(fi), cfg, seed);
  if (opts.check_quiescent)
    sim.on_quiescent([&](const netsim::Sim& s) {
      ++run.quiescent_points;
      for (auto& v : fts_invariant_violations(s)) run.violations.push_back("t=" + std::to_string(s.now()) + " " + v);
    });
  if (opts.duration_ms > 0) {
    sim.run_until(opts.duration_ms);
  } else {
    while (!sim.drained()) sim.run_until(sim.now() + 3'600'000);
  }
  run.end_time = sim.now();

  run.records = sim.negotiations();
  int64_t cost = run.initial_cost;
  run.round_cost.push_back(cost);
  std::set<std::pair<Value, Value>> seen;
  for (const auto& r : run.records) {
    if (!seen.insert({std::min(r.initiator, r.peer), std::max(r.initiator, r.peer)}).second)
      run.violations.push_back("link negotiated twice: " + r.initiator.to_plain() + "-" + r.peer.to_plain());
    if (r.objective && r.baseline && r.materialized > 0) cost += *r.objective - *r.baseline;
    else run.violations.push_back("negotiation without a valid solution: " + r.initiator.to_plain() + "-" +
                                  r.peer.to_plain() + " " + solver::status_name(r.status));
    run.round_cost.push_back(cost);
  }
  for (auto c : run.round_cost)
    run.normalized.push_back(run.initial_cost ? static_cast<double>(c) / static_cast<double>(run.initial_cost) : 1.0);

  std::vector<std::vector<int64_t>> alloc(fi.n, std::vector<int64_t>(fi.n, 0));
  int64_t migration = 0;
  for (auto* n : sim.nodes()) {
    const int x = static_cast<int>(n->id().as_int());
    for (const auto& r : n->store().rows("curVm")) alloc[x][as_int(r[1])] = as_int(r[2]);
    for (const auto& r : n->store().rows("migVm")) {
      const int y = static_cast<int>(as_int(r[1]));
      if (x < y) migration += std::llabs(as_int(r[3])) * fi.mig_cost.at({x, y});
    }
  }
  run.final_cost = scenarios::fts_placement_cost(fi, alloc) + migration;
  if (run.final_cost != cost)
    run.violations.push_back("accounted cost " + std::to_string(cost) + " differs from recomputed " +
                             std::to_string(run.final_cost));
  if (opts.check_quiescent)
    for (auto& v : fts_invariant_violations(sim)) run.violations.push_back("final " + v);

  run.bytes_sent = sim.bytes_sent();
  for (const auto& [id, b] : sim.bytes_received()) run.bytes_received += b;
  run.bytes_dropped = sim.bytes_dropped();
  run.trace_csv = sim.trace_csv();
  run.metrics_csv = sim.metrics_csv();
  return run;
}

// --- ACloud -----------------------------------------------------------------

AcloudRun run_acloud(const scenarios::AcloudInstance& ai, const Config& base, std::optional<int64_t> max_migrates) {
  AcloudRun out;
  const std::string stem = max_migrates ? "acloud_migration_limit" : "acloud";
  AnnotatedProgram a = annotate(shipped_program({stem}));
  Config cfg = base;
  if (!cfg.domains.count("assign")) cfg.domains["assign"] = {0, 1, false};
  if (max_migrates) cfg.consts["max_migrates"] = *max_migrates;
  datalog::StoreOptions so;
  so.consts = cfg.consts;
  datalog::Store s(so);
  s.register_program(a);
  for (const auto& t : scenarios::acloud_facts(ai)) s.insert(t);
  s.run_to_fixpoint();
  auto g = solver::ground_model(a, s, cfg);
  auto sol = solver::solve(g.model, solver::SolveOptions::from(cfg));
  out.status = sol.status;
  out.solve_ms = sol.solve_millis;
  out.nodes = sol.nodes;
  if (!sol.has_assignment()) return out;
  for (auto& v : solver::check_assignment(g.model, sol.values)) out.violations.push_back("checker: " + v);
  const auto rows = solver::solved_rows(g, "assign", sol.values);
  std::map<Value, int> hosts_per_vm;
  for (const auto& t : rows) hosts_per_vm[t.values[0]] += t.values[2] == Value(1) ? 1 : 0;
  for (const auto& [vm, k] : hosts_per_vm)
    if (k != 1) out.violations.push_back("c1: vm " + vm.to_plain() + " on " + std::to_string(k) + " hosts");
  out.placement = scenarios::placement_from_assign(ai, rows);
  if (!scenarios::placement_feasible(ai, out.placement)) out.violations.push_back("c2: memory capacity exceeded");
  out.stdev = scenarios::load_stdev(scenarios::host_loads(ai, out.placement));
  for (size_t v = 0; v < ai.origin.size(); ++v) out.migrations += out.placement[v] != ai.origin[v];
  return out;
}

std::vector<AcloudIntervalResult> run_acloud_workload(const scenarios::WorkloadParams& wp, uint64_t seed,
                                                      const Config& base, std::optional<int64_t> max_migrates) {
  const std::string stem = max_migrates ? "acloud_migration_limit" : "acloud";
  AnnotatedProgram a = annotate(shipped_program({stem}));
  Config cfg = base;
  if (!cfg.domains.count("assign")) cfg.domains["assign"] = {0, 1, false};
  if (max_migrates) cfg.consts["max_migrates"] = *max_migrates;
  datalog::StoreOptions so;
  so.consts = cfg.consts;
  datalog::Store s(so);
  s.register_program(a);
  std::map<Value, Value> origin;  // vm -> current host
  std::vector<AcloudIntervalResult> out;
  for (const auto& iv : scenarios::gen_acloud_workload(wp, seed)) {
    for (const auto& op : iv.ops) {
      if (op.tuple.pred == "origin") {
        const Value& vm = op.tuple.values[0];
        if (op.kind == datalog::OpKind::Delete) {
          if (auto it = origin.find(vm); it != origin.end()) {
            s.remove({"origin", {vm, it->second}});
            origin.erase(it);
          }
        } else {
          origin[vm] = op.tuple.values[1];
          s.insert(op.tuple);
        }
        continue;
      }
      s.apply(op);
    }
    s.run_to_fixpoint();

    // the same instance as plain arrays, for the baselines and the checks
    scenarios::AcloudInstance ai;
    std::map<Value, int> host_index;
    for (const auto& r : s.rows("host")) {
      host_index[r[0]] = static_cast<int>(ai.host_cpu.size());
      ai.host_cpu.push_back(r[1].as_int());
      ai.host_mem.push_back(r[2].as_int());
    }
    std::vector<Value> vm_ids;
    for (const auto& r : s.rows("vm")) {
      vm_ids.push_back(r[0]);
      ai.vm_cpu.push_back(r[1].as_int());
      ai.vm_mem.push_back(r[2].as_int());
      ai.origin.push_back(host_index.at(origin.at(r[0])));
    }
    AcloudIntervalResult res;
    res.time_ms = iv.time_ms;
    res.vms = static_cast<int>(vm_ids.size());
    res.origin_stdev = scenarios::load_stdev(scenarios::host_loads(ai, ai.origin));
    res.heuristic_stdev = scenarios::load_stdev(scenarios::host_loads(ai, scenarios::heuristic_placement(ai)));

    auto g = solver::ground_model(a, s, cfg);
    auto sol = solver::solve(g.model, solver::SolveOptions::from(cfg));
    res.status = sol.status;
    if (sol.has_assignment()) {
      for (auto& v : solver::check_assignment(g.model, sol.values)) res.violations.push_back("checker: " + v);
      std::map<Value, Value> placed;
      for (const auto& t : solver::solved_rows(g, "assign", sol.values))
        if (t.values[2] == Value(1)) {
          if (placed.count(t.values[0])) res.violations.push_back("c1: vm " + t.values[0].to_plain() + " placed twice");
          placed[t.values[0]] = t.values[1];
        }
      std::vector<int> placement;
      for (const auto& vm : vm_ids) {
        auto it = placed.find(vm);
        if (it == placed.end()) {
          res.violations.push_back("c1: vm " + vm.to_plain() + " not placed");
          placement.push_back(host_index.at(origin.at(vm)));
          continue;
        }
        placement.push_back(host_index.at(it->second));
        if (it->second != origin.at(vm)) {
          ++res.migrations;
          s.remove({"origin", {vm, origin.at(vm)}});
          s.insert({"origin", {vm, it->second}});
          origin[vm] = it->second;
        }
      }
      if (!scenarios::placement_feasible(ai, placement)) res.violations.push_back("c2: memory capacity exceeded");
      res.stdev = scenarios::load_stdev(scenarios::host_loads(ai, placement));
      s.run_to_fixpoint();
    } else {
      res.stdev = res.origin_stdev;
    }
    out.push_back(std::move(res));
  }
  return out;
}

// --- channel selection ------------------------------------------------------

ChannelRun run_channel_centralized(const scenarios::ChannelInstance& ci, scenarios::Interference model,
                                   const Config& extra) {
  ChannelRun out;
  const std::string stem =
      model == scenarios::Interference::OneHop ? "channel_centralized" : "channel_centralized_twohop";
  AnnotatedProgram a = annotate(shipped_program({stem}));
  Config cfg = scenarios::channel_config(ci);
  cfg.budget_millis = extra.budget_millis;
  cfg.branching = extra.branching;
  cfg.value_order = extra.value_order;
  datalog::StoreOptions so;
  so.consts = cfg.consts;
  datalog::Store s(so);
  s.register_program(a);
  for (const auto& t : scenarios::channel_facts(ci)) s.insert(t);
  s.run_to_fixpoint();
  auto g = solver::ground_model(a, s, cfg);
  auto sol = solver::solve(g.model, solver::SolveOptions::from(cfg));
  out.status = sol.status;
  out.objective = sol.objective;
  out.solve_ms = sol.solve_millis;
  if (!sol.has_assignment()) return out;
  for (auto& v : solver::check_assignment(g.model, sol.values)) out.violations.push_back("checker: " + v);
  for (const auto& t : solver::solved_rows(g, "assign", sol.values))
    out.assignment[{t.values[0].as_int(), t.values[1].as_int()}] = t.values[2].as_int();
  for (auto& v : scenarios::channel_violations(ci, out.assignment)) out.violations.push_back(v);
  return out;
}

// --- bandwidth --------------------------------------------------------------

namespace {

// Solves the k×k normal equations in place (Gaussian elimination with
// partial pivoting); returns the inverse diagonal too.
std::vector<double> least_squares(const std::vector<std::vector<double>>& X, const std::vector<double>& y,
                                  std::vector<double>* inv_diag) {
  const size_t k = X.front().size();
  std::vector<std::vector<double>> A(k, std::vector<double>(2 * k + 1, 0));
  for (size_t r = 0; r < X.size(); ++r)
    for (size_t i = 0; i < k; ++i) {
      for (size_t j = 0; j < k; ++j) A[i][j] += X[r][i] * X[r][j];
      A[i][2 * k] += X[r][i] * y[r];
    }
  for (size_t i = 0; i < k; ++i) A[i][k + i] = 1;
  for (size_t c = 0; c < k; ++c) {
    size_t p = c;
    for (size_t r = c + 1; r < k; ++r)
      if (std::fabs(A[r][c]) > std::fabs(A[p][c])) p = r;
    std::swap(A[c], A[p]);
    const double d = A[c][c];
    if (std::fabs(d) < 1e-12) throw Error("least squares: singular design");
    for (auto& v : A[c]) v /= d;
    for (size_t r = 0; r < k; ++r) {
      if (r == c) continue;
      const double f = A[r][c];
      for (size_t j = 0; j <= 2 * k; ++j) A[r][j] -= f * A[c][j];
    }
  }
  std::vector<double> beta(k);
  for (size_t i = 0; i < k; ++i) beta[i] = A[i][2 * k];
  if (inv_diag) {
    inv_diag->resize(k);
    for (size_t i = 0; i < k; ++i) (*inv_diag)[i] = A[i][k + i];
  }
  return beta;
}

}  // namespace

QuadFit fit_quadratic(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 4) throw Error("fit_quadratic: need at least 4 points");
  std::vector<std::vector<double>> X;
  for (double v : x) X.push_back({v * v, v, 1.0});
  std::vector<double> inv;
  auto beta = least_squares(X, y, &inv);
  double rss = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (beta[0] * x[i] * x[i] + beta[1] * x[i] + beta[2]);
    rss += e * e;
  }
  QuadFit f;
  f.a = beta[0];
  f.b = beta[1];
  f.c = beta[2];
  f.se_a = std::sqrt(rss / static_cast<double>(x.size() - 3) * inv[0]);

  std::vector<std::vector<double>> L;
  for (double v : x) L.push_back({v, 1.0});
  auto lin = least_squares(L, y, nullptr);
  double mean = 0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double tss = 0, lrss = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    tss += (y[i] - mean) * (y[i] - mean);
    const double e = y[i] - (lin[0] * x[i] + lin[1]);
    lrss += e * e;
  }
  f.r2_linear = tss > 0 ? 1 - lrss / tss : 1;
  return f;
}

}  // namespace cologne::experiments
