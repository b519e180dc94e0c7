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
#include <functional>
#include <set>

#include "cologne/experiments.hpp"
#include "cologne/scenarios.hpp"
#include "doctest.h"

using namespace cologne;
using namespace cologne::scenarios;

namespace {

int total_spawned(const std::vector<WorkloadInterval>& w) {
  int s = 0;
  for (const auto& iv : w) s += iv.spawned;
  return s;
}

int total_stopped(const std::vector<WorkloadInterval>& w) {
  int s = 0;
  for (const auto& iv : w) s += iv.stopped;
  return s;
}

ChannelInstance bare(int nodes, std::vector<std::pair<int, int>> edges, std::vector<int64_t> channels) {
  ChannelInstance ci;
  ci.nodes = nodes;
  ci.edges = std::move(edges);
  ci.primary.assign(nodes, {});
  ci.interfaces.assign(nodes, 2);
  ci.channels = std::move(channels);
  ci.mindiff = 1;
  return ci;
}

}  // namespace

TEST_CASE("random graph edge counts") {
  CHECK(random_graph(10, 3, 42).size() == 15);
  CHECK(random_graph(2, 3, 1).size() == 1);
  CHECK(random_graph(4, 3, 1).size() == 6);
  for (uint64_t seed = 1; seed <= 30; ++seed) {
    auto g = random_graph(9, 3, seed);
    CHECK(g.size() == 14);
    std::set<std::pair<int, int>> uniq(g.begin(), g.end());
    CHECK(uniq.size() == g.size());
    // spanning: union-find over the edges reaches every node
    std::vector<int> parent(9);
    for (int i = 0; i < 9; ++i) parent[i] = i;
    std::function<int(int)> root = [&](int v) { return parent[v] == v ? v : parent[v] = root(parent[v]); };
    for (auto [a, b] : g) {
      CHECK(a < b);
      parent[root(a)] = root(b);
    }
    for (int i = 0; i < 9; ++i) CHECK(root(i) == root(0));
  }
}

TEST_CASE("Follow-the-Sun instances") {
  auto fi = gen_fts_instance(2, 3);
  CHECK(fi.n == 2);
  CHECK(fi.links.size() == 1);
  CHECK(fi.op_cost == std::vector<int64_t>{10, 10});
  CHECK(gen_fts_instance(10, 42).links.size() == 15);
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    auto g = gen_fts_instance(6, seed);
    for (int i = 0; i < g.n; ++i) {
      int64_t row = 0;
      for (int j = 0; j < g.n; ++j) {
        CHECK(g.alloc[i][j] >= 0);
        CHECK(g.alloc[i][j] <= 10);
        row += g.alloc[i][j];
        if (i == j) CHECK(g.comm_cost[i][j] == 0);
        else CHECK((g.comm_cost[i][j] >= 50 && g.comm_cost[i][j] <= 100));
      }
      CHECK(row <= g.capacity);
    }
    for (const auto& [link, c] : g.mig_cost) CHECK((c >= 10 && c <= 20));
  }
}

TEST_CASE("same seed gives the same instance") {
  auto a = gen_fts_instance(7, 99), b = gen_fts_instance(7, 99);
  CHECK(a.alloc == b.alloc);
  CHECK(a.comm_cost == b.comm_cost);
  CHECK(a.mig_cost == b.mig_cost);
  CHECK(a.links == b.links);
  CHECK(fts_facts(a) == fts_facts(b));
  auto c = gen_acloud_instance(4, 10, 5), d = gen_acloud_instance(4, 10, 5);
  CHECK(acloud_facts(c) == acloud_facts(d));
}

TEST_CASE("Follow-the-Sun oracle") {
  SUBCASE("zero demand") {
    auto fi = gen_fts_instance(2, 1);
    for (auto& row : fi.alloc) std::fill(row.begin(), row.end(), 0);
    auto r = oracle_fts(fi);
    CHECK(r.optimum == 0);
    CHECK(r.moves.empty());
  }
  SUBCASE("migration dearer than the savings") {
    auto fi = gen_fts_instance(2, 2);
    fi.mig_cost[{0, 1}] = 1000;
    auto r = oracle_fts(fi);
    CHECK(r.optimum == fts_placement_cost(fi, fi.alloc));
    CHECK(r.moves.empty());
  }
  SUBCASE("moves stop at the capacity") {
    FtsInstance fi;
    fi.n = 2;
    fi.capacity = 8;
    fi.alloc = {{0, 0}, {10, 0}};
    fi.op_cost = {10, 10};
    fi.comm_cost = {{0, 100}, {100, 0}};
    fi.mig_cost = {{{0, 1}, 10}};
    fi.links = {{0, 1}};
    auto r = oracle_fts(fi);
    REQUIRE(r.moves.size() == 1);
    const auto& m = r.moves[0];
    // a move is reported once per link, in either orientation
    CHECK(((m.from == 1 && m.to == 0 && m.count == 8) || (m.from == 0 && m.to == 1 && m.count == -8)));
    CHECK(m.location == 0);
    CHECK(r.optimum == 8 * 10 + 2 * 110 + 8 * 10);
  }
}

TEST_CASE("ACloud workload thresholds") {
  WorkloadParams p;
  p.intervals = 6;
  SUBCASE("always over the high threshold spawns") {
    p.high = -1;
    p.low = -2;
    auto w = gen_acloud_workload(p, 1);
    CHECK(total_spawned(w) == p.customers * p.intervals);
    CHECK(total_stopped(w) == 0);
  }
  SUBCASE("always under the low threshold stops") {
    p.high = 100000;
    p.low = 99999;
    auto w = gen_acloud_workload(p, 1);
    CHECK(total_spawned(w) == 0);
    CHECK(total_stopped(w) == p.customers * (p.vms_per_customer - 1));
  }
  SUBCASE("between the thresholds nothing happens") {
    p.high = 100000;
    p.low = -1;
    auto w = gen_acloud_workload(p, 1);
    CHECK(total_spawned(w) == 0);
    CHECK(total_stopped(w) == 0);
    CHECK(w.size() == static_cast<size_t>(p.intervals));
  }
}

TEST_CASE("ACloud heuristic baseline") {
  AcloudInstance balanced;
  balanced.host_cpu = {10, 10};
  balanced.host_mem = {16, 16};
  balanced.vm_cpu = {20, 20};
  balanced.vm_mem = {1, 1};
  balanced.origin = {0, 1};
  CHECK(heuristic_placement(balanced) == balanced.origin);

  AcloudInstance hot = balanced;
  hot.origin = {0, 0};
  auto moved = heuristic_placement(hot);
  CHECK(moved != hot.origin);
  CHECK(load_stdev(host_loads(hot, moved)) < load_stdev(host_loads(hot, hot.origin)));
}

TEST_CASE("channel oracle") {
  CHECK(oracle_channel(bare(3, {{0, 1}, {1, 2}, {0, 2}}, {1, 2, 3}), Interference::OneHop).optimum == 0);
  auto single = oracle_channel(bare(2, {{0, 1}}, {1}), Interference::OneHop);
  CHECK(single.feasible);
  CHECK(single.optimum == 0);
  CHECK(single.edge_channel == std::vector<int64_t>{1});
  auto pair = oracle_channel(bare(3, {{0, 1}, {1, 2}}, {1}), Interference::OneHop);
  CHECK(pair.feasible);
  CHECK(pair.optimum == 2);  // one conflicting pair, counted in both orders

  auto blocked = bare(2, {{0, 1}}, {1, 2});
  blocked.primary[0] = {1, 2};
  CHECK_FALSE(oracle_channel(blocked, Interference::OneHop).feasible);

  ChannelParams line;
  line.kind = ChannelTopology::Line;
  line.size = 3;
  CHECK(gen_channel_instance(line, 1).edges.size() == 2);
}

TEST_CASE("centralized channel selection matches the oracle on a line") {
  ChannelParams p;
  p.kind = ChannelTopology::Line;
  p.size = 4;
  p.channels = 3;
  p.primary_density = 0;
  auto ci = gen_channel_instance(p, 1);
  for (auto model : {Interference::OneHop, Interference::TwoHop}) {
    auto oracle = oracle_channel(ci, model);
    auto run = experiments::run_channel_centralized(ci, model);
    REQUIRE(oracle.feasible);
    REQUIRE(run.objective);
    CHECK(*run.objective == oracle.optimum);
    CHECK(channel_violations(ci, run.assignment).empty());
  }
}

TEST_CASE("shipped programs and configs load") {
  auto names = program_names();
  for (const char* stem : {"acloud", "acloud_migration_limit", "follow_the_sun", "channel_centralized",
                           "channel_distributed"})
    CHECK(std::find(names.begin(), names.end(), stem) != names.end());
  CHECK_THROWS_AS(program_text("no_such_program"), Error);
  CHECK(program_config("follow_the_sun").negotiation_period_ms == 5000);
}
