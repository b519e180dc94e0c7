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

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cologne/config.hpp"
#include "cologne/datalog.hpp"
#include "cologne/value.hpp"

namespace cologne::scenarios {

/// Shipped Colog programs by stem (`acloud`, `follow_the_sun`, ...).
std::vector<std::string> program_names();
const std::string& program_text(const std::string& stem);  // throws Error if unknown
/// Default configuration shipped next to each program.
Config program_config(const std::string& stem);

/// Undirected edges over nodes 0..n-1: a random spanning tree plus random
/// chords up to min(ceil(degree*n/2), n(n-1)/2) edges.
std::vector<std::pair<int, int>> random_graph(int n, double degree, uint64_t seed);

// --- Follow-the-Sun ---------------------------------------------------------

struct FtsInstance {
  int n = 0;
  int64_t capacity = 60;
  std::vector<std::vector<int64_t>> alloc;      // alloc[i][j]: VMs at data center i serving location j
  std::vector<int64_t> op_cost;                 // per data center
  std::vector<std::vector<int64_t>> comm_cost;  // [i][j], 0 on the diagonal
  std::map<std::pair<int, int>, int64_t> mig_cost;  // per link (i<j)
  std::vector<std::pair<int, int>> links;       // i < j
};

/// Capacity 60, allocations uniform 0..10 (a row over capacity is redrawn),
/// communication cost 50..100, migration cost 10..20, operating cost 10,
/// average degree 3.
FtsInstance gen_fts_instance(int n, uint64_t seed);

/// Location facts: curVm, resource, opCost, commCost, migCost, link, dc.
std::vector<Tuple> fts_facts(const FtsInstance& fi);

/// Σ_i Σ_j alloc[i][j]·(op_cost[i] + comm_cost[i][j]).
int64_t fts_placement_cost(const FtsInstance& fi, const std::vector<std::vector<int64_t>>& alloc);

struct FtsMove {
  int from = 0, to = 0, location = 0;
  int64_t count = 0;  // VMs moved from `from` to `to`
};

struct FtsOracleResult {
  int64_t optimum = 0;       // placement cost plus migration cost
  std::vector<FtsMove> moves;
  uint64_t enumerated = 0;
};

/// Exhaustive search over per-link migrations (multiples of `step`) that
/// keep allocations non-negative and within capacity.
FtsOracleResult oracle_fts(const FtsInstance& fi, int64_t step = 1, uint64_t budget = 10'000'000);

// --- channel selection ------------------------------------------------------

enum class Interference { OneHop, TwoHop };

struct ChannelInstance {
  int nodes = 0;
  std::vector<std::pair<int, int>> edges;  // undirected, i < j
  std::vector<std::vector<int64_t>> primary;  // primary-user channels per node
  std::vector<int64_t> interfaces;         // radio interfaces per node
  std::vector<int64_t> channels;           // universe
  int64_t mindiff = 1;
};

enum class ChannelTopology { Grid, Line, Random };

struct ChannelParams {
  ChannelTopology kind = ChannelTopology::Random;
  int size = 4;                   // node count (grid: columns = ceil(sqrt))
  int channels = 3;
  double primary_density = 0.2;   // chance a node's primary users occupy a channel
  int64_t interfaces = 2;
  int64_t mindiff = 1;
  int max_edges = 0;              // 0 = no limit
};

ChannelInstance gen_channel_instance(const ChannelParams& p, uint64_t seed);

/// link (both directions), primaryUser, numInterface facts.
std::vector<Tuple> channel_facts(const ChannelInstance& ci);
Config channel_config(const ChannelInstance& ci);

/// Cost of a channel per undirected edge under the model, counting ordered
/// link pairs like the shipped programs.
int64_t channel_cost(const ChannelInstance& ci, const std::vector<int64_t>& edge_channel, Interference model);

/// Violations of primary-user avoidance, symmetry and the interface bound
/// for a directed assignment (link (x,y) -> channel).
std::vector<std::string> channel_violations(const ChannelInstance& ci,
                                            const std::map<std::pair<int64_t, int64_t>, int64_t>& assignment);

struct ChannelOracleResult {
  bool feasible = false;
  int64_t optimum = 0;
  std::vector<int64_t> edge_channel;
  uint64_t enumerated = 0;
};

ChannelOracleResult oracle_channel(const ChannelInstance& ci, Interference model, uint64_t budget = 10'000'000);

// --- ACloud -----------------------------------------------------------------

struct AcloudInstance {
  std::vector<int64_t> host_cpu;   // base load per host
  std::vector<int64_t> host_mem;   // memory capacity per host (GB)
  std::vector<int64_t> vm_cpu;
  std::vector<int64_t> vm_mem;
  std::vector<int> origin;         // current host per VM
};

AcloudInstance gen_acloud_instance(int hosts, int vms, uint64_t seed);

/// vm, host, hostMemThres and origin facts (hosts are "h0", "h1", ...).
std::vector<Tuple> acloud_facts(const AcloudInstance& ai);

std::vector<int64_t> host_loads(const AcloudInstance& ai, const std::vector<int>& placement);
double load_stdev(const std::vector<int64_t>& loads);
bool placement_feasible(const AcloudInstance& ai, const std::vector<int>& placement);

/// Uniformly random placements that respect memory (rejection sampling).
std::vector<int> random_feasible_placement(const AcloudInstance& ai, uint64_t seed);

/// Moves a VM from the most to the least loaded host while the load ratio
/// is at least `k` and some move lowers the maximum load.
std::vector<int> heuristic_placement(const AcloudInstance& ai, double k = 1.05);

/// Placement read back from solved `assign(Vid,Hid,1)` rows.
std::vector<int> placement_from_assign(const AcloudInstance& ai, const std::vector<Tuple>& assign_rows);

struct WorkloadParams {
  int hosts = 4;
  int customers = 4;
  int vms_per_customer = 3;
  int intervals = 24;
  int64_t interval_ms = 3'600'000;
  int64_t high = 80;   // spawn threshold, average CPU %
  int64_t low = 20;    // stop threshold
  int64_t host_mem = 16;
};

struct WorkloadInterval {
  int64_t time_ms = 0;
  std::vector<datalog::FactOp> ops;  // vm/origin updates for this interval
  int spawned = 0;
  int stopped = 0;
};

/// Synthetic per-customer sinusoidal load with noise. A customer whose
/// average CPU exceeds `high` starts a stopped VM or clones one onto a
/// random host; below `low` it stops one of its VMs.
std::vector<WorkloadInterval> gen_acloud_workload(const WorkloadParams& p, uint64_t seed);

}  // namespace cologne::scenarios
