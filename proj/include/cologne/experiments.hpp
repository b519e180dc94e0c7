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
#include <vector>

#include "cologne/config.hpp"
#include "cologne/netsim.hpp"
#include "cologne/scenarios.hpp"

namespace cologne::experiments {

/// Parsed concatenation of shipped program stems.
ast::Program shipped_program(const std::vector<std::string>& stems);

// --- Follow-the-Sun ---------------------------------------------------------

struct FtsRunOptions {
  int64_t fixed_solve_cost_ms = 5;  // 0 = measured solve time
  int64_t duration_ms = 0;          // 0 = run until no events remain
  int64_t latency_ms = 1;
  std::optional<int64_t> budget_millis;
  bool check_quiescent = true;
};

struct FtsRun {
  int n = 0;
  uint64_t seed = 0;
  size_t links = 0;
  int64_t initial_cost = 0;
  int64_t final_cost = 0;            // recomputed from the final allocations
  std::vector<int64_t> round_cost;   // global cost after each negotiation
  std::vector<double> normalized;    // round_cost / initial_cost, starting with 1
  std::vector<runtime::NegotiationRecord> records;
  std::vector<std::string> violations;  // protocol and invariant failures
  uint64_t quiescent_points = 0;
  std::map<NodeId, uint64_t> bytes_sent;
  uint64_t bytes_received = 0;
  uint64_t bytes_dropped = 0;
  int64_t end_time = 0;
  std::string trace_csv;
  std::string metrics_csv;
};

/// Runs the distributed Follow-the-Sun program (with allocation guards)
/// on a generated instance. Cost of round k is the cost of round k-1 plus
/// the negotiated objective minus the same objective without migration.
FtsRun run_fts(const scenarios::FtsInstance& fi, uint64_t seed, const FtsRunOptions& opts = {});

/// Antisymmetry of migVm across every link and Σ_D curVm ≤ resource.
std::vector<std::string> fts_invariant_violations(const netsim::Sim& sim);

// --- ACloud -----------------------------------------------------------------

struct AcloudRun {
  solver::Status status = solver::Status::Unknown;
  std::vector<int> placement;
  double stdev = 0;
  int migrations = 0;
  double solve_ms = 0;
  uint64_t nodes = 0;
  std::vector<std::string> violations;  // c1 / c2 failures, checker failures
};

/// Centralized ACloud (or ACloud(M) when `max_migrates` is set).
AcloudRun run_acloud(const scenarios::AcloudInstance& ai, const Config& base, std::optional<int64_t> max_migrates = {});

struct AcloudIntervalResult {
  int64_t time_ms = 0;
  solver::Status status = solver::Status::Unknown;
  int vms = 0;
  int migrations = 0;
  double stdev = 0;            // COP placement
  double origin_stdev = 0;     // before re-placement
  double heuristic_stdev = 0;  // heuristic applied to the same origin
  std::vector<std::string> violations;
};

/// Re-places VMs every workload interval, starting from the previous
/// interval's placement (ACloud(M) when `max_migrates` is set).
std::vector<AcloudIntervalResult> run_acloud_workload(const scenarios::WorkloadParams& wp, uint64_t seed,
                                                      const Config& base, std::optional<int64_t> max_migrates);

// --- channel selection ------------------------------------------------------

struct ChannelRun {
  solver::Status status = solver::Status::Unknown;
  std::optional<int64_t> objective;
  std::map<std::pair<int64_t, int64_t>, int64_t> assignment;  // directed link -> channel
  std::vector<std::string> violations;
  double solve_ms = 0;
};

ChannelRun run_channel_centralized(const scenarios::ChannelInstance& ci, scenarios::Interference model,
                                   const Config& extra = {});

// --- bandwidth --------------------------------------------------------------

struct QuadFit {
  double a = 0, b = 0, c = 0;     // y = a·n² + b·n + c
  double se_a = 0;                // standard error of a
  double r2_linear = 0;           // R² of the linear fit
};

QuadFit fit_quadratic(const std::vector<double>& x, const std::vector<double>& y);

struct BandwidthPoint {
  int n = 0;
  uint64_t seed = 0;
  double per_node_bps = 0;  // bytes per second per node over the run
  std::vector<std::string> violations;
};

/// Follow-the-Sun runs for each (n, seed) over a fixed virtual duration.
std::vector<BandwidthPoint> run_bandwidth(const std::vector<int>& ns, int seeds, int64_t duration_ms);

// --- command-line style entry points ----------------------------------------

using Params = std::map<std::string, std::string>;

/// `k=v k2=v2` (whitespace separated). Throws Error on a token without `=`.
Params parse_params(std::string_view text);
int64_t param_int(const Params& p, const std::string& key, int64_t fallback);
double param_double(const Params& p, const std::string& key, double fallback);

/// Instance generators: fts (n, seed), acloud (hosts, vms, seed), channel
/// (nodes, channels, topology, density, interfaces, mindiff, seed).
void generate(const std::string& kind, const Params& p, std::string* facts, std::string* topology);

/// key=value report of the oracle for a generated instance.
std::string oracle_report(const std::string& kind, const Params& p);

/// Tab-separated summary of the evaluation scenarios.
std::string bench(const std::string& which, const Params& p);

}  // namespace cologne::experiments
