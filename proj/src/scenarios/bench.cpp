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
#include <chrono>
#include <cmath>
#include <initializer_list>
#include <numeric>
#include <sstream>

#include "cologne/experiments.hpp"
#include "cologne/netsim.hpp"

namespace cologne::experiments {

std::vector<BandwidthPoint> run_bandwidth(const std::vector<int>& ns, int seeds, int64_t duration_ms) {
  std::vector<BandwidthPoint> out;
  for (int n : ns)
    for (int s = 1; s <= seeds; ++s) {
      auto fi = scenarios::gen_fts_instance(n, static_cast<uint64_t>(s));
      FtsRunOptions o;
      o.duration_ms = duration_ms;
      o.check_quiescent = false;
      FtsRun r = run_fts(fi, static_cast<uint64_t>(s), o);
      uint64_t total = 0;
      for (const auto& [id, b] : r.bytes_sent) total += b;
      BandwidthPoint p;
      p.n = n;
      p.seed = static_cast<uint64_t>(s);
      p.per_node_bps = static_cast<double>(total) / n / (static_cast<double>(duration_ms) / 1000.0);
      p.violations = r.violations;
      out.push_back(std::move(p));
    }
  return out;
}

Params parse_params(std::string_view text) {
  Params p;
  std::istringstream in{std::string(text)};
  for (std::string tok; in >> tok;) {
    auto eq = tok.find('=');
    if (eq == std::string::npos || eq == 0) throw Error("expected key=value, got '" + tok + "'");
    p[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  return p;
}

int64_t param_int(const Params& p, const std::string& key, int64_t fallback) {
  auto it = p.find(key);
  if (it == p.end()) return fallback;
  try {
    size_t used = 0;
    int64_t v = std::stoll(it->second, &used);
    if (used == it->second.size()) return v;
  } catch (...) {
  }
  throw Error("parameter " + key + " must be an integer");
}

double param_double(const Params& p, const std::string& key, double fallback) {
  auto it = p.find(key);
  if (it == p.end()) return fallback;
  try {
    return std::stod(it->second);
  } catch (...) {
    throw Error("parameter " + key + " must be a number");
  }
}

namespace {

void allow_only(const Params& p, std::initializer_list<const char*> keys, const std::string& what) {
  for (const auto& [k, v] : p) {
    bool ok = false;
    for (const char* a : keys) ok |= k == a;
    if (ok) continue;
    std::string list;
    for (const char* a : keys) list += std::string(list.empty() ? "" : ", ") + a;
    throw Error("unknown parameter '" + k + "' for " + what + " (" + list + ")");
  }
}

#define CHANNEL_KEYS "nodes", "channels", "density", "interfaces", "mindiff", "max_edges", "topology", "seed"

scenarios::ChannelParams channel_params(const Params& p) {
  scenarios::ChannelParams cp;
  cp.size = static_cast<int>(param_int(p, "nodes", 4));
  cp.channels = static_cast<int>(param_int(p, "channels", 3));
  cp.primary_density = param_double(p, "density", 0.2);
  cp.interfaces = param_int(p, "interfaces", 2);
  cp.mindiff = param_int(p, "mindiff", 1);
  cp.max_edges = static_cast<int>(param_int(p, "max_edges", 0));
  auto it = p.find("topology");
  const std::string kind = it == p.end() ? "random" : it->second;
  if (kind == "grid") cp.kind = scenarios::ChannelTopology::Grid;
  else if (kind == "line") cp.kind = scenarios::ChannelTopology::Line;
  else if (kind == "random") cp.kind = scenarios::ChannelTopology::Random;
  else throw Error("unknown channel topology '" + kind + "'");
  return cp;
}

uint64_t seed_of(const Params& p) { return static_cast<uint64_t>(param_int(p, "seed", 1)); }

std::string fmt(double v, int prec = 3) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(prec);
  os << v;
  return os.str();
}

double mean(const std::vector<double>& v) {
  return v.empty() ? 0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

void generate(const std::string& kind, const Params& p, std::string* facts, std::string* topology) {
  std::vector<Tuple> f;
  std::optional<netsim::Topology> topo;
  if (kind == "fts") {
    allow_only(p, {"n", "seed"}, "gen fts");
    auto fi = scenarios::gen_fts_instance(static_cast<int>(param_int(p, "n", 4)), seed_of(p));
    f = scenarios::fts_facts(fi);
    topo = netsim::topology_from_edges(fi.n, fi.links);
    topo->programs = {"follow_the_sun", "follow_the_sun_guards"};
  } else if (kind == "acloud") {
    allow_only(p, {"hosts", "vms", "seed"}, "gen acloud");
    auto ai = scenarios::gen_acloud_instance(static_cast<int>(param_int(p, "hosts", 4)),
                                             static_cast<int>(param_int(p, "vms", 12)), seed_of(p));
    f = scenarios::acloud_facts(ai);
    topo = netsim::Topology{};
    topo->nodes = {Value(0)};
    topo->programs = {"acloud"};
  } else if (kind == "channel") {
    allow_only(p, {CHANNEL_KEYS}, "gen channel");
    auto ci = scenarios::gen_channel_instance(channel_params(p), seed_of(p));
    f = scenarios::channel_facts(ci);
    topo = netsim::topology_from_edges(ci.nodes, ci.edges);
    topo->programs = {"channel_distributed"};
  } else {
    throw Error("unknown scenario kind '" + kind + "' (fts, acloud, channel)");
  }
  if (facts) *facts = datalog::format_facts(f);
  if (topology) *topology = netsim::format_topology(*topo);
}

std::string oracle_report(const std::string& kind, const Params& p) {
  std::ostringstream os;
  if (kind == "fts") {
    allow_only(p, {"n", "seed", "step", "budget"}, "oracle fts");
    auto fi = scenarios::gen_fts_instance(static_cast<int>(param_int(p, "n", 2)), seed_of(p));
    auto r = scenarios::oracle_fts(fi, param_int(p, "step", 1),
                                   static_cast<uint64_t>(param_int(p, "budget", 10'000'000)));
    os << "kind=fts\nn=" << fi.n << "\ninitial_cost=" << scenarios::fts_placement_cost(fi, fi.alloc)
       << "\noptimum=" << r.optimum << "\nenumerated=" << r.enumerated << '\n';
    for (const auto& m : r.moves)
      os << "move from=" << m.from << " to=" << m.to << " location=" << m.location << " count=" << m.count << '\n';
  } else if (kind == "acloud") {
    allow_only(p, {"hosts", "vms", "seed", "samples", "k"}, "oracle acloud");
    auto ai = scenarios::gen_acloud_instance(static_cast<int>(param_int(p, "hosts", 4)),
                                             static_cast<int>(param_int(p, "vms", 12)), seed_of(p));
    const int64_t samples = param_int(p, "samples", 1000);
    double best = INFINITY;
    for (int64_t i = 0; i < samples; ++i)
      best = std::min(best, scenarios::load_stdev(scenarios::host_loads(
                                ai, scenarios::random_feasible_placement(ai, seed_of(p) * 1'000'003 + i))));
    const double k = param_double(p, "k", 1.05);
    os << "kind=acloud\nrandom_samples=" << samples << "\nrandom_min_stdev=" << fmt(best)
       << "\nheuristic_stdev=" << fmt(scenarios::load_stdev(scenarios::host_loads(ai, scenarios::heuristic_placement(ai, k))))
       << "\norigin_stdev=" << fmt(scenarios::load_stdev(scenarios::host_loads(ai, ai.origin))) << '\n';
  } else if (kind == "channel" || kind == "channel2") {
    allow_only(p, {CHANNEL_KEYS, "budget"}, "oracle " + kind);
    auto ci = scenarios::gen_channel_instance(channel_params(p), seed_of(p));
    auto model = kind == "channel" ? scenarios::Interference::OneHop : scenarios::Interference::TwoHop;
    auto r = scenarios::oracle_channel(ci, model, static_cast<uint64_t>(param_int(p, "budget", 10'000'000)));
    os << "kind=" << kind << "\nedges=" << ci.edges.size() << "\nfeasible=" << (r.feasible ? 1 : 0);
    if (r.feasible) {
      os << "\noptimum=" << r.optimum << "\nchannels=";
      for (size_t i = 0; i < r.edge_channel.size(); ++i) os << (i ? "," : "") << r.edge_channel[i];
    }
    os << "\nenumerated=" << r.enumerated << '\n';
  } else {
    throw Error("unknown oracle kind '" + kind + "' (fts, acloud, channel, channel2)");
  }
  return os.str();
}

std::string bench(const std::string& which, const Params& p) {
  allow_only(p, {"quick", "seeds", "budget_millis", "duration_ms"}, "bench");
  const bool quick = param_int(p, "quick", 0) != 0;
  const bool all = which == "all";
  if (!all && which != "fts" && which != "acloud" && which != "channel" && which != "bandwidth")
    throw Error("unknown bench '" + which + "' (fts, acloud, channel, bandwidth, all)");
  std::ostringstream os;
  os << "scenario\tsetting\tmetric\tvalue\n";
  auto row = [&](const std::string& sc, const std::string& set, const std::string& metric, const std::string& v) {
    os << sc << '\t' << set << '\t' << metric << '\t' << v << '\n';
  };

  if (all || which == "fts") {
    const int seeds = static_cast<int>(param_int(p, "seeds", quick ? 3 : 20));
    for (int n : {2, 4, 6, 8, 10}) {
      std::vector<double> reduction;
      size_t violations = 0, improved = 0, negotiations = 0, links = 0;
      for (int s = 1; s <= seeds; ++s) {
        auto r = run_fts(scenarios::gen_fts_instance(n, static_cast<uint64_t>(s)), static_cast<uint64_t>(s));
        reduction.push_back(1.0 - r.normalized.back());
        violations += r.violations.size();
        improved += r.final_cost < r.initial_cost;
        negotiations += r.records.size();
        links += r.links;
      }
      const std::string set = "n=" + std::to_string(n) + " seeds=" + std::to_string(seeds);
      row("fts", set, "mean_cost_reduction", fmt(mean(reduction)));
      row("fts", set, "runs_improved", std::to_string(improved));
      row("fts", set, "negotiations_per_link", fmt(static_cast<double>(negotiations) / static_cast<double>(links)));
      row("fts", set, "violations", std::to_string(violations));
    }
  }
  if (all || which == "acloud") {
    const int seeds = static_cast<int>(param_int(p, "seeds", quick ? 2 : 5));
    Config cfg = scenarios::program_config("acloud");
    cfg.budget_millis = param_int(p, "budget_millis", 30000);
    for (int s = 1; s <= seeds; ++s) {
      auto ai = scenarios::gen_acloud_instance(4, 12, static_cast<uint64_t>(s));
      auto r = run_acloud(ai, cfg);
      auto m = run_acloud(ai, cfg, 3);
      const std::string set = "hosts=4 vms=12 seed=" + std::to_string(s);
      row("acloud", set, "origin_stdev", fmt(scenarios::load_stdev(scenarios::host_loads(ai, ai.origin))));
      row("acloud", set, "heuristic_stdev",
          fmt(scenarios::load_stdev(scenarios::host_loads(ai, scenarios::heuristic_placement(ai)))));
      row("acloud", set, "cop_stdev", fmt(r.stdev));
      row("acloud", set, "cop_status", solver::status_name(r.status));
      row("acloud", set, "cop_solve_ms", fmt(r.solve_ms, 1));
      row("acloud", set, "copm_stdev", fmt(m.stdev));
      row("acloud", set, "copm_migrations", std::to_string(m.migrations));
    }
  }
  if (all || which == "channel") {
    const int seeds = static_cast<int>(param_int(p, "seeds", quick ? 5 : 20));
    for (auto model : {scenarios::Interference::OneHop, scenarios::Interference::TwoHop}) {
      int agree = 0, total = 0;
      std::vector<double> ms;
      for (int s = 1; s <= seeds; ++s) {
        scenarios::ChannelParams cp;
        cp.size = 4 + s % 3;
        cp.channels = 3;
        cp.max_edges = 6;
        auto ci = scenarios::gen_channel_instance(cp, static_cast<uint64_t>(s));
        auto o = scenarios::oracle_channel(ci, model);
        auto r = run_channel_centralized(ci, model);
        ++total;
        ms.push_back(r.solve_ms);
        if (o.feasible ? (r.objective && *r.objective == o.optimum && r.violations.empty())
                       : r.status == solver::Status::Unsat)
          ++agree;
      }
      const std::string set = model == scenarios::Interference::OneHop ? "one-hop" : "two-hop";
      row("channel", set, "agrees_with_oracle", std::to_string(agree) + "/" + std::to_string(total));
      row("channel", set, "mean_solve_ms", fmt(mean(ms), 2));
    }
  }
  if (all || which == "bandwidth") {
    const int seeds = static_cast<int>(param_int(p, "seeds", quick ? 2 : 5));
    const int64_t duration = param_int(p, "duration_ms", 300000);
    std::vector<double> x, y;
    std::map<int, std::vector<double>> by_n;
    for (const auto& pt : run_bandwidth({2, 4, 6, 8, 10}, seeds, duration)) {
      x.push_back(pt.n);
      y.push_back(pt.per_node_bps);
      by_n[pt.n].push_back(pt.per_node_bps);
    }
    for (const auto& [n, v] : by_n) row("bandwidth", "n=" + std::to_string(n), "per_node_Bps", fmt(mean(v), 2));
    auto f = fit_quadratic(x, y);
    row("bandwidth", "fit", "quadratic_coefficient", fmt(f.a, 4));
    row("bandwidth", "fit", "quadratic_se", fmt(f.se_a, 4));
    row("bandwidth", "fit", "linear_r2", fmt(f.r2_linear, 4));
  }
  return os.str();
}

}  // namespace cologne::experiments
