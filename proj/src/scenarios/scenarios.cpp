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

#include "cologne/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <set>

namespace cologne::scenarios {

namespace detail {
const std::map<std::string, std::string>& embedded_programs();
}

std::vector<std::string> program_names() {
  std::vector<std::string> out;
  for (const auto& [name, text] : detail::embedded_programs())
    if (name.size() > 4 && name.compare(name.size() - 4, 4, ".clg") == 0) out.push_back(name.substr(0, name.size() - 4));
  return out;
}

const std::string& program_text(const std::string& stem) {
  const auto& all = detail::embedded_programs();
  auto it = all.find(stem + ".clg");
  if (it == all.end()) throw Error("unknown program '" + stem + "'");
  return it->second;
}

Config program_config(const std::string& stem) {
  const auto& all = detail::embedded_programs();
  auto it = all.find(stem + ".conf");
  if (it == all.end()) return Config{};
  return Config::parse(it->second, stem + ".conf");
}

namespace {

int64_t uniform(std::mt19937_64& rng, int64_t lo, int64_t hi) {
  return std::uniform_int_distribution<int64_t>(lo, hi)(rng);
}

}  // namespace

std::vector<std::pair<int, int>> random_graph(int n, double degree, uint64_t seed) {
  std::vector<std::pair<int, int>> edges;
  if (n < 2) return edges;
  std::mt19937_64 rng(seed);
  std::set<std::pair<int, int>> have;
  auto add = [&](int a, int b) {
    auto e = std::minmax(a, b);
    if (have.insert(e).second) edges.push_back(e);
  };
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  for (int i = 1; i < n; ++i) add(order[i], order[uniform(rng, 0, i - 1)]);
  const size_t full = static_cast<size_t>(n) * (n - 1) / 2;
  const size_t target = std::min(full, static_cast<size_t>(std::ceil(degree * n / 2.0)));
  while (edges.size() < target) {
    int a = static_cast<int>(uniform(rng, 0, n - 1));
    int b = static_cast<int>(uniform(rng, 0, n - 1));
    if (a != b) add(a, b);
  }
  return edges;
}

// --- Follow-the-Sun ---------------------------------------------------------

FtsInstance gen_fts_instance(int n, uint64_t seed) {
  if (n < 2) throw Error("Follow-the-Sun needs at least two data centers");
  std::mt19937_64 rng(seed);
  FtsInstance fi;
  fi.n = n;
  fi.alloc.assign(n, std::vector<int64_t>(n, 0));
  for (int i = 0; i < n; ++i) {
    for (;;) {
      int64_t total = 0;
      for (int j = 0; j < n; ++j) total += fi.alloc[i][j] = uniform(rng, 0, 10);
      if (total <= fi.capacity) break;
    }
  }
  fi.op_cost.assign(n, 10);
  fi.comm_cost.assign(n, std::vector<int64_t>(n, 0));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) fi.comm_cost[i][j] = fi.comm_cost[j][i] = uniform(rng, 50, 100);
  fi.links = random_graph(n, 3.0, rng());
  std::sort(fi.links.begin(), fi.links.end());
  for (const auto& l : fi.links) fi.mig_cost[l] = uniform(rng, 10, 20);
  return fi;
}

std::vector<Tuple> fts_facts(const FtsInstance& fi) {
  std::vector<Tuple> out;
  for (int i = 0; i < fi.n; ++i) {
    out.push_back({"resource", {i, fi.capacity}});
    out.push_back({"opCost", {i, fi.op_cost[i]}});
    for (int j = 0; j < fi.n; ++j) {
      out.push_back({"curVm", {i, j, fi.alloc[i][j]}});
      out.push_back({"commCost", {i, j, fi.comm_cost[i][j]}});
      out.push_back({"dc", {i, j}});
    }
  }
  for (const auto& [l, mc] : fi.mig_cost) {
    out.push_back({"link", {l.first, l.second}});
    out.push_back({"link", {l.second, l.first}});
    out.push_back({"migCost", {l.first, l.second, mc}});
    out.push_back({"migCost", {l.second, l.first, mc}});
  }
  return out;
}

int64_t fts_placement_cost(const FtsInstance& fi, const std::vector<std::vector<int64_t>>& alloc) {
  int64_t c = 0;
  for (int i = 0; i < fi.n; ++i)
    for (int j = 0; j < fi.n; ++j) c += alloc[i][j] * (fi.op_cost[i] + fi.comm_cost[i][j]);
  return c;
}

FtsOracleResult oracle_fts(const FtsInstance& fi, int64_t step, uint64_t budget) {
  if (step < 1) throw Error("oracle_fts: step must be positive");
  const int n = fi.n;
  struct Slot {
    int link;
    int loc;
  };
  std::vector<Slot> slots;
  for (int l = 0; l < static_cast<int>(fi.links.size()); ++l)
    for (int d = 0; d < n; ++d) slots.push_back({l, d});
  std::vector<int64_t> total(n, 0);
  for (int i = 0; i < n; ++i)
    for (int d = 0; d < n; ++d) total[d] += fi.alloc[i][d];
  double space = 1;
  for (const auto& s : slots) space *= static_cast<double>(2 * (total[s.loc] / step) + 1);
  if (space > static_cast<double>(budget)) throw Error("oracle_fts: enumeration budget exceeded");

  FtsOracleResult best;
  bool found = false;
  std::vector<int64_t> moves(slots.size(), 0);
  auto alloc = fi.alloc;
  std::function<void(size_t, int64_t)> rec = [&](size_t k, int64_t mig) {
    if (k == slots.size()) {
      ++best.enumerated;
      for (int i = 0; i < n; ++i) {
        int64_t used = 0;
        for (int d = 0; d < n; ++d) {
          if (alloc[i][d] < 0) return;
          used += alloc[i][d];
        }
        if (used > fi.capacity) return;
      }
      int64_t cost = fts_placement_cost(fi, alloc) + mig;
      if (!found || cost < best.optimum) {
        found = true;
        best.optimum = cost;
        best.moves.clear();
        for (size_t s = 0; s < slots.size(); ++s)
          if (moves[s] != 0) {
            const auto& l = fi.links[slots[s].link];
            best.moves.push_back({l.first, l.second, slots[s].loc, moves[s]});
          }
      }
      return;
    }
    const auto& l = fi.links[slots[k].link];
    const int d = slots[k].loc;
    const int64_t mc = fi.mig_cost.at(l);
    const int64_t lim = total[d] / step;
    for (int64_t q = -lim; q <= lim; ++q) {
      const int64_t m = q * step;
      alloc[l.first][d] -= m;
      alloc[l.second][d] += m;
      moves[k] = m;
      rec(k + 1, mig + mc * (m < 0 ? -m : m));
      alloc[l.first][d] += m;
      alloc[l.second][d] -= m;
    }
    moves[k] = 0;
  };
  rec(0, 0);
  return best;
}

// --- channel selection ------------------------------------------------------

ChannelInstance gen_channel_instance(const ChannelParams& p, uint64_t seed) {
  if (p.size < 2) throw Error("channel instance needs at least two nodes");
  if (p.channels < 1) throw Error("channel instance needs at least one channel");
  std::mt19937_64 rng(seed);
  ChannelInstance ci;
  ci.nodes = p.size;
  ci.mindiff = p.mindiff;
  for (int c = 1; c <= p.channels; ++c) ci.channels.push_back(c);
  switch (p.kind) {
    case ChannelTopology::Line:
      for (int i = 0; i + 1 < p.size; ++i) ci.edges.push_back({i, i + 1});
      break;
    case ChannelTopology::Grid: {
      const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(p.size))));
      for (int i = 0; i < p.size; ++i) {
        if ((i % cols) + 1 < cols && i + 1 < p.size) ci.edges.push_back({i, i + 1});
        if (i + cols < p.size) ci.edges.push_back({i, i + cols});
      }
      break;
    }
    case ChannelTopology::Random: ci.edges = random_graph(p.size, 3.0, rng()); break;
  }
  if (p.max_edges > 0 && static_cast<int>(ci.edges.size()) > p.max_edges) ci.edges.resize(p.max_edges);
  std::sort(ci.edges.begin(), ci.edges.end());
  std::bernoulli_distribution occupied(p.primary_density);
  ci.primary.assign(p.size, {});
  for (int i = 0; i < p.size; ++i)
    for (int64_t c : ci.channels)
      if (occupied(rng)) ci.primary[i].push_back(c);
  ci.interfaces.assign(p.size, p.interfaces);
  return ci;
}

std::vector<Tuple> channel_facts(const ChannelInstance& ci) {
  std::vector<Tuple> out;
  for (const auto& [a, b] : ci.edges) {
    out.push_back({"link", {a, b}});
    out.push_back({"link", {b, a}});
  }
  for (int i = 0; i < ci.nodes; ++i) {
    for (int64_t c : ci.primary[i]) out.push_back({"primaryUser", {i, c}});
    out.push_back({"numInterface", {i, ci.interfaces[i]}});
  }
  return out;
}

Config channel_config(const ChannelInstance& ci) {
  Config c;
  c.channels = ci.channels;
  c.domains["assign"] = {0, 0, true};
  c.consts["F_mindiff"] = ci.mindiff;
  return c;
}

namespace {

// directed links (x,y) -> channel from per-edge channels
std::map<std::pair<int, int>, int64_t> directed(const ChannelInstance& ci, const std::vector<int64_t>& ch) {
  std::map<std::pair<int, int>, int64_t> out;
  for (size_t e = 0; e < ci.edges.size(); ++e) {
    out[{ci.edges[e].first, ci.edges[e].second}] = ch[e];
    out[{ci.edges[e].second, ci.edges[e].first}] = ch[e];
  }
  return out;
}

}  // namespace

int64_t channel_cost(const ChannelInstance& ci, const std::vector<int64_t>& edge_channel, Interference model) {
  const auto d = directed(ci, edge_channel);
  auto close = [&](int64_t a, int64_t b) { return std::abs(a - b) < ci.mindiff; };
  int64_t cost = 0;
  for (const auto& [xy, c1] : d) {
    const auto [x, y] = xy;
    if (model == Interference::OneHop) {
      for (const auto& [xz, c2] : d)
        if (xz.first == x && xz.second != y && close(c1, c2)) ++cost;
    } else {
      for (const auto& [zx, unused] : d) {
        if (zx.second != x) continue;
        const int z = zx.first;
        if (z == y) continue;
        for (const auto& [zw, c2] : d)
          if (zw.first == z && zw.second != x && zw.second != y && close(c1, c2)) ++cost;
      }
    }
  }
  return cost;
}

std::vector<std::string> channel_violations(const ChannelInstance& ci,
                                            const std::map<std::pair<int64_t, int64_t>, int64_t>& a) {
  std::vector<std::string> bad;
  std::map<int64_t, std::set<int64_t>> used;
  for (const auto& [xy, c] : a) {
    const auto [x, y] = xy;
    auto back = a.find({y, x});
    if (back == a.end() || back->second != c)
      bad.push_back("link " + std::to_string(x) + "-" + std::to_string(y) + " is not symmetric");
    for (int64_t node : {x, y})
      if (node >= 0 && node < ci.nodes &&
          std::count(ci.primary[node].begin(), ci.primary[node].end(), c))
        bad.push_back("link " + std::to_string(x) + "-" + std::to_string(y) + " uses a primary-user channel of node " +
                      std::to_string(node));
    used[x].insert(c);
  }
  for (const auto& [x, chans] : used)
    if (x >= 0 && x < ci.nodes && static_cast<int64_t>(chans.size()) > ci.interfaces[x])
      bad.push_back("node " + std::to_string(x) + " uses more channels than interfaces");
  for (const auto& [x, y] : ci.edges)
    if (!a.count({x, y})) bad.push_back("link " + std::to_string(x) + "-" + std::to_string(y) + " has no channel");
  return bad;
}

ChannelOracleResult oracle_channel(const ChannelInstance& ci, Interference model, uint64_t budget) {
  ChannelOracleResult best;
  const size_t m = ci.edges.size();
  if (std::pow(static_cast<double>(ci.channels.size()), static_cast<double>(m)) > static_cast<double>(budget))
    throw Error("oracle_channel: enumeration budget exceeded");
  std::vector<int64_t> ch(m, 0);
  std::function<void(size_t)> rec = [&](size_t e) {
    if (e == m) {
      ++best.enumerated;
      std::map<std::pair<int64_t, int64_t>, int64_t> a;
      for (const auto& [xy, c] : directed(ci, ch)) a[{xy.first, xy.second}] = c;
      if (!channel_violations(ci, a).empty()) return;
      int64_t cost = channel_cost(ci, ch, model);
      if (!best.feasible || cost < best.optimum) {
        best.feasible = true;
        best.optimum = cost;
        best.edge_channel = ch;
      }
      return;
    }
    for (int64_t c : ci.channels) {
      ch[e] = c;
      rec(e + 1);
    }
  };
  rec(0);
  return best;
}

// --- ACloud -----------------------------------------------------------------

namespace {

std::string host_name(int h) { return "h" + std::to_string(h); }

}  // namespace

AcloudInstance gen_acloud_instance(int hosts, int vms, uint64_t seed) {
  if (hosts < 1) throw Error("ACloud needs at least one host");
  std::mt19937_64 rng(seed);
  AcloudInstance ai;
  for (int h = 0; h < hosts; ++h) {
    ai.host_cpu.push_back(uniform(rng, 0, 20));
    ai.host_mem.push_back(16);
  }
  for (int v = 0; v < vms; ++v) {
    ai.vm_cpu.push_back(uniform(rng, 5, 40));
    ai.vm_mem.push_back(uniform(rng, 1, 4));
  }
  ai.origin = random_feasible_placement(ai, rng());
  return ai;
}

std::vector<Tuple> acloud_facts(const AcloudInstance& ai) {
  std::vector<Tuple> out;
  for (size_t h = 0; h < ai.host_cpu.size(); ++h) {
    out.push_back({"host", {host_name(static_cast<int>(h)), ai.host_cpu[h], ai.host_mem[h]}});
    out.push_back({"hostMemThres", {host_name(static_cast<int>(h)), ai.host_mem[h]}});
  }
  for (size_t v = 0; v < ai.vm_cpu.size(); ++v) {
    out.push_back({"vm", {static_cast<int64_t>(v), ai.vm_cpu[v], ai.vm_mem[v]}});
    if (v < ai.origin.size()) out.push_back({"origin", {static_cast<int64_t>(v), host_name(ai.origin[v])}});
  }
  return out;
}

std::vector<int64_t> host_loads(const AcloudInstance& ai, const std::vector<int>& placement) {
  std::vector<int64_t> loads = ai.host_cpu;
  for (size_t v = 0; v < placement.size(); ++v) loads.at(placement[v]) += ai.vm_cpu[v];
  return loads;
}

double load_stdev(const std::vector<int64_t>& loads) {
  if (loads.empty()) return 0;
  double mean = 0;
  for (auto l : loads) mean += static_cast<double>(l);
  mean /= static_cast<double>(loads.size());
  double var = 0;
  for (auto l : loads) var += (static_cast<double>(l) - mean) * (static_cast<double>(l) - mean);
  return std::sqrt(var / static_cast<double>(loads.size()));
}

bool placement_feasible(const AcloudInstance& ai, const std::vector<int>& placement) {
  if (placement.size() != ai.vm_cpu.size()) return false;
  std::vector<int64_t> mem(ai.host_mem.size(), 0);
  for (size_t v = 0; v < placement.size(); ++v) {
    if (placement[v] < 0 || placement[v] >= static_cast<int>(mem.size())) return false;
    mem[placement[v]] += ai.vm_mem[v];
  }
  for (size_t h = 0; h < mem.size(); ++h)
    if (mem[h] > ai.host_mem[h]) return false;
  return true;
}

std::vector<int> random_feasible_placement(const AcloudInstance& ai, uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int hosts = static_cast<int>(ai.host_cpu.size());
  std::vector<int> p(ai.vm_cpu.size());
  for (int attempt = 0; attempt < 100000; ++attempt) {
    for (auto& h : p) h = static_cast<int>(uniform(rng, 0, hosts - 1));
    if (placement_feasible(ai, p)) return p;
  }
  throw Error("no feasible random placement found");
}

std::vector<int> heuristic_placement(const AcloudInstance& ai, double k) {
  std::vector<int> p = ai.origin;
  std::vector<int64_t> mem(ai.host_mem.size(), 0);
  for (size_t v = 0; v < p.size(); ++v) mem[p[v]] += ai.vm_mem[v];
  for (size_t iter = 0; iter < 10 * p.size() + 10; ++iter) {
    auto loads = host_loads(ai, p);
    int hi = static_cast<int>(std::max_element(loads.begin(), loads.end()) - loads.begin());
    int lo = static_cast<int>(std::min_element(loads.begin(), loads.end()) - loads.begin());
    if (hi == lo || static_cast<double>(loads[hi]) < k * static_cast<double>(loads[lo])) break;
    int best = -1;
    int64_t best_peak = loads[hi];
    for (size_t v = 0; v < p.size(); ++v) {
      if (p[v] != hi || mem[lo] + ai.vm_mem[v] > ai.host_mem[lo]) continue;
      int64_t peak = std::max(loads[hi] - ai.vm_cpu[v], loads[lo] + ai.vm_cpu[v]);
      if (peak < best_peak) {
        best_peak = peak;
        best = static_cast<int>(v);
      }
    }
    if (best < 0) break;
    mem[hi] -= ai.vm_mem[best];
    mem[lo] += ai.vm_mem[best];
    p[best] = lo;
  }
  return p;
}

std::vector<int> placement_from_assign(const AcloudInstance& ai, const std::vector<Tuple>& rows) {
  std::vector<int> p(ai.vm_cpu.size(), -1);
  for (const auto& t : rows) {
    if (t.values.size() != 3 || t.values[2] != Value(1)) continue;
    const std::string& h = t.values[1].as_string();
    int64_t v = t.values[0].as_int();
    if (v >= 0 && v < static_cast<int64_t>(p.size())) p[v] = std::stoi(h.substr(1));
  }
  return p;
}

std::vector<WorkloadInterval> gen_acloud_workload(const WorkloadParams& p, uint64_t seed) {
  std::mt19937_64 rng(seed);
  struct Vm {
    int customer;
    int host;
    int64_t mem;
    bool running;
    int64_t cpu = -1;
  };
  std::vector<Vm> vms;
  std::vector<double> base(p.customers), amp(p.customers), phase(p.customers);
  for (int c = 0; c < p.customers; ++c) {
    base[c] = static_cast<double>(uniform(rng, 30, 60));
    amp[c] = static_cast<double>(uniform(rng, 20, 50));
    phase[c] = static_cast<double>(uniform(rng, 0, 23));
    for (int k = 0; k < p.vms_per_customer; ++k)
      vms.push_back({c, static_cast<int>(uniform(rng, 0, p.hosts - 1)), uniform(rng, 1, 4), true});
  }
  std::normal_distribution<double> noise(0.0, 5.0);
  std::vector<WorkloadInterval> out;
  for (int t = 0; t < p.intervals; ++t) {
    WorkloadInterval iv;
    iv.time_ms = t * p.interval_ms;
    if (t == 0)
      for (int h = 0; h < p.hosts; ++h) {
        iv.ops.push_back({datalog::OpKind::Insert, {"host", {host_name(h), 0, p.host_mem}}});
        iv.ops.push_back({datalog::OpKind::Insert, {"hostMemThres", {host_name(h), p.host_mem}}});
      }
    for (int c = 0; c < p.customers; ++c) {
      // total demand in percent of one VM, spread evenly over running VMs
      double demand = std::max(0.0, (base[c] + amp[c] * std::sin(2 * M_PI * (t + phase[c]) / 24.0) + noise(rng)) *
                                        p.vms_per_customer);
      std::vector<size_t> mine;
      for (size_t v = 0; v < vms.size(); ++v)
        if (vms[v].customer == c && vms[v].running) mine.push_back(v);
      double avg = mine.empty() ? demand : demand / static_cast<double>(mine.size());
      if (avg > static_cast<double>(p.high)) {
        size_t pick = vms.size();
        for (size_t v = 0; v < vms.size(); ++v)
          if (vms[v].customer == c && !vms[v].running) {
            pick = v;
            break;
          }
        if (pick == vms.size()) {
          int64_t mem = mine.empty() ? 2 : vms[mine.front()].mem;
          vms.push_back({c, static_cast<int>(uniform(rng, 0, p.hosts - 1)), mem, false});
        }
        vms[pick].running = true;
        mine.push_back(pick);
        ++iv.spawned;
      } else if (avg < static_cast<double>(p.low) && mine.size() > 1) {
        size_t v = mine.back();
        mine.pop_back();
        vms[v].running = false;
        iv.ops.push_back({datalog::OpKind::Delete, {"vm", {static_cast<int64_t>(v), vms[v].cpu, vms[v].mem}}});
        iv.ops.push_back({datalog::OpKind::Delete, {"origin", {static_cast<int64_t>(v), host_name(vms[v].host)}}});
        vms[v].cpu = -1;
        ++iv.stopped;
      }
      const int64_t share = mine.empty() ? 0 : std::llround(demand / static_cast<double>(mine.size()));
      for (size_t v : mine) {
        Vm& vm = vms[v];
        if (vm.cpu == share) continue;
        if (vm.cpu >= 0) {
          iv.ops.push_back({datalog::OpKind::Delete, {"vm", {static_cast<int64_t>(v), vm.cpu, vm.mem}}});
        } else {
          iv.ops.push_back({datalog::OpKind::Insert, {"origin", {static_cast<int64_t>(v), host_name(vm.host)}}});
        }
        vm.cpu = share;
        iv.ops.push_back({datalog::OpKind::Insert, {"vm", {static_cast<int64_t>(v), vm.cpu, vm.mem}}});
      }
    }
    out.push_back(std::move(iv));
  }
  return out;
}

}  // namespace cologne::scenarios
