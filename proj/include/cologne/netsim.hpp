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
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <string>
#include <string_view>
#include <vector>

#include "cologne/analysis.hpp"
#include "cologne/config.hpp"
#include "cologne/runtime.hpp"

namespace cologne::netsim {

struct TopoLink {
  NodeId a;
  NodeId b;
  int64_t latency_ms = 1;
  friend bool operator==(const TopoLink&, const TopoLink&) = default;
};

/// Network description, plus the inputs `colognectl sim` needs.
///
///   # cologne-topology v1
///   program follow_the_sun follow_the_sun_guards   (shipped stems or paths)
///   facts fts.facts
///   scenario fts n=10 seed=42                      (generated inputs)
///   config extra.conf
///   bandwidth on
///   node 0
///   link 0 1 latency=2
struct Topology {
  std::vector<NodeId> nodes;
  std::vector<TopoLink> links;  // unordered pairs
  bool bandwidth_accounting = true;
  std::vector<std::string> programs;
  std::vector<std::string> facts;
  std::vector<std::string> configs;
  std::optional<std::string> scenario;

  bool has_node(const NodeId& n) const;
  const TopoLink* find_link(const NodeId& a, const NodeId& b) const;
};

/// Throws Error with `file:line:` on malformed input or links between
/// undeclared nodes.
Topology parse_topology(std::string_view text, std::string_view filename = "<topology>");
std::string format_topology(const Topology& t);

/// Nodes 0..n-1 joined by `edges`.
Topology topology_from_edges(int n, const std::vector<std::pair<int, int>>& edges, int64_t latency_ms = 1);

struct TraceRow {
  int64_t time = 0;
  uint64_t seq = 0;
  std::string event;  // start, timer, send, deliver, drop, note
  NodeId node;
  std::optional<NodeId> peer;
  uint64_t bytes = 0;
  std::string detail;
};

/// Deterministic discrete-event simulation of one node engine per
/// topology node. Events are ordered by (time, insertion sequence).
class Sim {
public:
  /// Checks and localizes `program`, partitions `facts` by their location
  /// attribute and schedules every node's start event at time 0. Throws
  /// Error on program diagnostics or a fact located at an undeclared node.
  Sim(const ast::Program& program, Topology topo, const std::vector<Tuple>& facts, const Config& cfg, uint64_t seed);
  ~Sim();

  /// Dispatches every event with timestamp <= `until_ms`.
  void run_until(int64_t until_ms);
  int64_t now() const { return now_; }
  /// No events left at all.
  bool drained() const { return queue_.empty(); }
  /// No message in flight and every node idle.
  bool quiescent() const;

  /// Called after each dispatched event that leaves the network quiescent.
  void on_quiescent(std::function<void(const Sim&)> hook) { hook_ = std::move(hook); }

  const Topology& topology() const { return topo_; }
  const AnnotatedProgram& program() const { return *localized_; }
  std::vector<runtime::Node*> nodes() const;
  runtime::Node& node(const NodeId& id) const;  // throws Error if unknown

  const std::vector<TraceRow>& trace() const { return trace_; }
  std::string trace_csv() const;
  std::string metrics_csv() const;
  /// Every negotiation record of every node, ordered by time then node.
  std::vector<runtime::NegotiationRecord> negotiations() const;

  const std::map<NodeId, uint64_t>& bytes_sent() const { return sent_; }
  const std::map<NodeId, uint64_t>& bytes_received() const { return received_; }
  uint64_t bytes_dropped() const { return dropped_; }
  uint64_t messages_delivered() const { return delivered_; }

private:
  enum class Kind { Start, Timer, Deliver };
  struct Event {
    int64_t time;
    uint64_t seq;
    Kind kind;
    NodeId node;
    std::string wire;  // Deliver
    bool operator>(const Event& o) const { return time != o.time ? time > o.time : seq > o.seq; }
  };

  void push(int64_t time, Kind kind, const NodeId& node, std::string wire = {});
  void dispatch(const Event& e);
  void react(const NodeId& node, int64_t now, runtime::Reaction r);
  void record(int64_t time, const std::string& event, const NodeId& node, std::optional<NodeId> peer, uint64_t bytes,
              std::string detail);

  Topology topo_;
  Config cfg_;
  std::unique_ptr<AnnotatedProgram> localized_;
  std::map<NodeId, std::unique_ptr<runtime::Node>> nodes_;
  std::map<NodeId, int64_t> free_at_;
  std::map<std::pair<NodeId, NodeId>, int64_t> link_free_;
  std::priority_queue<Event, std::vector<Event>, std::greater<Event>> queue_;
  uint64_t next_seq_ = 0;
  uint64_t in_flight_ = 0;
  int64_t now_ = 0;
  std::vector<TraceRow> trace_;
  std::vector<runtime::MetricRow> metrics_;
  std::map<NodeId, uint64_t> sent_;
  std::map<NodeId, uint64_t> received_;
  uint64_t dropped_ = 0;
  uint64_t delivered_ = 0;
  std::function<void(const Sim&)> hook_;
};

}  // namespace cologne::netsim
