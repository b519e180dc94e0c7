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
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "cologne/analysis.hpp"
#include "cologne/config.hpp"
#include "cologne/datalog.hpp"
#include "cologne/solver.hpp"

namespace cologne::runtime {

/// Negotiation control carried after the tuple payload of a message.
enum class Control { None, Propose, Accept, Done };
const char* control_name(Control c);

struct Message {
  NodeId src;
  NodeId dst;
  std::vector<datalog::FactOp> ops;
  Control control = Control::None;
  friend bool operator==(const Message&, const Message&) = default;
};

/// Wire form: a sequence of `<len>:<entry>` frames. The first entry is
/// `!msg|src|dst`, each tuple is `pred|sign|v1|v2|...` with sign `+`, `-`
/// or `=` (upsert), and control is `!ctl|propose|accept|done`. Strings are
/// double-quoted with `\` escapes; integers are bare.
std::string encode(const Message& m);
Message decode(std::string_view wire);  // throws Error on malformed input

enum class LinkState { Idle, Proposed, Solving, Done };
const char* link_state_name(LinkState s);

struct NegotiationRecord {
  int64_t time = 0;
  NodeId initiator;
  NodeId peer;
  solver::Status status = solver::Status::Unknown;
  std::optional<int64_t> objective;
  std::optional<int64_t> baseline;  // objective with every decision variable at 0
  double solve_ms = 0;
  uint64_t nodes = 0;
  size_t materialized = 0;
};

/// One line of the metrics CSV.
struct MetricRow {
  int64_t time = 0;
  NodeId node;
  std::string event;
  std::optional<int64_t> objective;
  double solve_ms = 0;
  uint64_t msgs_out = 0;
  uint64_t bytes_out = 0;
};

std::string metrics_header();
std::string metrics_line(const MetricRow& r);

/// Outcome of one event handler.
struct Reaction {
  std::vector<Message> out;
  int64_t busy_ms = 0;                // virtual time the node spends (solving)
  std::optional<int64_t> timer_at;    // request a timer at this virtual time
  std::vector<std::string> notes;     // trace entries (deterministic text)
  std::vector<MetricRow> metrics;
};

/// A node engine: its own Store running the localized program, the
/// per-link negotiation handshake, and local COP solving.
///
/// Programs with `var` tables that mention `setLink` negotiate links
/// (the larger node id initiates, one negotiation at a time per node).
/// Other programs solve once at start, whenever an `invokeSolver` tuple
/// arrives, and every `reoptimize_period_ms` if set.
class Node {
public:
  Node(NodeId id, const AnnotatedProgram& localized, const Config& cfg, uint64_t seed);

  const NodeId& id() const { return id_; }
  void add_fact(const Tuple& t);

  Reaction start(int64_t now);
  Reaction on_message(const Message& m, int64_t now);
  Reaction on_timer(int64_t now);

  /// No negotiation in flight and nothing queued.
  bool idle() const { return !peer_ && queue_.empty(); }
  /// Every link this node initiates is negotiated.
  bool finished() const;

  const datalog::Store& store() const { return store_; }
  const std::vector<NegotiationRecord>& negotiations() const { return log_; }
  const std::map<NodeId, LinkState>& links() const { return links_; }
  uint64_t dropped_tuples() const { return dropped_; }

private:
  void flush(Reaction& r, int64_t now, const std::string& event);
  Message& message_to(Reaction& r, const NodeId& dst);
  void refresh_links();
  void accept(const NodeId& from, Reaction& r, int64_t now);
  void next_in_queue(Reaction& r, int64_t now);
  void solve_link(const NodeId& peer, Reaction& r, int64_t now);
  void solve_local(Reaction& r, int64_t now, const std::string& why);
  void maybe_initiate(Reaction& r, int64_t now);

  NodeId id_;
  const AnnotatedProgram& program_;
  Config cfg_;
  datalog::Store store_;
  std::mt19937_64 rng_;
  bool negotiating_ = false;
  std::string link_table_ = "link";
  std::map<NodeId, LinkState> links_;
  std::optional<NodeId> peer_;
  std::deque<NodeId> queue_;
  std::vector<NegotiationRecord> log_;
  std::set<std::string> catalog_;
  uint64_t dropped_ = 0;
  bool started_ = false;
};

}  // namespace cologne::runtime
