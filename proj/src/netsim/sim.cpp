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

#include "cologne/netsim.hpp"

#include <algorithm>
#include <sstream>

#include "cologne/lang.hpp"

namespace cologne::netsim {

bool Topology::has_node(const NodeId& n) const { return std::find(nodes.begin(), nodes.end(), n) != nodes.end(); }

const TopoLink* Topology::find_link(const NodeId& a, const NodeId& b) const {
  for (const auto& l : links)
    if ((l.a == a && l.b == b) || (l.a == b && l.b == a)) return &l;
  return nullptr;
}

namespace {

NodeId parse_id(const std::string& tok) {
  if (tok.size() >= 2 && tok.front() == '"' && tok.back() == '"') return Value(tok.substr(1, tok.size() - 2));
  size_t i = tok[0] == '-' ? 1 : 0;
  bool digits = i < tok.size();
  for (size_t k = i; k < tok.size(); ++k) digits &= tok[k] >= '0' && tok[k] <= '9';
  if (digits) return Value(static_cast<int64_t>(std::stoll(tok)));
  return Value(tok);
}

std::string id_text(const NodeId& n) {
  if (n.is_int()) return n.to_plain();
  const std::string& s = n.as_string();
  bool plain = !s.empty() && s.find_first_of(" \t\"#") == std::string::npos;
  if (plain && (s[0] < '0' || s[0] > '9') && s[0] != '-') return s;
  return n.to_literal();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

Topology parse_topology(std::string_view text, std::string_view filename) {
  Topology t;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& msg) {
    throw Error(std::string(filename) + ":" + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string w; ls >> w;) tok.push_back(w);
    if (tok.empty()) continue;
    const std::string& kw = tok[0];
    if (kw == "node") {
      if (tok.size() < 2) fail("node needs an id");
      for (size_t i = 1; i < tok.size(); ++i) {
        NodeId id = parse_id(tok[i]);
        if (t.has_node(id)) fail("duplicate node " + tok[i]);
        t.nodes.push_back(id);
      }
    } else if (kw == "link") {
      if (tok.size() < 3) fail("link needs two node ids");
      TopoLink l{parse_id(tok[1]), parse_id(tok[2]), 1};
      for (size_t i = 3; i < tok.size(); ++i) {
        if (tok[i].rfind("latency=", 0) != 0) fail("unknown link attribute " + tok[i]);
        try {
          l.latency_ms = std::stoll(tok[i].substr(8));
        } catch (...) {
          fail("bad latency " + tok[i]);
        }
        if (l.latency_ms < 0) fail("negative latency");
      }
      if (!t.has_node(l.a) || !t.has_node(l.b)) fail("link references an undeclared node");
      if (l.a == l.b) fail("self link");
      if (t.find_link(l.a, l.b)) fail("duplicate link");
      t.links.push_back(l);
    } else if (kw == "program") {
      if (tok.size() < 2) fail("program needs a name");
      t.programs.insert(t.programs.end(), tok.begin() + 1, tok.end());
    } else if (kw == "facts") {
      if (tok.size() < 2) fail("facts needs a path");
      t.facts.insert(t.facts.end(), tok.begin() + 1, tok.end());
    } else if (kw == "config") {
      if (tok.size() < 2) fail("config needs a path");
      t.configs.insert(t.configs.end(), tok.begin() + 1, tok.end());
    } else if (kw == "scenario") {
      std::string s;
      for (size_t i = 1; i < tok.size(); ++i) s += (i > 1 ? " " : "") + tok[i];
      t.scenario = s;
    } else if (kw == "bandwidth") {
      if (tok.size() != 2 || (tok[1] != "on" && tok[1] != "off")) fail("bandwidth takes on|off");
      t.bandwidth_accounting = tok[1] == "on";
    } else {
      fail("unknown directive " + kw);
    }
  }
  return t;
}

std::string format_topology(const Topology& t) {
  std::ostringstream os;
  os << "# cologne-topology v1\n";
  auto list = [&](const char* kw, const std::vector<std::string>& v) {
    if (v.empty()) return;
    os << kw;
    for (const auto& s : v) os << ' ' << s;
    os << '\n';
  };
  list("program", t.programs);
  list("facts", t.facts);
  list("config", t.configs);
  if (t.scenario) os << "scenario " << *t.scenario << '\n';
  os << "bandwidth " << (t.bandwidth_accounting ? "on" : "off") << '\n';
  for (const auto& n : t.nodes) os << "node " << id_text(n) << '\n';
  for (const auto& l : t.links) os << "link " << id_text(l.a) << ' ' << id_text(l.b) << " latency=" << l.latency_ms << '\n';
  return os.str();
}

Topology topology_from_edges(int n, const std::vector<std::pair<int, int>>& edges, int64_t latency_ms) {
  Topology t;
  for (int i = 0; i < n; ++i) t.nodes.emplace_back(i);
  for (const auto& [a, b] : edges) t.links.push_back({a, b, latency_ms});
  return t;
}

// --- simulation -------------------------------------------------------------

namespace {

uint64_t mix(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void throw_on_errors(const std::vector<Diagnostic>& d) {
  std::vector<Diagnostic> errors;
  for (const auto& x : d)
    if (x.severity == Severity::Error) errors.push_back(x);
  if (!errors.empty()) throw Error(render_diagnostics(errors));
}

std::string describe(const runtime::Message& m) {
  std::string s = "ops=" + std::to_string(m.ops.size());
  if (m.control != runtime::Control::None) s += std::string(" ctl=") + runtime::control_name(m.control);
  return s;
}

}  // namespace

Sim::Sim(const ast::Program& program, Topology topo, const std::vector<Tuple>& facts, const Config& cfg, uint64_t seed)
    : topo_(std::move(topo)), cfg_(cfg) {
  throw_on_errors(check_program(program));
  AnnotatedProgram a = annotate(program);
  throw_on_errors(a.diagnostics);
  throw_on_errors(check_safety(a));
  LocalizedProgram lp = localize_program(a);
  throw_on_errors(lp.diagnostics);
  localized_ = std::make_unique<AnnotatedProgram>(annotate_localized(a, lp));

  uint64_t index = 0;
  for (const auto& id : topo_.nodes) {
    nodes_[id] = std::make_unique<runtime::Node>(id, *localized_, cfg_, mix(seed ^ mix(++index)));
    free_at_[id] = 0;
  }

  const auto known = program.predicate_names();
  bool has_links = false;
  for (const auto& f : facts) has_links |= f.pred == "link";
  std::vector<Tuple> all = facts;
  if (!has_links && known.count("link"))
    for (const auto& l : topo_.links) {
      all.push_back({"link", {l.a, l.b}});
      all.push_back({"link", {l.b, l.a}});
    }
  for (const auto& f : all) {
    if (!known.count(f.pred)) {
      record(0, "note", f.values.empty() ? NodeId() : f.values[0], std::nullopt, 0,
             "ignored fact of unknown predicate " + f.pred);
      continue;
    }
    if (a.located_predicates.count(f.pred)) {
      if (f.values.empty() || !nodes_.count(f.values[0]))
        throw Error("fact located at undeclared node: " + f.to_string());
      nodes_.at(f.values[0])->add_fact(f);
    } else {
      for (auto& [id, n] : nodes_) n->add_fact(f);
    }
  }
  for (const auto& id : topo_.nodes) push(0, Kind::Start, id);
}

Sim::~Sim() = default;

void Sim::push(int64_t time, Kind kind, const NodeId& node, std::string wire) {
  if (kind == Kind::Deliver) ++in_flight_;
  queue_.push(Event{time, next_seq_++, kind, node, std::move(wire)});
}

void Sim::record(int64_t time, const std::string& event, const NodeId& node, std::optional<NodeId> peer, uint64_t bytes,
                 std::string detail) {
  trace_.push_back({time, trace_.size(), event, node, std::move(peer), bytes, std::move(detail)});
}

void Sim::run_until(int64_t until_ms) {
  while (!queue_.empty() && queue_.top().time <= until_ms) {
    Event e = queue_.top();
    queue_.pop();
    if (e.time < now_) throw Error("causality violation in event queue");
    now_ = e.time;
    if (e.time < free_at_[e.node]) {
      if (e.kind == Kind::Deliver) --in_flight_;
      push(free_at_[e.node], e.kind, e.node, std::move(e.wire));
      continue;
    }
    dispatch(e);
    if (hook_ && quiescent()) hook_(*this);
  }
  now_ = std::max(now_, until_ms);
}

bool Sim::quiescent() const {
  if (in_flight_ != 0) return false;
  for (const auto& [id, n] : nodes_)
    if (!n->idle() || free_at_.at(id) > now_) return false;
  return true;
}

void Sim::dispatch(const Event& e) {
  runtime::Node& n = *nodes_.at(e.node);
  switch (e.kind) {
    case Kind::Start:
      record(e.time, "start", e.node, std::nullopt, 0, "");
      react(e.node, e.time, n.start(e.time));
      break;
    case Kind::Timer:
      record(e.time, "timer", e.node, std::nullopt, 0, "");
      react(e.node, e.time, n.on_timer(e.time));
      break;
    case Kind::Deliver: {
      --in_flight_;
      runtime::Message m = runtime::decode(e.wire);
      received_[e.node] += e.wire.size();
      ++delivered_;
      record(e.time, "deliver", e.node, m.src, e.wire.size(), describe(m));
      react(e.node, e.time, n.on_message(m, e.time));
      break;
    }
  }
}

void Sim::react(const NodeId& node, int64_t now, runtime::Reaction r) {
  for (auto& note : r.notes) record(now, "note", node, std::nullopt, 0, std::move(note));
  for (auto& m : r.metrics) metrics_.push_back(std::move(m));
  const int64_t send_at = now + std::max<int64_t>(0, r.busy_ms);
  free_at_[node] = send_at;
  for (const auto& m : r.out) {
    std::string wire = runtime::encode(m);
    const uint64_t bytes = wire.size();
    sent_[node] += bytes;
    const TopoLink* link = m.dst == node ? nullptr : topo_.find_link(node, m.dst);
    if (!link || !nodes_.count(m.dst)) {
      dropped_ += bytes;
      record(send_at, "drop", node, m.dst, bytes, "no link; " + describe(m));
      continue;
    }
    int64_t ser = 0;
    if (topo_.bandwidth_accounting && cfg_.bandwidth_bps > 0)
      ser = static_cast<int64_t>((bytes * 8 * 1000 + cfg_.bandwidth_bps - 1) / cfg_.bandwidth_bps);
    int64_t& free = link_free_[{node, m.dst}];
    const int64_t start = std::max(send_at, free);
    free = start + ser;
    record(send_at, "send", node, m.dst, bytes, describe(m));
    push(start + ser + link->latency_ms, Kind::Deliver, m.dst, std::move(wire));
  }
  if (r.timer_at) push(std::max(*r.timer_at, send_at), Kind::Timer, node);
}

std::vector<runtime::Node*> Sim::nodes() const {
  std::vector<runtime::Node*> out;
  for (const auto& id : topo_.nodes) out.push_back(nodes_.at(id).get());
  return out;
}

runtime::Node& Sim::node(const NodeId& id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw Error("unknown node " + id.to_plain());
  return *it->second;
}

std::string Sim::trace_csv() const {
  std::ostringstream os;
  os << "# cologne-trace v1\ntime,seq,event,node,peer,bytes,detail\n";
  for (const auto& r : trace_)
    os << r.time << ',' << r.seq << ',' << r.event << ',' << csv_field(r.node.to_plain()) << ','
       << (r.peer ? csv_field(r.peer->to_plain()) : "") << ',' << r.bytes << ',' << csv_field(r.detail) << '\n';
  return os.str();
}

std::string Sim::metrics_csv() const {
  std::string s = runtime::metrics_header();
  for (const auto& m : metrics_) s += runtime::metrics_line(m);
  return s;
}

std::vector<runtime::NegotiationRecord> Sim::negotiations() const {
  std::vector<runtime::NegotiationRecord> out;
  for (const auto& id : topo_.nodes)
    for (const auto& r : nodes_.at(id)->negotiations()) out.push_back(r);
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.time < b.time; });
  return out;
}

}  // namespace cologne::netsim
