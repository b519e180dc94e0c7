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

#include "cologne/runtime.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "cologne/ground.hpp"

namespace cologne::runtime {

const char* control_name(Control c) {
  switch (c) {
    case Control::None: return "none";
    case Control::Propose: return "propose";
    case Control::Accept: return "accept";
    case Control::Done: return "done";
  }
  return "?";
}

const char* link_state_name(LinkState s) {
  switch (s) {
    case LinkState::Idle: return "idle";
    case LinkState::Proposed: return "proposed";
    case LinkState::Solving: return "solving";
    case LinkState::Done: return "done";
  }
  return "?";
}

// --- codec ------------------------------------------------------------------

namespace {

void put_value(std::string& out, const Value& v) {
  if (v.is_int()) {
    out += std::to_string(v.as_int());
    return;
  }
  out += '"';
  for (char c : v.as_string()) {
    if (c == '"' || c == '\\' || c == '|') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  out += '"';
}

void frame(std::string& out, const std::string& entry) {
  out += std::to_string(entry.size());
  out += ':';
  out += entry;
}

std::vector<std::string> split_fields(std::string_view entry) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (size_t i = 0; i < entry.size(); ++i) {
    char c = entry[i];
    if (quoted && c == '\\' && i + 1 < entry.size()) {
      fields.back() += c;
      fields.back() += entry[++i];
      continue;
    }
    if (c == '"') quoted = !quoted;
    if (c == '|' && !quoted) {
      fields.emplace_back();
      continue;
    }
    fields.back() += c;
  }
  if (quoted) throw Error("malformed message: unterminated string");
  return fields;
}

Value parse_value(const std::string& f) {
  if (!f.empty() && f.front() == '"') {
    if (f.size() < 2 || f.back() != '"') throw Error("malformed message value: " + f);
    std::string s;
    for (size_t i = 1; i + 1 < f.size(); ++i) {
      if (f[i] == '\\' && i + 2 < f.size()) {
        ++i;
        s += f[i] == 'n' ? '\n' : f[i];
      } else {
        s += f[i];
      }
    }
    return Value(std::move(s));
  }
  try {
    size_t used = 0;
    int64_t v = std::stoll(f, &used);
    if (used != f.size()) throw Error("");
    return Value(v);
  } catch (...) {
    throw Error("malformed message value: " + f);
  }
}

}  // namespace

std::string encode(const Message& m) {
  std::string out;
  std::string head = "!msg|";
  put_value(head, m.src);
  head += '|';
  put_value(head, m.dst);
  frame(out, head);
  for (const auto& op : m.ops) {
    std::string e = op.tuple.pred;
    e += '|';
    e += op.kind == datalog::OpKind::Insert ? '+' : op.kind == datalog::OpKind::Delete ? '-' : '=';
    for (const auto& v : op.tuple.values) {
      e += '|';
      put_value(e, v);
    }
    frame(out, e);
  }
  if (m.control != Control::None) frame(out, std::string("!ctl|") + control_name(m.control));
  return out;
}

Message decode(std::string_view wire) {
  Message m;
  size_t pos = 0;
  bool first = true;
  while (pos < wire.size()) {
    size_t colon = wire.find(':', pos);
    if (colon == std::string_view::npos) throw Error("malformed message: missing frame length");
    size_t len = 0;
    try {
      len = std::stoul(std::string(wire.substr(pos, colon - pos)));
    } catch (...) {
      throw Error("malformed message: bad frame length");
    }
    if (colon + 1 + len > wire.size()) throw Error("malformed message: truncated frame");
    auto fields = split_fields(wire.substr(colon + 1, len));
    pos = colon + 1 + len;
    if (first) {
      if (fields.size() != 3 || fields[0] != "!msg") throw Error("malformed message: missing header");
      m.src = parse_value(fields[1]);
      m.dst = parse_value(fields[2]);
      first = false;
      continue;
    }
    if (fields[0] == "!ctl") {
      if (fields.size() != 2) throw Error("malformed message: bad control entry");
      if (fields[1] == "propose") m.control = Control::Propose;
      else if (fields[1] == "accept") m.control = Control::Accept;
      else if (fields[1] == "done") m.control = Control::Done;
      else throw Error("malformed message: unknown control " + fields[1]);
      continue;
    }
    if (fields.size() < 2 || fields[1].size() != 1) throw Error("malformed message: bad tuple entry");
    datalog::FactOp op;
    switch (fields[1][0]) {
      case '+': op.kind = datalog::OpKind::Insert; break;
      case '-': op.kind = datalog::OpKind::Delete; break;
      case '=': op.kind = datalog::OpKind::Upsert; break;
      default: throw Error("malformed message: bad sign " + fields[1]);
    }
    op.tuple.pred = fields[0];
    for (size_t i = 2; i < fields.size(); ++i) op.tuple.values.push_back(parse_value(fields[i]));
    m.ops.push_back(std::move(op));
  }
  if (first) throw Error("malformed message: empty");
  return m;
}

std::string metrics_header() { return "# cologne-metrics v1\ntime,node,event,objective,solve_ms,msgs_out,bytes_out\n"; }

std::string metrics_line(const MetricRow& r) {
  std::ostringstream os;
  os << r.time << ',' << r.node.to_plain() << ',' << r.event << ',';
  if (r.objective) os << *r.objective;
  char ms[32];
  std::snprintf(ms, sizeof ms, "%.3f", r.solve_ms);
  os << ',' << ms << ',' << r.msgs_out << ',' << r.bytes_out << '\n';
  return os.str();
}

// --- node -------------------------------------------------------------------

namespace {

datalog::StoreOptions store_options(const NodeId& id, const Config& cfg) {
  datalog::StoreOptions o;
  o.local = id;
  o.consts = cfg.consts;
  o.max_derivations = cfg.max_derivations;
  return o;
}

}  // namespace

Node::Node(NodeId id, const AnnotatedProgram& localized, const Config& cfg, uint64_t seed)
    : id_(std::move(id)), program_(localized), cfg_(cfg), store_(store_options(id_, cfg)), rng_(seed) {
  store_.register_program(program_);
  catalog_ = program_.program.predicate_names();
  negotiating_ = !program_.program.vars.empty() && catalog_.count("setLink");
  catalog_.insert("setLink");
  catalog_.insert("invokeSolver");
}

void Node::add_fact(const Tuple& t) { store_.insert(t); }

bool Node::finished() const {
  for (const auto& [peer, st] : links_)
    if (id_ > peer && st != LinkState::Done) return false;
  return true;
}

Message& Node::message_to(Reaction& r, const NodeId& dst) {
  for (auto& m : r.out)
    if (m.dst == dst && m.control == Control::None) return m;
  r.out.push_back({id_, dst, {}, Control::None});
  return r.out.back();
}

void Node::flush(Reaction& r, int64_t, const std::string&) {
  std::map<NodeId, std::vector<datalog::FactOp>> by_dst;
  for (auto& op : store_.take_outbox()) by_dst[op.tuple.values.at(0)].push_back(std::move(op));
  for (auto& [dst, ops] : by_dst) {
    Message& m = message_to(r, dst);
    for (auto& op : ops) m.ops.push_back(std::move(op));
  }
}

void Node::refresh_links() {
  for (const auto& row : store_.rows(link_table_))
    if (row.size() >= 2 && row[0] == id_ && row[1] != id_ && !links_.count(row[1])) links_[row[1]] = LinkState::Idle;
}

namespace {

uint64_t out_bytes(const Reaction& r) {
  uint64_t b = 0;
  for (const auto& m : r.out) b += encode(m).size();
  return b;
}

void metric(Reaction& r, int64_t now, const NodeId& id, const std::string& event, std::optional<int64_t> obj = {},
            double solve_ms = 0) {
  MetricRow row;
  row.time = now;
  row.node = id;
  row.event = event;
  row.objective = obj;
  row.solve_ms = solve_ms;
  row.msgs_out = r.out.size();
  row.bytes_out = out_bytes(r);
  r.metrics.push_back(std::move(row));
}

}  // namespace

Reaction Node::start(int64_t now) {
  Reaction r;
  started_ = true;
  store_.run_to_fixpoint();
  flush(r, now, "start");
  refresh_links();
  if (negotiating_) {
    bool any = false;
    for (const auto& [peer, st] : links_) any |= id_ > peer;
    if (any) {
      const int64_t period = std::max<int64_t>(1, cfg_.negotiation_period_ms);
      r.timer_at = now + std::uniform_int_distribution<int64_t>(1, period)(rng_);
    }
  } else if (!program_.program.vars.empty()) {
    solve_local(r, now, "start");
    if (cfg_.reoptimize_period_ms > 0) r.timer_at = now + cfg_.reoptimize_period_ms;
  }
  if (r.metrics.empty()) metric(r, now, id_, "start");
  return r;
}

Reaction Node::on_message(const Message& m, int64_t now) {
  Reaction r;
  bool invoke = false;
  for (const auto& op : m.ops) {
    if (!catalog_.count(op.tuple.pred)) {
      ++dropped_;
      r.notes.push_back("dropped tuple of unknown predicate " + op.tuple.pred);
      continue;
    }
    if (op.tuple.pred == "invokeSolver" && op.kind != datalog::OpKind::Delete) invoke = true;
    store_.apply(op);
  }
  store_.run_to_fixpoint();
  flush(r, now, "message");
  refresh_links();
  switch (m.control) {
    case Control::None: break;
    case Control::Propose:
      if (!peer_) accept(m.src, r, now);
      else queue_.push_back(m.src);
      break;
    case Control::Accept:
      if (peer_ && *peer_ == m.src) solve_link(m.src, r, now);
      else r.notes.push_back("unexpected accept from " + m.src.to_plain());
      break;
    case Control::Done:
      links_[m.src] = LinkState::Done;
      if (peer_ && *peer_ == m.src) peer_.reset();
      next_in_queue(r, now);
      break;
  }
  if (invoke && !negotiating_) solve_local(r, now, "invokeSolver");
  if (r.metrics.empty()) metric(r, now, id_, std::string("recv_") + control_name(m.control));
  return r;
}

Reaction Node::on_timer(int64_t now) {
  Reaction r;
  if (negotiating_) {
    maybe_initiate(r, now);
    bool pending = false;
    for (const auto& [peer, st] : links_) pending |= id_ > peer && st == LinkState::Idle;
    if (pending) r.timer_at = now + std::max<int64_t>(1, cfg_.negotiation_period_ms);
  } else if (!program_.program.vars.empty()) {
    solve_local(r, now, "periodic");
    if (cfg_.reoptimize_period_ms > 0) r.timer_at = now + cfg_.reoptimize_period_ms;
  }
  if (r.metrics.empty()) metric(r, now, id_, "timer");
  return r;
}

void Node::maybe_initiate(Reaction& r, int64_t) {
  if (peer_ || !queue_.empty()) return;
  std::vector<NodeId> eligible;
  for (const auto& [peer, st] : links_)
    if (id_ > peer && st == LinkState::Idle) eligible.push_back(peer);
  if (eligible.empty()) return;
  const NodeId y = eligible[std::uniform_int_distribution<size_t>(0, eligible.size() - 1)(rng_)];
  links_[y] = LinkState::Proposed;
  peer_ = y;
  r.out.push_back({id_, y, {}, Control::Propose});
  r.notes.push_back("propose " + y.to_plain());
}

void Node::accept(const NodeId& from, Reaction& r, int64_t) {
  peer_ = from;
  links_[from] = LinkState::Solving;
  Message& m = message_to(r, from);
  m.control = Control::Accept;
  r.notes.push_back("accept " + from.to_plain());
}

void Node::next_in_queue(Reaction& r, int64_t now) {
  while (!peer_ && !queue_.empty()) {
    NodeId next = queue_.front();
    queue_.pop_front();
    accept(next, r, now);
  }
}

namespace {

struct Solved {
  solver::Grounding g;
  solver::Solution sol;
  std::optional<int64_t> baseline;
  double ms = 0;
  bool valid = false;
};

Solved ground_and_solve(const AnnotatedProgram& a, const datalog::Store& s, const Config& cfg) {
  auto t0 = std::chrono::steady_clock::now();
  Solved out;
  out.g = solver::ground_model(a, s, cfg);
  out.sol = solver::solve(out.g.model, solver::SolveOptions::from(cfg));
  out.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  out.valid = out.sol.has_assignment() && solver::check_assignment(out.g.model, out.sol.values).empty();
  if (out.g.model.objective) {
    std::vector<std::optional<int64_t>> zeros(out.g.model.vars.size(), int64_t{0});
    if (auto full = solver::complete_assignment(out.g.model, zeros)) out.baseline = out.g.model.objective->expr.eval(*full);
  }
  return out;
}

}  // namespace

void Node::solve_link(const NodeId& peer, Reaction& r, int64_t now) {
  links_[peer] = LinkState::Solving;
  const Tuple set_link{"setLink", {id_, peer}};
  store_.insert(set_link);
  store_.run_to_fixpoint();
  Solved s = ground_and_solve(program_, store_, cfg_);
  NegotiationRecord rec;
  rec.time = now;
  rec.initiator = id_;
  rec.peer = peer;
  rec.status = s.sol.status;
  rec.objective = s.sol.objective;
  rec.baseline = s.baseline;
  rec.solve_ms = cfg_.fixed_solve_cost_ms ? static_cast<double>(*cfg_.fixed_solve_cost_ms) : s.ms;
  rec.nodes = s.sol.nodes;
  if (s.valid) {
    for (const auto& op : solver::materialize(s.g, s.sol.values)) {
      store_.apply(op);
      ++rec.materialized;
    }
    store_.run_to_fixpoint();
  } else if (s.sol.has_assignment()) {
    rec.status = solver::Status::Unknown;
    r.notes.push_back("solution rejected by the checker");
  }
  store_.remove(set_link);
  store_.run_to_fixpoint();
  flush(r, now, "solve");
  links_[peer] = LinkState::Done;
  message_to(r, peer).control = Control::Done;
  // message_to may have returned a tuple-only message; it now carries done
  peer_.reset();
  std::ostringstream note;
  note << "negotiated " << peer.to_plain() << " status=" << solver::status_name(rec.status);
  if (rec.objective) note << " objective=" << *rec.objective;
  r.notes.push_back(note.str());
  r.busy_ms = cfg_.fixed_solve_cost_ms ? *cfg_.fixed_solve_cost_ms : static_cast<int64_t>(std::ceil(s.ms));
  metric(r, now, id_, "negotiate", rec.objective, rec.solve_ms);
  log_.push_back(std::move(rec));
  next_in_queue(r, now);
}

void Node::solve_local(Reaction& r, int64_t now, const std::string& why) {
  Solved s = ground_and_solve(program_, store_, cfg_);
  NegotiationRecord rec;
  rec.time = now;
  rec.initiator = id_;
  rec.peer = id_;
  rec.status = s.sol.status;
  rec.objective = s.sol.objective;
  rec.baseline = s.baseline;
  rec.solve_ms = cfg_.fixed_solve_cost_ms ? static_cast<double>(*cfg_.fixed_solve_cost_ms) : s.ms;
  rec.nodes = s.sol.nodes;
  if (s.valid) {
    for (const auto& op : solver::materialize(s.g, s.sol.values)) {
      store_.apply(op);
      ++rec.materialized;
    }
  } else {
    // no valid solution: clear previously materialized solution facts
    for (const auto& t : s.g.var_tables)
      for (const auto& row : store_.rows(t)) store_.remove({t, row});
    if (s.sol.has_assignment()) rec.status = solver::Status::Unknown;
  }
  store_.run_to_fixpoint();
  flush(r, now, "solve");
  std::ostringstream note;
  note << "solved (" << why << ") status=" << solver::status_name(rec.status);
  if (rec.objective) note << " objective=" << *rec.objective;
  r.notes.push_back(note.str());
  r.busy_ms += cfg_.fixed_solve_cost_ms ? *cfg_.fixed_solve_cost_ms : static_cast<int64_t>(std::ceil(s.ms));
  metric(r, now, id_, "solve", rec.objective, rec.solve_ms);
  log_.push_back(std::move(rec));
}

}  // namespace cologne::runtime
