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

#include "cologne/cologne.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <new>
#include <optional>
#include <sstream>
#include <string>

#include "cologne/analysis.hpp"
#include "cologne/config.hpp"
#include "cologne/datalog.hpp"
#include "cologne/experiments.hpp"
#include "cologne/ground.hpp"
#include "cologne/lang.hpp"
#include "cologne/netsim.hpp"
#include "cologne/scenarios.hpp"
#include "cologne/solver.hpp"

using namespace cologne;

struct cologne_program {
  ast::Program program;
  std::string filename;
  Config defaults;
};

struct cologne_config {
  Config cfg;
};

struct cologne_facts {
  std::vector<Tuple> facts;
};

struct cologne_result {
  std::unique_ptr<datalog::Store> store;
  std::optional<solver::Grounding> grounding;
  std::string status = "none";
  std::optional<int64_t> objective;
  double solve_ms = 0;
  uint64_t nodes = 0;
};

struct cologne_sim {
  std::unique_ptr<netsim::Sim> sim;
};

namespace {

thread_local std::string last_error;

// Input-side failures (files, config, facts, topology) map to COLOGNE_ERR_IO.
struct InputError : Error {
  using Error::Error;
};

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <class F>
cologne_status guard(F&& f) {
  try {
    last_error.clear();
    return f();
  } catch (const InputError& e) {
    last_error = e.what();
    return COLOGNE_ERR_IO;
  } catch (const Error& e) {
    last_error = e.what();
    return COLOGNE_ERR_DIAGNOSTICS;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return COLOGNE_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return COLOGNE_ERR_INTERNAL;
  }
}

cologne_status invalid(const char* what) {
  last_error = std::string("invalid argument: ") + what;
  return COLOGNE_ERR_INVALID;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

template <class F>
auto as_input(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const InputError&) {
    throw;
  } catch (const Error& e) {
    throw InputError(e.what());
  }
}

std::vector<Diagnostic> all_diagnostics(const ast::Program& p, const std::string& file) {
  auto d = check_program(p, file);
  for (const auto& x : d)
    if (x.severity == Severity::Error) return d;
  AnnotatedProgram a = annotate(p);
  auto add = [&](std::vector<Diagnostic> v) {
    for (auto& x : v) {
      if (x.file == "<program>") x.file = file;
      d.push_back(std::move(x));
    }
  };
  add(a.diagnostics);
  add(check_safety(a));
  add(localize_program(a).diagnostics);
  return d;
}

bool has_errors(const std::vector<Diagnostic>& d) {
  for (const auto& x : d)
    if (x.severity == Severity::Error) return true;
  return false;
}

void require_clean(const ast::Program& p, const std::string& file) {
  auto d = all_diagnostics(p, file);
  if (has_errors(d)) throw Error(render_diagnostics(d));
}

NodeId parse_node(const char* s) {
  std::string t = s;
  char* end = nullptr;
  long long v = std::strtoll(t.c_str(), &end, 10);
  if (!t.empty() && end && *end == '\0') return Value(static_cast<int64_t>(v));
  return Value(t);
}

}  // namespace

extern "C" {

const char* cologne_version(void) { return "0.1.0"; }
const char* cologne_last_error(void) { return last_error.c_str(); }
void cologne_string_free(char* s) { std::free(s); }

cologne_status cologne_shipped_programs(char** out) {
  if (!out) return invalid("out");
  return guard([&] {
    std::string s;
    for (const auto& n : scenarios::program_names()) s += n + "\n";
    *out = dup(s);
    return COLOGNE_OK;
  });
}

// ---- programs ----

cologne_status cologne_program_parse(const char* source, const char* filename, cologne_program** out) {
  if (!source || !out) return invalid("source/out");
  return guard([&] {
    auto p = std::make_unique<cologne_program>();
    p->filename = filename ? filename : "<input>";
    p->program = parse_program(source, p->filename);
    *out = p.release();
    return COLOGNE_OK;
  });
}

cologne_status cologne_program_load(const char* const* names, size_t count, cologne_program** out) {
  if (!names || count == 0 || !out) return invalid("names/out");
  return guard([&] {
    auto p = std::make_unique<cologne_program>();
    std::string text;
    for (size_t i = 0; i < count; ++i) {
      if (!names[i]) throw InputError("null program name");
      const std::string name = names[i];
      std::error_code ec;
      const bool is_file = std::filesystem::is_regular_file(name, ec);
      if (is_file) {
        text += read_file(name);
      } else {
        try {
          text += scenarios::program_text(name);
        } catch (const Error&) {
          throw InputError("no such program file or shipped program: " + name);
        }
      }
      text += "\n";
      if (i == 0) {
        p->filename = is_file ? name : name + ".clg";
        if (is_file) {
          auto conf = std::filesystem::path(name).replace_extension(".conf");
          if (std::filesystem::is_regular_file(conf, ec))
            as_input([&] { p->defaults.merge(read_file(conf.string()), conf.string()); return 0; });
        } else {
          p->defaults = scenarios::program_config(name);
        }
      }
    }
    p->program = parse_program(text, p->filename);
    *out = p.release();
    return COLOGNE_OK;
  });
}

void cologne_program_free(cologne_program* p) { delete p; }

cologne_status cologne_program_check(const cologne_program* p, char** diagnostics) {
  if (!p) return invalid("program");
  return guard([&] {
    auto d = all_diagnostics(p->program, p->filename);
    if (diagnostics) *diagnostics = dup(render_diagnostics(d));
    if (has_errors(d)) {
      last_error = "program has errors";
      return COLOGNE_ERR_DIAGNOSTICS;
    }
    return COLOGNE_OK;
  });
}

cologne_status cologne_program_explain(const cologne_program* p, char** out) {
  if (!p || !out) return invalid("program/out");
  return guard([&] {
    *out = dup(explain(annotate(p->program)));
    return COLOGNE_OK;
  });
}

cologne_status cologne_program_print(const cologne_program* p, char** out) {
  if (!p || !out) return invalid("program/out");
  return guard([&] {
    *out = dup(print_program(p->program));
    return COLOGNE_OK;
  });
}

cologne_status cologne_program_localized(const cologne_program* p, char** out) {
  if (!p || !out) return invalid("program/out");
  return guard([&] {
    auto lp = localize_program(annotate(p->program));
    std::string s;
    for (const auto& r : lp.rules) s += print_rule(r) + "\n";
    *out = dup(s);
    return COLOGNE_OK;
  });
}

cologne_status cologne_program_default_config(const cologne_program* p, cologne_config** out) {
  if (!p || !out) return invalid("program/out");
  return guard([&] {
    *out = new cologne_config{p->defaults};
    return COLOGNE_OK;
  });
}

// ---- configuration ----

cologne_status cologne_config_new(cologne_config** out) {
  if (!out) return invalid("out");
  return guard([&] {
    *out = new cologne_config{};
    return COLOGNE_OK;
  });
}

void cologne_config_free(cologne_config* c) { delete c; }

cologne_status cologne_config_merge_text(cologne_config* c, const char* text, const char* filename) {
  if (!c || !text) return invalid("config/text");
  return guard([&] {
    as_input([&] { c->cfg.merge(text, filename ? filename : "<config>"); return 0; });
    return COLOGNE_OK;
  });
}

cologne_status cologne_config_merge_file(cologne_config* c, const char* path) {
  if (!c || !path) return invalid("config/path");
  return guard([&] {
    const std::string text = read_file(path);
    as_input([&] { c->cfg.merge(text, path); return 0; });
    return COLOGNE_OK;
  });
}

cologne_status cologne_config_set(cologne_config* c, const char* key, const char* value) {
  if (!c || !key || !value) return invalid("config/key/value");
  return guard([&] {
    as_input([&] { c->cfg.merge(std::string(key) + "=" + value, "<set>"); return 0; });
    return COLOGNE_OK;
  });
}

cologne_status cologne_config_text(const cologne_config* c, char** out) {
  if (!c || !out) return invalid("config/out");
  return guard([&] {
    *out = dup(c->cfg.to_text());
    return COLOGNE_OK;
  });
}

// ---- facts ----

cologne_status cologne_facts_parse(const char* text, const char* filename, cologne_facts** out) {
  if (!text || !out) return invalid("text/out");
  return guard([&] {
    auto f = std::make_unique<cologne_facts>();
    f->facts = as_input([&] { return datalog::parse_facts(text, filename ? filename : "<facts>"); });
    *out = f.release();
    return COLOGNE_OK;
  });
}

cologne_status cologne_facts_load_file(const char* path, cologne_facts** out) {
  if (!path || !out) return invalid("path/out");
  return guard([&] {
    const std::string text = read_file(path);
    auto f = std::make_unique<cologne_facts>();
    f->facts = as_input([&] { return datalog::parse_facts(text, path); });
    *out = f.release();
    return COLOGNE_OK;
  });
}

void cologne_facts_free(cologne_facts* f) { delete f; }
size_t cologne_facts_count(const cologne_facts* f) { return f ? f->facts.size() : 0; }

// ---- centralized evaluation and solving ----

cologne_status cologne_solve(const cologne_program* p, const cologne_facts* f, const cologne_config* c,
                             cologne_result** out) {
  if (!p || !out) return invalid("program/out");
  return guard([&] {
    require_clean(p->program, p->filename);
    const Config cfg = c ? c->cfg : p->defaults;
    AnnotatedProgram a = annotate(p->program);
    auto r = std::make_unique<cologne_result>();
    datalog::StoreOptions so;
    so.consts = cfg.consts;
    so.max_derivations = cfg.max_derivations;
    r->store = std::make_unique<datalog::Store>(so);
    r->store->register_program(a);
    if (f)
      for (const auto& t : f->facts) r->store->insert(t);
    r->store->run_to_fixpoint();
    if (!a.program.vars.empty()) {
      r->grounding = solver::ground_model(a, *r->store, cfg);
      auto sol = solver::solve(r->grounding->model, solver::SolveOptions::from(cfg));
      r->status = solver::status_name(sol.status);
      r->objective = sol.objective;
      r->solve_ms = sol.solve_millis;
      r->nodes = sol.nodes;
      if (sol.has_assignment()) {
        auto bad = solver::check_assignment(r->grounding->model, sol.values);
        if (!bad.empty()) throw Error("solver returned an invalid assignment: " + bad.front());
        for (const auto& op : solver::materialize(*r->grounding, sol.values)) r->store->apply(op);
        r->store->run_to_fixpoint();
      }
    }
    *out = r.release();
    return COLOGNE_OK;
  });
}

void cologne_result_free(cologne_result* r) { delete r; }
const char* cologne_result_status(const cologne_result* r) { return r ? r->status.c_str() : "none"; }

int cologne_result_objective(const cologne_result* r, int64_t* objective) {
  if (!r || !r->objective) return 0;
  if (objective) *objective = *r->objective;
  return 1;
}

double cologne_result_solve_ms(const cologne_result* r) { return r ? r->solve_ms : 0; }
uint64_t cologne_result_search_nodes(const cologne_result* r) { return r ? r->nodes : 0; }

cologne_status cologne_result_solution_csv(const cologne_result* r, char** out) {
  if (!r || !out) return invalid("result/out");
  return guard([&] {
    std::string s;
    if (r->grounding && r->status != "unsat")
      for (const auto& t : r->grounding->var_tables) s += "# table " + t + "\n" + datalog::table_csv(*r->store, t);
    *out = dup(s);
    return COLOGNE_OK;
  });
}

cologne_status cologne_result_table_csv(const cologne_result* r, const char* table, char** out) {
  if (!r || !table || !out) return invalid("result/table/out");
  return guard([&] {
    *out = dup(datalog::table_csv(*r->store, table));
    return COLOGNE_OK;
  });
}

cologne_status cologne_result_model_dump(const cologne_result* r, char** out) {
  if (!r || !out) return invalid("result/out");
  return guard([&] {
    *out = dup(r->grounding ? r->grounding->model.dump() : std::string("# cologne-model v1\nobjective satisfy\n"));
    return COLOGNE_OK;
  });
}

cologne_status cologne_result_facts(const cologne_result* r, char** out) {
  if (!r || !out) return invalid("result/out");
  return guard([&] {
    *out = dup(datalog::format_facts(r->store->all_tuples()));
    return COLOGNE_OK;
  });
}

// ---- simulation ----

cologne_status cologne_sim_new(const cologne_program* p, const char* topology, const cologne_facts* f,
                               const cologne_config* c, uint64_t seed, cologne_sim** out) {
  if (!p || !topology || !out) return invalid("program/topology/out");
  return guard([&] {
    require_clean(p->program, p->filename);
    auto topo = as_input([&] { return netsim::parse_topology(topology); });
    static const std::vector<Tuple> none;
    auto s = std::make_unique<cologne_sim>();
    s->sim = std::make_unique<netsim::Sim>(p->program, std::move(topo), f ? f->facts : none, c ? c->cfg : p->defaults,
                                           seed);
    *out = s.release();
    return COLOGNE_OK;
  });
}

void cologne_sim_free(cologne_sim* s) { delete s; }

cologne_status cologne_sim_run_until(cologne_sim* s, int64_t virtual_ms) {
  if (!s) return invalid("sim");
  return guard([&] {
    s->sim->run_until(virtual_ms);
    return COLOGNE_OK;
  });
}

cologne_status cologne_sim_run_to_end(cologne_sim* s, int64_t limit_ms) {
  if (!s) return invalid("sim");
  return guard([&] {
    while (!s->sim->drained() && s->sim->now() < limit_ms)
      s->sim->run_until(std::min(limit_ms, s->sim->now() + 60'000));
    return COLOGNE_OK;
  });
}

int64_t cologne_sim_now(const cologne_sim* s) { return s ? s->sim->now() : 0; }

cologne_status cologne_sim_trace_csv(const cologne_sim* s, char** out) {
  if (!s || !out) return invalid("sim/out");
  return guard([&] {
    *out = dup(s->sim->trace_csv());
    return COLOGNE_OK;
  });
}

cologne_status cologne_sim_metrics_csv(const cologne_sim* s, char** out) {
  if (!s || !out) return invalid("sim/out");
  return guard([&] {
    *out = dup(s->sim->metrics_csv());
    return COLOGNE_OK;
  });
}

cologne_status cologne_sim_rounds_csv(const cologne_sim* s, char** out) {
  if (!s || !out) return invalid("sim/out");
  return guard([&] {
    std::ostringstream os;
    os << "round,time,initiator,peer,status,objective,baseline\n";
    size_t k = 0;
    for (const auto& r : s->sim->negotiations()) {
      os << ++k << ',' << r.time << ',' << r.initiator.to_plain() << ',' << r.peer.to_plain() << ','
         << solver::status_name(r.status) << ',';
      if (r.objective) os << *r.objective;
      os << ',';
      if (r.baseline) os << *r.baseline;
      os << '\n';
    }
    *out = dup(os.str());
    return COLOGNE_OK;
  });
}

cologne_status cologne_sim_bytes_csv(const cologne_sim* s, char** out) {
  if (!s || !out) return invalid("sim/out");
  return guard([&] {
    std::ostringstream os;
    os << "node,bytes_sent,bytes_received\n";
    const auto& sent = s->sim->bytes_sent();
    const auto& recv = s->sim->bytes_received();
    for (const auto& id : s->sim->topology().nodes) {
      auto a = sent.find(id);
      auto b = recv.find(id);
      os << id.to_plain() << ',' << (a == sent.end() ? 0 : a->second) << ',' << (b == recv.end() ? 0 : b->second)
         << '\n';
    }
    *out = dup(os.str());
    return COLOGNE_OK;
  });
}

cologne_status cologne_sim_table_csv(const cologne_sim* s, const char* node, const char* table, char** out) {
  if (!s || !node || !table || !out) return invalid("sim/node/table/out");
  return guard([&] {
    *out = dup(datalog::table_csv(s->sim->node(parse_node(node)).store(), table));
    return COLOGNE_OK;
  });
}

cologne_status cologne_topology_inputs(const char* topology, char** programs, char** facts, char** configs,
                                       char** scenario, size_t* nodes) {
  if (!topology) return invalid("topology");
  return guard([&] {
    auto t = as_input([&] { return netsim::parse_topology(topology); });
    auto lines = [](const std::vector<std::string>& v) {
      std::string s;
      for (const auto& x : v) s += x + "\n";
      return s;
    };
    if (programs) *programs = dup(lines(t.programs));
    if (facts) *facts = dup(lines(t.facts));
    if (configs) *configs = dup(lines(t.configs));
    if (scenario) *scenario = dup(t.scenario.value_or(""));
    if (nodes) *nodes = t.nodes.size();
    return COLOGNE_OK;
  });
}

// ---- scenarios, oracles, benchmarks ----

cologne_status cologne_generate(const char* kind, const char* params, char** facts, char** topology) {
  if (!kind) return invalid("kind");
  return guard([&] {
    std::string f, t;
    auto p = as_input([&] { return experiments::parse_params(params ? params : ""); });
    as_input([&] { experiments::generate(kind, p, &f, &t); return 0; });
    if (facts) *facts = dup(f);
    if (topology) *topology = dup(t);
    return COLOGNE_OK;
  });
}

cologne_status cologne_oracle(const char* kind, const char* params, char** report) {
  if (!kind || !report) return invalid("kind/report");
  return guard([&] {
    auto p = as_input([&] { return experiments::parse_params(params ? params : ""); });
    *report = dup(as_input([&] { return experiments::oracle_report(kind, p); }));
    return COLOGNE_OK;
  });
}

cologne_status cologne_bench(const char* which, const char* params, char** summary) {
  if (!which || !summary) return invalid("which/summary");
  return guard([&] {
    auto p = as_input([&] { return experiments::parse_params(params ? params : ""); });
    *summary = dup(as_input([&] { return experiments::bench(which, p); }));
    return COLOGNE_OK;
  });
}

}  // extern "C"
