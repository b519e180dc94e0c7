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

// colognectl: command-line front end over the C API.
//
// Exit codes: 0 success, 1 diagnostics, 2 unsat, 3 I/O or configuration error.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cologne/cologne.h"

namespace fs = std::filesystem;

namespace {

enum Level { Error = 0, Warn = 1, Info = 2, Debug = 3 };

Level log_level() {
  const char* env = std::getenv("COLOGNE_LOG");
  if (!env) return Warn;
  const std::string v = env;
  if (v == "error") return Error;
  if (v == "info") return Info;
  if (v == "debug") return Debug;
  return Warn;
}

void log(Level l, const std::string& msg) {
  static const char* names[] = {"error", "warn", "info", "debug"};
  if (l <= log_level()) std::cerr << "colognectl: " << names[l] << ": " << msg << '\n';
}

// Thrown to leave a subcommand with a given exit code.
struct Exit {
  int code;
};

int code_of(cologne_status s) {
  switch (s) {
    case COLOGNE_OK: return 0;
    case COLOGNE_ERR_DIAGNOSTICS: return 1;
    case COLOGNE_ERR_UNSAT: return 2;
    default: return 3;
  }
}

void check(cologne_status s, const std::string& what) {
  if (s == COLOGNE_OK) return;
  std::string msg = cologne_last_error();
  log(Error, what + ": " + msg);
  throw Exit{code_of(s)};
}

std::string take(char* s) {
  std::string out = s ? s : "";
  cologne_string_free(s);
  return out;
}

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);)
    if (!l.empty()) out.push_back(l);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    log(Error, "cannot read " + path);
    throw Exit{3};
  }
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) {
    log(Error, "cannot write " + path);
    throw Exit{3};
  }
  log(Info, "wrote " + path);
}

template <class T, void (*F)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { F(p); }
};

using Program = Handle<cologne_program, cologne_program_free>;
using ConfigH = Handle<cologne_config, cologne_config_free>;
using Facts = Handle<cologne_facts, cologne_facts_free>;
using Result = Handle<cologne_result, cologne_result_free>;
using SimH = Handle<cologne_sim, cologne_sim_free>;

void load_program(Program& p, const std::vector<std::string>& names) {
  if (names.empty()) {
    log(Error, "no program given");
    throw Exit{3};
  }
  std::vector<const char*> c;
  for (const auto& n : names) c.push_back(n.c_str());
  check(cologne_program_load(c.data(), c.size(), &p.p), "loading program");
}

// Program defaults, then each facts file's sibling `.conf`, then extra files, then --set.
void layered_config(ConfigH& c, const Program& p, const std::vector<std::string>& facts,
                    const std::vector<std::string>& configs, const std::vector<std::string>& sets) {
  check(cologne_program_default_config(p.p, &c.p), "configuration");
  for (const auto& f : facts) {
    fs::path conf = fs::path(f).replace_extension(".conf");
    std::error_code ec;
    if (fs::is_regular_file(conf, ec)) {
      log(Debug, "merging " + conf.string());
      check(cologne_config_merge_file(c.p, conf.string().c_str()), "configuration");
    }
  }
  for (const auto& f : configs) check(cologne_config_merge_file(c.p, f.c_str()), "configuration");
  for (const auto& s : sets) {
    auto eq = s.find('=');
    if (eq == std::string::npos) {
      log(Error, "--set expects key=value, got " + s);
      throw Exit{3};
    }
    check(cologne_config_set(c.p, s.substr(0, eq).c_str(), s.substr(eq + 1).c_str()), "configuration");
  }
}

void load_facts(Facts& f, const std::vector<std::string>& paths, const std::string& extra = {}) {
  std::string text;
  for (const auto& p : paths) text += read_file(p) + "\n";
  text += extra;
  check(cologne_facts_parse(text.c_str(), paths.empty() ? "<facts>" : paths.front().c_str(), &f.p), "facts");
}

std::string joined(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : " ") + x;
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cologne: declarative distributed constraint optimization"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(cologne_version()));

  // check
  std::vector<std::string> check_programs;
  bool explain = false;
  auto* cmd_check = app.add_subcommand("check", "Check a program and print its annotations");
  cmd_check->add_option("program", check_programs, "Program files or shipped stems")->required();
  cmd_check->add_flag("--explain", explain, "Also print the localized rules");

  // solve
  std::vector<std::string> programs, facts, configs, sets;
  std::string out_path, model_dump;
  std::optional<int64_t> budget;
  auto* cmd_solve = app.add_subcommand("solve", "Centralized ground-and-solve; writes the solution CSV");
  cmd_solve->add_option("--program,-p", programs, "Program files or shipped stems")->required();
  cmd_solve->add_option("--facts,-f", facts, "Facts files");
  cmd_solve->add_option("--config,-c", configs, "Configuration files (applied in order)");
  cmd_solve->add_option("--set", sets, "Configuration override key=value");
  cmd_solve->add_option("--budget-ms", budget, "Solver wall-clock budget");
  cmd_solve->add_option("--out,-o", out_path, "Solution CSV (default stdout)");
  cmd_solve->add_option("--model-dump", model_dump, "Write the grounded model ('-' for stdout)");

  // dump
  std::string table;
  auto* cmd_dump = app.add_subcommand("dump", "Evaluate a program and print one table as CSV");
  cmd_dump->add_option("--program,-p", programs, "Program files or shipped stems")->required();
  cmd_dump->add_option("--facts,-f", facts, "Facts files");
  cmd_dump->add_option("--config,-c", configs, "Configuration files");
  cmd_dump->add_option("--set", sets, "Configuration override key=value");
  cmd_dump->add_option("--table,-t", table, "Table name")->required();
  cmd_dump->add_option("--out,-o", out_path, "Output (default stdout)");

  // sim
  std::string topology, trace_out, metrics_out, rounds_out, bytes_out, sim_table, sim_node;
  uint64_t seed = 1;
  int64_t duration = 300000;
  std::optional<int64_t> fixed_cost;
  auto* cmd_sim = app.add_subcommand("sim", "Run the network simulator");
  cmd_sim->add_option("--topology,-t", topology, "Topology file")->required();
  cmd_sim->add_option("--program,-p", programs, "Programs (default: the topology's program line)");
  cmd_sim->add_option("--facts,-f", facts, "Facts files (default: the topology's facts lines)");
  cmd_sim->add_option("--config,-c", configs, "Configuration files");
  cmd_sim->add_option("--set", sets, "Configuration override key=value");
  cmd_sim->add_option("--seed", seed, "Simulation seed");
  cmd_sim->add_option("--duration-ms", duration, "Virtual duration");
  cmd_sim->add_option("--fixed-solve-cost-ms", fixed_cost, "Charge every solve this much virtual time");
  cmd_sim->add_option("--trace", trace_out, "Trace CSV (default stdout)");
  cmd_sim->add_option("--metrics", metrics_out, "Metrics CSV");
  cmd_sim->add_option("--rounds", rounds_out, "Per-negotiation cost CSV");
  cmd_sim->add_option("--bytes", bytes_out, "Per-node bytes CSV");
  cmd_sim->add_option("--dump-node", sim_node, "Node whose table --dump-table prints");
  cmd_sim->add_option("--dump-table", sim_table, "Table printed after the run (to stderr)");

  // oracle / gen / bench
  std::string kind;
  std::vector<std::string> params;
  auto* cmd_oracle = app.add_subcommand("oracle", "Run a brute-force oracle on a generated instance");
  cmd_oracle->add_option("kind", kind, "fts | acloud | channel | channel2")->required();
  cmd_oracle->add_option("params", params, "key=value parameters (n, seed, ...)");

  std::string facts_out, topo_out;
  auto* cmd_gen = app.add_subcommand("gen", "Generate scenario facts and topology");
  cmd_gen->add_option("kind", kind, "fts | acloud | channel")->required();
  cmd_gen->add_option("params", params, "key=value parameters");
  cmd_gen->add_option("--facts-out", facts_out, "Facts file (default stdout)");
  cmd_gen->add_option("--topology-out", topo_out, "Topology file");

  std::string which = "all";
  auto* cmd_bench = app.add_subcommand("bench", "Run the evaluation scenarios; prints a summary table");
  cmd_bench->add_option("which", which, "fts | acloud | channel | bandwidth | all");
  cmd_bench->add_option("params", params, "key=value parameters (quick=1, seeds=N)");
  cmd_bench->add_option("--out,-o", out_path, "Summary output (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 3;
  }

  try {
    if (*cmd_check) {
      Program p;
      load_program(p, check_programs);
      char* diags = nullptr;
      const cologne_status st = cologne_program_check(p.p, &diags);
      std::cerr << take(diags);
      if (st != COLOGNE_OK && st != COLOGNE_ERR_DIAGNOSTICS) check(st, "check");
      char* table_text = nullptr;
      check(cologne_program_explain(p.p, &table_text), "explain");
      std::cout << take(table_text);
      if (explain && st == COLOGNE_OK) {
        char* loc = nullptr;
        check(cologne_program_localized(p.p, &loc), "localize");
        std::cout << "# localized rules\n" << take(loc);
      }
      return st == COLOGNE_OK ? 0 : 1;
    }

    if (*cmd_solve || *cmd_dump) {
      Program p;
      load_program(p, programs);
      ConfigH c;
      layered_config(c, p, facts, configs, sets);
      if (budget) check(cologne_config_set(c.p, "budget_millis", std::to_string(*budget).c_str()), "configuration");
      Facts f;
      load_facts(f, facts);
      Result r;
      check(cologne_solve(p.p, f.p, c.p, &r.p), "solve");
      const std::string status = cologne_result_status(r.p);
      int64_t obj = 0;
      std::string summary = "status=" + status;
      if (cologne_result_objective(r.p, &obj)) summary += " objective=" + std::to_string(obj);
      log(Info, summary + " search_nodes=" + std::to_string(cologne_result_search_nodes(r.p)));
      if (*cmd_dump) {
        char* csv = nullptr;
        check(cologne_result_table_csv(r.p, table.c_str(), &csv), "dump");
        write_output(out_path, take(csv));
        return status == "unsat" ? 2 : 0;
      }
      if (!model_dump.empty()) {
        char* dump = nullptr;
        check(cologne_result_model_dump(r.p, &dump), "model dump");
        write_output(model_dump, take(dump));
      }
      if (status == "unsat") {
        log(Warn, "no solution: the constraints are unsatisfiable");
        write_output(out_path, "# " + summary + "\n");
        return 2;
      }
      char* csv = nullptr;
      check(cologne_result_solution_csv(r.p, &csv), "solution");
      std::string body = "# " + summary + "\n" + take(csv);
      write_output(out_path, body);
      return 0;
    }

    if (*cmd_sim) {
      const std::string topo_text = read_file(topology);
      char *tp = nullptr, *tf = nullptr, *tc = nullptr, *ts = nullptr;
      size_t nodes = 0;
      check(cologne_topology_inputs(topo_text.c_str(), &tp, &tf, &tc, &ts, &nodes), topology);
      const auto topo_programs = lines_of(take(tp));
      const auto topo_facts = lines_of(take(tf));
      const auto topo_configs = lines_of(take(tc));
      const std::string scenario = take(ts);
      const fs::path dir = fs::path(topology).parent_path();
      auto resolve = [&](const std::string& name) {
        std::error_code ec;
        fs::path rel = dir / name;
        if (!fs::path(name).is_absolute() && fs::exists(rel, ec)) return rel.string();
        return name;
      };

      std::string sim_topology = topo_text;
      std::string generated;
      std::vector<std::string> prog_names = programs;
      if (!scenario.empty()) {
        std::istringstream in(scenario);
        std::string skind, rest, tok;
        in >> skind;
        while (in >> tok) rest += tok + " ";
        char *gf = nullptr, *gt = nullptr;
        check(cologne_generate(skind.c_str(), rest.c_str(), &gf, &gt), "scenario");
        generated = take(gf);
        std::string gtopo = take(gt);
        if (nodes == 0) sim_topology = gtopo;
        if (prog_names.empty() && topo_programs.empty()) {
          char* gp = nullptr;
          check(cologne_topology_inputs(gtopo.c_str(), &gp, nullptr, nullptr, nullptr, nullptr), "scenario");
          prog_names = lines_of(take(gp));
        }
      }
      if (prog_names.empty())
        for (const auto& n : topo_programs) prog_names.push_back(resolve(n));
      std::vector<std::string> fact_paths = facts;
      if (fact_paths.empty())
        for (const auto& n : topo_facts) fact_paths.push_back(resolve(n));
      std::vector<std::string> conf_paths;
      for (const auto& n : topo_configs) conf_paths.push_back(resolve(n));
      conf_paths.insert(conf_paths.end(), configs.begin(), configs.end());

      Program p;
      load_program(p, prog_names);
      ConfigH c;
      layered_config(c, p, fact_paths, conf_paths, sets);
      if (fixed_cost)
        check(cologne_config_set(c.p, "fixed_solve_cost_ms", std::to_string(*fixed_cost).c_str()), "configuration");
      Facts f;
      load_facts(f, fact_paths, generated);
      log(Info, "programs: " + joined(prog_names) + "; facts: " + std::to_string(cologne_facts_count(f.p)));
      SimH s;
      check(cologne_sim_new(p.p, sim_topology.c_str(), f.p, c.p, seed, &s.p), "building the simulation");
      check(cologne_sim_run_until(s.p, duration), "simulation");
      char* out = nullptr;
      check(cologne_sim_trace_csv(s.p, &out), "trace");
      write_output(trace_out, take(out));
      if (!metrics_out.empty()) {
        check(cologne_sim_metrics_csv(s.p, &out), "metrics");
        write_output(metrics_out, take(out));
      }
      if (!rounds_out.empty()) {
        check(cologne_sim_rounds_csv(s.p, &out), "rounds");
        write_output(rounds_out, take(out));
      }
      if (!bytes_out.empty()) {
        check(cologne_sim_bytes_csv(s.p, &out), "bytes");
        write_output(bytes_out, take(out));
      }
      if (!sim_table.empty()) {
        check(cologne_sim_table_csv(s.p, sim_node.empty() ? "0" : sim_node.c_str(), sim_table.c_str(), &out), "table");
        std::cerr << take(out);
      }
      return 0;
    }

    if (*cmd_oracle) {
      char* report = nullptr;
      check(cologne_oracle(kind.c_str(), joined(params).c_str(), &report), "oracle");
      std::cout << take(report);
      return 0;
    }

    if (*cmd_gen) {
      char *f = nullptr, *t = nullptr;
      check(cologne_generate(kind.c_str(), joined(params).c_str(), &f, &t), "gen");
      write_output(facts_out, take(f));
      std::string topo = take(t);
      if (!topo_out.empty()) {
        if (!facts_out.empty() && !topo.empty()) {
          // point the topology at the facts file, relative to the topology's directory
          namespace fs = std::filesystem;
          const fs::path base = fs::absolute(fs::path(topo_out)).parent_path();
          const std::string rel = fs::absolute(fs::path(facts_out)).lexically_relative(base).generic_string();
          const size_t eol = topo.find('\n');
          topo.insert(eol == std::string::npos ? topo.size() : eol + 1, "facts " + rel + "\n");
        }
        write_output(topo_out, topo);
      }
      return 0;
    }

    if (*cmd_bench) {
      char* summary = nullptr;
      if (which.find('=') != std::string::npos) {  // `bench quick=1` names no scenario
        params.insert(params.begin(), which);
        which = "all";
      }
      check(cologne_bench(which.c_str(), joined(params).c_str(), &summary), "bench");
      write_output(out_path, take(summary));
      return 0;
    }
  } catch (const Exit& e) {
    return e.code;
  }
  return 0;
}
