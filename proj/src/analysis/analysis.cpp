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
#include <functional>
#include <sstream>

#include "cologne/analysis.hpp"

namespace cologne {

const char* rule_class_name(RuleClass c) {
  switch (c) {
    case RuleClass::Regular: return "regular";
    case RuleClass::SolverDerivation: return "solverDerivation";
    case RuleClass::SolverConstraint: return "solverConstraint";
    case RuleClass::SolutionUpdate: return "solutionUpdate";
  }
  return "?";
}

bool AnnotatedProgram::is_solver_attr(const std::string& pred, size_t pos) const {
  auto it = solver_attrs.find(pred);
  return it != solver_attrs.end() && it->second.count(pos) > 0;
}

RuleClass AnnotatedProgram::class_of(size_t rule_index) const {
  auto it = rule_class.find(rule_label(program.rules.at(rule_index), rule_index));
  return it == rule_class.end() ? RuleClass::Regular : it->second;
}

namespace {

bool head_in_body(const ast::Rule& r) {
  for (const auto* p : r.body_predicates())
    if (p->name == r.head.name) return true;
  return false;
}

// Variables bound by a body predicate at a regular (non-solver) position.
std::set<std::string> regular_bound_vars(const AnnotatedProgram& a, const ast::Rule& r) {
  std::set<std::string> out;
  for (const auto* p : r.body_predicates())
    for (size_t i = 0; i < p->args.size(); ++i)
      if (p->args[i].is_var() && !a.is_solver_attr(p->name, i)) out.insert(p->args[i].name);
  return out;
}

// Solver variables of a rule body: solver predicate positions plus anything
// defined by an expression over solver variables.
std::set<std::string> solver_vars(const AnnotatedProgram& a, const ast::Rule& r) {
  std::set<std::string> sv;
  for (const auto* p : r.body_predicates())
    for (size_t i = 0; i < p->args.size(); ++i)
      if (p->args[i].is_var() && a.is_solver_attr(p->name, i)) sv.insert(p->args[i].name);
  const auto regular = regular_bound_vars(a, r);
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& lit : r.body) {
      const auto* e = std::get_if<ast::Expr>(&lit);
      if (!e) continue;
      std::vector<std::string> vs;
      e->collect_vars(vs);
      bool tainted = std::any_of(vs.begin(), vs.end(), [&](const auto& v) { return sv.count(v) > 0; });
      if (!tainted) continue;
      for (const auto& v : vs)
        if (!regular.count(v) && sv.insert(v).second) changed = true;
    }
  }
  return sv;
}

std::set<std::string> locations_of(const ast::Rule& r, bool with_head) {
  std::set<std::string> locs;
  auto add = [&](const ast::Predicate& p) {
    if (!p.located || p.args.empty()) return;
    const auto& l = p.args[0];
    locs.insert(l.is_var() ? l.name : "#" + l.name + std::to_string(l.value));
  };
  if (with_head) add(r.head);
  for (const auto* p : r.body_predicates()) add(*p);
  return locs;
}

Diagnostic diag_at(const ast::SourcePos& pos, Severity s, std::string msg) {
  return Diagnostic{"<program>", pos.line, pos.col, s, std::move(msg)};
}

}  // namespace

AnnotatedProgram infer_solver_tables(const ast::Program& p) {
  AnnotatedProgram a;
  a.program = p;
  for (const auto& v : p.vars) {
    a.var_tables.insert(v.var.name);
    for (size_t pos : v.solver_positions()) a.solver_attrs[v.var.name].insert(pos);
  }
  auto note_located = [&](const ast::Predicate& pr) {
    if (pr.located) a.located_predicates.insert(pr.name);
  };
  for (const auto& v : p.vars) {
    note_located(v.var);
    note_located(v.bound);
  }
  if (p.goal && p.goal->table) note_located(*p.goal->table);
  for (const auto& r : p.rules) {
    note_located(r.head);
    for (const auto* b : r.body_predicates()) note_located(*b);
  }

  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& r : p.rules) {
      if (r.arrow != ast::Arrow::Derive) continue;
      // update rules read the materialized solution and never create solver attributes
      if (a.var_tables.count(r.head.name) || head_in_body(r)) continue;
      const auto sv = solver_vars(a, r);
      for (size_t i = 0; i < r.head.args.size(); ++i) {
        const auto& arg = r.head.args[i];
        if (!arg.is_var() || !sv.count(arg.name)) continue;
        if (a.solver_attrs[r.head.name].insert(i).second) changed = true;
      }
    }
  }
  for (auto it = a.solver_attrs.begin(); it != a.solver_attrs.end();) {
    if (it->second.empty()) {
      it = a.solver_attrs.erase(it);
    } else {
      a.solver_tables.insert(it->first);
      ++it;
    }
  }
  return a;
}

AnnotatedProgram classify_rules(AnnotatedProgram a) {
  a.rule_class.clear();
  a.distributed_rules.clear();
  a.diagnostics.clear();
  const auto& rules = a.program.rules;
  for (size_t i = 0; i < rules.size(); ++i) {
    const auto& r = rules[i];
    const std::string label = rule_label(r, i);
    bool body_solver = false;
    for (const auto* b : r.body_predicates()) body_solver |= a.solver_tables.count(b->name) > 0;
    bool head_solver = a.solver_tables.count(r.head.name) > 0;
    if (locations_of(r, true).size() > 1) a.distributed_rules.insert(label);

    RuleClass cls = RuleClass::Regular;
    if (r.arrow == ast::Arrow::Constrain) {
      cls = RuleClass::SolverConstraint;
      if (!body_solver && !head_solver)
        a.diagnostics.push_back(diag_at(r.pos, Severity::Error,
                                        "constraint rule '" + label + "' involves no solver table"));
    } else if (body_solver && (a.var_tables.count(r.head.name) || head_in_body(r))) {
      cls = RuleClass::SolutionUpdate;
    } else if (body_solver || head_solver) {
      cls = RuleClass::SolverDerivation;
    }
    if (cls == RuleClass::Regular && a.var_tables.count(r.head.name))
      a.diagnostics.push_back(diag_at(
          r.pos, Severity::Error,
          "rule '" + label + "' derives var table '" + r.head.name + "' without reading any solver table"));
    a.rule_class[label] = cls;
  }
  return a;
}

AnnotatedProgram annotate(const ast::Program& p) { return classify_rules(infer_solver_tables(p)); }

std::vector<Diagnostic> check_safety(const AnnotatedProgram& a) {
  std::vector<Diagnostic> out;
  const auto& rules = a.program.rules;
  for (size_t i = 0; i < rules.size(); ++i) {
    const auto& r = rules[i];
    const RuleClass cls = a.class_of(i);
    if (cls != RuleClass::SolverDerivation && cls != RuleClass::SolverConstraint) continue;
    const std::string label = rule_label(r, i);
    // variable -> (#predicate occurrences, any at a solver position)
    std::map<std::string, std::pair<int, bool>> occ;
    for (const auto* p : r.body_predicates()) {
      std::set<std::string> seen_here;
      for (size_t k = 0; k < p->args.size(); ++k) {
        if (!p->args[k].is_var()) continue;
        auto& o = occ[p->args[k].name];
        if (seen_here.insert(p->args[k].name).second) ++o.first;
        o.second |= a.is_solver_attr(p->name, k);
      }
    }
    for (const auto& [v, o] : occ)
      if (o.first >= 2 && o.second)
        out.push_back(diag_at(r.pos, Severity::Error,
                              "join on solver attribute " + v + " in rule '" + label + "'"));
  }

  if (a.program.goal && a.program.goal->table) {
    const auto& t = *a.program.goal->table;
    bool solver = false;
    for (size_t k = 0; k < t.args.size(); ++k)
      if (t.args[k].is_var() && t.args[k].name == a.program.goal->attr)
        solver |= a.is_solver_attr(t.name, k);
    if (!solver)
      out.push_back(diag_at(a.program.goal->pos, Severity::Error,
                            "goal not solver-dependent: " + a.program.goal->attr + " in " + t.name +
                                " is not a solver attribute"));
  }

  // recursion through solver derivations cannot be grounded
  std::map<std::string, std::set<std::string>> deps;
  for (size_t i = 0; i < rules.size(); ++i) {
    if (a.class_of(i) != RuleClass::SolverDerivation) continue;
    for (const auto* b : rules[i].body_predicates())
      if (a.solver_tables.count(b->name) && !a.var_tables.count(b->name))
        deps[rules[i].head.name].insert(b->name);
  }
  std::map<std::string, int> state;
  std::function<bool(const std::string&)> cyclic = [&](const std::string& n) {
    int& s = state[n];
    if (s == 1) return true;
    if (s == 2) return false;
    s = 1;
    for (const auto& d : deps[n])
      if (cyclic(d)) return true;
    s = 2;
    return false;
  };
  for (const auto& [head, _] : deps)
    if (cyclic(head)) {
      out.push_back(Diagnostic{"<program>", 0, 0, Severity::Error,
                               "recursive solver derivation through '" + head + "'"});
      break;
    }
  return out;
}

LocalizedProgram localize_program(const AnnotatedProgram& a, const std::string& link_table) {
  LocalizedProgram lp;
  const auto& rules = a.program.rules;
  for (size_t i = 0; i < rules.size(); ++i) {
    const auto& r = rules[i];
    const std::string label = rule_label(r, i);
    // a constraint head is an antecedent, so its location takes part in the join
    const auto body_locs = locations_of(r, r.arrow == ast::Arrow::Constrain);
    const std::string home = r.head.location_var();
    if (body_locs.size() <= 1 || home.empty() || !body_locs.count(home)) {
      if (body_locs.size() > 1)
        lp.diagnostics.push_back(diag_at(r.pos, Severity::Error,
                                         "rule '" + label + "' spans several body locations but its head "
                                         "location is not one of them"));
      lp.rules.push_back(r);
      continue;
    }

    std::vector<std::string> remotes;
    for (const auto* p : r.body_predicates()) {
      const std::string l = p->location_var();
      if (!l.empty() && l != home && std::find(remotes.begin(), remotes.end(), l) == remotes.end())
        remotes.push_back(l);
    }

    ast::Rule residual = r;
    residual.body.clear();
    std::map<std::string, ast::Predicate> tmp_literal;  // remote loc -> literal placed in residual
    std::vector<ast::Rule> shipped;
    for (size_t ri = 0; ri < remotes.size(); ++ri) {
      const std::string& loc = remotes[ri];
      const std::string name = label + "_tmp" + (ri ? std::to_string(ri + 1) : "");
      ast::Rule tmp;
      tmp.label = name;
      tmp.pos = r.pos;
      tmp.arrow = ast::Arrow::Derive;
      std::vector<std::string> vars;
      for (const auto* p : r.body_predicates()) {
        if (p->location_var() != loc) continue;
        if (a.solver_tables.count(p->name) && !a.var_tables.count(p->name))
          lp.diagnostics.push_back(diag_at(r.pos, Severity::Error,
                                           "rule '" + label + "': remote fragment at @" + loc +
                                               " references solver table '" + p->name + "'"));
        tmp.body.push_back(*p);
        for (const auto& arg : p->args) arg.collect_vars(vars);
      }
      if (std::find(vars.begin(), vars.end(), home) == vars.end()) {
        ast::Predicate link;
        link.name = link_table;
        link.located = true;
        link.pos = r.pos;
        link.args = {ast::Expr::var(loc), ast::Expr::var(home)};
        tmp.body.insert(tmp.body.begin(), link);
        vars.insert(vars.begin(), {loc, home});
        lp.diagnostics.push_back(diag_at(r.pos, Severity::Note,
                                         "rule '" + label + "': remote fragment at @" + loc +
                                             " joined with " + link_table + "(@" + loc + "," + home + ")"));
      }
      tmp.head.name = name;
      tmp.head.located = true;
      tmp.head.pos = r.pos;
      tmp.head.args.push_back(ast::Expr::var(home));
      for (const auto& v : vars)
        if (v != home) tmp.head.args.push_back(ast::Expr::var(v));
      tmp_literal[loc] = tmp.head;
      lp.generated_tmp_tables.insert(name);
      lp.tmp_origin[name] = label;
      shipped.push_back(std::move(tmp));
    }

    std::set<std::string> placed;
    for (const auto& lit : r.body) {
      if (const auto* p = std::get_if<ast::Predicate>(&lit)) {
        const std::string l = p->location_var();
        if (!l.empty() && l != home) {
          if (placed.insert(l).second) residual.body.push_back(tmp_literal[l]);
          continue;
        }
      }
      residual.body.push_back(lit);
    }
    for (auto& t : shipped) lp.rules.push_back(std::move(t));
    lp.rules.push_back(std::move(residual));
  }
  return lp;
}

AnnotatedProgram annotate_localized(const AnnotatedProgram& a, const LocalizedProgram& lp) {
  AnnotatedProgram out = a;
  out.program.rules = lp.rules;
  out.rule_class.clear();
  out.distributed_rules.clear();
  for (size_t i = 0; i < lp.rules.size(); ++i) {
    const auto& r = lp.rules[i];
    const std::string label = rule_label(r, i);
    if (lp.generated_tmp_tables.count(r.head.name)) {
      out.rule_class[label] = RuleClass::Regular;
      out.located_predicates.insert(r.head.name);
      out.distributed_rules.insert(label);
      continue;
    }
    out.rule_class[label] = a.rule_class.count(label) ? a.rule_class.at(label) : RuleClass::Regular;
    if (locations_of(r, true).size() > 1) out.distributed_rules.insert(label);
  }
  return out;
}

std::string explain(const AnnotatedProgram& a) {
  std::ostringstream os;
  os << "# predicate\tattr\tsolver\n";
  std::map<std::string, size_t> arity;
  auto note = [&](const ast::Predicate& p) { arity[p.name] = p.arity(); };
  if (a.program.goal && a.program.goal->table) note(*a.program.goal->table);
  for (const auto& v : a.program.vars) {
    note(v.var);
    note(v.bound);
  }
  for (const auto& r : a.program.rules) {
    note(r.head);
    for (const auto* b : r.body_predicates()) note(*b);
  }
  for (const auto& [name, n] : arity)
    for (size_t k = 0; k < n; ++k)
      os << name << '\t' << k << '\t' << (a.is_solver_attr(name, k) ? "yes" : "no") << '\n';
  os << "# rule\tclass\tdistributed\n";
  for (size_t i = 0; i < a.program.rules.size(); ++i) {
    const std::string label = rule_label(a.program.rules[i], i);
    os << label << '\t' << rule_class_name(a.class_of(i)) << '\t'
       << (a.distributed_rules.count(label) ? "yes" : "no") << '\n';
  }
  return os.str();
}

}  // namespace cologne
