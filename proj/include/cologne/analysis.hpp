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

#include <map>
#include <set>
#include <string>
#include <vector>

#include "cologne/ast.hpp"
#include "cologne/lang.hpp"

namespace cologne {

/// How a rule is executed.
///
/// SolutionUpdate rules read solver tables but run on the materialized
/// solution in the Datalog engine: rules whose head is a `var` table
/// (symmetry propagation) or whose head predicate also occurs in their own
/// body (state updates such as `curVm <- curVm, migVm`). They fire on
/// inserted tuples and replace base facts instead of adding derivations.
enum class RuleClass { Regular, SolverDerivation, SolverConstraint, SolutionUpdate };

const char* rule_class_name(RuleClass c);

struct AnnotatedProgram {
  ast::Program program;
  std::map<std::string, std::set<size_t>> solver_attrs;  // predicate -> solver positions
  std::set<std::string> solver_tables;
  std::set<std::string> var_tables;
  std::map<std::string, RuleClass> rule_class;  // effective label -> class
  std::set<std::string> distributed_rules;      // rules mentioning >1 location
  std::set<std::string> located_predicates;
  std::vector<Diagnostic> diagnostics;          // produced by classify_rules

  bool is_solver_attr(const std::string& pred, size_t pos) const;
  RuleClass class_of(size_t rule_index) const;
};

struct LocalizedProgram {
  std::vector<ast::Rule> rules;
  std::set<std::string> generated_tmp_tables;
  std::map<std::string, std::string> tmp_origin;  // tmp table -> original rule label
  std::vector<Diagnostic> diagnostics;
};

/// Least-fixpoint solver-attribute tagging seeded by the `var` declarations.
AnnotatedProgram infer_solver_tables(const ast::Program& p);

/// Fills rule_class / distributed_rules; reports constraint rules without
/// solver tables and `var` tables filled by plain Datalog rules.
AnnotatedProgram classify_rules(AnnotatedProgram a);

/// Convenience: infer + classify.
AnnotatedProgram annotate(const ast::Program& p);

/// Solver-specific safety: no joins on solver attributes, goal depends on
/// solver attributes, no recursion through solver derivations.
std::vector<Diagnostic> check_safety(const AnnotatedProgram& a);

/// Splits every rule whose body spans several locations into a shipping
/// rule `<label>_tmp(@Home,...) <- <remote literals>` and a local residual.
LocalizedProgram localize_program(const AnnotatedProgram& a, const std::string& link_table = "link");

/// Annotation of the localized rule set (tmp tables and rules are regular).
AnnotatedProgram annotate_localized(const AnnotatedProgram& a, const LocalizedProgram& lp);

/// Tab-separated annotation dump used by `colognectl check --explain`.
std::string explain(const AnnotatedProgram& a);

}  // namespace cologne
