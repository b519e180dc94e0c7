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

#include "cologne/analysis.hpp"
#include "cologne/config.hpp"
#include "cologne/datalog.hpp"
#include "cologne/solver.hpp"

namespace cologne::solver {

/// A tuple attribute during grounding: either a plain value or a linear
/// expression over model variables.
struct SymValue {
  bool symbolic = false;
  Value value;
  LinExpr expr;

  static SymValue plain(Value v) { return {false, std::move(v), {}}; }
  static SymValue of(LinExpr e);  // collapses constant expressions
  friend bool operator==(const SymValue&, const SymValue&) = default;
  friend auto operator<=>(const SymValue& a, const SymValue& b) {
    if (auto c = a.symbolic <=> b.symbolic; c != 0) return c;
    if (a.symbolic) return a.expr <=> b.expr;
    return a.value <=> b.value;
  }
};

using SymRow = std::vector<SymValue>;

struct Grounding {
  Model model;
  std::map<std::string, std::vector<SymRow>> tables;  // every solver table, in derivation order
  std::set<std::string> var_tables;
  std::string goal_table;
  std::map<int, int64_t> stdev_of;  // scaled-variance var -> member count
};

/// Instantiates the solver rules of `a` over the visible tuples of `s`.
/// Variables come only from the `forall` tables; materialized rows of var
/// tables are ignored.
Grounding ground_model(const AnnotatedProgram& a, const datalog::Store& s, const Config& cfg);

/// Solved rows of a solver table (STDEV results reported as the rounded
/// population standard deviation, like the Datalog aggregate).
std::vector<Tuple> solved_rows(const Grounding& g, const std::string& pred, const std::vector<int64_t>& values);

/// Upserts of every var-table tuple and goal-table tuple for the solution.
std::vector<datalog::FactOp> materialize(const Grounding& g, const std::vector<int64_t>& values);

/// Population standard deviation from Σ (N·m_i − S)² and N.
double stdev_from_scaled(int64_t scaled, int64_t n);

}  // namespace cologne::solver
