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
#include <optional>
#include <string>
#include <vector>

#include "cologne/config.hpp"

namespace cologne::solver {

struct LinTerm {
  int var = 0;
  int64_t coef = 0;
  friend bool operator==(const LinTerm&, const LinTerm&) = default;
  friend auto operator<=>(const LinTerm&, const LinTerm&) = default;
};

/// Σ coef·var + constant, kept sorted by variable with no zero coefficients.
struct LinExpr {
  std::vector<LinTerm> terms;
  int64_t constant = 0;

  static LinExpr of(int64_t c);
  static LinExpr var(int v, int64_t coef = 1);
  bool is_constant() const { return terms.empty(); }
  LinExpr& add(const LinExpr& o, int64_t scale = 1);
  LinExpr scaled(int64_t k) const;
  LinExpr operator+(const LinExpr& o) const { return LinExpr(*this).add(o); }
  LinExpr operator-(const LinExpr& o) const { return LinExpr(*this).add(o, -1); }
  int64_t eval(const std::vector<int64_t>& values) const;

  friend bool operator==(const LinExpr&, const LinExpr&) = default;
  friend auto operator<=>(const LinExpr&, const LinExpr&) = default;
};

struct FDVar {
  int64_t lo = 0;
  int64_t hi = 0;
  std::vector<int64_t> excluded;  // values removed inside [lo,hi]
  std::string name;
  bool decision = false;          // declared by `var`; branched on first
};

enum class ConKind {
  LinearEq,         // lin == 0
  LinearLe,         // lin <= 0
  LinearNe,         // lin != 0
  Reified,          // result <-> (lin rel 0), result in {0,1}
  ReifiedEquiv,     // result <-> (a == b) over 0/1 indicators a, b
  AbsValue,         // result == |x|
  CountDistinct,    // result == |{ vars[i] }|, values drawn from universe
  ScaledVariance,   // result == Σ (N·m_i − S)², S = Σ m_i, N = |members|
};

enum class Rel { Le, Eq, Ne };

const char* con_kind_name(ConKind k);

struct Constraint {
  ConKind kind = ConKind::LinearEq;
  LinExpr lin;
  Rel rel = Rel::Le;
  int result = -1;
  int a = -1;                     // AbsValue: x; ReifiedEquiv: first indicator
  int b = -1;                     // ReifiedEquiv: second indicator
  std::vector<int> vars;          // CountDistinct operands
  std::vector<int64_t> universe;  // CountDistinct candidate values
  std::vector<LinExpr> members;   // ScaledVariance operands
  std::string origin;             // rule label that produced it
};

enum class Sense { Minimize, Maximize };

struct Objective {
  Sense sense = Sense::Minimize;
  LinExpr expr;
};

struct Model {
  std::vector<FDVar> vars;
  std::vector<Constraint> constraints;
  std::optional<Objective> objective;
  bool trivially_unsat = false;   // a ground constraint evaluated to false
  std::string unsat_reason;

  int add_var(int64_t lo, int64_t hi, std::string name, bool decision = false);
  void post(Constraint c) { constraints.push_back(std::move(c)); }

  /// Textual dump: one `var`/`con`/`objective` line each (see README).
  std::string dump() const;
};

enum class Status { Optimal, FeasibleTimeout, Unsat, Unknown };
const char* status_name(Status s);

struct SolveOptions {
  int64_t budget_millis = 0;  // 0 = unlimited
  Branching branching = Branching::Declaration;
  ValueOrder value_order = ValueOrder::Ascending;
  uint64_t max_nodes = 0;     // 0 = unlimited (deterministic cut-off for tests)

  static SolveOptions from(const Config& c);
};

struct Solution {
  Status status = Status::Unknown;
  std::vector<int64_t> values;             // one per model var (empty if none found)
  std::optional<int64_t> objective;
  double solve_millis = 0;
  uint64_t nodes = 0;
  uint64_t failures = 0;
  std::vector<int64_t> incumbents;         // objective of each improving solution

  bool has_assignment() const { return status == Status::Optimal || status == Status::FeasibleTimeout; }
};

/// Depth-first branch and bound with bounds-consistent propagation.
Solution solve(const Model& m, const SolveOptions& opts = {});

/// Independent re-evaluation of every constraint on a full assignment.
/// Returns one human-readable line per violation.
std::vector<std::string> check_assignment(const Model& m, const std::vector<int64_t>& values);

/// Completes values for the decision variables by deriving every auxiliary
/// one. Empty when some auxiliary is not determined or a constraint fails.
std::optional<std::vector<int64_t>> complete_assignment(const Model& m,
                                                        const std::vector<std::optional<int64_t>>& decisions);

/// Exhaustive enumeration over the decision variables (auxiliaries are
/// derived by propagation). For tests only: throws if the space is larger
/// than `limit` assignments.
Solution brute_force(const Model& m, uint64_t limit = 10'000'000);

}  // namespace cologne::solver
