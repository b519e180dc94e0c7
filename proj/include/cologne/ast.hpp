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
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace cologne::ast {

/// Position in the source text. Never participates in AST equality.
struct SourcePos {
  int line = 0;
  int col = 0;
  friend bool operator==(const SourcePos&, const SourcePos&) { return true; }
};

enum class Op {
  Add, Sub, Mul, Div,
  Assign,  // `=`
  Eq,      // `==`
  Ne, Lt, Le, Gt, Ge,
};

bool is_comparison(Op op);
const char* op_text(Op op);

/// Expression tree. Variables start with an uppercase letter; named
/// constants (configuration thresholds) start lowercase or contain `_`.
struct Expr {
  enum class Kind { Var, Int, Str, Const, Binary, Neg, Abs, Max, Min };

  Kind kind = Kind::Int;
  std::string name;         // Var / Const / Str payload
  int64_t value = 0;        // Int payload
  Op op = Op::Add;          // Binary operator
  std::vector<Expr> args;   // operands

  static Expr var(std::string n);
  static Expr integer(int64_t v);
  static Expr str(std::string s);
  static Expr constant(std::string n);
  static Expr binary(Op op, Expr l, Expr r);
  static Expr neg(Expr e);
  static Expr abs(Expr e);

  bool is_var() const { return kind == Kind::Var; }
  bool is_comparison() const { return kind == Kind::Binary && ast::is_comparison(op); }

  /// Variables referenced anywhere in the tree, in first-occurrence order.
  void collect_vars(std::vector<std::string>& out) const;

  friend bool operator==(const Expr&, const Expr&) = default;
};

enum class AggFn { Sum, Min, Max, Count, Stdev, SumAbs, Unique };

const char* agg_name(AggFn fn);
std::optional<AggFn> agg_from_name(const std::string& s);

struct AggSpec {
  AggFn fn = AggFn::Sum;
  size_t position = 0;  // index into Predicate::args of the aggregated attribute
  friend bool operator==(const AggSpec&, const AggSpec&) = default;
};

struct Predicate {
  std::string name;
  bool located = false;     // first argument carries `@`
  std::vector<Expr> args;
  std::optional<AggSpec> agg;
  SourcePos pos;

  size_t arity() const { return args.size(); }
  /// Name of the location variable, or empty when not located or constant.
  std::string location_var() const;

  friend bool operator==(const Predicate&, const Predicate&) = default;
};

using Literal = std::variant<Predicate, Expr>;

enum class Arrow { Derive, Constrain };

struct Rule {
  std::string label;
  Predicate head;
  std::vector<Literal> body;
  Arrow arrow = Arrow::Derive;
  SourcePos pos;

  std::vector<const Predicate*> body_predicates() const;

  friend bool operator==(const Rule&, const Rule&) = default;
};

enum class GoalKind { Minimize, Maximize, Satisfy };

struct GoalDecl {
  GoalKind kind = GoalKind::Satisfy;
  std::string attr;              // empty for a bare `goal satisfy`
  std::optional<Predicate> table;
  SourcePos pos;

  friend bool operator==(const GoalDecl&, const GoalDecl&) = default;
};

struct Domain {
  int64_t lo = 0;
  int64_t hi = 0;
  friend bool operator==(const Domain&, const Domain&) = default;
};

struct VarDecl {
  Predicate var;       // e.g. assign(Vid,Hid,V)
  Predicate bound;     // e.g. toAssign(Vid,Hid)
  std::optional<Domain> domain;
  SourcePos pos;

  /// Positions of `var` whose variable does not occur in `bound`.
  std::vector<size_t> solver_positions() const;

  friend bool operator==(const VarDecl&, const VarDecl&) = default;
};

struct Program {
  std::optional<GoalDecl> goal;
  std::vector<VarDecl> vars;
  std::vector<Rule> rules;

  const Rule* find_rule(const std::string& label) const;
  const VarDecl* find_var_decl(const std::string& table) const;
  std::set<std::string> predicate_names() const;

  friend bool operator==(const Program&, const Program&) = default;
};

}  // namespace cologne::ast
