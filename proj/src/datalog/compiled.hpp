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

// Rule compilation shared by the incremental store: variables become slot
// indices, and each body is planned once per trigger literal.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cologne/ast.hpp"
#include "cologne/datalog.hpp"

namespace cologne::datalog::detail {

struct CExpr {
  enum class Kind { Slot, Lit, Const, Binary, Neg, Abs, Max, Min };
  Kind kind = Kind::Lit;
  int slot = -1;
  Value value;
  std::string name;  // Const
  ast::Op op = ast::Op::Add;
  std::vector<CExpr> args;
};

using Binding = std::vector<std::optional<Value>>;

Value eval(const CExpr& e, const Binding& b, const Consts& consts);
bool truthy(const Value& v);
int64_t apply_arith(ast::Op op, int64_t a, int64_t b);
bool compare(ast::Op op, const Value& a, const Value& b);

struct CPred {
  std::string name;
  std::vector<CExpr> args;
};

struct Step {
  enum class Kind { Pred, Filter, Assign };
  Kind kind = Kind::Pred;
  int index = 0;                  // predicate literal or expression index
  int slot = -1;                  // Assign target
  int source = -1;                // Assign: operand index holding the value
  std::vector<size_t> key_positions;  // Pred: positions bound before the scan
};

struct CRule {
  std::string label;
  CPred head;
  std::optional<ast::AggSpec> agg;
  std::vector<CPred> preds;       // body predicates in source order
  std::vector<CExpr> exprs;       // body expressions in source order
  int nslots = 0;
  std::vector<std::string> slot_names;
  std::vector<std::vector<Step>> trigger_plans;  // per body predicate
  std::vector<Step> full_plan;
};

/// Compiles a rule (throws Error when some expression can never be evaluated).
CRule compile_rule(const ast::Rule& r, const std::string& label);

/// Which args of `p` are bound given the currently bound slots.
bool expr_bound(const CExpr& e, const std::vector<bool>& bound);

}  // namespace cologne::datalog::detail
