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
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cologne/analysis.hpp"
#include "cologne/value.hpp"

namespace cologne::datalog {

using Consts = std::map<std::string, int64_t>;

enum class OpKind { Insert, Delete, Upsert };

/// A base-fact operation; Upsert replaces every fact sharing the key
/// positions of a `var` table (or of the goal table) with the new one.
struct FactOp {
  OpKind kind = OpKind::Insert;
  Tuple tuple;
  friend bool operator==(const FactOp&, const FactOp&) = default;
};

struct StoreOptions {
  std::optional<NodeId> local;   // set in distributed mode: remote heads go to the outbox
  Consts consts;
  uint64_t max_derivations = 50'000'000;
};

/// Visible-set change produced while running to fixpoint.
struct Change {
  Tuple tuple;
  int sign = 1;
};

/// Materialized tables with derivation counts, evaluated incrementally.
///
/// Regular rules keep counts of one-step derivations; a tuple is visible
/// iff its count is positive. Recursive strata touched by a deletion are
/// re-derived from scratch at quiescence so cyclic support cannot keep a
/// retracted tuple alive. SolutionUpdate rules fire once per insertion of a
/// solver-table tuple and rewrite base facts.
class Store {
public:
  explicit Store(StoreOptions opts = {});
  ~Store();
  Store(Store&&) noexcept;
  Store& operator=(Store&&) noexcept;

  /// Installs the rules of an annotated (and, for distributed runs,
  /// localized) program. Solver rules are ignored; they are grounded by the
  /// solver. Throws Error on a conflicting catalog or unsupported rule.
  void register_program(const AnnotatedProgram& a);

  void set_consts(Consts c);
  const Consts& consts() const;

  /// Queues a base-fact change; nothing is derived until run_to_fixpoint.
  void apply(const FactOp& op);
  void insert(const Tuple& t) { apply({OpKind::Insert, t}); }
  void remove(const Tuple& t) { apply({OpKind::Delete, t}); }
  void upsert(const Tuple& t) { apply({OpKind::Upsert, t}); }

  /// Drains the pending queue. Returns net visible-set changes in the order
  /// they happened (a tuple may appear more than once).
  std::vector<Change> run_to_fixpoint();

  bool pending() const;

  bool contains(const Tuple& t) const;
  /// Visible rows of `pred`, sorted.
  std::vector<Row> rows(const std::string& pred) const;
  std::vector<Tuple> all_tuples() const;  // sorted by predicate then row
  std::set<std::string> predicates() const;
  int64_t derivation_count(const Tuple& t) const;
  int64_t base_count(const Tuple& t) const;

  /// Messages addressed to other nodes (distributed mode only).
  std::vector<FactOp> take_outbox();

  /// Total derivation requests processed since construction.
  uint64_t derivations() const;

  /// Key positions used by Upsert for `pred` (all positions if unknown).
  std::vector<size_t> key_positions(const std::string& pred, size_t arity) const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Independent oracle: stratified naive bottom-up evaluation of the regular
/// rules of `a` over a set of base facts (no counting, no deltas).
std::vector<Tuple> naive_fixpoint(const AnnotatedProgram& a, const std::vector<Tuple>& base,
                                  const Consts& consts = {});

/// Facts file: one `pred(v1,...)` per line (optional `@`, optional trailing
/// `.`, `//` comments). Integers are bare, strings quoted; bare identifiers
/// are read as strings.
std::vector<Tuple> parse_facts(std::string_view text, std::string_view filename = "<facts>");
std::string format_facts(const std::vector<Tuple>& facts);

/// Sorted CSV rendering of one table (header `c0,c1,...`).
std::string table_csv(const Store& s, const std::string& pred);

}  // namespace cologne::datalog
