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

// Random stratified Datalog programs over edge(X,Y,C) and node(X,C), with
// recursion (linear, non-linear, mutual) and aggregates over lower strata,
// plus insert/delete streams whose batches touch each fact at most once.

#pragma once

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "cologne/datalog.hpp"

namespace cologne::testing {

inline std::string random_program(std::mt19937_64& rng) {
  auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<uint64_t>(n)); };
  std::string src;
  int label = 0;
  auto rule = [&](const std::string& text) { src += "t" + std::to_string(label++) + " " + text + "\n"; };
  std::vector<std::string> binary;  // derived (X,Y) relations usable by later rules
  const int rels = 1 + pick(3);
  for (int i = 0; i < rels; ++i) {
    const std::string p = "p" + std::to_string(i);
    switch (pick(4)) {
      case 0: rule(p + "(X,Y) <- edge(X,Y,C)."); break;
      case 1: rule(p + "(X,Y) <- edge(X,Y,C), C>=" + std::to_string(pick(4)) + "."); break;
      case 2: rule(p + "(X,Y) <- edge(Y,X,C)."); break;
      default: rule(p + "(X,X) <- node(X,C).");
    }
    switch (pick(4)) {
      case 0: rule(p + "(X,Z) <- " + p + "(X,Y), edge(Y,Z,C)."); break;
      case 1: rule(p + "(X,Z) <- " + p + "(X,Y), " + p + "(Y,Z)."); break;
      case 2: {
        const std::string q = "m" + std::to_string(i);
        rule(q + "(X,Z) <- " + p + "(X,Y), edge(Y,Z,C).");
        rule(p + "(X,Y) <- " + q + "(X,Y), X!=Y.");
        break;
      }
      default: break;  // non-recursive
    }
    binary.push_back(p);
  }
  if (binary.size() > 1 || pick(2)) {
    const auto& a = binary[static_cast<size_t>(pick(static_cast<int>(binary.size())))];
    const auto& b = binary[static_cast<size_t>(pick(static_cast<int>(binary.size())))];
    rule("j0(X,Z) <- " + a + "(X,Y), " + b + "(Y,Z), X!=Z.");
    binary.push_back("j0");
  }
  static const char* aggs[] = {"COUNT", "SUM", "MIN", "MAX"};
  const int naggs = 1 + pick(3);
  for (int k = 0; k < naggs; ++k) {
    const std::string h = "a" + std::to_string(k);
    const std::string fn = aggs[pick(4)];
    switch (pick(4)) {
      case 0: rule(h + "(X," + fn + "<Y>) <- " + binary[static_cast<size_t>(pick(static_cast<int>(binary.size())))] + "(X,Y)."); break;
      case 1: rule(h + "(X," + fn + "<C>) <- edge(X,Y,C)."); break;
      case 2:
        rule(h + "(X," + fn + "<W>) <- " + binary[static_cast<size_t>(pick(static_cast<int>(binary.size())))] +
             "(X,Y), node(Y,C), W=C+1.");
        break;
      default: rule(h + "(" + fn + "<C>) <- node(X,C).");
    }
  }
  if (pick(2)) rule("s0(SUM<V>) <- a0(X,V).");
  return src;
}

/// Batches of operations; within a batch every fact occurs at most once,
/// so its operations commute. `present` receives the final base facts.
inline std::vector<std::vector<datalog::FactOp>> random_stream(std::mt19937_64& rng, int batches, int per_batch,
                                                              std::vector<std::vector<Tuple>>* snapshots) {
  std::vector<Tuple> present;
  std::vector<std::vector<datalog::FactOp>> out;
  for (int b = 0; b < batches; ++b) {
    std::vector<datalog::FactOp> ops;
    size_t old = present.size();
    for (int k = 0; k < per_batch; ++k) {
      if (old > 0 && rng() % 3 == 0) {
        size_t i = rng() % old;
        ops.push_back({datalog::OpKind::Delete, present[i]});
        present.erase(present.begin() + static_cast<long>(i));
        --old;
        continue;
      }
      Tuple t = rng() % 4 == 0 ? Tuple{"node", {int64_t(rng() % 5), int64_t(rng() % 4)}}
                               : Tuple{"edge", {int64_t(rng() % 5), int64_t(rng() % 5), int64_t(rng() % 4)}};
      if (std::find(present.begin(), present.end(), t) != present.end()) continue;
      ops.push_back({datalog::OpKind::Insert, t});
      present.push_back(t);
    }
    out.push_back(std::move(ops));
    if (snapshots) snapshots->push_back(present);
  }
  return out;
}

}  // namespace cologne::testing
