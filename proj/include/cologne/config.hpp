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
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cologne {

/// Domain rule for one `var` table: an interval, or the channel universe.
struct DomainSpec {
  int64_t lo = 0;
  int64_t hi = 0;
  bool channels = false;
};

enum class Branching { Declaration, FirstFail };
enum class ValueOrder { Ascending, Descending, ZeroOut };

/// Runtime configuration read from `key=value` files (`#` comments).
///
///   budget_millis=10000          solver wall-clock budget, 0 = unlimited
///   default_domain_lo=0          fallback domain for undeclared var tables
///   default_domain_hi=1
///   domain.assign=0..1           per-table domain (`=channels` for the universe)
///   channels=1,2,3               channel universe (UNIQUE, channel domains)
///   const.F_mindiff=1            named constant
///   branching=declaration|first_fail
///   value_order=ascending|descending|zero_out
///   negotiation_period_ms=5000   link negotiation timer (simulated time)
///   fixed_solve_cost_ms=5        simulated solve cost; unset = measured time
///   reoptimize_period_ms=0       re-run the local COP periodically, 0 = never
///   max_derivations=50000000     Datalog non-termination guard
///   bandwidth_bps=0              serialization delay per link, 0 = off
///   link_latency_ms=1            default link latency
struct Config {
  int64_t budget_millis = 0;
  std::optional<int64_t> default_domain_lo;
  std::optional<int64_t> default_domain_hi;
  std::map<std::string, DomainSpec> domains;
  std::vector<int64_t> channels;
  std::map<std::string, int64_t> consts;
  Branching branching = Branching::Declaration;
  ValueOrder value_order = ValueOrder::Ascending;
  int64_t negotiation_period_ms = 5000;
  std::optional<int64_t> fixed_solve_cost_ms;
  int64_t reoptimize_period_ms = 0;
  uint64_t max_derivations = 50'000'000;
  int64_t bandwidth_bps = 0;
  int64_t link_latency_ms = 1;

  /// Applies `key=value` lines on top of the current values. Throws Error
  /// with the offending line on unknown keys or malformed values.
  void merge(std::string_view text, std::string_view filename = "<config>");
  static Config parse(std::string_view text, std::string_view filename = "<config>");
  std::string to_text() const;
};

}  // namespace cologne
