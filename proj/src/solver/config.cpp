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

#include "cologne/config.hpp"

#include <sstream>

#include "cologne/value.hpp"

namespace cologne {

namespace {

std::string trim(std::string_view s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  size_t e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

int64_t to_int(const std::string& s, const std::string& where) {
  try {
    size_t used = 0;
    long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(where + ": expected an integer, got '" + s + "'");
  }
}

}  // namespace

void Config::merge(std::string_view text, std::string_view filename) {
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = std::string(filename) + ":" + std::to_string(lineno);
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(where + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key == "budget_millis") {
      budget_millis = to_int(val, where);
    } else if (key == "default_domain_lo") {
      default_domain_lo = to_int(val, where);
    } else if (key == "default_domain_hi") {
      default_domain_hi = to_int(val, where);
    } else if (key.rfind("domain.", 0) == 0) {
      DomainSpec d;
      if (val == "channels") {
        d.channels = true;
      } else {
        auto dots = val.find("..");
        if (dots == std::string::npos) throw Error(where + ": expected lo..hi or channels");
        d.lo = to_int(trim(val.substr(0, dots)), where);
        d.hi = to_int(trim(val.substr(dots + 2)), where);
        if (d.lo > d.hi) throw Error(where + ": empty domain");
      }
      domains[key.substr(7)] = d;
    } else if (key == "channels") {
      channels.clear();
      std::istringstream cs(val);
      std::string item;
      while (std::getline(cs, item, ','))
        if (!trim(item).empty()) channels.push_back(to_int(trim(item), where));
    } else if (key.rfind("const.", 0) == 0) {
      consts[key.substr(6)] = to_int(val, where);
    } else if (key == "branching") {
      if (val == "declaration") branching = Branching::Declaration;
      else if (val == "first_fail") branching = Branching::FirstFail;
      else throw Error(where + ": branching must be declaration or first_fail");
    } else if (key == "value_order") {
      if (val == "ascending") value_order = ValueOrder::Ascending;
      else if (val == "descending") value_order = ValueOrder::Descending;
      else if (val == "zero_out") value_order = ValueOrder::ZeroOut;
      else throw Error(where + ": value_order must be ascending, descending or zero_out");
    } else if (key == "negotiation_period_ms") {
      negotiation_period_ms = to_int(val, where);
    } else if (key == "fixed_solve_cost_ms") {
      fixed_solve_cost_ms = to_int(val, where);
    } else if (key == "reoptimize_period_ms") {
      reoptimize_period_ms = to_int(val, where);
    } else if (key == "max_derivations") {
      max_derivations = static_cast<uint64_t>(to_int(val, where));
    } else if (key == "bandwidth_bps") {
      bandwidth_bps = to_int(val, where);
    } else if (key == "link_latency_ms") {
      link_latency_ms = to_int(val, where);
    } else {
      throw Error(where + ": unknown configuration key '" + key + "'");
    }
  }
}

Config Config::parse(std::string_view text, std::string_view filename) {
  Config c;
  c.merge(text, filename);
  return c;
}

std::string Config::to_text() const {
  std::ostringstream os;
  os << "budget_millis=" << budget_millis << '\n';
  if (default_domain_lo) os << "default_domain_lo=" << *default_domain_lo << '\n';
  if (default_domain_hi) os << "default_domain_hi=" << *default_domain_hi << '\n';
  for (const auto& [t, d] : domains) {
    os << "domain." << t << '=';
    if (d.channels) os << "channels\n";
    else os << d.lo << ".." << d.hi << '\n';
  }
  if (!channels.empty()) {
    os << "channels=";
    for (size_t i = 0; i < channels.size(); ++i) os << (i ? "," : "") << channels[i];
    os << '\n';
  }
  for (const auto& [k, v] : consts) os << "const." << k << '=' << v << '\n';
  os << "branching=" << (branching == Branching::FirstFail ? "first_fail" : "declaration") << '\n';
  os << "value_order="
     << (value_order == ValueOrder::Ascending ? "ascending"
         : value_order == ValueOrder::Descending ? "descending" : "zero_out")
     << '\n';
  os << "negotiation_period_ms=" << negotiation_period_ms << '\n';
  if (fixed_solve_cost_ms) os << "fixed_solve_cost_ms=" << *fixed_solve_cost_ms << '\n';
  os << "reoptimize_period_ms=" << reoptimize_period_ms << '\n';
  os << "max_derivations=" << max_derivations << '\n';
  os << "bandwidth_bps=" << bandwidth_bps << '\n';
  os << "link_latency_ms=" << link_latency_ms << '\n';
  return os.str();
}

}  // namespace cologne
