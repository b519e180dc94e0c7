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

#include "cologne/value.hpp"

#include <sstream>

namespace cologne {

int64_t Value::as_int() const {
  if (const auto* i = std::get_if<int64_t>(&v_)) return *i;
  throw Error("value '" + std::get<std::string>(v_) + "' is not an integer");
}

const std::string& Value::as_string() const {
  if (const auto* s = std::get_if<std::string>(&v_)) return *s;
  throw Error("value " + std::to_string(std::get<int64_t>(v_)) + " is not a string");
}

std::string Value::to_literal() const {
  if (is_int()) return std::to_string(as_int());
  std::string out = "\"";
  for (char c : as_string()) {
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

std::string Value::to_plain() const {
  return is_int() ? std::to_string(as_int()) : as_string();
}

size_t Value::hash() const {
  if (is_int()) return std::hash<int64_t>{}(as_int());
  return std::hash<std::string>{}(as_string()) ^ 0x9e3779b97f4a7c15ULL;
}

size_t hash_row(const Row& r) {
  size_t h = 1469598103934665603ULL;
  for (const auto& v : r) h = (h ^ v.hash()) * 1099511628211ULL;
  return h;
}

std::string Tuple::to_string() const {
  std::string out = pred + "(";
  for (size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += values[i].to_literal();
  }
  out += ')';
  return out;
}

}  // namespace cologne
