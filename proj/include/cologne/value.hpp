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
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace cologne {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Scalar stored in a tuple. Integers order before strings; node ids are
/// ordinary scalars (the location attribute value).
class Value {
public:
  Value() : v_(int64_t{0}) {}
  Value(int64_t i) : v_(i) {}             // NOLINT(google-explicit-constructor)
  Value(int i) : v_(int64_t{i}) {}        // NOLINT(google-explicit-constructor)
  Value(std::string s) : v_(std::move(s)) {}  // NOLINT(google-explicit-constructor)
  Value(const char* s) : v_(std::string(s)) {}  // NOLINT(google-explicit-constructor)

  bool is_int() const { return std::holds_alternative<int64_t>(v_); }
  bool is_string() const { return std::holds_alternative<std::string>(v_); }
  int64_t as_int() const;
  const std::string& as_string() const;

  /// Facts-file rendering: integers bare, strings double-quoted.
  std::string to_literal() const;
  /// CSV / human rendering: strings unquoted.
  std::string to_plain() const;

  friend bool operator==(const Value&, const Value&) = default;
  friend auto operator<=>(const Value& a, const Value& b) { return a.v_ <=> b.v_; }

  size_t hash() const;

private:
  std::variant<int64_t, std::string> v_;
};

using NodeId = Value;
using Row = std::vector<Value>;

/// A ground fact: predicate name plus ordered values.
struct Tuple {
  std::string pred;
  Row values;

  friend bool operator==(const Tuple&, const Tuple&) = default;
  friend auto operator<=>(const Tuple&, const Tuple&) = default;

  /// `pred(v1,v2,...)` in facts-file syntax.
  std::string to_string() const;
};

size_t hash_row(const Row& r);

struct RowHash {
  size_t operator()(const Row& r) const { return hash_row(r); }
};

struct TupleHash {
  size_t operator()(const Tuple& t) const {
    return std::hash<std::string>{}(t.pred) * 31 + hash_row(t.values);
  }
};

}  // namespace cologne
