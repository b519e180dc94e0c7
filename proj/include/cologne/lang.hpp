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

#include <string>
#include <string_view>
#include <vector>

#include "cologne/ast.hpp"
#include "cologne/value.hpp"

namespace cologne {

enum class Severity { Error, Warning, Note };

struct Diagnostic {
  std::string file;
  int line = 0;
  int col = 0;
  Severity severity = Severity::Error;
  std::string message;

  /// `file:line:col: severity: message`
  std::string render() const;
};

std::string render_diagnostics(const std::vector<Diagnostic>& diags);

/// Thrown for lexical/syntax errors, duplicate rule labels and repeated
/// goal declarations.
class ParseError : public Error {
public:
  ParseError(std::string file, int line, int col, const std::string& msg);
  const Diagnostic& diagnostic() const { return diag_; }

private:
  Diagnostic diag_;
};

/// Parses Colog source. `//` comments are stripped; rule order is kept.
ast::Program parse_program(std::string_view source, std::string_view filename = "<input>");

/// Canonical pretty-print; parse_program(print_program(p)) == p.
std::string print_program(const ast::Program& p);
std::string print_rule(const ast::Rule& r);
std::string print_predicate(const ast::Predicate& p);
std::string print_expr(const ast::Expr& e);

/// Syntax-level checks: range restriction, per-predicate arity, and
/// location-specifier consistency. Empty result means the program is clean.
std::vector<Diagnostic> check_program(const ast::Program& p, std::string_view filename = "<input>");

/// The effective label of rule `index` (its own label or `rule<index>`).
std::string rule_label(const ast::Rule& r, size_t index);

}  // namespace cologne
