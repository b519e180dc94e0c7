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

#include <cctype>
#include <sstream>

#include "cologne/datalog.hpp"
#include "cologne/lang.hpp"

namespace cologne::datalog {

namespace {

class FactReader {
public:
  FactReader(std::string_view text, std::string file) : s_(text), file_(std::move(file)) {}

  std::vector<Tuple> run() {
    std::vector<Tuple> out;
    for (;;) {
      skip();
      if (i_ >= s_.size()) return out;
      out.push_back(fact());
    }
  }

private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(file_, line_, col(), msg); }
  int col() const { return static_cast<int>(i_ - line_start_) + 1; }

  void skip() {
    while (i_ < s_.size()) {
      char c = s_[i_];
      if (c == '\n') {
        ++i_;
        ++line_;
        line_start_ = i_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++i_;
      } else if (c == '/' && i_ + 1 < s_.size() && s_[i_ + 1] == '/') {
        while (i_ < s_.size() && s_[i_] != '\n') ++i_;
      } else if (c == '#') {
        while (i_ < s_.size() && s_[i_] != '\n') ++i_;
      } else {
        return;
      }
    }
  }

  static bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

  std::string ident() {
    size_t b = i_;
    while (i_ < s_.size() && ident_char(s_[i_])) ++i_;
    if (b == i_) fail("expected an identifier");
    return std::string(s_.substr(b, i_ - b));
  }

  void expect(char c) {
    skip();
    if (i_ >= s_.size() || s_[i_] != c) fail(std::string("expected '") + c + "'");
    ++i_;
  }

  Value value() {
    skip();
    if (i_ < s_.size() && s_[i_] == '@') ++i_;
    if (i_ >= s_.size()) fail("unexpected end of input");
    char c = s_[i_];
    if (c == '"') {
      ++i_;
      std::string out;
      while (i_ < s_.size() && s_[i_] != '"') {
        if (s_[i_] == '\\' && i_ + 1 < s_.size()) {
          ++i_;
          char e = s_[i_];
          out.push_back(e == 'n' ? '\n' : e == 't' ? '\t' : e);
        } else {
          if (s_[i_] == '\n') fail("unterminated string");
          out.push_back(s_[i_]);
        }
        ++i_;
      }
      if (i_ >= s_.size()) fail("unterminated string");
      ++i_;
      return out;
    }
    if (c == '-' || std::isdigit(static_cast<unsigned char>(c))) {
      size_t b = i_;
      if (c == '-') ++i_;
      while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
      std::string num(s_.substr(b, i_ - b));
      if (num == "-") fail("expected a number");
      try {
        return static_cast<int64_t>(std::stoll(num));
      } catch (const std::exception&) {
        fail("integer out of range: " + num);
      }
    }
    if (ident_char(c)) return ident();
    fail(std::string("unexpected character '") + c + "'");
  }

  Tuple fact() {
    Tuple t;
    if (s_[i_] == '@') ++i_;
    t.pred = ident();
    expect('(');
    skip();
    if (i_ < s_.size() && s_[i_] == ')') {
      ++i_;
    } else {
      for (;;) {
        t.values.push_back(value());
        skip();
        if (i_ < s_.size() && s_[i_] == ',') {
          ++i_;
          continue;
        }
        expect(')');
        break;
      }
    }
    skip();
    if (i_ < s_.size() && s_[i_] == '.') ++i_;
    return t;
  }

  std::string_view s_;
  std::string file_;
  size_t i_ = 0;
  int line_ = 1;
  size_t line_start_ = 0;
};

std::string csv_field(const Value& v) {
  std::string s = v.to_plain();
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

}  // namespace

std::vector<Tuple> parse_facts(std::string_view text, std::string_view filename) {
  return FactReader(text, std::string(filename)).run();
}

std::string format_facts(const std::vector<Tuple>& facts) {
  std::ostringstream os;
  for (const auto& t : facts) os << t.to_string() << ".\n";
  return os.str();
}

std::string table_csv(const Store& s, const std::string& pred) {
  std::ostringstream os;
  auto rows = s.rows(pred);
  size_t arity = rows.empty() ? 0 : rows.front().size();
  for (size_t i = 0; i < arity; ++i) os << (i ? "," : "") << 'c' << i;
  if (arity) os << '\n';
  for (const auto& r : rows) {
    for (size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << csv_field(r[i]);
    os << '\n';
  }
  return os.str();
}

}  // namespace cologne::datalog
