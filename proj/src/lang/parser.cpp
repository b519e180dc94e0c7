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

// Colog grammar (whitespace and `//` comments are insignificant):
//
//   program   := { goal | vardecl | rule }
//   goal      := "goal" ("minimize"|"maximize"|"satisfy") [ VAR "in" pred ] ["."]
//   vardecl   := "var" pred "forall" pred [ "in" "[" int "," int "]" ] ["."]
//   rule      := [ LABEL ] head ("<-" | "->") literal { "," literal } "."
//   head      := pred           (one argument may be AGG "<" VAR ">")
//   pred      := name "(" [ ["@"] term { "," term } ] ")"
//   literal   := pred | expr
//   expr      := sum [ cmpop sum ]
//   sum       := product { ("+"|"-") product }
//   product   := unary { ("*"|"/") unary }
//   unary     := "-" unary | primary
//   primary   := INT | STRING | VAR | CONST | "(" expr ")" | "|" expr "|"
//              | ("abs"|"max"|"min") "(" expr { "," expr } ")"
//
// Identifiers beginning with a lowercase letter, or containing `_`, are
// named constants when used as terms (e.g. `max_migrates`, `F_mindiff`).

#include <cctype>
#include <map>
#include <optional>

#include "cologne/lang.hpp"

namespace cologne {

ParseError::ParseError(std::string file, int line, int col, const std::string& msg)
    : Error(file + ":" + std::to_string(line) + ":" + std::to_string(col) + ": error: " + msg),
      diag_{std::move(file), line, col, Severity::Error, msg} {}

namespace {

enum class Tok {
  Ident, Int, Str,
  LParen, RParen, LBracket, RBracket, Comma, Dot, At, Bar,
  Plus, Minus, Star, Slash,
  Lt, Le, Gt, Ge, EqEq, Assign, Ne,
  Derive, Constrain,
  End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int64_t value = 0;
  int line = 1;
  int col = 1;
};

class Lexer {
public:
  Lexer(std::string_view src, std::string file) : src_(src), file_(std::move(file)) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t;
      t.line = line_;
      t.col = col_;
      if (pos_ >= src_.size()) {
        out.push_back(t);
        return out;
      }
      char c = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
          advance();
        t.kind = Tok::Ident;
        t.text = std::string(src_.substr(start, pos_ - start));
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        size_t start = pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
        t.kind = Tok::Int;
        t.text = std::string(src_.substr(start, pos_ - start));
        try {
          t.value = std::stoll(t.text);
        } catch (const std::exception&) {
          throw ParseError(file_, t.line, t.col, "integer literal out of range");
        }
      } else if (c == '"') {
        advance();
        std::string s;
        for (;;) {
          if (pos_ >= src_.size()) throw ParseError(file_, t.line, t.col, "unterminated string");
          char d = src_[pos_];
          advance();
          if (d == '"') break;
          if (d == '\\' && pos_ < src_.size()) {
            s += src_[pos_];
            advance();
            continue;
          }
          s += d;
        }
        t.kind = Tok::Str;
        t.text = std::move(s);
      } else {
        t.kind = punct(t);
      }
      out.push_back(std::move(t));
    }
  }

private:
  Tok punct(Token& t) {
    auto two = [&](char a, char b) {
      return pos_ + 1 < src_.size() && src_[pos_] == a && src_[pos_ + 1] == b;
    };
    auto take = [&](int n, Tok k) {
      t.text = std::string(src_.substr(pos_, n));
      for (int i = 0; i < n; ++i) advance();
      return k;
    };
    if (two('<', '-')) return take(2, Tok::Derive);
    if (two('-', '>')) return take(2, Tok::Constrain);
    if (two('<', '=')) return take(2, Tok::Le);
    if (two('>', '=')) return take(2, Tok::Ge);
    if (two('=', '=')) return take(2, Tok::EqEq);
    if (two('!', '=')) return take(2, Tok::Ne);
    switch (src_[pos_]) {
      case '(': return take(1, Tok::LParen);
      case ')': return take(1, Tok::RParen);
      case '[': return take(1, Tok::LBracket);
      case ']': return take(1, Tok::RBracket);
      case ',': return take(1, Tok::Comma);
      case '.': return take(1, Tok::Dot);
      case '@': return take(1, Tok::At);
      case '|': return take(1, Tok::Bar);
      case '+': return take(1, Tok::Plus);
      case '-': return take(1, Tok::Minus);
      case '*': return take(1, Tok::Star);
      case '/': return take(1, Tok::Slash);
      case '<': return take(1, Tok::Lt);
      case '>': return take(1, Tok::Gt);
      case '=': return take(1, Tok::Assign);
      default:
        break;
    }
    throw ParseError(file_, line_, col_, std::string("unexpected character '") + src_[pos_] + "'");
  }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  std::string_view src_;
  std::string file_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

bool is_constant_name(const std::string& s) {
  if (s.empty()) return false;
  if (std::islower(static_cast<unsigned char>(s[0]))) return true;
  return s.find('_') != std::string::npos;
}

class Parser {
public:
  Parser(std::vector<Token> toks, std::string file) : toks_(std::move(toks)), file_(std::move(file)) {}

  ast::Program program() {
    ast::Program p;
    std::map<std::string, ast::SourcePos> labels;
    while (peek().kind != Tok::End) {
      const Token& t = peek();
      if (t.kind == Tok::Ident && t.text == "goal" && peek(1).kind == Tok::Ident) {
        if (p.goal) fail(t, "multiple goal declarations");
        p.goal = goal();
      } else if (t.kind == Tok::Ident && t.text == "var" && peek(1).kind == Tok::Ident &&
                 peek(2).kind == Tok::LParen) {
        p.vars.push_back(var_decl());
      } else {
        ast::Rule r = rule();
        if (!r.label.empty()) {
          if (labels.count(r.label))
            fail_at(r.pos, "duplicate rule label '" + r.label + "'");
          labels[r.label] = r.pos;
        }
        p.rules.push_back(std::move(r));
      }
    }
    return p;
  }

private:
  const Token& peek(size_t ahead = 0) const {
    size_t i = std::min(idx_ + ahead, toks_.size() - 1);
    return toks_[i];
  }
  const Token& next() {
    const Token& t = toks_[idx_];
    if (idx_ + 1 < toks_.size()) ++idx_;
    return t;
  }
  bool accept(Tok k) {
    if (peek().kind != k) return false;
    next();
    return true;
  }
  const Token& expect(Tok k, const char* what) {
    if (peek().kind != k) fail(peek(), std::string("expected ") + what + describe(peek()));
    return next();
  }
  static std::string describe(const Token& t) {
    if (t.kind == Tok::End) return " but reached end of input";
    return " but found '" + t.text + "'";
  }
  [[noreturn]] void fail(const Token& t, const std::string& msg) const {
    throw ParseError(file_, t.line, t.col, msg);
  }
  [[noreturn]] void fail_at(const ast::SourcePos& p, const std::string& msg) const {
    throw ParseError(file_, p.line, p.col, msg);
  }
  static ast::SourcePos pos_of(const Token& t) { return {t.line, t.col}; }

  ast::GoalDecl goal() {
    ast::GoalDecl g;
    g.pos = pos_of(next());  // "goal"
    const Token& kind = expect(Tok::Ident, "goal kind");
    if (kind.text == "minimize") g.kind = ast::GoalKind::Minimize;
    else if (kind.text == "maximize") g.kind = ast::GoalKind::Maximize;
    else if (kind.text == "satisfy") g.kind = ast::GoalKind::Satisfy;
    else fail(kind, "goal kind must be minimize, maximize or satisfy");
    if (peek().kind == Tok::Ident && peek(1).kind == Tok::Ident && peek(1).text == "in") {
      g.attr = next().text;
      next();  // "in"
      g.table = predicate(false);
    } else if (g.kind != ast::GoalKind::Satisfy) {
      fail(peek(), "expected '<Attr> in <table>(...)' after goal kind");
    }
    accept(Tok::Dot);
    return g;
  }

  ast::VarDecl var_decl() {
    ast::VarDecl v;
    v.pos = pos_of(next());  // "var"
    v.var = predicate(false);
    const Token& fa = expect(Tok::Ident, "'forall'");
    if (fa.text != "forall") fail(fa, "expected 'forall'");
    v.bound = predicate(false);
    if (peek().kind == Tok::Ident && peek().text == "in" && peek(1).kind == Tok::LBracket) {
      next();
      next();
      ast::Domain d;
      d.lo = signed_int();
      expect(Tok::Comma, "','");
      d.hi = signed_int();
      expect(Tok::RBracket, "']'");
      if (d.lo > d.hi) fail(peek(), "empty domain interval");
      v.domain = d;
    }
    accept(Tok::Dot);
    return v;
  }

  int64_t signed_int() {
    bool neg = accept(Tok::Minus);
    const Token& t = expect(Tok::Int, "integer");
    return neg ? -t.value : t.value;
  }

  ast::Rule rule() {
    ast::Rule r;
    r.pos = pos_of(peek());
    if (peek().kind == Tok::Ident && peek(1).kind == Tok::Ident) r.label = next().text;
    r.head = predicate(true);
    if (accept(Tok::Derive)) r.arrow = ast::Arrow::Derive;
    else if (accept(Tok::Constrain)) r.arrow = ast::Arrow::Constrain;
    else fail(peek(), "expected '<-' or '->'" + describe(peek()));
    do {
      r.body.push_back(literal());
    } while (accept(Tok::Comma));
    expect(Tok::Dot, "'.' at end of rule");
    return r;
  }

  bool at_predicate() const {
    const Token& t = peek();
    if (t.kind != Tok::Ident || peek(1).kind != Tok::LParen) return false;
    return t.text != "abs" && t.text != "max" && t.text != "min" &&
           !std::isupper(static_cast<unsigned char>(t.text[0]));
  }

  ast::Literal literal() {
    if (at_predicate()) return predicate(false);
    return expr();
  }

  ast::Predicate predicate(bool allow_agg) {
    ast::Predicate p;
    const Token& name = expect(Tok::Ident, "predicate name");
    p.pos = pos_of(name);
    if (std::isupper(static_cast<unsigned char>(name.text[0])))
      fail(name, "predicate names must start with a lowercase letter");
    p.name = name.text;
    expect(Tok::LParen, "'('");
    if (peek().kind != Tok::RParen) {
      for (;;) {
        if (accept(Tok::At)) {
          if (!p.args.empty()) fail(peek(), "location specifier must be the first argument");
          p.located = true;
        }
        const Token& t = peek();
        if (t.kind == Tok::Ident && ast::agg_from_name(t.text) && peek(1).kind == Tok::Lt) {
          if (!allow_agg) fail(t, "aggregates are only allowed in rule heads");
          if (p.agg) fail(t, "at most one aggregate per head");
          ast::AggSpec spec;
          spec.fn = *ast::agg_from_name(t.text);
          spec.position = p.args.size();
          next();
          next();
          const Token& v = expect(Tok::Ident, "aggregated attribute");
          expect(Tok::Gt, "'>'");
          p.agg = spec;
          p.args.push_back(ast::Expr::var(v.text));
        } else {
          p.args.push_back(term());
        }
        if (!accept(Tok::Comma)) break;
      }
    }
    expect(Tok::RParen, "')'");
    return p;
  }

  ast::Expr term() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Int: next(); return ast::Expr::integer(t.value);
      case Tok::Minus:
        next();
        return ast::Expr::integer(-expect(Tok::Int, "integer").value);
      case Tok::Str: next(); return ast::Expr::str(t.text);
      case Tok::Ident: next(); return ident_expr(t.text);
      default: fail(t, "expected term" + describe(t));
    }
  }

  static ast::Expr ident_expr(const std::string& s) {
    return is_constant_name(s) ? ast::Expr::constant(s) : ast::Expr::var(s);
  }

  static std::optional<ast::Op> cmp_op(Tok k) {
    switch (k) {
      case Tok::EqEq: return ast::Op::Eq;
      case Tok::Assign: return ast::Op::Assign;
      case Tok::Ne: return ast::Op::Ne;
      case Tok::Lt: return ast::Op::Lt;
      case Tok::Le: return ast::Op::Le;
      case Tok::Gt: return ast::Op::Gt;
      case Tok::Ge: return ast::Op::Ge;
      default: return std::nullopt;
    }
  }

  ast::Expr expr() {
    ast::Expr lhs = sum();
    if (auto op = cmp_op(peek().kind)) {
      next();
      ast::Expr rhs = sum();
      return ast::Expr::binary(*op, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  ast::Expr sum() {
    ast::Expr e = product();
    for (;;) {
      if (accept(Tok::Plus)) e = ast::Expr::binary(ast::Op::Add, std::move(e), product());
      else if (accept(Tok::Minus)) e = ast::Expr::binary(ast::Op::Sub, std::move(e), product());
      else return e;
    }
  }

  ast::Expr product() {
    ast::Expr e = unary();
    for (;;) {
      if (accept(Tok::Star)) e = ast::Expr::binary(ast::Op::Mul, std::move(e), unary());
      else if (accept(Tok::Slash)) e = ast::Expr::binary(ast::Op::Div, std::move(e), unary());
      else return e;
    }
  }

  ast::Expr unary() {
    if (accept(Tok::Minus)) {
      if (peek().kind == Tok::Int) return ast::Expr::integer(-next().value);
      return ast::Expr::neg(unary());
    }
    return primary();
  }

  ast::Expr primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Int: next(); return ast::Expr::integer(t.value);
      case Tok::Str: next(); return ast::Expr::str(t.text);
      case Tok::LParen: {
        next();
        ast::Expr e = expr();
        expect(Tok::RParen, "')'");
        return e;
      }
      case Tok::Bar: {
        next();
        ast::Expr e = sum();
        expect(Tok::Bar, "closing '|'");
        return ast::Expr::abs(std::move(e));
      }
      case Tok::Ident: {
        next();
        if (peek().kind == Tok::LParen && (t.text == "abs" || t.text == "max" || t.text == "min")) {
          next();
          ast::Expr call;
          call.kind = t.text == "abs" ? ast::Expr::Kind::Abs
                      : t.text == "max" ? ast::Expr::Kind::Max
                                        : ast::Expr::Kind::Min;
          call.args.push_back(expr());
          while (accept(Tok::Comma)) call.args.push_back(expr());
          expect(Tok::RParen, "')'");
          size_t want = call.kind == ast::Expr::Kind::Abs ? 1 : 2;
          if (call.args.size() != want) fail(t, t.text + " takes " + std::to_string(want) + " argument(s)");
          return call;
        }
        if (peek().kind == Tok::LParen) fail(t, "unknown function '" + t.text + "'");
        return ident_expr(t.text);
      }
      default:
        fail(t, "expected expression" + describe(t));
    }
  }

  std::vector<Token> toks_;
  std::string file_;
  size_t idx_ = 0;
};

}  // namespace

ast::Program parse_program(std::string_view source, std::string_view filename) {
  std::string file(filename);
  Lexer lx(source, file);
  Parser ps(lx.run(), file);
  return ps.program();
}

std::string rule_label(const ast::Rule& r, size_t index) {
  return r.label.empty() ? "rule" + std::to_string(index) : r.label;
}

}  // namespace cologne
