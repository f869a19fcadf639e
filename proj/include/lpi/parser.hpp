#pragma once

#include <cctype>
#include <set>
#include <string>
#include <vector>

#include "lpi/ast.hpp"

namespace lpi {

struct ParseError : std::runtime_error {
  int line, col;
  ParseError(const std::string& msg, int line_, int col_)
      : std::runtime_error("line " + std::to_string(line_) + ":" + std::to_string(col_) + ": " +
                           msg),
        line(line_),
        col(col_) {}
};

namespace detail {

struct Token {
  enum class Kind { Int, Ident, Punct, End };
  Kind kind;
  std::string text;
  BigInt value;
  int line = 1, col = 1;
};

inline std::vector<Token> tokenize(const std::string& src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n; ++k) {
      if (src[i + k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    i += n;
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      t.kind = Token::Kind::Int;
      t.text = src.substr(i, j - i);
      t.value = BigInt(t.text);
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
        ++j;
      t.kind = Token::Kind::Ident;
      t.text = src.substr(i, j - i);
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }
    static const char* two[] = {"==", "!=", "<=", ">=", "&&", "||"};
    bool matched = false;
    for (const char* p : two) {
      if (src.compare(i, 2, p) == 0) {
        t.kind = Token::Kind::Punct;
        t.text = p;
        advance(2);
        out.push_back(std::move(t));
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (std::string("=<>!+-*(){};").find(c) != std::string::npos) {
      t.kind = Token::Kind::Punct;
      t.text = std::string(1, c);
      advance(1);
      out.push_back(std::move(t));
      continue;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", line, col);
  }
  Token end;
  end.kind = Token::Kind::End;
  end.line = line;
  end.col = col;
  out.push_back(end);
  return out;
}

class Parser {
 public:
  explicit Parser(std::string src) : toks_(tokenize(src)) {}

  Program parse() {
    Program p;
    while (at_ident("int")) p.decls.push_back(parse_decl());
    for (const auto& d : p.decls) {
      if (!declared_.insert(d.name).second)
        throw ParseError("duplicate declaration of '" + d.name + "'", d.line, 1);
    }
    while (!at_end()) p.stmts.push_back(parse_stmt());
    return p;
  }

 private:
  std::vector<Token> toks_;
  size_t pos_ = 0;
  std::set<std::string> declared_;
  std::set<std::string> decl_seen_;  // for initializer scoping

  const Token& cur() const { return toks_[pos_]; }
  bool at_end() const { return cur().kind == Token::Kind::End; }
  bool at_punct(const std::string& p) const {
    return cur().kind == Token::Kind::Punct && cur().text == p;
  }
  bool at_ident(const std::string& s) const {
    return cur().kind == Token::Kind::Ident && cur().text == s;
  }
  Token take() { return toks_[pos_++]; }
  void expect_punct(const std::string& p) {
    if (!at_punct(p)) throw ParseError("expected '" + p + "'", cur().line, cur().col);
    ++pos_;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, cur().line, cur().col);
  }

  static bool is_keyword(const std::string& s) {
    return s == "int" || s == "if" || s == "else" || s == "while" || s == "assert" ||
           s == "assume" || s == "nondet" || s == "unknown";
  }

  void check_declared(const std::string& name, const Token& t, bool in_decl) {
    const auto& scope = in_decl ? decl_seen_ : declared_;
    if (!scope.count(name))
      throw ParseError("undeclared variable '" + name + "'", t.line, t.col);
  }

  Decl parse_decl() {
    Token kw = take();  // int
    if (cur().kind != Token::Kind::Ident || is_keyword(cur().text))
      fail("expected variable name");
    Decl d;
    d.line = kw.line;
    d.name = take().text;
    if (at_punct("=")) {
      ++pos_;
      d.init = parse_expr(/*in_decl=*/true);
    }
    expect_punct(";");
    decl_seen_.insert(d.name);
    return d;
  }

  Stmt parse_stmt() {
    const Token& t = cur();
    if (t.kind == Token::Kind::Punct && t.text == "{") {
      auto s = std::make_shared<StmtNode>(StmtNode::Kind::Block);
      s->line = t.line;
      s->body = parse_block();
      return s;
    }
    if (t.kind != Token::Kind::Ident) fail("expected statement");
    if (t.text == "int") fail("declarations must precede statements");
    if (t.text == "if") return parse_if();
    if (t.text == "while") return parse_while();
    if (t.text == "assert" || t.text == "assume") return parse_assert_like(t.text);
    if (is_keyword(t.text)) fail("unexpected keyword '" + t.text + "'");
    // assignment
    Token name = take();
    check_declared(name.text, name, false);
    auto s = std::make_shared<StmtNode>(StmtNode::Kind::Assign);
    s->line = name.line;
    s->var = name.text;
    expect_punct("=");
    s->expr = parse_expr(false);
    expect_punct(";");
    return s;
  }

  std::vector<Stmt> parse_block() {
    expect_punct("{");
    std::vector<Stmt> body;
    while (!at_punct("}")) {
      if (at_end()) fail("unterminated block");
      body.push_back(parse_stmt());
    }
    ++pos_;
    return body;
  }

  Stmt parse_if() {
    Token kw = take();
    auto s = std::make_shared<StmtNode>(StmtNode::Kind::If);
    s->line = kw.line;
    expect_punct("(");
    s->cond = parse_cond(false);
    expect_punct(")");
    s->body = parse_block();
    if (at_ident("else")) {
      ++pos_;
      s->orelse = parse_block();
    }
    return s;
  }

  Stmt parse_while() {
    Token kw = take();
    auto s = std::make_shared<StmtNode>(StmtNode::Kind::While);
    s->line = kw.line;
    expect_punct("(");
    s->cond = parse_cond(false);
    expect_punct(")");
    s->body = parse_block();
    return s;
  }

  Stmt parse_assert_like(const std::string& kw) {
    Token t = take();
    auto s = std::make_shared<StmtNode>(kw == "assert" ? StmtNode::Kind::Assert
                                                       : StmtNode::Kind::Assume);
    s->line = t.line;
    expect_punct("(");
    s->cond = parse_cond(false);
    expect_punct(")");
    expect_punct(";");
    if (s->kind == StmtNode::Kind::Assert) s->assert_id = next_assert_id_++;
    return s;
  }

  int next_assert_id_ = 0;

  Expr parse_expr(bool in_decl) {
    Expr e = parse_term(in_decl);
    while (at_punct("+") || at_punct("-")) {
      bool add = take().text == "+";
      Expr r = parse_term(in_decl);
      e = e_binary(add ? ExprNode::Kind::Add : ExprNode::Kind::Sub, std::move(e), std::move(r));
    }
    return e;
  }

  Expr parse_term(bool in_decl) {
    const Token t = cur();
    if (t.kind == Token::Kind::Punct && t.text == "-") {
      ++pos_;
      return e_neg(parse_term(in_decl));
    }
    if (t.kind == Token::Kind::Int) {
      ++pos_;
      if (at_punct("*")) {
        ++pos_;
        if (at_ident("nondet") || at_ident("unknown"))
          fail("nonlinear expression: cannot scale nondet()");
        if (cur().kind != Token::Kind::Ident || is_keyword(cur().text))
          fail("expected variable after '*'");
        Token name = take();
        check_declared(name.text, name, in_decl);
        return e_mul(t.value, name.text);
      }
      return e_const(t.value);
    }
    if (t.kind == Token::Kind::Ident && (t.text == "nondet" || t.text == "unknown")) {
      ++pos_;
      expect_punct("(");
      expect_punct(")");
      if (at_punct("*")) fail("nonlinear expression: cannot scale nondet()");
      return e_nondet();
    }
    if (t.kind == Token::Kind::Ident && !is_keyword(t.text)) {
      ++pos_;
      if (at_punct("*"))
        throw ParseError("nonlinear expression: variable times non-constant", t.line, t.col);
      check_declared(t.text, t, in_decl);
      return e_var(t.text);
    }
    fail("expected expression");
  }

  Cond parse_cond(bool in_decl) {
    Cond c = parse_conj(in_decl);
    while (at_punct("||")) {
      ++pos_;
      c = c_bin(CondNode::Kind::Or, std::move(c), parse_conj(in_decl));
    }
    return c;
  }

  Cond parse_conj(bool in_decl) {
    Cond c = parse_cond_atom(in_decl);
    while (at_punct("&&")) {
      ++pos_;
      c = c_bin(CondNode::Kind::And, std::move(c), parse_cond_atom(in_decl));
    }
    return c;
  }

  Cond parse_cond_atom(bool in_decl) {
    if (at_punct("!")) {
      ++pos_;
      return c_not(parse_cond_atom(in_decl));
    }
    if (at_punct("(")) {
      // Could be a parenthesized condition; expressions have no parentheses,
      // so '(' always opens a condition here.
      ++pos_;
      Cond c = parse_cond(in_decl);
      expect_punct(")");
      return c;
    }
    Expr l = parse_expr(in_decl);
    if (!at_punct("<") && !at_punct("<=") && !at_punct(">") && !at_punct(">=") &&
        !at_punct("==") && !at_punct("!=")) {
      // Bare nondet()/unknown() acts as a coin flip, as in while(unknown()).
      if (l->kind == ExprNode::Kind::Nondet) return c_rand();
      fail("expected comparison operator");
    }
    std::string op = take().text;
    Expr r = parse_expr(in_decl);
    CmpOp o = op == "<"    ? CmpOp::Lt
              : op == "<=" ? CmpOp::Le
              : op == ">"  ? CmpOp::Gt
              : op == ">=" ? CmpOp::Ge
              : op == "==" ? CmpOp::Eq
                           : CmpOp::Ne;
    return c_cmp(o, std::move(l), std::move(r));
  }
};

}  // namespace detail

inline Program parse_program(const std::string& source) {
  detail::Parser p(source);
  return p.parse();
}

}  // namespace lpi
