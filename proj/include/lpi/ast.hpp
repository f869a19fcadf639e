#pragma once

#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "lpi/rational.hpp"

namespace lpi {

// Source-level AST for the mini language. Nodes are immutable and shared;
// every statement records its source line.

struct ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  enum class Kind { Const, Var, Mul, Add, Sub, Neg, Nondet };
  Kind kind;
  BigInt value;      // Const; Mul coefficient
  std::string name;  // Var; Mul variable
  Expr lhs, rhs;     // Add/Sub; Neg uses lhs

  explicit ExprNode(Kind k) : kind(k) {}
};

inline Expr e_const(BigInt v) {
  auto n = std::make_shared<ExprNode>(ExprNode::Kind::Const);
  n->value = std::move(v);
  return n;
}
inline Expr e_var(std::string name) {
  auto n = std::make_shared<ExprNode>(ExprNode::Kind::Var);
  n->name = std::move(name);
  return n;
}
inline Expr e_mul(BigInt coeff, std::string name) {
  auto n = std::make_shared<ExprNode>(ExprNode::Kind::Mul);
  n->value = std::move(coeff);
  n->name = std::move(name);
  return n;
}
inline Expr e_binary(ExprNode::Kind k, Expr l, Expr r) {
  auto n = std::make_shared<ExprNode>(k);
  n->lhs = std::move(l);
  n->rhs = std::move(r);
  return n;
}
inline Expr e_neg(Expr sub) {
  auto n = std::make_shared<ExprNode>(ExprNode::Kind::Neg);
  n->lhs = std::move(sub);
  return n;
}
inline Expr e_nondet() {
  auto n = std::make_shared<ExprNode>(ExprNode::Kind::Nondet);
  return n;
}

inline bool expr_equal(const Expr& a, const Expr& b) {
  if (a == b) return true;
  if (!a || !b || a->kind != b->kind) return false;
  switch (a->kind) {
    case ExprNode::Kind::Const: return a->value == b->value;
    case ExprNode::Kind::Var: return a->name == b->name;
    case ExprNode::Kind::Mul: return a->value == b->value && a->name == b->name;
    case ExprNode::Kind::Add:
    case ExprNode::Kind::Sub:
      return expr_equal(a->lhs, b->lhs) && expr_equal(a->rhs, b->rhs);
    case ExprNode::Kind::Neg: return expr_equal(a->lhs, b->lhs);
    case ExprNode::Kind::Nondet: return true;
  }
  return false;
}

inline bool expr_has_nondet(const Expr& e) {
  if (!e) return false;
  if (e->kind == ExprNode::Kind::Nondet) return true;
  return expr_has_nondet(e->lhs) || expr_has_nondet(e->rhs);
}

inline std::string expr_str(const Expr& e) {
  switch (e->kind) {
    case ExprNode::Kind::Const: return e->value.str();
    case ExprNode::Kind::Var: return e->name;
    case ExprNode::Kind::Mul: return e->value.str() + " * " + e->name;
    case ExprNode::Kind::Add: return expr_str(e->lhs) + " + " + expr_str(e->rhs);
    case ExprNode::Kind::Sub: return expr_str(e->lhs) + " - " + expr_str(e->rhs);
    case ExprNode::Kind::Neg: return "-" + expr_str(e->lhs);
    case ExprNode::Kind::Nondet: return "nondet()";
  }
  return "?";
}

enum class CmpOp { Lt, Le, Gt, Ge, Eq, Ne };

inline std::string cmp_str(CmpOp op) {
  switch (op) {
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
    case CmpOp::Eq: return "==";
    case CmpOp::Ne: return "!=";
  }
  return "?";
}

struct CondNode;
using Cond = std::shared_ptr<const CondNode>;

struct CondNode {
  enum class Kind { Cmp, Not, And, Or, Rand };  // Rand: bare nondet()/unknown()
  Kind kind;
  CmpOp op = CmpOp::Lt;  // Cmp
  Expr lhs, rhs;         // Cmp
  Cond a, b;             // Not uses a; And/Or use both

  explicit CondNode(Kind k) : kind(k) {}
};

inline Cond c_cmp(CmpOp op, Expr l, Expr r) {
  auto n = std::make_shared<CondNode>(CondNode::Kind::Cmp);
  n->op = op;
  n->lhs = std::move(l);
  n->rhs = std::move(r);
  return n;
}
inline Cond c_not(Cond c) {
  auto n = std::make_shared<CondNode>(CondNode::Kind::Not);
  n->a = std::move(c);
  return n;
}
inline Cond c_bin(CondNode::Kind k, Cond a, Cond b) {
  auto n = std::make_shared<CondNode>(k);
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}
inline Cond c_rand() { return std::make_shared<CondNode>(CondNode::Kind::Rand); }

inline bool cond_equal(const Cond& a, const Cond& b) {
  if (a == b) return true;
  if (!a || !b || a->kind != b->kind) return false;
  switch (a->kind) {
    case CondNode::Kind::Cmp:
      return a->op == b->op && expr_equal(a->lhs, b->lhs) && expr_equal(a->rhs, b->rhs);
    case CondNode::Kind::Not: return cond_equal(a->a, b->a);
    case CondNode::Kind::And:
    case CondNode::Kind::Or: return cond_equal(a->a, b->a) && cond_equal(a->b, b->b);
    case CondNode::Kind::Rand: return true;
  }
  return false;
}

inline std::string cond_str(const Cond& c) {
  switch (c->kind) {
    case CondNode::Kind::Cmp:
      return expr_str(c->lhs) + " " + cmp_str(c->op) + " " + expr_str(c->rhs);
    case CondNode::Kind::Not: return "!(" + cond_str(c->a) + ")";
    case CondNode::Kind::And: return "(" + cond_str(c->a) + ") && (" + cond_str(c->b) + ")";
    case CondNode::Kind::Or: return "(" + cond_str(c->a) + ") || (" + cond_str(c->b) + ")";
    case CondNode::Kind::Rand: return "nondet()";
  }
  return "?";
}

struct StmtNode;
using Stmt = std::shared_ptr<const StmtNode>;

struct StmtNode {
  enum class Kind { Assign, If, While, Assert, Assume, Block };
  Kind kind;
  int line = 0;
  std::string var;               // Assign
  Expr expr;                     // Assign
  Cond cond;                     // If/While/Assert/Assume
  std::vector<Stmt> body;        // If then / While / Block
  std::vector<Stmt> orelse;      // If else
  int assert_id = -1;            // Assert, in source order

  explicit StmtNode(Kind k) : kind(k) {}
};

struct Decl {
  std::string name;
  Expr init;  // may be null
  int line = 0;
};

struct Program {
  std::vector<Decl> decls;
  std::vector<Stmt> stmts;
};

inline bool stmt_equal(const Stmt& a, const Stmt& b);

inline bool stmts_equal(const std::vector<Stmt>& a, const std::vector<Stmt>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (!stmt_equal(a[i], b[i])) return false;
  return true;
}

// Structural equality ignoring source lines; round-trip tests rely on it.
inline bool stmt_equal(const Stmt& a, const Stmt& b) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case StmtNode::Kind::Assign: return a->var == b->var && expr_equal(a->expr, b->expr);
    case StmtNode::Kind::If:
      return cond_equal(a->cond, b->cond) && stmts_equal(a->body, b->body) &&
             stmts_equal(a->orelse, b->orelse);
    case StmtNode::Kind::While:
      return cond_equal(a->cond, b->cond) && stmts_equal(a->body, b->body);
    case StmtNode::Kind::Assert:
    case StmtNode::Kind::Assume: return cond_equal(a->cond, b->cond);
    case StmtNode::Kind::Block: return stmts_equal(a->body, b->body);
  }
  return false;
}

inline bool program_equal(const Program& a, const Program& b) {
  if (a.decls.size() != b.decls.size()) return false;
  for (size_t i = 0; i < a.decls.size(); ++i) {
    if (a.decls[i].name != b.decls[i].name) return false;
    bool ha = a.decls[i].init != nullptr, hb = b.decls[i].init != nullptr;
    if (ha != hb) return false;
    if (ha && !expr_equal(a.decls[i].init, b.decls[i].init)) return false;
  }
  return stmts_equal(a.stmts, b.stmts);
}

namespace detail {
inline void print_stmt(std::ostream& os, const Stmt& s, int indent) {
  std::string pad(static_cast<size_t>(indent) * 2, ' ');
  auto block = [&](const std::vector<Stmt>& body) {
    os << "{\n";
    for (const auto& c : body) print_stmt(os, c, indent + 1);
    os << pad << "}";
  };
  os << pad;
  switch (s->kind) {
    case StmtNode::Kind::Assign: os << s->var << " = " << expr_str(s->expr) << ";"; break;
    case StmtNode::Kind::If:
      os << "if (" << cond_str(s->cond) << ") ";
      block(s->body);
      if (!s->orelse.empty()) {
        os << " else ";
        block(s->orelse);
      }
      break;
    case StmtNode::Kind::While:
      os << "while (" << cond_str(s->cond) << ") ";
      block(s->body);
      break;
    case StmtNode::Kind::Assert: os << "assert(" << cond_str(s->cond) << ");"; break;
    case StmtNode::Kind::Assume: os << "assume(" << cond_str(s->cond) << ");"; break;
    case StmtNode::Kind::Block: block(s->body); break;
  }
  os << "\n";
}
}  // namespace detail

// Canonical form: parses back to a program_equal AST.
inline std::string pretty_print(const Program& p) {
  std::ostringstream os;
  for (const auto& d : p.decls) {
    os << "int " << d.name;
    if (d.init) os << " = " << expr_str(d.init);
    os << ";\n";
  }
  for (const auto& s : p.stmts) detail::print_stmt(os, s, 0);
  return os.str();
}

}  // namespace lpi
