#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lpi/ast.hpp"
#include "lpi/cfa.hpp"

namespace lpi {

// Expression over input variables; nullopt when nondet() appears anywhere.
inline std::optional<LinearExpr> to_linear(const Expr& e) {
  switch (e->kind) {
    case ExprNode::Kind::Const: {
      LinearExpr le;
      le.add_constant(Rational(e->value));
      return le;
    }
    case ExprNode::Kind::Var: {
      LinearExpr le;
      le.add_term(in_var(e->name), Rational(1));
      return le;
    }
    case ExprNode::Kind::Mul: {
      LinearExpr le;
      le.add_term(in_var(e->name), Rational(e->value));
      return le;
    }
    case ExprNode::Kind::Add:
    case ExprNode::Kind::Sub: {
      auto l = to_linear(e->lhs), r = to_linear(e->rhs);
      if (!l || !r) return std::nullopt;
      if (e->kind == ExprNode::Kind::Add) return *l + *r;
      return *l - *r;
    }
    case ExprNode::Kind::Neg: {
      auto s = to_linear(e->lhs);
      if (!s) return std::nullopt;
      LinearExpr le = *s;
      le *= Rational(-1);
      return le;
    }
    case ExprNode::Kind::Nondet: return std::nullopt;
  }
  return std::nullopt;
}

// Condition in negation normal form over input variables, with strict and
// disequality atoms rewritten for integer semantics: a < b becomes
// a - b + 1 <= 0 and a != b becomes (a < b) || (a > b). Comparisons against
// nondet() constrain nothing either way.
inline Formula cond_formula(const Cond& c, bool positive) {
  switch (c->kind) {
    case CondNode::Kind::Rand: return f_true();
    case CondNode::Kind::Not: return cond_formula(c->a, !positive);
    case CondNode::Kind::And: {
      Formula l = cond_formula(c->a, positive), r = cond_formula(c->b, positive);
      return positive ? f_and({l, r}) : f_or(l, r);
    }
    case CondNode::Kind::Or: {
      Formula l = cond_formula(c->a, positive), r = cond_formula(c->b, positive);
      return positive ? f_or(l, r) : f_and({l, r});
    }
    case CondNode::Kind::Cmp: {
      auto l = to_linear(c->lhs), r = to_linear(c->rhs);
      if (!l || !r) return f_true();
      LinearExpr d = *l - *r;
      CmpOp op = c->op;
      if (!positive) {
        switch (op) {
          case CmpOp::Lt: op = CmpOp::Ge; break;
          case CmpOp::Le: op = CmpOp::Gt; break;
          case CmpOp::Gt: op = CmpOp::Le; break;
          case CmpOp::Ge: op = CmpOp::Lt; break;
          case CmpOp::Eq: op = CmpOp::Ne; break;
          case CmpOp::Ne: op = CmpOp::Eq; break;
        }
      }
      auto leq0 = [](LinearExpr le) { return f_atom(atom_leq0(std::move(le))); };
      switch (op) {
        case CmpOp::Lt: return leq0(d + Rational(1));
        case CmpOp::Le: return leq0(d);
        case CmpOp::Gt: return leq0(-d + Rational(1));
        case CmpOp::Ge: return leq0(-d);
        case CmpOp::Eq: return f_atom(atom_eq0(d));
        case CmpOp::Ne: return f_or(leq0(d + Rational(1)), leq0(-d + Rational(1)));
      }
      return f_true();
    }
  }
  return f_true();
}

namespace detail {

class Lowering {
 public:
  explicit Lowering(const Program& p) : prog_(p) {
    for (const auto& d : p.decls) cfa_.vars.insert(d.name);
  }

  Cfa run() {
    int cur = cfa_.add_node("entry");
    cfa_.entry = cur;
    for (const auto& d : prog_.decls) {
      if (d.init) {
        cur = emit_assign(cur, d.name, d.init, d.line);
      } else {
        cur = emit_havoc(cur, d.name, d.line);
      }
    }
    cur = lower_stmts(prog_.stmts, cur);
    cfa_.node_desc[static_cast<size_t>(cur)] = "exit";
    return std::move(cfa_);
  }

 private:
  const Program& prog_;
  Cfa cfa_;

  Edge& push_edge(int from, int to, EdgeKind kind) {
    Edge e;
    e.from = from;
    e.to = to;
    e.kind = kind;
    e.guard = f_true();
    e.order = static_cast<int>(cfa_.edges.size());
    cfa_.edges.push_back(std::move(e));
    return cfa_.edges.back();
  }

  void finish(Edge& e) {
    e.formula = edge_semantics(e.kind, e.target, e.rhs, e.guard, cfa_.vars);
  }

  int emit_assign(int from, const std::string& var, const Expr& value, int line) {
    int to = cfa_.add_node("line " + std::to_string(line));
    auto lin = to_linear(value);
    if (!lin) return finish_havoc(from, to, var);
    Edge& e = push_edge(from, to, EdgeKind::Assign);
    e.target = var;
    e.rhs = *lin;
    finish(e);
    return to;
  }

  int emit_havoc(int from, const std::string& var, int line) {
    int to = cfa_.add_node("line " + std::to_string(line));
    return finish_havoc(from, to, var);
  }

  int finish_havoc(int from, int to, const std::string& var) {
    Edge& e = push_edge(from, to, EdgeKind::Havoc);
    e.target = var;
    finish(e);
    return to;
  }

  int emit_assume(int from, Formula guard, const std::string& desc,
                  std::optional<AssertInfo> info = std::nullopt) {
    int to = info && cfa_.error ? *cfa_.error : cfa_.add_node(desc);
    Edge& e = push_edge(from, to, EdgeKind::Assume);
    e.guard = std::move(guard);
    e.assertion = std::move(info);
    finish(e);
    return to;
  }

  void emit_assume_to(int from, int to, Formula guard) {
    Edge& e = push_edge(from, to, EdgeKind::Assume);
    e.guard = std::move(guard);
    finish(e);
  }

  int lower_stmts(const std::vector<Stmt>& stmts, int cur) {
    for (const auto& s : stmts) cur = lower_stmt(s, cur);
    return cur;
  }

  int lower_stmt(const Stmt& s, int cur) {
    std::string at = "line " + std::to_string(s->line);
    switch (s->kind) {
      case StmtNode::Kind::Assign: return emit_assign(cur, s->var, s->expr, s->line);
      case StmtNode::Kind::Block: return lower_stmts(s->body, cur);
      case StmtNode::Kind::Assume: return emit_assume(cur, cond_formula(s->cond, true), at);
      case StmtNode::Kind::Assert: {
        if (!cfa_.error) cfa_.error = cfa_.add_node("error");
        AssertInfo info;
        info.id = s->assert_id;
        info.line = s->line;
        info.text = cond_str(s->cond);
        emit_assume(cur, cond_formula(s->cond, false), "error", info);
        return emit_assume(cur, cond_formula(s->cond, true), at);
      }
      case StmtNode::Kind::If: {
        int then_entry = cfa_.add_node(at + " then");
        emit_assume_to(cur, then_entry, cond_formula(s->cond, true));
        int then_end = lower_stmts(s->body, then_entry);
        int after = cfa_.add_node(at + " endif");
        if (s->orelse.empty()) {
          emit_assume_to(cur, after, cond_formula(s->cond, false));
        } else {
          int else_entry = cfa_.add_node(at + " else");
          emit_assume_to(cur, else_entry, cond_formula(s->cond, false));
          int else_end = lower_stmts(s->orelse, else_entry);
          emit_assume_to(else_end, after, f_true());
        }
        emit_assume_to(then_end, after, f_true());
        return after;
      }
      case StmtNode::Kind::While: {
        int head = cfa_.add_node(at + " while");
        emit_assume_to(cur, head, f_true());
        cfa_.loop_heads.insert(head);
        int body_entry = cfa_.add_node(at + " body");
        emit_assume_to(head, body_entry, cond_formula(s->cond, true));
        int body_end = lower_stmts(s->body, body_entry);
        emit_assume_to(body_end, head, f_true());
        int after = cfa_.add_node(at + " endwhile");
        emit_assume_to(head, after, cond_formula(s->cond, false));
        return after;
      }
    }
    return cur;
  }
};

}  // namespace detail

inline Cfa lower(const Program& p) { return detail::Lowering(p).run(); }

}  // namespace lpi
