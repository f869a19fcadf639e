#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lpi/linear_expr.hpp"

namespace lpi {

// Atoms are normalized to expr <= 0 or expr = 0. Strict comparisons are
// rewritten against integer semantics before an Atom is built.
enum class Rel { Leq, Eq };

struct Atom {
  LinearExpr expr;
  Rel rel = Rel::Leq;

  friend bool operator==(const Atom& a, const Atom& b) {
    return a.rel == b.rel && a.expr == b.expr;
  }
  friend bool operator!=(const Atom& a, const Atom& b) { return !(a == b); }
  friend bool operator<(const Atom& a, const Atom& b) {
    if (a.rel != b.rel) return a.rel < b.rel;
    return a.expr < b.expr;
  }

  std::string str() const {
    // Present as "linear-part REL -constant" for readability.
    LinearExpr lhs = expr;
    Rational c = lhs.constant();
    lhs.add_constant(-c);
    return lhs.str() + (rel == Rel::Leq ? " <= " : " = ") + Rational(-c).str();
  }
};

inline Atom atom_leq0(LinearExpr e) { return {std::move(e), Rel::Leq}; }
inline Atom atom_eq0(LinearExpr e) { return {std::move(e), Rel::Eq}; }

struct Model {
  std::map<VarId, Rational> numeric;
  std::map<VarId, bool> booleans;

  Rational value_of(const VarId& v) const {
    auto it = numeric.find(v);
    if (it == numeric.end()) throw std::out_of_range("model: unassigned variable " + v.str());
    return it->second;
  }
};

class FormulaNode;
using Formula = std::shared_ptr<const FormulaNode>;

// Immutable formula tree. Or nodes are binary and carry an optional marker;
// And nodes are n-ary. Sharing subtrees is how path formulas stay compact.
class FormulaNode {
 public:
  enum class Kind { True, False, Leaf, And, Or };

  Kind kind;
  Atom atom;                        // Leaf
  std::vector<Formula> children;    // And
  Formula left, right;              // Or
  std::optional<VarId> marker;      // Or, once annotated

  explicit FormulaNode(Kind k) : kind(k) {}
};

inline Formula f_true() {
  static const Formula t = std::make_shared<FormulaNode>(FormulaNode::Kind::True);
  return t;
}
inline Formula f_false() {
  static const Formula f = std::make_shared<FormulaNode>(FormulaNode::Kind::False);
  return f;
}
inline Formula f_atom(Atom a) {
  auto n = std::make_shared<FormulaNode>(FormulaNode::Kind::Leaf);
  n->atom = std::move(a);
  return n;
}

// Conjunction with light constant folding; deterministic child order.
inline Formula f_and(std::vector<Formula> parts) {
  std::vector<Formula> kept;
  for (auto& p : parts) {
    if (p->kind == FormulaNode::Kind::False) return f_false();
    if (p->kind == FormulaNode::Kind::True) continue;
    kept.push_back(std::move(p));
  }
  if (kept.empty()) return f_true();
  if (kept.size() == 1) return kept[0];
  auto n = std::make_shared<FormulaNode>(FormulaNode::Kind::And);
  n->children = std::move(kept);
  return n;
}

// Disjunction with constant folding, used when building guards.
inline Formula f_or(Formula l, Formula r) {
  if (l->kind == FormulaNode::Kind::True || r->kind == FormulaNode::Kind::True) return f_true();
  if (l->kind == FormulaNode::Kind::False) return r;
  if (r->kind == FormulaNode::Kind::False) return l;
  auto n = std::make_shared<FormulaNode>(FormulaNode::Kind::Or);
  n->left = std::move(l);
  n->right = std::move(r);
  return n;
}

// Structural disjunction that never folds; merge relies on keeping both
// disjuncts addressable.
inline Formula f_or_raw(Formula l, Formula r) {
  auto n = std::make_shared<FormulaNode>(FormulaNode::Kind::Or);
  n->left = std::move(l);
  n->right = std::move(r);
  return n;
}

inline bool formula_equal(const Formula& a, const Formula& b);

inline bool atom_vec_equal(const std::vector<Formula>& a, const std::vector<Formula>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (!formula_equal(a[i], b[i])) return false;
  return true;
}

// Structural equality; pointer-equal subtrees short-circuit.
inline bool formula_equal(const Formula& a, const Formula& b) {
  if (a == b) return true;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case FormulaNode::Kind::True:
    case FormulaNode::Kind::False: return true;
    case FormulaNode::Kind::Leaf: return a->atom == b->atom;
    case FormulaNode::Kind::And: return atom_vec_equal(a->children, b->children);
    case FormulaNode::Kind::Or:
      return a->marker == b->marker && formula_equal(a->left, b->left) &&
             formula_equal(a->right, b->right);
  }
  return false;
}

inline bool evaluate_atom(const Atom& a, const Model& m) {
  Rational v = a.expr.evaluate([&](const VarId& id) { return m.value_of(id); });
  return a.rel == Rel::Leq ? v <= 0 : v == 0;
}

// Standard semantics; markers on Or nodes are ignored.
inline bool evaluate(const Formula& f, const Model& m) {
  switch (f->kind) {
    case FormulaNode::Kind::True: return true;
    case FormulaNode::Kind::False: return false;
    case FormulaNode::Kind::Leaf: return evaluate_atom(f->atom, m);
    case FormulaNode::Kind::And:
      for (const auto& c : f->children)
        if (!evaluate(c, m)) return false;
      return true;
    case FormulaNode::Kind::Or: return evaluate(f->left, m) || evaluate(f->right, m);
  }
  return false;
}

namespace detail {
inline Formula annotate_rec(const Formula& f, int& counter, std::vector<VarId>& markers) {
  switch (f->kind) {
    case FormulaNode::Kind::True:
    case FormulaNode::Kind::False:
    case FormulaNode::Kind::Leaf: return f;
    case FormulaNode::Kind::And: {
      auto n = std::make_shared<FormulaNode>(FormulaNode::Kind::And);
      n->children.reserve(f->children.size());
      for (const auto& c : f->children) n->children.push_back(annotate_rec(c, counter, markers));
      return n;
    }
    case FormulaNode::Kind::Or: {
      if (f->marker) throw EngineBug("annotate_markers: formula already annotated");
      auto n = std::make_shared<FormulaNode>(FormulaNode::Kind::Or);
      VarId m = marker_var("m" + std::to_string(++counter));
      n->marker = m;
      markers.push_back(m);
      n->left = annotate_rec(f->left, counter, markers);
      n->right = annotate_rec(f->right, counter, markers);
      return n;
    }
  }
  return f;
}
}  // namespace detail

struct Annotated {
  Formula formula;
  std::vector<VarId> markers;  // in syntactic (pre-order) order
};

// Attach one fresh marker per Or node, numbered in pre-order so the search
// order in the optimizer is reproducible.
inline Annotated annotate_markers(const Formula& f) {
  Annotated out;
  int counter = 0;
  out.formula = detail::annotate_rec(f, counter, out.markers);
  return out;
}

// Collapse every marked Or to its chosen disjunct. The assignment must cover
// all markers; the result of a fully annotated formula is policy form.
inline Formula substitute_markers(const Formula& f, const std::map<VarId, bool>& vals) {
  switch (f->kind) {
    case FormulaNode::Kind::True:
    case FormulaNode::Kind::False:
    case FormulaNode::Kind::Leaf: return f;
    case FormulaNode::Kind::And: {
      std::vector<Formula> parts;
      parts.reserve(f->children.size());
      for (const auto& c : f->children) parts.push_back(substitute_markers(c, vals));
      return f_and(std::move(parts));
    }
    case FormulaNode::Kind::Or: {
      if (!f->marker) {
        return f_or_raw(substitute_markers(f->left, vals), substitute_markers(f->right, vals));
      }
      auto it = vals.find(*f->marker);
      if (it == vals.end())
        throw EngineBug("substitute_markers: unassigned marker " + f->marker->str());
      return substitute_markers(it->second ? f->left : f->right, vals);
    }
  }
  return f;
}

enum class RoleMask : unsigned {
  None = 0,
  Inputs = 1,
  Outputs = 2,
  Auxiliaries = 4,
  AllNumeric = 7,
};
inline bool mask_has(RoleMask m, VarRole r) {
  unsigned bit = r == VarRole::Input ? 1u : r == VarRole::Output ? 2u : r == VarRole::Auxiliary ? 4u : 0u;
  return (static_cast<unsigned>(m) & bit) != 0;
}

template <class Fn>
inline Formula map_formula_vars(const Formula& f, const Fn& rename) {
  switch (f->kind) {
    case FormulaNode::Kind::True:
    case FormulaNode::Kind::False: return f;
    case FormulaNode::Kind::Leaf: {
      Atom a = f->atom;
      a.expr = a.expr.map_vars(rename);
      return f_atom(std::move(a));
    }
    case FormulaNode::Kind::And: {
      auto n = std::make_shared<FormulaNode>(FormulaNode::Kind::And);
      n->children.reserve(f->children.size());
      for (const auto& c : f->children) n->children.push_back(map_formula_vars(c, rename));
      return n;
    }
    case FormulaNode::Kind::Or: {
      auto n = std::make_shared<FormulaNode>(FormulaNode::Kind::Or);
      n->marker = f->marker;
      n->left = map_formula_vars(f->left, rename);
      n->right = map_formula_vars(f->right, rename);
      return n;
    }
  }
  return f;
}

inline VarId with_namespace(const VarId& v, const std::string& prefix) {
  VarId out = v;
  out.ns = v.ns.empty() ? prefix : prefix + "." + v.ns;
  return out;
}

// Prefix the namespaces of all variables whose role is selected. Two copies
// made with distinct fresh prefixes are variable-disjoint.
inline Formula with_namespace(const Formula& f, const std::string& prefix,
                              RoleMask which = RoleMask::AllNumeric) {
  auto rename = [&](const VarId& v) {
    return mask_has(which, v.role) ? with_namespace(v, prefix) : v;
  };
  switch (f->kind) {
    case FormulaNode::Kind::True:
    case FormulaNode::Kind::False: return f;
    case FormulaNode::Kind::Leaf: {
      Atom a = f->atom;
      a.expr = a.expr.map_vars(rename);
      return f_atom(std::move(a));
    }
    case FormulaNode::Kind::And: {
      auto n = std::make_shared<FormulaNode>(FormulaNode::Kind::And);
      n->children.reserve(f->children.size());
      for (const auto& c : f->children) n->children.push_back(with_namespace(c, prefix, which));
      return n;
    }
    case FormulaNode::Kind::Or: {
      auto n = std::make_shared<FormulaNode>(FormulaNode::Kind::Or);
      n->marker = f->marker;
      n->left = with_namespace(f->left, prefix, which);
      n->right = with_namespace(f->right, prefix, which);
      return n;
    }
  }
  return f;
}

inline void collect_vars(const Formula& f, std::set<VarId>& out) {
  switch (f->kind) {
    case FormulaNode::Kind::True:
    case FormulaNode::Kind::False: return;
    case FormulaNode::Kind::Leaf:
      for (const auto& [v, c] : f->atom.expr.coeffs()) out.insert(v);
      return;
    case FormulaNode::Kind::And:
      for (const auto& c : f->children) collect_vars(c, out);
      return;
    case FormulaNode::Kind::Or:
      if (f->marker) out.insert(*f->marker);
      collect_vars(f->left, out);
      collect_vars(f->right, out);
      return;
  }
}

inline void collect_atoms(const Formula& f, std::vector<Atom>& out) {
  switch (f->kind) {
    case FormulaNode::Kind::True:
    case FormulaNode::Kind::False: return;
    case FormulaNode::Kind::Leaf: out.push_back(f->atom); return;
    case FormulaNode::Kind::And:
      for (const auto& c : f->children) collect_atoms(c, out);
      return;
    case FormulaNode::Kind::Or:
      collect_atoms(f->left, out);
      collect_atoms(f->right, out);
      return;
  }
}

inline std::set<VarId> formula_vars(const Formula& f) {
  std::set<VarId> out;
  collect_vars(f, out);
  return out;
}

inline void collect_markers(const Formula& f, std::vector<VarId>& out) {
  switch (f->kind) {
    case FormulaNode::Kind::And:
      for (const auto& c : f->children) collect_markers(c, out);
      return;
    case FormulaNode::Kind::Or:
      if (f->marker) out.push_back(*f->marker);
      collect_markers(f->left, out);
      collect_markers(f->right, out);
      return;
    default: return;
  }
}

inline bool has_disjunction(const Formula& f) {
  switch (f->kind) {
    case FormulaNode::Kind::Or: return true;
    case FormulaNode::Kind::And:
      for (const auto& c : f->children)
        if (has_disjunction(c)) return true;
      return false;
    default: return false;
  }
}

// Top-level disjuncts of a right-leaning Or chain, as built by merge.
inline void top_level_disjuncts(const Formula& f, std::vector<Formula>& out) {
  if (f->kind == FormulaNode::Kind::Or && !f->marker) {
    top_level_disjuncts(f->left, out);
    top_level_disjuncts(f->right, out);
  } else {
    out.push_back(f);
  }
}

inline std::string formula_str(const Formula& f) {
  switch (f->kind) {
    case FormulaNode::Kind::True: return "true";
    case FormulaNode::Kind::False: return "false";
    case FormulaNode::Kind::Leaf: return f->atom.str();
    case FormulaNode::Kind::And: {
      std::ostringstream os;
      for (size_t i = 0; i < f->children.size(); ++i) {
        if (i) os << " && ";
        const auto& c = f->children[i];
        bool paren = c->kind == FormulaNode::Kind::Or;
        os << (paren ? "(" : "") << formula_str(c) << (paren ? ")" : "");
      }
      return os.str();
    }
    case FormulaNode::Kind::Or: {
      std::ostringstream os;
      os << "(" << formula_str(f->left) << " || " << formula_str(f->right) << ")";
      if (f->marker) os << "{" << f->marker->str() << "}";
      return os.str();
    }
  }
  return "?";
}

}  // namespace lpi
