#pragma once

#include <map>
#include <string>
#include <vector>

#include "lpi/cfa.hpp"
#include "lpi/formula.hpp"

namespace lpi {

// Mod-2 congruence domain run alongside the main analysis. Information flows
// both ways: parities sharpen abstraction queries (integer mode) or tighten
// interval bounds (rational mode), and singleton bounds pin parities back.

enum class Parity { Bottom, Even, Odd, Top };

inline bool parity_leq(Parity a, Parity b) {
  if (a == Parity::Bottom || b == Parity::Top) return true;
  return a == b;
}

inline Parity parity_join(Parity a, Parity b) {
  if (a == Parity::Bottom) return b;
  if (b == Parity::Bottom) return a;
  return a == b ? a : Parity::Top;
}

inline Parity parity_meet(Parity a, Parity b) {
  if (a == Parity::Top) return b;
  if (b == Parity::Top) return a;
  return a == b ? a : Parity::Bottom;
}

inline Parity parity_of_int(const BigInt& v) { return is_even(v) ? Parity::Even : Parity::Odd; }

inline std::string parity_str(Parity p) {
  switch (p) {
    case Parity::Bottom: return "bottom";
    case Parity::Even: return "even";
    case Parity::Odd: return "odd";
    case Parity::Top: return "top";
  }
  return "top";
}

// Variable name (base) to parity; absent means Top.
using CongruenceState = std::map<std::string, Parity>;

inline Parity parity_get(const CongruenceState& s, const std::string& base) {
  auto it = s.find(base);
  return it == s.end() ? Parity::Top : it->second;
}

inline void parity_set(CongruenceState& s, const std::string& base, Parity p) {
  if (p == Parity::Top)
    s.erase(base);
  else
    s[base] = p;
}

inline CongruenceState congruence_join(const CongruenceState& a, const CongruenceState& b) {
  CongruenceState out;
  for (const auto& [v, p] : a) parity_set(out, v, parity_join(p, parity_get(b, v)));
  return out;
}

inline bool congruence_leq(const CongruenceState& a, const CongruenceState& b) {
  for (const auto& [v, p] : b)
    if (!parity_leq(parity_get(a, v), p)) return false;
  return true;
}

// Abstract evaluation of a linear expression. A coefficient that is not an
// integer poisons the result to Top; an even coefficient erases its variable.
inline Parity parity_of_expr(const LinearExpr& e, const CongruenceState& s) {
  if (!is_integer(e.constant())) return Parity::Top;
  Parity acc = parity_of_int(numerator(e.constant()));
  for (const auto& [v, c] : e.coeffs()) {
    if (!is_integer(c)) return Parity::Top;
    if (is_even(numerator(c))) continue;
    Parity pv = parity_get(s, v.base);
    if (pv == Parity::Bottom) return Parity::Bottom;
    if (pv == Parity::Top) return Parity::Top;
    // Odd coefficient: adding an even term keeps parity, an odd term flips it.
    if (pv == Parity::Odd) acc = acc == Parity::Even ? Parity::Odd : Parity::Even;
  }
  return acc;
}

namespace detail {

// Pull "x == c" facts out of the definite (top-level conjunctive) part of a
// guard: atoms of shape a*x + b = 0 with a single variable and exact division.
inline void refine_by_guard(CongruenceState& s, const Formula& f) {
  switch (f->kind) {
    case FormulaNode::Kind::And:
      for (const auto& c : f->children) refine_by_guard(s, c);
      return;
    case FormulaNode::Kind::Leaf: {
      const Atom& a = f->atom;
      if (a.rel != Rel::Eq || a.expr.coeffs().size() != 1) return;
      const auto& [v, coeff] = *a.expr.coeffs().begin();
      Rational val = -a.expr.constant() / coeff;
      if (!is_integer(val)) return;
      parity_set(s, v.base, parity_meet(parity_get(s, v.base), parity_of_int(numerator(val))));
      return;
    }
    default: return;  // disjunctions and constants refine nothing
  }
}

}  // namespace detail

inline CongruenceState congruence_transfer(const CongruenceState& s, const Edge& e) {
  CongruenceState out = s;
  switch (e.kind) {
    case EdgeKind::Assign:
      parity_set(out, e.target, parity_of_expr(e.rhs, s));
      return out;
    case EdgeKind::Havoc:
      parity_set(out, e.target, Parity::Top);
      return out;
    case EdgeKind::Assume:
      detail::refine_by_guard(out, e.guard);
      return out;
  }
  return out;
}

// Encode known parities as linear atoms over the given input variables:
// even x becomes x - 2k = 0, odd x becomes x - 2k - 1 = 0 for a fresh integer
// auxiliary k. Only meaningful when the optimizer treats variables as
// integers, hence the mode guard.
inline std::vector<Atom> parity_constraints(const CongruenceState& s, bool integer_mode,
                                            int& fresh_counter) {
  if (!integer_mode)
    throw EngineBug("parity_constraints: parity atoms require integer mode");
  std::vector<Atom> out;
  for (const auto& [base, p] : s) {
    if (p != Parity::Even && p != Parity::Odd) continue;
    VarId k = aux_var("k" + std::to_string(++fresh_counter), "par");
    LinearExpr e;
    e.add_term(in_var(base), Rational(1));
    e.add_term(k, Rational(-2));
    if (p == Parity::Odd) e.add_constant(Rational(-1));
    out.push_back(atom_eq0(std::move(e)));
  }
  return out;
}

}  // namespace lpi
