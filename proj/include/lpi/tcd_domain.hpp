#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lpi/congruence.hpp"
#include "lpi/formula.hpp"

namespace lpi {

// Template constraint domain states. An abstracted state keeps one finite
// upper bound per template, each decorated with the policy (disjunction-free
// formula) that produced it and a backpointer to the state the policy starts
// from. A template with no entry is unbounded.

// Fixed linear form t over program variables, kept canonical: integer
// coefficients with gcd 1, sign preserved, no constant term. +x and -x are
// distinct templates.
struct Template {
  LinearExpr expr;

  static Template of(const LinearExpr& e) {
    if (e.coeffs().empty()) throw EngineBug("Template::of: no variables");
    BigInt denom_lcm = 1;
    for (const auto& [v, c] : e.coeffs()) denom_lcm = lcm(denom_lcm, denominator(c));
    BigInt num_gcd = 0;
    for (const auto& [v, c] : e.coeffs()) num_gcd = gcd(num_gcd, numerator(c * Rational(denom_lcm)));
    Rational scale = Rational(denom_lcm) / Rational(abs(num_gcd));
    LinearExpr out;
    for (const auto& [v, c] : e.coeffs()) out.add_term(v, c * scale);
    return Template{std::move(out)};
  }

  std::string str() const { return expr.str(); }

  friend bool operator==(const Template& a, const Template& b) {
    return a.expr.coeffs() == b.expr.coeffs();
  }
  friend bool operator<(const Template& a, const Template& b) {
    return a.expr.coeffs() < b.expr.coeffs();
  }
};

struct AbstractedState;
using StateRef = std::shared_ptr<const AbstractedState>;

struct PolicyBound {
  Rational bound;
  Formula policy = f_true();             // disjunction-free
  std::map<std::string, VarId> outputs;  // variable -> formula var holding its final value
  StateRef backpointer;                  // state the policy's inputs are drawn from
  bool input_independent = false;        // bound holds regardless of input constraints
};

struct AbstractedState {
  int id = -1;
  int node = -1;
  std::map<Template, PolicyBound> entries;
  CongruenceState congruence;  // empty when congruence tracking is off

  // Concretization as atoms over input variables: t*X - d <= 0 per entry.
  std::vector<Atom> constraint_atoms() const {
    std::vector<Atom> out;
    out.reserve(entries.size());
    for (const auto& [t, pb] : entries) {
      LinearExpr e = t.expr;
      e.add_constant(-pb.bound);
      out.push_back(atom_leq0(std::move(e)));
    }
    return out;
  }

  std::string str() const {
    std::ostringstream os;
    os << "{";
    bool first = true;
    for (const auto& [t, pb] : entries) {
      if (!first) os << ", ";
      os << t.str() << " <= " << pb.bound.str();
      first = false;
    }
    os << "}";
    return os.str();
  }
};

// Unreachable successor marker; kept distinct from the bound maps so bounds
// stay finite and coverage of an unreachable state is trivially true.
struct BottomState {
  int node = -1;
};

// Component-wise comparison: a is below b iff every bound b imposes is met by
// a finite, no-larger bound in a. Absent entries are unbounded, so an empty
// state is the top element.
inline bool leq(const AbstractedState& a, const AbstractedState& b) {
  if (a.node != b.node) throw EngineBug("leq: node mismatch");
  for (const auto& [t, pb] : b.entries) {
    auto it = a.entries.find(t);
    if (it == a.entries.end() || it->second.bound > pb.bound) return false;
  }
  return true;
}

// Least upper bound. Per template kept on both sides the larger bound wins
// together with its policy and backpointer; on ties the entry of b (the
// state already in the reached set) is kept. Entries missing on either side
// are unbounded and stay absent.
inline AbstractedState join(const AbstractedState& a, const AbstractedState& b) {
  if (a.node != b.node) throw EngineBug("join: node mismatch");
  AbstractedState out;
  out.node = a.node;
  for (const auto& [t, pb] : a.entries) {
    auto it = b.entries.find(t);
    if (it == b.entries.end()) continue;
    out.entries[t] = pb.bound > it->second.bound ? pb : it->second;
  }
  out.congruence = congruence_join(a.congruence, b.congruence);
  return out;
}

inline bool stop(const AbstractedState& s, const std::vector<StateRef>& reached) {
  for (const auto& r : reached)
    if (r->node == s.node && leq(s, *r)) return true;
  return false;
}

// Is t the unit template +x or -x for a single variable?
inline std::optional<std::pair<std::string, int>> unit_template(const Template& t) {
  if (t.expr.coeffs().size() != 1) return std::nullopt;
  const auto& [v, c] = *t.expr.coeffs().begin();
  if (c == 1) return std::make_pair(v.base, 1);
  if (c == -1) return std::make_pair(v.base, -1);
  return std::nullopt;
}

// Bounds pinning a variable to one value fix its parity; an empty or
// fractional singleton interval has no integer point at all, which the
// parity lattice renders as Bottom.
inline CongruenceState refine_from_bounds(const CongruenceState& s, const AbstractedState& a) {
  CongruenceState out = s;
  std::map<std::string, std::pair<std::optional<Rational>, std::optional<Rational>>> range;
  for (const auto& [t, pb] : a.entries) {
    auto u = unit_template(t);
    if (!u) continue;
    auto& [lo, hi] = range[u->first];
    if (u->second == 1)
      hi = pb.bound;
    else
      lo = -pb.bound;
  }
  for (const auto& [base, r] : range) {
    const auto& [lo, hi] = r;
    if (!lo || !hi) continue;
    if (*lo > *hi || (*lo == *hi && !is_integer(*lo)))
      parity_set(out, base, Parity::Bottom);
    else if (*lo == *hi)
      parity_set(out, base,
                 parity_meet(parity_get(out, base), parity_of_int(numerator(*lo))));
  }
  return out;
}

// Rational-relaxation substitute for integer parity constraints: the largest
// attainable value of x (or -x) with known parity is the bound rounded down
// to the matching parity.
inline Rational parity_tighten_bound(const Rational& d, Parity p) {
  if (p != Parity::Even && p != Parity::Odd) return d;
  BigInt f = rat_floor(d);
  bool want_even = p == Parity::Even;
  if (is_even(f) != want_even) f -= 1;
  return Rational(f);
}

}  // namespace lpi
