#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lpi/cfa.hpp"
#include "lpi/tcd_domain.hpp"

namespace lpi {

// Path formulas composed edge by edge. Each program variable carries a
// generation counter: generation 0 is the input variable itself, every write
// allocates the next generation as a fresh auxiliary. Reading the formula at
// the current generations gives the relation between inputs and the state
// after the path; untouched variables stay at generation 0, so their frame
// equalities are implicit variable sharing rather than extra atoms.

inline VarId gen_var(const std::string& base, int gen) {
  return gen == 0 ? in_var(base) : aux_var(base, "g" + std::to_string(gen));
}

struct PathState {
  Formula formula = f_true();
  std::map<std::string, int> gens;  // absent = generation 0

  int gen_of(const std::string& base) const {
    auto it = gens.find(base);
    return it == gens.end() ? 0 : it->second;
  }

  VarId cur(const std::string& base) const { return gen_var(base, gen_of(base)); }

  // Rebind an expression or condition over input variables to the current
  // generations.
  LinearExpr at_current(const LinearExpr& e) const {
    return e.map_vars([&](const VarId& v) { return cur(v.base); });
  }
  Formula at_current(const Formula& f) const {
    return map_formula_vars(f, [&](const VarId& v) { return cur(v.base); });
  }

  void apply_assign(const std::string& base, const LinearExpr& rhs_over_inputs) {
    LinearExpr e = at_current(rhs_over_inputs);
    int g = gen_of(base) + 1;
    gens[base] = g;
    e.add_term(gen_var(base, g), Rational(-1));
    formula = f_and({formula, f_atom(atom_eq0(std::move(e)))});
  }

  void apply_havoc(const std::string& base) { gens[base] = gen_of(base) + 1; }

  void apply_assume(const Formula& guard_over_inputs) {
    formula = f_and({formula, at_current(guard_over_inputs)});
  }
};

inline bool same_gens(const PathState& a, const PathState& b) { return a.gens == b.gens; }

// Disjunction of two paths: raise both sides to the pointwise-maximal
// generation map, equating each side's current variable with the shared one
// inside its own disjunct, then disjoin.
inline PathState disjoin_paths(const PathState& a, const PathState& b) {
  PathState out;
  for (const auto& [v, g] : a.gens) out.gens[v] = g;
  for (const auto& [v, g] : b.gens) {
    auto it = out.gens.find(v);
    if (it == out.gens.end() || it->second < g) out.gens[v] = g;
  }
  auto lift = [&](const PathState& side) {
    std::vector<Formula> parts{side.formula};
    for (const auto& [v, g] : out.gens) {
      int have = side.gen_of(v);
      if (have == g) continue;
      LinearExpr eq;
      eq.add_term(gen_var(v, g), Rational(1));
      eq.add_term(gen_var(v, have), Rational(-1));
      parts.push_back(f_atom(atom_eq0(std::move(eq))));
    }
    return f_and(std::move(parts));
  };
  out.formula = f_or_raw(lift(a), lift(b));
  return out;
}

// Un-abstracted reachable states at a node: everything reachable by running
// path.formula from some concrete state admitted by the starting abstracted
// state (whose constraints bind the generation-0 variables).
struct IntermediateState {
  int node = -1;
  StateRef start;
  PathState path;
  CongruenceState congruence;
};

// Merge at a non-abstraction node: states sharing the starting abstracted
// state collapse into one disjunctive path; identical states dedup; states
// with different starts are kept separate (nullopt).
inline std::optional<IntermediateState> merge_intermediate(const IntermediateState& a,
                                                           const IntermediateState& b) {
  if (a.node != b.node) throw EngineBug("merge_intermediate: node mismatch");
  if (a.start != b.start) return std::nullopt;
  if (same_gens(a.path, b.path) && formula_equal(a.path.formula, b.path.formula)) return b;
  IntermediateState out;
  out.node = a.node;
  out.start = a.start;
  out.path = disjoin_paths(a.path, b.path);
  out.congruence = congruence_join(a.congruence, b.congruence);
  return out;
}

}  // namespace lpi
