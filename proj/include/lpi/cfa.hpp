#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lpi/formula.hpp"

namespace lpi {

// Per-statement control flow automaton. Edge formulas relate unprimed inputs
// to primed outputs and carry explicit frame equalities; the structured op
// fields carry the same content in a shape the engine can instantiate without
// rewriting equalities.

enum class EdgeKind { Assign, Havoc, Assume };

struct AssertInfo {
  int id = -1;
  int line = 0;
  std::string text;
};

struct Edge {
  int from = -1, to = -1;
  EdgeKind kind = EdgeKind::Assume;
  std::string target;              // Assign/Havoc: written variable
  LinearExpr rhs;                  // Assign: value over inputs
  Formula guard;                   // Assume: constraint over inputs, else true
  std::optional<AssertInfo> assertion;  // set on edges into the error node
  Formula formula;                 // full relational semantics incl. frames
  int order = 0;                   // source order, for deterministic traversal
};

struct Cfa {
  int num_nodes = 0;
  int entry = 0;
  std::optional<int> error;
  std::vector<Edge> edges;
  std::set<std::string> vars;
  std::set<int> loop_heads;
  std::vector<std::string> node_desc;  // human-readable location labels

  int add_node(std::string desc) {
    node_desc.push_back(std::move(desc));
    return num_nodes++;
  }

  std::vector<const Edge*> out_edges(int n) const {
    std::vector<const Edge*> out;
    for (const auto& e : edges)
      if (e.from == n) out.push_back(&e);
    return out;
  }
  std::vector<const Edge*> in_edges(int n) const {
    std::vector<const Edge*> out;
    for (const auto& e : edges)
      if (e.to == n) out.push_back(&e);
    return out;
  }

  std::set<std::string> written_vars(const Edge& e) const {
    if (e.kind == EdgeKind::Assume) return {};
    return {e.target};
  }

  std::set<std::string> read_vars(const Edge& e) const {
    std::set<std::string> out;
    switch (e.kind) {
      case EdgeKind::Assign:
        for (const auto& [v, c] : e.rhs.coeffs()) out.insert(v.base);
        return out;
      case EdgeKind::Havoc: return out;
      case EdgeKind::Assume:
        for (const auto& v : formula_vars(e.guard))
          if (v.role == VarRole::Input) out.insert(v.base);
        return out;
    }
    return out;
  }
};

// Full relational formula for an edge: constraint plus frame equalities for
// every program variable the edge leaves untouched.
inline Formula edge_semantics(EdgeKind kind, const std::string& target, const LinearExpr& rhs,
                              const Formula& guard, const std::set<std::string>& all_vars) {
  std::vector<Formula> parts;
  if (kind == EdgeKind::Assume) parts.push_back(guard);
  if (kind == EdgeKind::Assign) {
    LinearExpr e = rhs;  // x' - rhs = 0
    e *= Rational(-1);
    e.add_term(out_var(target), Rational(1));
    parts.push_back(f_atom(atom_eq0(std::move(e))));
  }
  for (const auto& v : all_vars) {
    if (kind != EdgeKind::Assume && v == target) continue;
    LinearExpr e;  // v' - v = 0
    e.add_term(out_var(v), Rational(1));
    e.add_term(in_var(v), Rational(-1));
    parts.push_back(f_atom(atom_eq0(std::move(e))));
  }
  return f_and(std::move(parts));
}

}  // namespace lpi
