#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lpi/simplex.hpp"

namespace lpi {

// Maximizes a linear objective over a formula containing marked disjunctions.
// Search walks marker assignments depth first (left disjunct first), pruning
// with the LP relaxation that ignores still-undecided disjunctions. The model
// of the optimum fixes one disjunct per Or node, which is what callers read
// back as a policy.

enum class OptStatus { Optimal, Unbounded, Infeasible };

struct OptResult {
  OptStatus status = OptStatus::Infeasible;
  Rational value;  // Optimal only
  Model model;     // Optimal: numeric point plus one boolean per marker
};

struct OptConfig {
  bool integer_mode = true;
  bool use_bound_lemma = true;  // add obj >= incumbent+1 to relaxations
  long node_budget = 10000;
  MilpConfig milp;
};

struct OptStats {
  long nodes = 0;
  long lp_calls = 0;
};

class DisjunctiveOptimizer {
 public:
  explicit DisjunctiveOptimizer(OptConfig cfg = {}) : cfg_(cfg) {}

  const OptStats& stats() const { return stats_; }

  // f must carry a marker on every Or node (see annotate_markers).
  OptResult maximize(const Formula& f, const LinearExpr& obj) {
    return run(f, obj, /*stop_on_feasible=*/false);
  }

  bool satisfiable(const Formula& f) {
    OptResult r = run(f, LinearExpr{}, /*stop_on_feasible=*/true);
    return r.status != OptStatus::Infeasible;
  }

  // Does some model give obj strictly above bound? Integer mode sharpens the
  // strict bound to floor(bound)+1; rational mode has to optimize since the
  // LP itself only speaks non-strict.
  bool exceeds(const Formula& f, const LinearExpr& obj, const Rational& bound) {
    if (cfg_.integer_mode) {
      LinearExpr gap;  // bound+1 - obj <= 0
      gap -= obj;
      gap.add_constant(Rational(rat_floor(bound) + 1));
      return satisfiable(f_and({f, f_atom(atom_leq0(gap))}));
    }
    OptResult r = maximize(f, obj);
    if (r.status == OptStatus::Unbounded) return true;
    return r.status == OptStatus::Optimal && r.value > bound;
  }

 private:
  OptConfig cfg_;
  OptStats stats_;

  struct Search {
    const LinearExpr* obj;
    bool stop_on_feasible = false;
    std::map<VarId, bool> asg;
    std::optional<Rational> incumbent;
    Model best_model;
    bool unbounded = false;
    bool done = false;
  };

  // Atoms on definitely-taken paths; first still-undecided marker in
  // pre-order; ok=false when a definite False is reachable.
  static void gather(const Formula& f, const std::map<VarId, bool>& asg,
                     std::vector<Atom>& atoms, bool& ok, std::optional<VarId>& undecided) {
    if (!ok) return;
    switch (f->kind) {
      case FormulaNode::Kind::True: return;
      case FormulaNode::Kind::False: ok = false; return;
      case FormulaNode::Kind::Leaf: atoms.push_back(f->atom); return;
      case FormulaNode::Kind::And:
        for (const auto& c : f->children) gather(c, asg, atoms, ok, undecided);
        return;
      case FormulaNode::Kind::Or: {
        if (!f->marker) throw EngineBug("optimizer: unannotated disjunction");
        auto it = asg.find(*f->marker);
        if (it == asg.end()) {
          if (!undecided) undecided = *f->marker;
          return;  // relaxation: treat as satisfied
        }
        gather(it->second ? f->left : f->right, asg, atoms, ok, undecided);
        return;
      }
    }
  }

  void dfs(const Formula& f, Search& s) {
    if (s.done) return;
    if (++stats_.nodes > cfg_.node_budget) throw BudgetExceeded("optimizer node budget exhausted");

    std::vector<Atom> atoms;
    bool ok = true;
    std::optional<VarId> undecided;
    gather(f, s.asg, atoms, ok, undecided);
    if (!ok) return;

    std::vector<Atom> relax = atoms;
    if (s.incumbent && cfg_.use_bound_lemma && cfg_.integer_mode) {
      LinearExpr gap;  // incumbent+1 - obj <= 0
      gap -= *s.obj;
      gap.add_constant(Rational(rat_floor(*s.incumbent) + 1));
      relax.push_back(atom_leq0(gap));
    }
    ++stats_.lp_calls;
    LpResult r = lp_maximize(relax, *s.obj);
    if (r.status == LpStatus::Infeasible) return;
    if (r.status == LpStatus::Optimal && s.incumbent && r.value <= *s.incumbent &&
        !s.stop_on_feasible)
      return;

    if (!undecided) {
      // Complete assignment: atoms is the exact conjunction for this branch.
      if (cfg_.integer_mode) {
        ++stats_.lp_calls;
        LpResult ir = milp_maximize(atoms, *s.obj, cfg_.milp);
        if (ir.status == LpStatus::Infeasible) return;
        if (ir.status == LpStatus::Unbounded) {
          s.unbounded = true;
          s.done = true;
          return;
        }
        accept_leaf(ir, s);
      } else {
        if (r.status == LpStatus::Unbounded) {
          s.unbounded = true;
          s.done = true;
          return;
        }
        accept_leaf(r, s);
      }
      return;
    }

    s.asg[*undecided] = true;
    dfs(f, s);
    if (s.done) {
      s.asg.erase(*undecided);
      return;
    }
    s.asg[*undecided] = false;
    dfs(f, s);
    s.asg.erase(*undecided);
  }

  void accept_leaf(const LpResult& r, Search& s) {
    if (s.stop_on_feasible) {
      if (!s.incumbent) {
        s.incumbent = r.value;
        s.best_model = make_model(r, s);
      }
      s.done = true;
      return;
    }
    if (!s.incumbent || r.value > *s.incumbent) {
      s.incumbent = r.value;
      s.best_model = make_model(r, s);
    }
  }

  static Model make_model(const LpResult& r, const Search& s) {
    Model m;
    m.numeric = r.point;
    m.booleans = s.asg;
    return m;
  }

  OptResult run(const Formula& f, const LinearExpr& obj, bool stop_on_feasible) {
    Search s;
    s.obj = &obj;
    s.stop_on_feasible = stop_on_feasible;
    dfs(f, s);
    OptResult out;
    if (s.unbounded) {
      out.status = OptStatus::Unbounded;
      return out;
    }
    if (!s.incumbent) return out;  // Infeasible
    out.status = OptStatus::Optimal;
    out.value = *s.incumbent;
    out.model = s.best_model;
    // Markers never reached on the winning branch stay unconstrained; pick
    // the left disjunct so substitute_markers has a total assignment.
    std::vector<VarId> ms;
    collect_markers(f, ms);
    for (const auto& mk : ms)
      if (!out.model.booleans.count(mk)) out.model.booleans[mk] = true;
    return out;
  }
};

inline Formula conjoin_base(Formula f, const std::vector<Atom>& base) {
  std::vector<Formula> parts;
  parts.reserve(base.size() + 1);
  parts.push_back(std::move(f));
  for (const auto& a : base) parts.push_back(f_atom(a));
  return f_and(std::move(parts));
}

// Maximize the objective over an annotated formula under extra side
// constraints (typically the concretization of the starting abstracted
// state).
inline OptResult maximize_formula(const LinearExpr& objective, const Formula& f,
                                  const std::vector<Atom>& base, const OptConfig& cfg = {},
                                  OptStats* stats = nullptr) {
  DisjunctiveOptimizer opt(cfg);
  OptResult r = opt.maximize(conjoin_base(f, base), objective);
  if (stats) {
    stats->nodes += opt.stats().nodes;
    stats->lp_calls += opt.stats().lp_calls;
  }
  return r;
}

// Can the objective strictly exceed the bound somewhere in f /\ base? Strict
// means bound+1 under integer semantics.
inline bool check_exceeds(const Formula& f, const std::vector<Atom>& base,
                          const LinearExpr& objective, const Rational& bound,
                          const OptConfig& cfg = {}, OptStats* stats = nullptr) {
  DisjunctiveOptimizer opt(cfg);
  bool r = opt.exceeds(conjoin_base(f, base), objective, bound);
  if (stats) {
    stats->nodes += opt.stats().nodes;
    stats->lp_calls += opt.stats().lp_calls;
  }
  return r;
}

}  // namespace lpi
