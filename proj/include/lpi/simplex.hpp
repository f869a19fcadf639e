#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lpi/formula.hpp"

namespace lpi {

// Exact rational LP: maximize objective subject to a conjunction of atoms.
// Two-phase primal simplex with Bland's rule (smallest index), so it cannot
// cycle. Variables are free; each is split internally as x = x+ - x-.

enum class LpStatus { Optimal, Unbounded, Infeasible };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Rational value;                     // Optimal only
  std::map<VarId, Rational> point;    // Optimal: an optimizing assignment
  std::map<VarId, Rational> ray;      // Unbounded: improving direction from point
};

struct LpStats {
  long pivots = 0;
  long phase1 = 0;
  long phase2 = 0;
};

class LpProblem {
 public:
  void add_atom(const Atom& a) {
    if (a.rel == Rel::Eq) {
      add_row(a.expr, true);
    } else {
      add_row(a.expr, false);
    }
  }

  void add_constraints(const std::vector<Atom>& atoms) {
    for (const auto& a : atoms) add_atom(a);
  }

  // maximize obj subject to the added constraints
  LpResult maximize(const LinearExpr& obj, LpStats* stats = nullptr) const {
    Tableau t;
    build(t, obj);
    return solve(t, obj, stats);
  }

  size_t num_rows() const { return rows_.size(); }

 private:
  struct Row {
    LinearExpr expr;  // expr <= 0 or expr = 0
    bool eq;
  };
  std::vector<Row> rows_;

  void add_row(const LinearExpr& e, bool eq) { rows_.push_back({e, eq}); }

  // Dense tableau in standard form: A y = b, y >= 0, maximize c y.
  // y collects x+/x- pairs then one slack per inequality.
  struct Tableau {
    std::vector<VarId> vars;               // structural variables in column order
    std::map<VarId, size_t> var_col;       // var -> index into vars
    size_t n = 0;                          // structural columns (2 * vars)
    size_t m = 0;                          // rows
    std::vector<std::vector<Rational>> a;  // m x (n + slacks)
    std::vector<Rational> b;               // m
    std::vector<size_t> slack_col;         // row -> slack column or SIZE_MAX
    size_t total = 0;                      // n + number of slacks
  };

  void build(Tableau& t, const LinearExpr& obj) const {
    std::set<VarId> vs;
    for (const auto& r : rows_)
      for (const auto& [v, c] : r.expr.coeffs()) vs.insert(v);
    for (const auto& [v, c] : obj.coeffs()) vs.insert(v);
    for (const auto& v : vs) {
      t.var_col[v] = t.vars.size();
      t.vars.push_back(v);
    }
    t.n = 2 * t.vars.size();
    t.m = rows_.size();
    size_t slacks = 0;
    for (const auto& r : rows_)
      if (!r.eq) ++slacks;
    t.total = t.n + slacks;
    t.a.assign(t.m, std::vector<Rational>(t.total, Rational(0)));
    t.b.assign(t.m, Rational(0));
    t.slack_col.assign(t.m, static_cast<size_t>(-1));
    size_t next_slack = t.n;
    for (size_t i = 0; i < t.m; ++i) {
      const Row& r = rows_[i];
      // expr <= 0 means sum coeff*x <= -constant
      for (const auto& [v, c] : r.expr.coeffs()) {
        size_t j = 2 * t.var_col.at(v);
        t.a[i][j] = c;
        t.a[i][j + 1] = -c;
      }
      t.b[i] = -r.expr.constant();
      if (!r.eq) {
        t.a[i][next_slack] = 1;
        t.slack_col[i] = next_slack++;
      }
      if (t.b[i] < 0) {
        for (auto& x : t.a[i]) x = -x;
        t.b[i] = -t.b[i];
      }
    }
  }

  static void pivot(Tableau& t, std::vector<Rational>& cost, Rational& cost0,
                    std::vector<size_t>& basis, size_t row, size_t col, LpStats* stats,
                    long& counter) {
    ++counter;
    if (stats) ++stats->pivots;
    Rational p = t.a[row][col];
    for (auto& x : t.a[row]) x /= p;
    t.b[row] /= p;
    for (size_t i = 0; i < t.m; ++i) {
      if (i == row) continue;
      Rational f = t.a[i][col];
      if (f == 0) continue;
      for (size_t j = 0; j < t.total; ++j) t.a[i][j] -= f * t.a[row][j];
      t.b[i] -= f * t.b[row];
    }
    Rational f = cost[col];
    if (f != 0) {
      for (size_t j = 0; j < t.total; ++j) cost[j] -= f * t.a[row][j];
      cost0 -= f * t.b[row];
    }
    basis[row] = col;
  }

  // Bland's rule: entering = smallest column with positive reduced cost,
  // leaving = smallest basis index among the ratio-test minimizers.
  // Returns false when optimal, throws nothing; unbounded reported via flag.
  static bool simplex_loop(Tableau& t, std::vector<Rational>& cost, Rational& cost0,
                           std::vector<size_t>& basis, bool& unbounded,
                           std::optional<size_t>& unbounded_col, LpStats* stats, long& counter) {
    for (;;) {
      size_t enter = t.total;
      for (size_t j = 0; j < t.total; ++j) {
        if (cost[j] > 0) {
          enter = j;
          break;
        }
      }
      if (enter == t.total) return true;  // optimal
      size_t leave = t.m;
      Rational best;
      for (size_t i = 0; i < t.m; ++i) {
        if (t.a[i][enter] <= 0) continue;
        Rational ratio = t.b[i] / t.a[i][enter];
        if (leave == t.m || ratio < best ||
            (ratio == best && basis[i] < basis[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave == t.m) {
        unbounded = true;
        unbounded_col = enter;
        return true;
      }
      pivot(t, cost, cost0, basis, leave, enter, stats, counter);
    }
  }

  LpResult solve(Tableau& t, const LinearExpr& obj, LpStats* stats) const {
    LpResult res;
    // Phase 1: artificial variable per row, minimize their sum.
    size_t art_begin = t.total;
    size_t total_with_art = t.total + t.m;
    for (size_t i = 0; i < t.m; ++i) {
      t.a[i].resize(total_with_art, Rational(0));
      t.a[i][art_begin + i] = 1;
    }
    size_t real_total = t.total;
    t.total = total_with_art;
    std::vector<size_t> basis(t.m);
    for (size_t i = 0; i < t.m; ++i) basis[i] = art_begin + i;
    // maximize -(sum of artificials): cost = sum of (row) exprs over real cols
    std::vector<Rational> cost(t.total, Rational(0));
    Rational cost0(0);
    for (size_t i = 0; i < t.m; ++i) {
      for (size_t j = 0; j < real_total; ++j) cost[j] += t.a[i][j];
      cost0 += t.b[i];
    }
    // cost0 currently equals sum b; objective value = sum_b - sum art = cost0 - ...
    // We track: value of (-sum art) + cost0 offset. Optimum reached when no
    // positive reduced cost remains; feasible iff the optimum is sum b, i.e.
    // remaining cost0 == 0.
    bool unbounded = false;
    std::optional<size_t> ucol;
    long counter = 0;
    simplex_loop(t, cost, cost0, basis, unbounded, ucol, stats, counter);
    if (stats) stats->phase1 += counter;
    if (cost0 != 0) {
      res.status = LpStatus::Infeasible;
      return res;
    }
    // Drive artificials out of the basis where possible; rows where we cannot
    // are redundant (all-zero over real columns) and can be ignored because
    // b must be 0 there (phase-1 optimum had value 0).
    for (size_t i = 0; i < t.m; ++i) {
      if (basis[i] < art_begin) continue;
      size_t col = t.total;
      for (size_t j = 0; j < real_total; ++j) {
        if (t.a[i][j] != 0) {
          col = j;
          break;
        }
      }
      if (col == t.total) continue;  // redundant row
      long c2 = 0;
      pivot(t, cost, cost0, basis, i, col, stats, c2);
      if (stats) stats->phase1 += c2;
    }
    // Phase 2: real objective over real columns; artificial columns frozen.
    t.total = real_total;
    for (size_t i = 0; i < t.m; ++i) t.a[i].resize(real_total);
    std::vector<Rational> cost2(t.total, Rational(0));
    Rational val0(0);
    // objective in split variables
    std::vector<Rational> base_cost(t.total, Rational(0));
    for (const auto& [v, c] : obj.coeffs()) {
      size_t j = 2 * t.var_col.at(v);
      base_cost[j] = c;
      base_cost[j + 1] = -c;
    }
    val0 = obj.constant();
    cost2 = base_cost;
    // Reduce cost over current basis.
    for (size_t i = 0; i < t.m; ++i) {
      size_t bj = basis[i];
      if (bj >= t.total) continue;  // stranded artificial on a redundant row
      Rational f = cost2[bj];
      if (f == 0) continue;
      for (size_t j = 0; j < t.total; ++j) cost2[j] -= f * t.a[i][j];
      val0 += f * t.b[i];
      cost2[bj] = 0;  // exact zero, avoid residue
    }
    unbounded = false;
    ucol.reset();
    counter = 0;
    simplex_loop(t, cost2, val0, basis, unbounded, ucol, stats, counter);
    if (stats) stats->phase2 += counter;

    // Read out the current point in original variables.
    auto read_point = [&]() {
      std::map<VarId, Rational> pt;
      std::vector<Rational> y(t.total, Rational(0));
      for (size_t i = 0; i < t.m; ++i)
        if (basis[i] < t.total) y[basis[i]] = t.b[i];
      for (size_t k = 0; k < t.vars.size(); ++k) {
        Rational v = y[2 * k] - y[2 * k + 1];
        pt[t.vars[k]] = v;
      }
      return pt;
    };

    if (unbounded) {
      res.status = LpStatus::Unbounded;
      res.point = read_point();
      // Improving ray: entering column direction. Structural deltas come from
      // the basis rows; nonbasic entering var moves by +1.
      std::vector<Rational> dir(t.total, Rational(0));
      dir[*ucol] = 1;
      for (size_t i = 0; i < t.m; ++i)
        if (basis[i] < t.total) dir[basis[i]] = -t.a[i][*ucol];
      for (size_t k = 0; k < t.vars.size(); ++k) {
        Rational d = dir[2 * k] - dir[2 * k + 1];
        if (d != 0) res.ray[t.vars[k]] = d;
      }
      return res;
    }
    res.status = LpStatus::Optimal;
    // val0 carries obj constant minus accumulated reductions; recompute the
    // objective at the read-out point to avoid sign bookkeeping mistakes.
    res.point = read_point();
    res.value = obj.evaluate([&](const VarId& v) {
      auto it = res.point.find(v);
      return it == res.point.end() ? Rational(0) : it->second;
    });
    return res;
  }
};

// Maximize over the conjunction `atoms`, all variables rational.
inline LpResult lp_maximize(const std::vector<Atom>& atoms, const LinearExpr& obj,
                            LpStats* stats = nullptr) {
  LpProblem p;
  p.add_constraints(atoms);
  return p.maximize(obj, stats);
}

// Branch and bound on top of the rational relaxation. All variables are
// integer-valued. Branches on the fractional variable with the largest
// denominator, exploring floor first. Throws BudgetExceeded past node_budget.
struct MilpConfig {
  long node_budget = 100000;
};

inline LpResult milp_maximize(const std::vector<Atom>& atoms, const LinearExpr& obj,
                              const MilpConfig& cfg = {}, LpStats* stats = nullptr) {
  struct Node {
    std::vector<Atom> extra;
  };
  std::vector<Node> stack;
  stack.push_back({});
  std::optional<LpResult> best;
  long nodes = 0;
  // An unbounded relaxation at the root does not by itself prove the integer
  // problem unbounded, but for our use (template bounds over programs) the
  // relaxation being unbounded is reported as unbounded: the integer points
  // chase the same ray. See callers for how Unbounded is consumed.
  while (!stack.empty()) {
    if (++nodes > cfg.node_budget) throw BudgetExceeded("milp node budget exhausted");
    Node nd = std::move(stack.back());
    stack.pop_back();
    std::vector<Atom> all = atoms;
    all.insert(all.end(), nd.extra.begin(), nd.extra.end());
    LpResult r = lp_maximize(all, obj, stats);
    if (r.status == LpStatus::Infeasible) continue;
    if (r.status == LpStatus::Unbounded) {
      // Integer feasibility along the ray: constraints are rational with
      // integer-scalable ray, so integer points exist arbitrarily far.
      return r;
    }
    if (best && r.value <= best->value) continue;  // bound
    // Find fractional variable with largest denominator.
    std::optional<VarId> frac;
    BigInt best_den = 1;
    for (const auto& [v, val] : r.point) {
      if (v.role == VarRole::Marker) continue;
      BigInt den = boost::multiprecision::denominator(val);
      if (den != 1 && den > best_den) {
        best_den = den;
        frac = v;
      }
    }
    if (!frac) {
      if (!best || r.value > best->value) best = r;
      continue;
    }
    Rational val = r.point.at(*frac);
    BigInt fl = rat_floor(val);
    // floor branch explored first: pushed last
    Node up = nd, down = nd;
    {
      LinearExpr e;  // -(x) + (fl+1) <= 0  i.e. x >= fl+1
      e.add_term(*frac, Rational(-1));
      e.add_constant(Rational(fl + 1));
      up.extra.push_back(atom_leq0(e));
    }
    {
      LinearExpr e;  // x - fl <= 0  i.e. x <= fl
      e.add_term(*frac, Rational(1));
      e.add_constant(Rational(-fl));
      down.extra.push_back(atom_leq0(e));
    }
    stack.push_back(std::move(up));
    stack.push_back(std::move(down));
  }
  if (best) return *best;
  LpResult r;
  r.status = LpStatus::Infeasible;
  return r;
}

}  // namespace lpi
