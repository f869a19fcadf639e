#include <catch2/catch_amalgamated.hpp>
#include <algorithm>
#include <random>

#include "lpi/path_formula.hpp"
#include "lpi/simplex.hpp"
#include "lpi/template_synthesis.hpp"

using namespace lpi;

namespace {

LinearExpr lin(std::initializer_list<std::pair<std::string, int>> terms, int c = 0) {
  LinearExpr e;
  for (const auto& [v, k] : terms) e.add_term(in_var(v), Rational(k));
  e.add_constant(Rational(c));
  return e;
}

Template T(std::initializer_list<std::pair<std::string, int>> terms) {
  return Template::of(lin(terms));
}

StateRef make_state(int node, std::vector<std::pair<Template, Rational>> entries,
                    StateRef backpointer = nullptr) {
  auto s = std::make_shared<AbstractedState>();
  s->node = node;
  for (auto& [t, d] : entries) {
    PolicyBound pb;
    pb.bound = d;
    pb.backpointer = backpointer;
    s->entries.emplace(t, std::move(pb));
  }
  return s;
}

}  // namespace

TEST_CASE("template canonical form", "[domain]") {
  CHECK(T({{"x", 2}, {"y", 4}}) == T({{"x", 1}, {"y", 2}}));
  CHECK(T({{"x", -2}}).str() == "-x");
  CHECK_FALSE(T({{"x", 1}}) == T({{"x", -1}}));
  // Fractions scale up to coprime integers, keeping the sign.
  LinearExpr frac;
  frac.add_term(in_var("x"), Rational(1) / Rational(2));
  frac.add_term(in_var("y"), Rational(-1) / Rational(3));
  CHECK(Template::of(frac) == T({{"x", 3}, {"y", -2}}));
  // Constant terms are not part of a template.
  CHECK(Template::of(lin({{"x", 1}}, -5)) == T({{"x", 1}}));
  CHECK_THROWS_AS(Template::of(lin({}, 3)), EngineBug);
  CHECK(T({{"x", 2}, {"y", 1}}).str() == "2*x + y");
}

TEST_CASE("leq is component-wise with absence as unbounded", "[domain]") {
  auto x = T({{"x", 1}});
  CHECK(leq(*make_state(0, {{x, 5}}), *make_state(0, {{x, 7}})));
  CHECK_FALSE(leq(*make_state(0, {{x, 7}}), *make_state(0, {{x, 5}})));
  CHECK(leq(*make_state(0, {{x, 5}}), *make_state(0, {})));
  CHECK_FALSE(leq(*make_state(0, {}), *make_state(0, {{x, 5}})));
  CHECK(leq(*make_state(0, {}), *make_state(0, {})));
  CHECK_THROWS_AS(leq(*make_state(0, {}), *make_state(1, {})), EngineBug);
}

TEST_CASE("join keeps the larger bound's entry and resolves ties to the reached state",
          "[domain]") {
  auto ti = T({{"i", 1}});
  auto tj = T({{"j", 1}});
  auto a0 = make_state(0, {});
  auto a1 = make_state(1, {{ti, 0}, {tj, 0}}, a0);
  auto a2 = make_state(1, {{ti, 1}, {tj, 0}}, a1);

  AbstractedState a3 = join(*a2, *a1);
  REQUIRE(a3.entries.size() == 2);
  CHECK(a3.entries.at(ti).bound == 1);
  CHECK(a3.entries.at(ti).backpointer == a1);  // from a2, the updated side
  CHECK(a3.entries.at(tj).bound == 0);
  CHECK(a3.entries.at(tj).backpointer == a0);  // tie: a1's entry survives
}

TEST_CASE("join drops templates unbounded on either side", "[domain]") {
  auto x = T({{"x", 1}});
  auto s = make_state(0, {{x, 5}});
  CHECK(join(*s, *make_state(0, {})).entries.empty());
  CHECK(join(*make_state(0, {}), *s).entries.empty());
  AbstractedState self = join(*s, *s);
  CHECK(self.entries.at(x).bound == 5);
  CHECK_THROWS_AS(join(*s, *make_state(2, {})), EngineBug);
}

TEST_CASE("stop covers iff some same-node state dominates", "[domain]") {
  auto x = T({{"x", 1}});
  auto small = make_state(0, {{x, 5}});
  CHECK_FALSE(stop(*small, {}));
  CHECK(stop(*small, {make_state(0, {{x, 7}})}));
  CHECK_FALSE(stop(*small, {make_state(1, {{x, 7}})}));
  CHECK_FALSE(stop(*make_state(0, {}), {make_state(0, {{x, 7}})}));
}

TEST_CASE("leq is a preorder and join its least upper bound", "[domain][property]") {
  std::mt19937 rng(77123);
  std::vector<Template> universe{T({{"x", 1}}), T({{"x", -1}}), T({{"x", 1}, {"y", 1}})};
  auto random_state = [&]() {
    std::vector<std::pair<Template, Rational>> es;
    for (const auto& t : universe) {
      int pick = static_cast<int>(rng() % 4);
      if (pick == 3) continue;  // unbounded
      es.emplace_back(t, Rational(static_cast<int>(rng() % 11) - 5));
    }
    return make_state(0, es);
  };
  for (int iter = 0; iter < 200; ++iter) {
    auto a = random_state(), b = random_state(), c = random_state();
    CHECK(leq(*a, *a));
    if (leq(*a, *b) && leq(*b, *c)) CHECK(leq(*a, *c));
    AbstractedState j = join(*a, *b);
    CHECK(leq(*a, j));
    CHECK(leq(*b, j));
    if (leq(*a, *c) && leq(*b, *c)) CHECK(leq(j, *c));
  }
}

TEST_CASE("leq implies concretization inclusion", "[domain][property]") {
  std::mt19937 rng(901245);
  std::vector<Template> universe{T({{"x", 1}}), T({{"x", -1}}), T({{"y", 1}}),
                                 T({{"x", 1}, {"y", -1}})};
  auto random_state = [&]() {
    std::vector<std::pair<Template, Rational>> es;
    for (const auto& t : universe) {
      if (rng() % 3 == 0) continue;
      es.emplace_back(t, Rational(static_cast<int>(rng() % 9) - 2));
    }
    return make_state(0, es);
  };
  int checked = 0;
  for (int iter = 0; iter < 300 && checked < 60; ++iter) {
    auto a = random_state(), b = random_state();
    if (!leq(*a, *b)) continue;
    ++checked;
    // Every constraint of b is entailed by a's constraint set: maximizing
    // b's template over a's atoms stays within b's bound.
    for (const auto& [t, pb] : b->entries) {
      LpProblem p;
      p.add_constraints(a->constraint_atoms());
      LpResult r = p.maximize(t.expr);
      if (r.status == LpStatus::Infeasible) break;  // empty set is included in anything
      REQUIRE(r.status == LpStatus::Optimal);
      CHECK(r.value <= pb.bound);
    }
  }
  CHECK(checked >= 40);
}

TEST_CASE("path states compose assignments through generations", "[path]") {
  PathState p;
  CHECK(p.cur("x") == in_var("x"));
  p.apply_assign("x", lin({{"x", 1}}, 1));  // x = x + 1
  p.apply_assign("x", lin({{"x", 1}}, 1));  // x = x + 1
  CHECK(p.gen_of("x") == 2);
  CHECK(p.cur("x") == aux_var("x", "g2"));

  Model m;
  m.numeric[in_var("x")] = Rational(5);
  m.numeric[aux_var("x", "g1")] = Rational(6);
  m.numeric[aux_var("x", "g2")] = Rational(7);
  CHECK(evaluate(p.formula, m));
  m.numeric[aux_var("x", "g2")] = Rational(8);
  CHECK_FALSE(evaluate(p.formula, m));
}

TEST_CASE("havoc bumps the generation without constraining it", "[path]") {
  PathState p;
  p.apply_assume(f_atom(atom_leq0(lin({{"x", 1}}, -10))));  // x <= 10
  p.apply_havoc("x");
  CHECK(p.gen_of("x") == 1);
  Model m;
  m.numeric[in_var("x")] = Rational(3);
  m.numeric[aux_var("x", "g1")] = Rational(1000);
  CHECK(evaluate(p.formula, m));
}

TEST_CASE("disjoining paths aligns generation maps per branch", "[path]") {
  PathState a;
  a.apply_assign("x", lin({{"x", 1}}, 1));
  a.apply_assign("x", lin({{"x", 1}}, 1));  // two writes: g2
  PathState b;
  b.apply_assign("x", lin({}, 0));  // one write: g1

  PathState merged = disjoin_paths(a, b);
  CHECK(merged.gen_of("x") == 2);

  // Branch a: x=5 -> 6 -> 7.
  Model ma;
  ma.numeric[in_var("x")] = Rational(5);
  ma.numeric[aux_var("x", "g1")] = Rational(6);
  ma.numeric[aux_var("x", "g2")] = Rational(7);
  CHECK(evaluate(merged.formula, ma));

  // Branch b: x=5 -> 0, with the alignment equality carrying g1 to g2.
  Model mb;
  mb.numeric[in_var("x")] = Rational(5);
  mb.numeric[aux_var("x", "g1")] = Rational(0);
  mb.numeric[aux_var("x", "g2")] = Rational(0);
  CHECK(evaluate(merged.formula, mb));

  // Neither branch: final value 9 out of nowhere.
  Model bad;
  bad.numeric[in_var("x")] = Rational(5);
  bad.numeric[aux_var("x", "g1")] = Rational(9);
  bad.numeric[aux_var("x", "g2")] = Rational(9);
  CHECK_FALSE(evaluate(merged.formula, bad));
}

TEST_CASE("merge_intermediate dedups, disjoins, or keeps separate", "[path]") {
  auto s1 = make_state(0, {});
  auto s2 = make_state(0, {});
  IntermediateState a{1, s1, {}, {}};
  a.path.apply_assign("x", lin({}, 1));
  IntermediateState b{1, s1, {}, {}};
  b.path.apply_assign("x", lin({}, 2));

  auto merged = merge_intermediate(a, b);
  REQUIRE(merged.has_value());
  CHECK(has_disjunction(merged->path.formula));

  IntermediateState dup{1, s1, {}, {}};
  dup.path.apply_assign("x", lin({}, 1));
  auto same = merge_intermediate(a, dup);
  REQUIRE(same.has_value());
  CHECK_FALSE(has_disjunction(same->path.formula));
  CHECK(formula_equal(same->path.formula, a.path.formula));

  IntermediateState other{1, s2, {}, {}};
  other.path.apply_assign("x", lin({}, 1));
  CHECK_FALSE(merge_intermediate(a, other).has_value());
}

TEST_CASE("parity lattice and expression evaluation", "[congruence]") {
  CHECK(parity_join(Parity::Even, Parity::Odd) == Parity::Top);
  CHECK(parity_join(Parity::Bottom, Parity::Odd) == Parity::Odd);
  CHECK(parity_meet(Parity::Top, Parity::Even) == Parity::Even);
  CHECK(parity_meet(Parity::Even, Parity::Odd) == Parity::Bottom);
  CHECK(parity_leq(Parity::Bottom, Parity::Even));
  CHECK(parity_leq(Parity::Odd, Parity::Top));
  CHECK_FALSE(parity_leq(Parity::Top, Parity::Odd));

  CongruenceState s;
  parity_set(s, "x", Parity::Even);
  CHECK(parity_of_expr(lin({{"y", 2}}), s) == Parity::Even);        // 2y
  CHECK(parity_of_expr(lin({{"x", 1}}, 1), s) == Parity::Odd);      // x+1, x even
  CHECK(parity_of_expr(lin({{"x", 1}, {"y", 1}}), s) == Parity::Top);
  CHECK(parity_of_expr(lin({{"x", 3}}, 4), s) == Parity::Even);     // 3x+4, x even
  CHECK(parity_of_expr(lin({}, 7), s) == Parity::Odd);
}

TEST_CASE("congruence transfer over edges", "[congruence]") {
  CongruenceState s;
  parity_set(s, "x", Parity::Even);

  Edge assign;
  assign.kind = EdgeKind::Assign;
  assign.target = "y";
  assign.rhs = lin({{"x", 1}}, 1);
  CHECK(parity_get(congruence_transfer(s, assign), "y") == Parity::Odd);

  Edge havoc;
  havoc.kind = EdgeKind::Havoc;
  havoc.target = "x";
  CHECK(parity_get(congruence_transfer(s, havoc), "x") == Parity::Top);

  Edge assume;
  assume.kind = EdgeKind::Assume;
  assume.guard = f_atom(atom_eq0(lin({{"y", 1}}, -6)));  // y == 6
  auto t = congruence_transfer(s, assume);
  CHECK(parity_get(t, "y") == Parity::Even);
  CHECK(parity_get(t, "x") == Parity::Even);

  // Contradicting an established parity drops to Bottom.
  Edge clash;
  clash.kind = EdgeKind::Assume;
  clash.guard = f_atom(atom_eq0(lin({{"x", 1}}, -3)));  // x == 3
  CHECK(parity_get(congruence_transfer(s, clash), "x") == Parity::Bottom);

  // Disjunctive guards refine nothing.
  Edge disj;
  disj.kind = EdgeKind::Assume;
  disj.guard = f_or(f_atom(atom_eq0(lin({{"z", 1}}, -2))), f_atom(atom_eq0(lin({{"z", 1}}, -4))));
  CHECK(parity_get(congruence_transfer(s, disj), "z") == Parity::Top);
}

TEST_CASE("congruence transfer is monotone", "[congruence][property]") {
  std::mt19937 rng(5150);
  auto random_parity = [&]() {
    switch (rng() % 4) {
      case 0: return Parity::Bottom;
      case 1: return Parity::Even;
      case 2: return Parity::Odd;
      default: return Parity::Top;
    }
  };
  std::vector<std::string> vars{"x", "y", "z"};
  for (int iter = 0; iter < 300; ++iter) {
    CongruenceState a, b;
    for (const auto& v : vars) {
      Parity pa = random_parity();
      parity_set(a, v, pa);
      parity_set(b, v, parity_join(pa, random_parity()));  // ensure a <= b
    }
    REQUIRE(congruence_leq(a, b));
    Edge e;
    if (rng() % 2) {
      e.kind = EdgeKind::Assign;
      e.target = vars[rng() % vars.size()];
      e.rhs = lin({{vars[rng() % vars.size()], static_cast<int>(rng() % 3)}},
                  static_cast<int>(rng() % 5));
    } else {
      e.kind = EdgeKind::Assume;
      e.guard = f_atom(atom_eq0(lin({{vars[rng() % vars.size()], 1}},
                                    -static_cast<int>(rng() % 5))));
    }
    CHECK(congruence_leq(congruence_transfer(a, e), congruence_transfer(b, e)));
  }
}

TEST_CASE("parity constraints encode even and odd, integer mode only", "[congruence]") {
  CongruenceState s;
  parity_set(s, "x", Parity::Odd);
  parity_set(s, "y", Parity::Even);
  parity_set(s, "z", Parity::Top);
  int fresh = 0;
  auto atoms = parity_constraints(s, true, fresh);
  REQUIRE(atoms.size() == 2);
  CHECK(fresh == 2);
  // Distinct auxiliaries.
  std::set<VarId> auxes;
  for (const auto& a : atoms) {
    CHECK(a.rel == Rel::Eq);
    for (const auto& [v, c] : a.expr.coeffs())
      if (v.role == VarRole::Auxiliary) auxes.insert(v);
  }
  CHECK(auxes.size() == 2);
  // x odd: satisfied by x=5,k=2; violated by x=4.
  const Atom& odd = atoms[0];
  Model m;
  m.numeric[in_var("x")] = Rational(5);
  for (const auto& v : auxes) m.numeric[v] = Rational(2);
  CHECK(evaluate(f_atom(odd), m));
  int throw_fresh = 0;
  CHECK_THROWS_AS(parity_constraints(s, false, throw_fresh), EngineBug);
}

TEST_CASE("refine_from_bounds pins singleton intervals", "[congruence]") {
  auto x = T({{"x", 1}});
  auto nx = T({{"x", -1}});
  CongruenceState s;

  auto pinned = make_state(0, {{x, 2}, {nx, -2}});  // x in [2,2]
  CHECK(parity_get(refine_from_bounds(s, *pinned), "x") == Parity::Even);

  auto loose = make_state(0, {{x, 5}});  // only an upper bound
  CHECK(parity_get(refine_from_bounds(s, *loose), "x") == Parity::Top);

  auto empty = make_state(0, {{x, 1}, {nx, -2}});  // x in [2,1]
  CHECK(parity_get(refine_from_bounds(s, *empty), "x") == Parity::Bottom);
}

TEST_CASE("parity tightening rounds bounds to the known parity", "[congruence]") {
  CHECK(parity_tighten_bound(Rational(7), Parity::Even) == 6);
  CHECK(parity_tighten_bound(Rational(6), Parity::Even) == 6);
  CHECK(parity_tighten_bound(Rational(7), Parity::Odd) == 7);
  CHECK(parity_tighten_bound(Rational(15) / Rational(2), Parity::Odd) == 7);
  CHECK(parity_tighten_bound(Rational(-3), Parity::Even) == -4);
  CHECK(parity_tighten_bound(Rational(9), Parity::Top) == 9);
}

TEST_CASE("interval and octagon presets over live variables", "[templates]") {
  TemplatePolicyConfig cfg;
  std::set<std::string> two{"x", "y"};
  CHECK(preset_templates(two, cfg).size() == 4);
  CHECK(preset_templates({}, cfg).empty());

  cfg.preset = DomainPreset::Octagons;
  auto oct = preset_templates(two, cfg);
  CHECK(oct.size() == 8);
  CHECK(oct.count(T({{"x", 1}, {"y", -1}})) == 1);
  CHECK(oct.count(T({{"x", -1}, {"y", -1}})) == 1);

  cfg.preset = DomainPreset::Rich;
  auto rich = preset_templates(two, cfg);
  CHECK(rich.size() == 16);
  CHECK(rich.count(T({{"x", 2}, {"y", -1}})) == 1);
  CHECK(rich.count(T({{"x", -1}, {"y", 2}})) == 1);

  auto rich3 = preset_templates({"x", "y", "z"}, cfg);
  CHECK(rich3.count(T({{"x", 1}, {"y", -1}, {"z", 1}})) == 1);
  CHECK(rich3.count(T({{"x", 2}, {"y", 1}, {"z", -1}})) == 1);

  // Preset monotonicity per node.
  TemplatePolicyConfig ic, oc, rc;
  oc.preset = DomainPreset::Octagons;
  rc.preset = DomainPreset::Rich;
  auto i = preset_templates(two, ic), o = preset_templates(two, oc), r = preset_templates(two, rc);
  CHECK(std::includes(o.begin(), o.end(), i.begin(), i.end()));
  CHECK(std::includes(r.begin(), r.end(), o.begin(), o.end()));
}

TEST_CASE("rich preset degrades to octagons past the variable limit", "[templates]") {
  TemplatePolicyConfig cfg;
  cfg.preset = DomainPreset::Rich;
  cfg.rich_var_limit = 3;
  std::set<std::string> four{"a", "b", "c", "d"};
  TemplatePolicyConfig oct;
  oct.preset = DomainPreset::Octagons;
  CHECK(preset_templates(four, cfg) == preset_templates(four, oct));
}
