#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "lpi/cfa.hpp"
#include "lpi/tcd_domain.hpp"

namespace lpi {

enum class DomainPreset { Intervals, Octagons, Rich };

struct TemplatePolicyConfig {
  DomainPreset preset = DomainPreset::Intervals;
  bool from_assertions = false;
  // Rich triples are cubic in the number of variables; above this many live
  // variables a node degrades to the octagon set.
  size_t rich_var_limit = 8;
};

namespace detail {

inline Template tmpl(std::initializer_list<std::pair<std::string, int>> terms) {
  LinearExpr e;
  for (const auto& [v, c] : terms) e.add_term(in_var(v), Rational(c));
  return Template::of(e);
}

}  // namespace detail

// Bound templates hold context established upstream (e.g. a counter's bound
// after its loop has finished), so each node sees the variables live there or
// at any node that can reach it, rather than plain backward liveness which
// would drop a variable the moment its last read passes.
inline std::map<int, std::set<std::string>> cumulative_live(
    const Cfa& cfa, const std::map<int, std::set<std::string>>& live) {
  // reach[n] = live-in sets of all ancestors of n, folded in; propagate along
  // edges until stable.
  std::map<int, std::set<std::string>> out = live;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& e : cfa.edges) {
      auto it = out.find(e.from);
      if (it == out.end()) continue;
      auto& dst = out[e.to];
      for (const auto& v : it->second) changed |= dst.insert(v).second;
    }
  }
  return out;
}

inline std::set<Template> preset_templates(const std::set<std::string>& vars,
                                           const TemplatePolicyConfig& cfg) {
  using detail::tmpl;
  std::set<Template> out;
  for (const auto& x : vars) {
    out.insert(tmpl({{x, 1}}));
    out.insert(tmpl({{x, -1}}));
  }
  if (cfg.preset == DomainPreset::Intervals) return out;
  std::vector<std::string> vs(vars.begin(), vars.end());
  for (size_t i = 0; i < vs.size(); ++i)
    for (size_t j = i + 1; j < vs.size(); ++j)
      for (int sx : {1, -1})
        for (int sy : {1, -1}) out.insert(tmpl({{vs[i], sx}, {vs[j], sy}}));
  if (cfg.preset == DomainPreset::Octagons || vars.size() > cfg.rich_var_limit) return out;
  for (size_t i = 0; i < vs.size(); ++i)
    for (size_t j = 0; j < vs.size(); ++j) {
      if (i == j) continue;
      for (int sx : {2, -2})
        for (int sy : {1, -1}) out.insert(tmpl({{vs[i], sx}, {vs[j], sy}}));
    }
  for (size_t i = 0; i < vs.size(); ++i)
    for (size_t j = i + 1; j < vs.size(); ++j)
      for (size_t k = j + 1; k < vs.size(); ++k)
        for (int sx : {1, -1})
          for (int sy : {1, -1})
            for (int sz : {1, -1}) {
              out.insert(tmpl({{vs[i], sx}, {vs[j], sy}, {vs[k], sz}}));
              for (size_t dbl : {i, j, k}) {
                int cx = static_cast<int>(dbl == i ? 2 * sx : sx);
                int cy = static_cast<int>(dbl == j ? 2 * sy : sy);
                int cz = static_cast<int>(dbl == k ? 2 * sz : sz);
                out.insert(tmpl({{vs[i], cx}, {vs[j], cy}, {vs[k], cz}}));
              }
            }
  return out;
}

namespace detail {

inline std::set<Template> guard_templates(const Formula& guard) {
  std::set<Template> out;
  std::vector<Atom> atoms;
  collect_atoms(guard, atoms);
  for (const Atom& a : atoms) {
    if (a.expr.coeffs().empty()) continue;
    LinearExpr neg = a.expr;
    neg *= Rational(-1);
    out.insert(Template::of(a.expr));
    out.insert(Template::of(neg));
  }
  return out;
}

inline std::set<int> can_reach(const Cfa& cfa, int node) {
  std::set<int> seen{node};
  std::vector<int> stack{node};
  while (!stack.empty()) {
    int n = stack.back();
    stack.pop_back();
    for (const auto& e : cfa.edges)
      if (e.to == n && seen.insert(e.from).second) stack.push_back(e.from);
  }
  return seen;
}

}  // namespace detail

// One +e/-e pair per linear atom of each assertion's error guard. Negation
// closure makes the choice of guard polarity irrelevant.
inline std::set<Template> templates_from_assertions(const Cfa& cfa) {
  std::set<Template> out;
  for (const auto& e : cfa.edges) {
    if (!e.assertion) continue;
    auto ts = detail::guard_templates(e.guard);
    out.insert(ts.begin(), ts.end());
  }
  return out;
}

inline std::map<int, std::set<Template>> synthesize(
    const Cfa& cfa, const std::map<int, std::set<std::string>>& live,
    const TemplatePolicyConfig& cfg) {
  std::map<int, std::set<Template>> out;
  for (int n = 0; n < cfa.num_nodes; ++n) {
    std::set<std::string> vars;
    if (auto it = live.find(n); it != live.end()) vars = it->second;
    out[n] = preset_templates(vars, cfg);
  }
  if (cfg.from_assertions) {
    // Attach each assertion's templates to every node that can reach it.
    for (const auto& e : cfa.edges) {
      if (!e.assertion) continue;
      auto ts = detail::guard_templates(e.guard);
      for (int n : detail::can_reach(cfa, e.from)) out[n].insert(ts.begin(), ts.end());
    }
  }
  return out;
}

}  // namespace lpi
