#pragma once

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lpi/cfa.hpp"

namespace lpi {

// Loop heads as back-edge targets under depth-first order with source-order
// edge traversal. The frontend only builds reducible graphs; the acyclicity
// of the remainder is still verified to guard hand-written automata.
inline std::set<int> loop_heads(const Cfa& cfa) {
  std::set<int> heads;
  std::vector<int> state(static_cast<size_t>(cfa.num_nodes), 0);  // 0 new, 1 on stack, 2 done
  std::function<void(int)> dfs = [&](int n) {
    state[static_cast<size_t>(n)] = 1;
    for (const Edge* e : cfa.out_edges(n)) {
      int m = e->to;
      if (state[static_cast<size_t>(m)] == 0)
        dfs(m);
      else if (state[static_cast<size_t>(m)] == 1)
        heads.insert(m);
    }
    state[static_cast<size_t>(n)] = 2;
  };
  dfs(cfa.entry);

  // Removing the heads must leave the graph acyclic.
  std::vector<int> color(static_cast<size_t>(cfa.num_nodes), 0);
  std::function<void(int)> check = [&](int n) {
    color[static_cast<size_t>(n)] = 1;
    for (const Edge* e : cfa.out_edges(n)) {
      int m = e->to;
      if (heads.count(m)) continue;
      if (color[static_cast<size_t>(m)] == 1)
        throw std::runtime_error("irreducible control flow: cycle avoids all loop heads");
      if (color[static_cast<size_t>(m)] == 0) check(m);
    }
    color[static_cast<size_t>(n)] = 2;
  };
  for (int n = 0; n < cfa.num_nodes; ++n)
    if (color[static_cast<size_t>(n)] == 0) check(n);
  return heads;
}

// Hierarchical weak topological ordering (Bourdoncle's recursive algorithm).
struct WtoElem {
  int node = -1;
  bool is_component = false;
  std::vector<WtoElem> body;  // component members after the head
};
using Wto = std::vector<WtoElem>;

namespace detail {

class WtoBuilder {
 public:
  explicit WtoBuilder(const Cfa& cfa)
      : cfa_(cfa), dfn_(static_cast<size_t>(cfa.num_nodes), 0) {}

  Wto build() {
    Wto partition;
    visit(cfa_.entry, partition);
    std::reverse(partition.begin(), partition.end());
    return partition;
  }

 private:
  const Cfa& cfa_;
  std::vector<long> dfn_;
  long num_ = 0;
  std::vector<int> stack_;
  static constexpr long kDone = std::numeric_limits<long>::max();

  // Returns the lowest DFS number reachable; appends elements in reverse.
  long visit(int v, Wto& partition) {
    stack_.push_back(v);
    long head = dfn_[static_cast<size_t>(v)] = ++num_;
    bool loop = false;
    for (const Edge* e : cfa_.out_edges(v)) {
      int w = e->to;
      long min = dfn_[static_cast<size_t>(w)] == 0 ? visit(w, partition)
                                                   : dfn_[static_cast<size_t>(w)];
      if (min <= head) {
        head = min;
        loop = true;
      }
    }
    if (head == dfn_[static_cast<size_t>(v)]) {
      dfn_[static_cast<size_t>(v)] = kDone;
      int element = stack_.back();
      stack_.pop_back();
      if (loop) {
        while (element != v) {
          dfn_[static_cast<size_t>(element)] = 0;
          element = stack_.back();
          stack_.pop_back();
        }
        partition.push_back(component(v));
      } else {
        WtoElem el;
        el.node = v;
        partition.push_back(el);
      }
    }
    return head;
  }

  WtoElem component(int v) {
    Wto body;
    for (const Edge* e : cfa_.out_edges(v)) {
      int w = e->to;
      if (dfn_[static_cast<size_t>(w)] == 0) visit(w, body);
    }
    std::reverse(body.begin(), body.end());
    WtoElem el;
    el.node = v;
    el.is_component = true;
    el.body = std::move(body);
    return el;
  }
};

inline void flatten_into(const Wto& wto, std::vector<int>& out) {
  for (const auto& el : wto) {
    out.push_back(el.node);
    if (el.is_component) flatten_into(el.body, out);
  }
}

inline void members_into(const WtoElem& el, std::set<int>& out) {
  out.insert(el.node);
  for (const auto& c : el.body) members_into(c, out);
}

inline void collect_components(const Wto& wto, std::map<int, std::set<int>>& out) {
  for (const auto& el : wto) {
    if (!el.is_component) continue;
    std::set<int> members;
    members_into(el, members);
    out[el.node] = std::move(members);
    collect_components(el.body, out);
  }
}

}  // namespace detail

inline Wto weak_topological_order(const Cfa& cfa) { return detail::WtoBuilder(cfa).build(); }

inline std::vector<int> wto_flatten(const Wto& wto) {
  std::vector<int> out;
  detail::flatten_into(wto, out);
  return out;
}

// head -> all nodes of its component, nested components included.
inline std::map<int, std::set<int>> wto_components(const Wto& wto) {
  std::map<int, std::set<int>> out;
  detail::collect_components(wto, out);
  return out;
}

inline std::string wto_str(const Wto& wto) {
  std::ostringstream os;
  std::function<void(const Wto&)> rec = [&](const Wto& part) {
    for (size_t i = 0; i < part.size(); ++i) {
      if (i) os << " ";
      const auto& el = part[i];
      if (el.is_component) {
        os << "(" << el.node;
        if (!el.body.empty()) {
          os << " ";
          rec(el.body);
        }
        os << ")";
      } else {
        os << el.node;
      }
    }
  };
  rec(wto);
  return os.str();
}

// Backward may-liveness. Reads come from guards and assignment right sides;
// frame equalities neither read nor write.
inline std::map<int, std::set<std::string>> live_variables(const Cfa& cfa) {
  std::map<int, std::set<std::string>> live;
  for (int n = 0; n < cfa.num_nodes; ++n) live[n] = {};
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto it = cfa.edges.rbegin(); it != cfa.edges.rend(); ++it) {
      const Edge& e = *it;
      std::set<std::string> flow = live[e.to];
      for (const auto& w : cfa.written_vars(e)) flow.erase(w);
      for (const auto& r : cfa.read_vars(e)) flow.insert(r);
      auto& dst = live[e.from];
      size_t before = dst.size();
      dst.insert(flow.begin(), flow.end());
      if (dst.size() != before) changed = true;
    }
  }
  return live;
}

// Peel the first `depth` iterations of every loop into acyclic copies feeding
// the original loop. Copies of nested loop heads remain loop heads; the
// peeled heads themselves do not cycle and are not heads.
inline Cfa unroll(const Cfa& cfa, int depth) {
  Cfa out = cfa;
  if (depth <= 0) return out;
  std::vector<int> heads(out.loop_heads.begin(), out.loop_heads.end());
  // Outer loops first: order heads by WTO position.
  {
    std::vector<int> flat = wto_flatten(weak_topological_order(out));
    std::map<int, size_t> pos;
    for (size_t i = 0; i < flat.size(); ++i) pos[flat[i]] = i;
    std::sort(heads.begin(), heads.end(), [&](int a, int b) { return pos[a] < pos[b]; });
  }

  for (int h : heads) {
    // True back edges into h on the current graph: target on the DFS stack.
    std::set<int> back_srcs;
    {
      std::vector<int> state(static_cast<size_t>(out.num_nodes), 0);
      std::function<void(int)> dfs = [&](int n) {
        state[static_cast<size_t>(n)] = 1;
        for (const Edge* e : out.out_edges(n)) {
          if (state[static_cast<size_t>(e->to)] == 0)
            dfs(e->to);
          else if (state[static_cast<size_t>(e->to)] == 1 && e->to == h)
            back_srcs.insert(e->from);
        }
        state[static_cast<size_t>(n)] = 2;
      };
      dfs(out.entry);
    }
    if (back_srcs.empty()) continue;
    // Natural loop: h plus nodes reaching a back-edge source without crossing h.
    std::set<int> loop{h};
    {
      std::vector<int> work(back_srcs.begin(), back_srcs.end());
      for (int s : work) loop.insert(s);
      while (!work.empty()) {
        int n = work.back();
        work.pop_back();
        if (n == h) continue;
        for (const Edge* e : out.in_edges(n)) {
          if (loop.count(e->from)) continue;
          loop.insert(e->from);
          work.push_back(e->from);
        }
      }
    }

    // Fresh copies loop^1 .. loop^depth.
    std::vector<std::map<int, int>> copy(static_cast<size_t>(depth));
    for (int k = 0; k < depth; ++k) {
      for (int n : loop) {
        copy[static_cast<size_t>(k)][n] =
            out.add_node(out.node_desc[static_cast<size_t>(n)] + " (peel " +
                         std::to_string(k + 1) + ")");
        if (n != h && out.loop_heads.count(n))
          out.loop_heads.insert(copy[static_cast<size_t>(k)][n]);
      }
    }
    std::vector<Edge> fresh;
    for (const auto& e : out.edges) {
      bool from_in = loop.count(e.from) > 0;
      if (!from_in) continue;
      bool is_back = e.to == h;
      for (int k = 0; k < depth; ++k) {
        Edge c = e;
        c.from = copy[static_cast<size_t>(k)].at(e.from);
        if (is_back) {
          c.to = k + 1 < depth ? copy[static_cast<size_t>(k + 1)].at(h) : h;
        } else if (loop.count(e.to)) {
          c.to = copy[static_cast<size_t>(k)].at(e.to);
        }
        fresh.push_back(std::move(c));
      }
    }
    // Entry edges from outside the loop now feed the first copy.
    for (auto& e : out.edges)
      if (e.to == h && !loop.count(e.from)) e.to = copy[0].at(h);
    for (auto& e : fresh) {
      e.order = static_cast<int>(out.edges.size());
      out.edges.push_back(std::move(e));
    }
  }
  return out;
}

inline std::string edge_label(const Edge& e) {
  switch (e.kind) {
    case EdgeKind::Assign: return e.target + " := " + e.rhs.str();
    case EdgeKind::Havoc: return e.target + " := nondet()";
    case EdgeKind::Assume: return "[" + formula_str(e.guard) + "]";
  }
  return "?";
}

inline std::string to_dot(const Cfa& cfa) {
  std::ostringstream os;
  os << "digraph cfa {\n";
  for (int n = 0; n < cfa.num_nodes; ++n) {
    os << "  n" << n << " [label=\"" << n << ": " << cfa.node_desc[static_cast<size_t>(n)]
       << "\"";
    if (cfa.loop_heads.count(n)) os << " shape=doublecircle";
    if (cfa.error && *cfa.error == n) os << " shape=box color=red";
    os << "];\n";
  }
  for (const auto& e : cfa.edges) {
    os << "  n" << e.from << " -> n" << e.to << " [label=\"" << edge_label(e);
    if (e.assertion) os << " (assert " << e.assertion->id << ")";
    os << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace lpi
