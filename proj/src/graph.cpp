#include "btconv/graph.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "btconv/error.hpp"

namespace btconv {

void Digraph::add_edge(std::size_t u, std::size_t v) {
  if (u >= size() || v >= size()) throw Error("edge endpoint outside graph");
  auto& s = successors[u];
  auto it = std::lower_bound(s.begin(), s.end(), v);
  if (it == s.end() || *it != v) s.insert(it, v);
}

bool Digraph::has_edge(std::size_t u, std::size_t v) const {
  const auto& s = successors.at(u);
  return std::binary_search(s.begin(), s.end(), v);
}

std::size_t Digraph::edge_count() const {
  std::size_t n = 0;
  for (const auto& s : successors) n += s.size();
  return n;
}

void Digraph::normalize() {
  for (auto& s : successors) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
  }
}

Condensation condense(const Digraph& g) {
  const std::size_t n = g.size();
  constexpr std::size_t kUnvisited = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> index(n, kUnvisited), low(n, 0), comp(n, kUnvisited);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> found;
  std::size_t counter = 0;

  struct Frame {
    std::size_t v;
    std::size_t edge;
  };
  for (std::size_t s = 0; s < n; ++s) {
    if (index[s] != kUnvisited) continue;
    std::vector<Frame> call{{s, 0}};
    index[s] = low[s] = counter++;
    stack.push_back(s);
    on_stack[s] = true;
    while (!call.empty()) {
      Frame& f = call.back();
      const auto& succ = g.successors[f.v];
      if (f.edge < succ.size()) {
        const std::size_t w = succ[f.edge++];
        if (index[w] == kUnvisited) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
        continue;
      }
      const std::size_t v = f.v;
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
      if (low[v] == index[v]) {
        std::vector<std::size_t> members;
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          members.push_back(w);
        } while (w != v);
        std::sort(members.begin(), members.end());
        found.push_back(std::move(members));
      }
    }
  }

  std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
  Condensation c;
  c.classes = std::move(found);
  c.class_of.assign(n, 0);
  for (std::size_t k = 0; k < c.classes.size(); ++k)
    for (std::size_t v : c.classes[k]) c.class_of[v] = k;
  c.dag = Digraph(c.classes.size());
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v : g.successors[u])
      if (c.class_of[u] != c.class_of[v]) c.dag.successors[c.class_of[u]].push_back(c.class_of[v]);
  c.dag.normalize();
  for (std::size_t k = 0; k < c.classes.size(); ++k)
    if (c.dag.successors[k].empty()) c.sinks.push_back(k);
  return c;
}

std::vector<std::size_t> forward_closure(const Digraph& g, const std::vector<std::size_t>& seed) {
  std::vector<bool> seen(g.size(), false);
  std::vector<std::size_t> work;
  for (std::size_t s : seed) {
    if (s >= g.size()) throw Error("seed vertex outside graph");
    if (!seen[s]) {
      seen[s] = true;
      work.push_back(s);
    }
  }
  while (!work.empty()) {
    const std::size_t u = work.back();
    work.pop_back();
    for (std::size_t v : g.successors[u])
      if (!seen[v]) {
        seen[v] = true;
        work.push_back(v);
      }
  }
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < g.size(); ++v)
    if (seen[v]) out.push_back(v);
  return out;
}

bool is_acyclic(const Digraph& g) {
  const Condensation c = condense(g);
  if (c.size() != g.size()) return false;
  for (std::size_t v = 0; v < g.size(); ++v)
    if (g.has_edge(v, v)) return false;
  return true;
}

}  // namespace btconv
