#pragma once

#include <cstddef>
#include <vector>

namespace btconv {

// Directed graph with sorted, duplicate-free successor lists.
struct Digraph {
  std::vector<std::vector<std::size_t>> successors;

  explicit Digraph(std::size_t n = 0) : successors(n) {}
  std::size_t size() const { return successors.size(); }
  void add_edge(std::size_t u, std::size_t v);
  bool has_edge(std::size_t u, std::size_t v) const;
  std::size_t edge_count() const;
  void normalize();  // sort and deduplicate successor lists
};

struct Condensation {
  std::vector<std::vector<std::size_t>> classes;  // members ascending; classes ordered by smallest member
  std::vector<std::size_t> class_of;
  Digraph dag;                                    // class edges, no self loops
  std::vector<std::size_t> sinks;                 // classes without outgoing edges, ascending

  std::size_t size() const { return classes.size(); }
};

// Strongly connected components (iterative Tarjan) and their quotient.
Condensation condense(const Digraph& g);

// Forward closure of the seed vertices, ascending.
std::vector<std::size_t> forward_closure(const Digraph& g, const std::vector<std::size_t>& seed);

bool is_acyclic(const Digraph& g);

}  // namespace btconv
