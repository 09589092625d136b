#include "btconv/ordered_tree.hpp"

#include <algorithm>
#include <set>
#include <string>

namespace btconv {

namespace {

std::string edge_str(const Edge& e) {
  return "(" + std::to_string(e.first) + "," + std::to_string(e.second) + ")";
}

}  // namespace

OrderedTree OrderedTree::from_edges(std::size_t n, const std::vector<Edge>& parent_edges,
                                    const std::vector<Edge>& sibling_edges) {
  if (n == 0) throw ValidationError("tree: vertex set is empty");
  OrderedTree t;
  t.parent_.assign(n, std::nullopt);
  t.children_.assign(n, {});

  for (const Edge& e : parent_edges) {
    if (e.first >= n || e.second >= n) throw ValidationError("tree: parent edge " + edge_str(e) + " outside vertex set");
    if (e.first == e.second) throw ValidationError("tree: vertex " + std::to_string(e.first) + " is its own parent");
    if (t.parent_[e.first])
      throw ValidationError("tree: vertex " + std::to_string(e.first) + " has more than one parent");
    t.parent_[e.first] = e.second;
  }
  std::size_t roots = 0;
  for (std::size_t v = 0; v < n; ++v)
    if (!t.parent_[v]) {
      t.root_ = v;
      ++roots;
    }
  if (roots != 1) throw ValidationError("tree: expected exactly one root, found " + std::to_string(roots));
  // Every vertex must reach the root; a cycle would make some walk exceed n steps.
  for (std::size_t v = 0; v < n; ++v) {
    std::size_t steps = 0;
    for (std::optional<VertexId> u = v; u; u = t.parent_[*u])
      if (++steps > n) throw ValidationError("tree: parent edges contain a cycle through " + std::to_string(v));
  }

  std::set<Edge> pset(parent_edges.begin(), parent_edges.end());
  for (const Edge& e : sibling_edges) {
    if (e.first >= n || e.second >= n) throw ValidationError("tree: sibling edge " + edge_str(e) + " outside vertex set");
    if (pset.count(e)) throw ValidationError("tree: edge " + edge_str(e) + " is both a parent and a sibling edge");
    if (t.parent_[e.first] != t.parent_[e.second] || !t.parent_[e.first])
      throw ValidationError("tree: sibling edge " + edge_str(e) + " joins vertices with different parents");
  }
  Relation sib = reflexive_transitive_closure(Relation::from_pairs(n, sibling_edges));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && sib.contains(i, j) && sib.contains(j, i))
        throw ValidationError("tree: sibling edges contain a cycle through " + std::to_string(i));

  std::vector<std::vector<VertexId>> kids(n);
  for (std::size_t v = 0; v < n; ++v)
    if (t.parent_[v]) kids[*t.parent_[v]].push_back(v);
  for (std::size_t p = 0; p < n; ++p) {
    auto& k = kids[p];
    for (std::size_t a = 0; a < k.size(); ++a)
      for (std::size_t b = a + 1; b < k.size(); ++b)
        if (!sib.contains(k[a], k[b]) && !sib.contains(k[b], k[a]))
          throw ValidationError("tree: children " + std::to_string(k[a]) + " and " + std::to_string(k[b]) +
                                " of " + std::to_string(p) + " are not ordered by the sibling edges");
    // With a total order, a child's rank is the number of siblings below it.
    std::vector<std::pair<std::size_t, VertexId>> ranked;
    for (VertexId c : k) {
      std::size_t below = 0;
      for (VertexId d : k)
        if (d != c && sib.contains(d, c)) ++below;
      ranked.emplace_back(below, c);
    }
    std::sort(ranked.begin(), ranked.end());
    for (auto& [rank, c] : ranked) t.children_[p].push_back(c);
  }
  t.parent_edges_ = parent_edges;
  t.sibling_edges_ = sibling_edges;
  std::sort(t.parent_edges_.begin(), t.parent_edges_.end());
  std::sort(t.sibling_edges_.begin(), t.sibling_edges_.end());
  return t;
}

OrderedTree OrderedTree::from_children(const std::vector<std::vector<VertexId>>& children) {
  std::vector<Edge> pe, se;
  for (std::size_t p = 0; p < children.size(); ++p) {
    const auto& k = children[p];
    for (std::size_t i = 0; i < k.size(); ++i) {
      pe.emplace_back(k[i], p);
      if (i + 1 < k.size()) se.emplace_back(k[i], k[i + 1]);
    }
  }
  return from_edges(children.size(), pe, se);
}

std::optional<VertexId> OrderedTree::parent(VertexId v) const { return parent_.at(v); }

std::vector<VertexId> OrderedTree::subtree(VertexId v) const {
  std::vector<VertexId> out;
  std::vector<VertexId> stack{v};
  while (!stack.empty()) {
    VertexId u = stack.back();
    stack.pop_back();
    out.push_back(u);
    const auto& k = children_[u];
    for (auto it = k.rbegin(); it != k.rend(); ++it) stack.push_back(*it);
  }
  return out;
}

std::vector<VertexId> OrderedTree::preorder() const { return subtree(root_); }

std::vector<VertexId> OrderedTree::postorder() const {
  std::vector<VertexId> out;
  std::vector<std::pair<VertexId, bool>> stack{{root_, false}};
  while (!stack.empty()) {
    auto [u, expanded] = stack.back();
    stack.pop_back();
    if (expanded) {
      out.push_back(u);
      continue;
    }
    stack.emplace_back(u, true);
    const auto& k = children_[u];
    for (auto it = k.rbegin(); it != k.rend(); ++it) stack.emplace_back(*it, false);
  }
  return out;
}

TreeOrders derive_orders(const OrderedTree& tree) {
  const std::size_t n = tree.size();
  std::vector<Edge> down;
  for (const Edge& e : tree.parent_edges()) down.emplace_back(e.second, e.first);

  TreeOrders o;
  o.parent_order = reflexive_transitive_closure(Relation::from_pairs(n, down));
  o.sibling_order = reflexive_transitive_closure(Relation::from_pairs(n, tree.sibling_edges()));
  const Relation strict_sibling = o.sibling_order.strict();
  o.left_uncle = compose(strict_sibling, o.parent_order);
  o.right_uncle = compose(strict_sibling.converse(), o.parent_order);
  const Relation descendant = o.parent_order.converse();
  o.left_to_right = compose(descendant, o.left_uncle);
  o.right_to_left = compose(descendant, o.right_uncle);
  o.parent_map.resize(n);
  for (std::size_t v = 0; v < n; ++v) o.parent_map[v] = tree.parent(v);
  return o;
}

}  // namespace btconv
