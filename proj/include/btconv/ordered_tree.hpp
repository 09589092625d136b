#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "btconv/relation.hpp"

namespace btconv {

using Edge = std::pair<VertexId, VertexId>;

// Rooted tree with ordered children, held as parent edges (child, parent)
// and sibling edges (left, right). Validated on construction.
class OrderedTree {
 public:
  static OrderedTree from_edges(std::size_t vertex_count, const std::vector<Edge>& parent_edges,
                                const std::vector<Edge>& sibling_edges);
  // children[v] lists v's children left to right.
  static OrderedTree from_children(const std::vector<std::vector<VertexId>>& children);

  std::size_t size() const { return parent_.size(); }
  VertexId root() const { return root_; }
  std::optional<VertexId> parent(VertexId v) const;
  const std::vector<VertexId>& children(VertexId v) const { return children_.at(v); }
  bool is_leaf(VertexId v) const { return children_.at(v).empty(); }
  const std::vector<Edge>& parent_edges() const { return parent_edges_; }
  const std::vector<Edge>& sibling_edges() const { return sibling_edges_; }
  std::vector<VertexId> preorder() const;
  std::vector<VertexId> postorder() const;
  // All vertices of the subtree rooted at v, in preorder.
  std::vector<VertexId> subtree(VertexId v) const;

 private:
  OrderedTree() = default;

  std::vector<std::optional<VertexId>> parent_;
  std::vector<std::vector<VertexId>> children_;
  std::vector<Edge> parent_edges_;
  std::vector<Edge> sibling_edges_;
  VertexId root_ = 0;
};

// All order relations on an ordered tree. Pairs read left to right:
// parent_order.contains(a, d) means a <=_P d, i.e. a is an ancestor-or-self of d.
struct TreeOrders {
  Relation parent_order;   // <=_P
  Relation sibling_order;  // <=_S
  Relation left_uncle;     // <_LU  = <_S o <=_P
  Relation right_uncle;    // >_RU  = >_S o <=_P
  Relation left_to_right;  // <_LR  = >=_P o <_LU
  Relation right_to_left;  // >_RL  = >=_P o >_RU
  std::vector<std::optional<VertexId>> parent_map;
};

TreeOrders derive_orders(const OrderedTree& tree);

}  // namespace btconv
