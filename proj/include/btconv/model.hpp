#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "btconv/ordered_tree.hpp"
#include "btconv/world.hpp"

namespace btconv {

enum class NodeKind { Sequence, Fallback, Action, Condition };
enum class Status { Running, Success, Failure };

const char* to_string(NodeKind k);
const char* to_string(Status s);

// Domain of attraction B, goal G and deadline tau (in steps).
struct Doa {
  Region basin;
  Region goal;
  std::size_t tau = 1;
};

struct Node {
  NodeKind kind = NodeKind::Action;
  std::string name;
  // Leaf metadata; running is the complement of success | failure.
  Region success;
  Region failure;
  std::optional<SuccessorMap> controller;  // actions only
  std::optional<Doa> doa;                  // any vertex; composites use their closed loop
};

class BTModel {
 public:
  BTModel(World world, OrderedTree tree, std::vector<Node> nodes);

  const World& world() const { return world_; }
  const OrderedTree& tree() const { return tree_; }
  std::size_t size() const { return nodes_.size(); }
  VertexId root() const { return tree_.root(); }
  const Node& node(VertexId v) const { return nodes_.at(v); }
  NodeKind kind(VertexId v) const { return nodes_.at(v).kind; }
  const std::string& name(VertexId v) const { return nodes_.at(v).name; }
  bool is_leaf(VertexId v) const { return tree_.is_leaf(v); }
  bool is_action(VertexId v) const { return kind(v) == NodeKind::Action; }
  std::optional<VertexId> find(const std::string& name) const;
  VertexId require(const std::string& name) const;

  std::vector<VertexId> leaves() const;
  std::vector<VertexId> actions() const;
  std::vector<const SuccessorMap*> controllers() const;

  // Copy with a DOA attached to (or replaced at) vertex v.
  BTModel with_doa(VertexId v, Doa doa) const;

 private:
  World world_;
  OrderedTree tree_;
  std::vector<Node> nodes_;
};

// Builds a model from nested composites, assigning preorder ids.
class TreeBuilder {
 public:
  struct Spec {
    NodeKind kind;
    std::string name;
    std::vector<Spec> children;  // composites
    Node leaf;                   // leaves; kind and name are copied in
  };

  static Spec seq(std::string name, std::vector<Spec> children);
  static Spec fal(std::string name, std::vector<Spec> children);
  static Spec action(std::string name, Region success, Region failure, SuccessorMap controller,
                     std::optional<Doa> doa = std::nullopt);
  static Spec condition(std::string name, Region success);
  static Spec leaf(Node node);

  static BTModel build(World world, const Spec& root);
};

}  // namespace btconv
