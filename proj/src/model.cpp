#include "btconv/model.hpp"

#include <set>

namespace btconv {

const char* to_string(NodeKind k) {
  switch (k) {
    case NodeKind::Sequence: return "sequence";
    case NodeKind::Fallback: return "fallback";
    case NodeKind::Action: return "action";
    case NodeKind::Condition: return "condition";
  }
  return "?";
}

const char* to_string(Status s) {
  switch (s) {
    case Status::Running: return "running";
    case Status::Success: return "success";
    case Status::Failure: return "failure";
  }
  return "?";
}

BTModel::BTModel(World world, OrderedTree tree, std::vector<Node> nodes)
    : world_(std::move(world)), tree_(std::move(tree)), nodes_(std::move(nodes)) {
  if (nodes_.size() != tree_.size())
    throw ValidationError("model: " + std::to_string(nodes_.size()) + " node records for a tree of " +
                          std::to_string(tree_.size()) + " vertices");
  const std::size_t n = world_.cell_count();
  std::set<std::string> names;
  for (VertexId v = 0; v < nodes_.size(); ++v) {
    Node& nd = nodes_[v];
    if (nd.name.empty()) nd.name = std::string(to_string(nd.kind)) + "@" + std::to_string(v);
    const std::string where = "node '" + nd.name + "'";
    if (!names.insert(nd.name).second) throw ValidationError(where + ": duplicate node name");
    const bool composite = nd.kind == NodeKind::Sequence || nd.kind == NodeKind::Fallback;
    if (composite) {
      if (tree_.is_leaf(v)) throw ValidationError(where + ": composite node without children");
      if (nd.controller) throw ValidationError(where + ": composite nodes carry no controller");
      nd.success = Region(n);
      nd.failure = Region(n);
    } else {
      if (!tree_.is_leaf(v)) throw ValidationError(where + ": leaf kind with children");
      if (nd.success.size() != n || nd.failure.size() != n)
        throw ValidationError(where + ": leaf regions not over the model universe");
      if (nd.success.intersects(nd.failure))
        throw ValidationError(where + ": success and failure regions overlap at cell " +
                              std::to_string((nd.success & nd.failure).first()));
      if (nd.kind == NodeKind::Condition) {
        if (nd.controller) throw ValidationError(where + ": condition nodes carry no controller");
        const Region gap = (nd.success | nd.failure).complement();
        if (!gap.empty())
          throw ValidationError(where + ": condition has a running cell " + std::to_string(gap.first()));
      } else {
        if (!nd.controller) throw ValidationError(where + ": action without controller");
        validate_map(world_, *nd.controller, where);
      }
    }
    if (nd.doa) {
      if (nd.doa->basin.size() != n || nd.doa->goal.size() != n)
        throw ValidationError(where + ": DOA regions not over the model universe");
      if (nd.doa->tau == 0) throw ValidationError(where + ": DOA deadline must be positive");
    }
  }
}

std::optional<VertexId> BTModel::find(const std::string& name) const {
  for (VertexId v = 0; v < nodes_.size(); ++v)
    if (nodes_[v].name == name) return v;
  return std::nullopt;
}

VertexId BTModel::require(const std::string& name) const {
  if (auto v = find(name)) return *v;
  throw ValidationError("unknown node '" + name + "'");
}

std::vector<VertexId> BTModel::leaves() const {
  std::vector<VertexId> out;
  for (VertexId v = 0; v < nodes_.size(); ++v)
    if (tree_.is_leaf(v)) out.push_back(v);
  return out;
}

std::vector<VertexId> BTModel::actions() const {
  std::vector<VertexId> out;
  for (VertexId v = 0; v < nodes_.size(); ++v)
    if (nodes_[v].kind == NodeKind::Action) out.push_back(v);
  return out;
}

std::vector<const SuccessorMap*> BTModel::controllers() const {
  std::vector<const SuccessorMap*> out;
  for (const Node& nd : nodes_)
    if (nd.controller) out.push_back(&*nd.controller);
  return out;
}

BTModel BTModel::with_doa(VertexId v, Doa doa) const {
  std::vector<Node> nodes = nodes_;
  nodes.at(v).doa = std::move(doa);
  return BTModel(world_, tree_, std::move(nodes));
}

TreeBuilder::Spec TreeBuilder::seq(std::string name, std::vector<Spec> children) {
  return Spec{NodeKind::Sequence, std::move(name), std::move(children), {}};
}

TreeBuilder::Spec TreeBuilder::fal(std::string name, std::vector<Spec> children) {
  return Spec{NodeKind::Fallback, std::move(name), std::move(children), {}};
}

TreeBuilder::Spec TreeBuilder::action(std::string name, Region success, Region failure,
                                      SuccessorMap controller, std::optional<Doa> doa) {
  Node nd;
  nd.kind = NodeKind::Action;
  nd.success = std::move(success);
  nd.failure = std::move(failure);
  nd.controller = std::move(controller);
  nd.doa = std::move(doa);
  return Spec{NodeKind::Action, std::move(name), {}, std::move(nd)};
}

TreeBuilder::Spec TreeBuilder::condition(std::string name, Region success) {
  Node nd;
  nd.kind = NodeKind::Condition;
  nd.failure = success.complement();
  nd.success = std::move(success);
  return Spec{NodeKind::Condition, std::move(name), {}, std::move(nd)};
}

TreeBuilder::Spec TreeBuilder::leaf(Node node) {
  NodeKind k = node.kind;
  std::string name = node.name;
  return Spec{k, std::move(name), {}, std::move(node)};
}

namespace {

void flatten(const TreeBuilder::Spec& s, std::vector<std::vector<VertexId>>& children, std::vector<Node>& nodes) {
  const VertexId id = nodes.size();
  Node nd = s.leaf;
  nd.kind = s.kind;
  nd.name = s.name;
  nodes.push_back(std::move(nd));
  children.emplace_back();
  for (const auto& c : s.children) {
    children[id].push_back(nodes.size());
    flatten(c, children, nodes);
  }
}

}  // namespace

BTModel TreeBuilder::build(World world, const Spec& root) {
  std::vector<std::vector<VertexId>> children;
  std::vector<Node> nodes;
  flatten(root, children, nodes);
  const std::size_t n = world.cell_count();
  for (Node& nd : nodes)
    if (nd.kind == NodeKind::Sequence || nd.kind == NodeKind::Fallback) {
      nd.success = Region(n);
      nd.failure = Region(n);
    }
  return BTModel(std::move(world), OrderedTree::from_children(children), std::move(nodes));
}

}  // namespace btconv
