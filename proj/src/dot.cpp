#include "btconv/dot.hpp"

#include <algorithm>
#include <sstream>

namespace btconv {

namespace {

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

std::string tree_dot(const BTModel& m) {
  std::ostringstream os;
  os << "digraph tree {\n  node [fontname=\"Helvetica\"];\n";
  for (VertexId v : m.tree().preorder()) {
    os << "  n" << v << " [label=";
    switch (m.kind(v)) {
      case NodeKind::Sequence: os << quote("->") << ", shape=box"; break;
      case NodeKind::Fallback: os << quote("?") << ", shape=box"; break;
      case NodeKind::Action: os << quote(m.name(v)) << ", shape=box, style=rounded"; break;
      case NodeKind::Condition: os << quote(m.name(v)) << ", shape=ellipse"; break;
    }
    os << ", tooltip=" << quote(std::to_string(v) + " " + m.name(v)) << "];\n";
  }
  for (VertexId v : m.tree().preorder())
    for (VertexId c : m.tree().children(v)) os << "  n" << v << " -> n" << c << ";\n";
  os << "}\n";
  return os.str();
}

std::string prepares_dot(const BTModel& m, const PreparesGraph& g) {
  std::ostringstream os;
  os << "digraph prepares {\n  node [shape=box, fontname=\"Helvetica\"];\n";
  for (std::size_t v = 0; v < g.size(); ++v)
    os << "  p" << v << " [label=" << quote(g.label(m, v)) << "];\n";
  for (std::size_t u = 0; u < g.size(); ++u)
    for (std::size_t v : g.edges.successors[u]) os << "  p" << u << " -> p" << v << ";\n";
  os << "}\n";
  return os.str();
}

std::string condensed_dot(const BTModel& m, const PreparesGraph& g, const Condensation& c,
                          const std::vector<std::size_t>& analysis_classes) {
  auto in_set = [&](std::size_t k) {
    return std::binary_search(analysis_classes.begin(), analysis_classes.end(), k);
  };
  std::ostringstream os;
  os << "digraph condensed {\n  compound=true;\n  node [shape=box, fontname=\"Helvetica\"];\n";
  for (std::size_t k = 0; k < c.classes.size(); ++k) {
    const bool bold = in_set(k);
    os << "  subgraph cluster_" << k << " {\n    label=" << quote("class " + std::to_string(k)) << ";\n";
    if (bold) os << "    style=bold;\n";
    for (std::size_t v : c.classes[k]) {
      os << "    p" << v << " [label=" << quote(g.label(m, v));
      if (bold) os << ", style=bold";
      os << "];\n";
    }
    os << "  }\n";
  }
  for (std::size_t k = 0; k < c.classes.size(); ++k)
    for (std::size_t l : c.dag.successors[k])
      os << "  p" << c.classes[k].front() << " -> p" << c.classes[l].front() << " [ltail=cluster_" << k
         << ", lhead=cluster_" << l << "];\n";
  os << "}\n";
  return os.str();
}

std::string behavior_dot(const BTModel& m, const BehaviorGraph& b) {
  std::ostringstream os;
  os << "digraph behavior {\n  node [shape=box, style=rounded, fontname=\"Helvetica\"];\n";
  for (VertexId v : b.vertices) os << "  n" << v << " [label=" << quote(m.name(v)) << "];\n";
  for (auto [u, v] : b.edges) os << "  n" << u << " -> n" << v << ";\n";
  os << "}\n";
  return os.str();
}

}  // namespace btconv
