#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "btconv/model.hpp"

namespace btconv {

struct Metadata {
  Region running;
  Region success;
  Region failure;
};

// Bottom-up running/success/failure regions for every vertex.
std::vector<Metadata> propagate_metadata(const BTModel& m);

struct TickResult {
  VertexId leaf;
  Status status;
  std::vector<VertexId> path;  // from the evaluated root down to leaf
};

// Resolves the sequence/fallback cascade at cell x, evaluating the subtree
// rooted at `from` (the whole tree by default).
TickResult tick(const BTModel& m, CellId x);
TickResult tick(const BTModel& m, CellId x, VertexId from);

struct Pathways {
  VertexSet success;  // no right uncle with a sequence parent
  VertexSet failure;  // no right uncle with a fallback parent
};

std::vector<Region> influence_regions(const BTModel& m, const TreeOrders& orders,
                                      const std::vector<Metadata>& meta);
Pathways pathways(const BTModel& m, const TreeOrders& orders);
std::vector<Region> operating_regions(const BTModel& m, const std::vector<Metadata>& meta,
                                      const std::vector<Region>& influence, const Pathways& paths);

struct NodeAnalysis {
  TreeOrders orders;
  std::vector<Metadata> metadata;
  std::vector<Region> influence;
  Pathways paths;
  std::vector<Region> operating;

  const Region& omega(VertexId v) const { return operating.at(v); }
  bool in_success_pathway(VertexId v) const { return paths.success.contains(v); }
  bool in_failure_pathway(VertexId v) const { return paths.failure.contains(v); }
};

NodeAnalysis analyze(const BTModel& m);

struct AbstractionVerdict {
  bool valid = true;
  std::vector<std::pair<VertexId, VertexId>> overlaps;
  Region uncovered;
};

AbstractionVerdict validate_abstraction(const BTModel& m, const NodeAnalysis& a,
                                        const std::vector<VertexId>& P);

}  // namespace btconv
