#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "btconv/prepares.hpp"

namespace btconv {

struct LibraryAction {
  std::string id;
  Region success;
  Region failure;
  SuccessorMap controller;
  std::optional<Doa> doa;
  std::vector<std::string> preconditions;  // C_i, in tick order
};

struct LibraryCondition {
  std::string id;
  Region success;
  Region failure;
  std::vector<std::string> achievers;  // A_i, in tick order
};

struct Library {
  World world;
  std::vector<LibraryAction> actions;
  std::vector<LibraryCondition> conditions;

  bool is_action(const std::string& id) const;
  bool is_condition(const std::string& id) const;
  const LibraryAction& action(const std::string& id) const;
  const LibraryCondition& condition(const std::string& id) const;
};

// Structural checks: unique and disjoint ids, resolvable references,
// pairwise disjoint precondition and achiever lists. Throws ValidationError.
void validate_library_structure(const Library& lib);

struct LibraryIssue {
  std::string clause;
  std::string id;
  std::optional<CellId> witness;
};

// Region-level library invariants (preconditions meet at the DOA, achievers
// succeed inside their postcondition, conditions never run).
std::vector<LibraryIssue> library_issues(const Library& lib);

struct BcbtOptions {
  // Keep a one-child fallback around conditions without achievers instead
  // of inserting the bare condition.
  bool wrap_bare_conditions = false;
};

BTModel build_bcbt(const Library& lib, const std::string& root_action, const BcbtOptions& opts = {});

struct Link {
  std::string achiever;   // a
  std::string condition;  // b
  std::string consumer;   // c
  friend bool operator==(const Link&, const Link&) = default;
  friend auto operator<=>(const Link&, const Link&) = default;
};

struct LinkStructure {
  std::vector<Link> links;
  std::vector<std::string> action_ids;  // index space of `order`
  Relation order;                       // a <=_lambda c
  std::map<std::string, std::vector<Link>> related;        // lambda_i
  std::map<std::string, std::vector<std::string>> post;    // C_i^Post
  std::map<std::string, std::vector<std::string>> acc;     // C_i^ACC

  bool precedes(const std::string& a, const std::string& c) const;
};

LinkStructure compute_links(const Library& lib);

// Violated clauses of the backchaining assumption for the given root.
std::vector<LibraryIssue> bcbt_assumption_issues(const Library& lib, const LinkStructure& links,
                                                 const std::string& root_action);

// Influence region of an action in the generated tree, from library data only.
Region bc_influence(const Library& lib, const LinkStructure& links, const std::string& action);

struct BcMetadata {
  std::map<std::string, Metadata> action_subtree;     // T_p(i), i an action
  std::map<std::string, Metadata> condition_subtree;  // T_p(j), j a condition
};

// Mutual recursion over action and condition sub-trees reachable from root.
BcMetadata bc_metadata(const Library& lib, const std::string& root_action);

// Vertex of the sub-tree that the recursion attributes to a library id.
VertexId subtree_vertex(const BTModel& m, const Library& lib, const std::string& id);

struct BcOperatingVerdict {
  bool ok = true;
  std::vector<LibraryIssue> failures;
};

BcOperatingVerdict verify_bc_operating(const Library& lib, const LinkStructure& links, const BTModel& m,
                                       const NodeAnalysis& a);

struct BcConvergenceOptions {
  ConvergenceOptions convergence;
  bool strict = true;  // throw when the DOA hypothesis fails
};

struct BcConvergenceVerdict {
  std::vector<LibraryIssue> library_issues;
  std::vector<LibraryIssue> assumption_issues;
  std::vector<LibraryIssue> hypothesis_issues;  // B_i not inside the ACC success regions
  BehaviorGraph behavior;
  std::vector<std::pair<std::string, std::string>> edge_violations;     // behavior edges outside the pattern
  std::vector<std::pair<std::string, std::string>> closure_violations;  // strict closure pairs outside it
  std::optional<ConvergenceResult> convergence;

  bool pattern_holds() const { return edge_violations.empty(); }
};

BcConvergenceVerdict check_bc_convergence(const Library& lib, const BTModel& m, const BcConvergenceOptions& opts = {});

}  // namespace btconv
