#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "btconv/prepares.hpp"

namespace btconv {

// Base world times a saturating time counter {0..time_cap} and a hysteresis
// counter {0..hyst_cap}. Metric coordinates and adjacency come from the base
// cell only, so counter changes never move a cell away from its neighbors.
class AugmentedWorld {
 public:
  AugmentedWorld(const World& base, std::size_t time_cap, std::size_t hyst_cap);

  const World& world() const { return world_; }
  std::size_t base_cells() const { return base_cells_; }
  std::size_t time_cap() const { return time_cap_; }
  std::size_t hyst_cap() const { return hyst_cap_; }

  CellId index(CellId base, std::size_t t, std::size_t h) const;
  CellId base_of(CellId c) const { return c / ((time_cap_ + 1) * (hyst_cap_ + 1)); }
  std::size_t time_of(CellId c) const { return (c / (hyst_cap_ + 1)) % (time_cap_ + 1); }
  std::size_t hyst_of(CellId c) const { return c % (hyst_cap_ + 1); }

  Region lift(const Region& base) const;
  Region project(const Region& aug) const;
  // Base successor map with the counter dynamics: time saturates at the cap,
  // hysteresis counts consecutive pre-step cells inside ok_region.
  SuccessorMap lift(const SuccessorMap& base, const Region& ok_region) const;
  Region time_below_cap() const;
  Region hyst_at_cap() const;

 private:
  World world_;
  std::size_t base_cells_;
  std::size_t time_cap_;
  std::size_t hyst_cap_;
};

struct SubstitutionSpec {
  VertexId target = 0;  // Fal[TD, MB] in the old model
  SuccessorMap dd_controller;
  Region dd_success;  // empty in a conforming spec
  Region dd_failure;
  Region rr_success;
  Region rr_failure;
  SuccessorMap rr_controller;
  std::optional<Doa> rr_doa;
  Region rok_success;
  std::size_t time_budget = 1;  // t'
  std::size_t hysteresis = 0;   // T, 0 disables the hysteresis counter
  std::string dd_name = "data_driven";
  std::string rr_name = "reduce_risk";
  std::string tok_name = "time_ok";
  std::string rok_name = "risk_ok";
};

struct SubstitutionOptions {
  // Reject specs violating the containment conditions. Off only for
  // building deliberately broken models.
  bool check_conditions = true;
};

struct SubstitutedVertices {
  VertexId subtree, td, dd_seq, tok_dd, rok, dd, rr_seq, tok_rr, rr, mb;
};

struct SubstitutionResult {
  AugmentedWorld aug;
  BTModel model;
  SubstitutedVertices v;
  std::vector<VertexId> old_to_new;  // old vertex id -> new vertex id
};

// Containment conditions the substitution violates against the old model.
std::vector<std::string> substitution_condition_violations(const BTModel& old, const SubstitutionSpec& spec);

SubstitutionResult substitute(const BTModel& old, const SubstitutionSpec& spec, const SubstitutionOptions& opts = {});

struct PreservationVerdict {
  bool ok = true;
  std::string clause;  // first failing clause
  std::string vertex;
  std::optional<CellId> witness;  // augmented cell
};

// Extensional metadata comparison of the old and new target subtrees, plus
// every other surviving vertex.
PreservationVerdict verify_preservation(const BTModel& old, const SubstitutionResult& sub);

struct ProjectedVertex {
  std::string owner;
  Flavor flavor;
  friend auto operator<=>(const ProjectedVertex&, const ProjectedVertex&) = default;
};
using ProjectedEdge = std::pair<ProjectedVertex, ProjectedVertex>;

std::vector<ProjectedEdge> project_edges(const BTModel& m, const PreparesGraph& g);
std::string to_string(const ProjectedVertex& v);

struct SubstitutedConvergenceVerdict {
  std::vector<ProjectedEdge> unexpected_edges;  // old-owner edges absent from the old graph
  std::vector<ProjectedEdge> missing_edges;     // old edges absent from the new graph, informational
  std::optional<std::size_t> loop_exit;         // exit time of the DD/RR cells
  bool loop_within_budget = false;
  bool rr_well_behaved = false;  // v_b(RR) = Omega_RR
  bool mb_well_behaved = false;  // v_b(MB) = Omega_MB
  std::optional<ConvergenceResult> convergence;

  bool ok() const {
    return unexpected_edges.empty() && loop_within_budget && rr_well_behaved && mb_well_behaved && convergence &&
           convergence->certified();
  }
};

// Throws PreconditionError naming the first edge from a DD/RR vertex that
// leaves the allowed neighborhood.
SubstitutedConvergenceVerdict verify_substituted_convergence(const BTModel& old, const ConvergenceResult& old_result,
                                                             const SubstitutionResult& sub,
                                                             const ConvergenceOptions& opts = {});

}  // namespace btconv
