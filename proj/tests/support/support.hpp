#pragma once

// Shared generators and brute-force oracles for the test suites. Oracles
// re-derive each quantity from its definition, cell by cell or pair by pair,
// without calling the library routine they check.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "btconv/backchain.hpp"
#include "btconv/spec_io.hpp"
#include "btconv/substitution.hpp"

namespace btconv::testing {

using Rng = std::mt19937_64;

// BTCONV_RNG_SEED if set, else a fixed default.
std::uint64_t base_seed();
// Independent stream per suite so adding cases to one suite leaves the
// others unchanged.
Rng make_rng(const std::string& suite);
std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi);
bool coin(Rng& rng, double p);
Region random_region(Rng& rng, std::size_t cells, double p);

std::string model_path(const std::string& name);
SpecDocument load_model(const std::string& name);

// --- random trees -----------------------------------------------------------

struct RandomTreeOptions {
  std::size_t max_depth = 4;
  std::size_t max_leaves = 8;
  std::size_t max_cells = 64;
  double condition_share = 0.3;
};

// Arbitrary shape, arbitrary disjoint leaf regions, random controllers on a
// plain (neighbor-free) world. Leaves are named l0.., composites c0...
BTModel random_tree(Rng& rng, const RandomTreeOptions& opts = {});

// --- tree oracles -------------------------------------------------------------

// Status of vertex v at x from the Sequence/Fallback case cascades.
Status oracle_status(const BTModel& m, VertexId v, CellId x);
// Every vertex the cascade evaluates at x, in evaluation order.
std::vector<VertexId> oracle_ticked(const BTModel& m, CellId x);
// Cells where v is evaluated.
Region oracle_influence(const BTModel& m, VertexId v);
// Cells where v is evaluated and the resolved leaf lies in v's subtree, so
// nothing outside v runs afterwards and the root reports v's status.
Region oracle_operating(const BTModel& m, VertexId v);
bool in_subtree(const BTModel& m, VertexId top, VertexId v);

// --- relations and graphs -------------------------------------------------------

Relation oracle_closure(const Relation& r);  // Warshall, reflexive
std::vector<std::vector<bool>> oracle_reachability(const Digraph& g);  // reflexive
Digraph random_digraph(Rng& rng, std::size_t n, double p);

// --- prepares graph ---------------------------------------------------------------

// Pair scan over coordinates or adjacency.
bool oracle_neighboring(const Region& a, const Region& b, const World& w, double delta);
// The six edge rules over every ordered pair of g's vertices.
Digraph oracle_prepares_edges(const BTModel& m, const PreparesGraph& g);

// Prepares vertex holding cell x, or size() if none.
std::size_t vertex_of_cell(const PreparesGraph& g, CellId x);

// --- libraries ------------------------------------------------------------------

// Random library satisfying the region invariants and the backchaining
// assumption (single achiever, achiever-less conditions never fail). Actions
// are named a0.., conditions k0..; the root is a0.
Library random_library(Rng& rng, std::size_t max_cells = 48);

// --- substitution -----------------------------------------------------------------

struct RandomSubstitution {
  BTModel old;
  SubstitutionSpec spec;
};

// Fal[TD, MB] inside a small random tree plus a spec meeting the four
// containment conditions.
RandomSubstitution random_substitution(Rng& rng);

}  // namespace btconv::testing
