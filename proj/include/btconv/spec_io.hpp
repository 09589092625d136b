#pragma once

#include <optional>
#include <string>
#include <vector>

#include "btconv/backchain.hpp"
#include "btconv/substitution.hpp"

namespace btconv {

// Parse or validation failure in a spec document. `where` is a JSON path
// such as "leaves[3].controller".
class SpecError : public Error {
 public:
  SpecError(const std::string& where, const std::string& what)
      : Error(where.empty() ? what : where + ": " + what), where(where) {}
  std::string where;
};

struct SubstitutionBlock {
  std::string target;  // name of the Fal[TD, MB] vertex
  SubstitutionSpec spec;  // target vertex resolved against the model
};

struct SpecDocument {
  World world;
  bool adjacency_from_dynamics = false;
  std::optional<BTModel> model;
  std::vector<std::string> abstraction;  // leaf names; empty means every action
  std::vector<std::string> seeds;        // "owner:flavor"
  std::optional<double> delta;
  std::size_t max_steps = 0;
  std::optional<Library> library;
  std::optional<std::string> library_root;
  std::optional<SubstitutionBlock> substitution;
};

SpecDocument parse_spec(const std::string& text);
SpecDocument load_spec(const std::string& path);
// Stable, two-space indented JSON with a trailing newline.
std::string serialize_spec(const SpecDocument& doc);

std::vector<VertexId> resolve_abstraction(const SpecDocument& doc);
Seed parse_seed(const BTModel& m, const std::string& text);
ConvergenceOptions convergence_options(const SpecDocument& doc);

// Structural equality used by round-trip checks.
bool same_model(const BTModel& a, const BTModel& b);

}  // namespace btconv
