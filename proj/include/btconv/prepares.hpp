#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "btconv/execution.hpp"
#include "btconv/graph.hpp"

namespace btconv {

// a: operating region outside the DOA; b: inside the DOA but not the goal;
// c: inside the goal.
enum class Flavor { A, B, C };
char to_char(Flavor f);
std::optional<Flavor> parse_flavor(char c);

struct PreparesVertex {
  VertexId owner;
  Flavor flavor;
  Region cells;
};

struct PreparesGraph {
  std::vector<PreparesVertex> vertices;  // owners ascending, then a, b, c; empty slices dropped
  Digraph edges;
  double delta = 0.0;

  std::size_t size() const { return vertices.size(); }
  std::optional<std::size_t> find(VertexId owner, Flavor f) const;
  std::string label(const BTModel& m, std::size_t v) const;  // "v_b(go_home)"
};

// delta resolution: an explicit value wins; metric worlds default to the step
// bound over all controllers; adjacency worlds ignore delta.
double resolve_delta(const BTModel& m, std::optional<double> delta);

PreparesGraph build_prepares_graph(const BTModel& m, const NodeAnalysis& a, const std::vector<VertexId>& P,
                                   std::optional<double> delta = std::nullopt);

// Classes reachable from the seed classes, ascending.
std::vector<std::size_t> analysis_set(const Condensation& c, const std::vector<std::size_t>& seed_classes);

// Prepares vertices belonging to the given classes, ascending.
std::vector<std::size_t> flatten_classes(const Condensation& c, const std::vector<std::size_t>& classes);
Region cells_of_classes(const PreparesGraph& g, const Condensation& c, const std::vector<std::size_t>& classes);

struct ClassExit {
  std::size_t cls;
  std::size_t steps;
};

struct Certificate {
  std::vector<std::size_t> analysis_set;
  std::vector<std::size_t> sinks;  // sinks inside the analysis set
  std::vector<ClassExit> exit_times;
  std::size_t max_exit = 0;               // T
  std::size_t bound = 0;                  // |V'| * T
  std::size_t theorem_bound = 0;          // |V' \ sinks| * T
  std::size_t longest_path_bound = 0;     // heaviest class path, weights T_class
};

enum class RefutationKind { NonGoalSink, NeverExits };
const char* to_string(RefutationKind k);

struct Refutation {
  RefutationKind kind;
  std::size_t cls;
  std::optional<CellId> witness;
  Trace trace;
};

using CertifyOutcome = std::variant<Certificate, Refutation>;

CertifyOutcome certify_convergence(const BTModel& m, const PreparesGraph& g, const Condensation& c,
                                   const std::vector<std::size_t>& analysis_classes, std::size_t max_steps = 0);

struct BehaviorGraph {
  std::vector<VertexId> vertices;                    // owners, ascending
  std::vector<std::pair<VertexId, VertexId>> edges;  // image of the prepares edges, sorted
};

BehaviorGraph behavior_graph(const PreparesGraph& g, const std::vector<std::size_t>& prepares_vertices);

struct AcyclicVerdict {
  bool acyclic = false;
  std::size_t transition_bound = 0;  // |V'| when acyclic
};

AcyclicVerdict check_acyclic_corollary(const Condensation& c, const std::vector<std::size_t>& analysis_classes);

// DOA for a certified model seen as one controller: B = cells of the
// analysis set, G = cells of its sinks, tau = the certificate bound.
Doa certificate_doa(const PreparesGraph& g, const Condensation& c, const Certificate& cert);

struct Seed {
  VertexId owner;
  Flavor flavor;
};

struct ConvergenceOptions {
  std::optional<double> delta;
  std::size_t max_steps = 0;  // 0: cell_count + 1
  std::vector<Seed> seeds;    // empty: every class
};

struct ConvergenceResult {
  NodeAnalysis analysis;
  std::vector<FtsVerdict> fts;
  PreparesGraph graph;
  Condensation condensed;
  std::vector<std::size_t> seed_classes;
  std::vector<std::size_t> analysis_classes;
  CertifyOutcome outcome;

  bool certified() const { return std::holds_alternative<Certificate>(outcome); }
  const Certificate& certificate() const { return std::get<Certificate>(outcome); }
  const Refutation& refutation() const { return std::get<Refutation>(outcome); }
};

class FtsError : public PreconditionError {
 public:
  FtsError(std::string what, std::vector<FtsVerdict> failures)
      : PreconditionError(std::move(what)), failures(std::move(failures)) {}
  std::vector<FtsVerdict> failures;
};

class AbstractionError : public PreconditionError {
 public:
  AbstractionError(std::string what, AbstractionVerdict verdict)
      : PreconditionError(std::move(what)), verdict(std::move(verdict)) {}
  AbstractionVerdict verdict;
};

// Abstraction check, FTS of every member, prepares graph, condensation,
// analysis set and certification.
ConvergenceResult run_convergence(const BTModel& m, const std::vector<VertexId>& P,
                                  const ConvergenceOptions& opts = {});

}  // namespace btconv
