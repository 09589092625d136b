#include "btconv/prepares.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace btconv {

char to_char(Flavor f) {
  switch (f) {
    case Flavor::A: return 'a';
    case Flavor::B: return 'b';
    case Flavor::C: return 'c';
  }
  return '?';
}

std::optional<Flavor> parse_flavor(char c) {
  switch (c) {
    case 'a': return Flavor::A;
    case 'b': return Flavor::B;
    case 'c': return Flavor::C;
    default: return std::nullopt;
  }
}

const char* to_string(RefutationKind k) {
  switch (k) {
    case RefutationKind::NonGoalSink: return "non-goal-sink";
    case RefutationKind::NeverExits: return "never-exits";
  }
  return "?";
}

std::optional<std::size_t> PreparesGraph::find(VertexId owner, Flavor f) const {
  for (std::size_t v = 0; v < vertices.size(); ++v)
    if (vertices[v].owner == owner && vertices[v].flavor == f) return v;
  return std::nullopt;
}

std::string PreparesGraph::label(const BTModel& m, std::size_t v) const {
  const PreparesVertex& pv = vertices.at(v);
  return std::string("v_") + to_char(pv.flavor) + "(" + m.name(pv.owner) + ")";
}

double resolve_delta(const BTModel& m, std::optional<double> delta) {
  const World& w = m.world();
  switch (w.mode()) {
    case NeighborMode::Metric:
      if (delta) {
        if (*delta < 0) throw ValidationError("delta must be non-negative");
        return *delta;
      }
      return step_bound(w, m.controllers());
    case NeighborMode::Adjacency:
      return 0.0;
    case NeighborMode::None:
      break;
  }
  throw PreconditionError("world has neither coordinates nor adjacency; supply one to build the prepares graph");
}

PreparesGraph build_prepares_graph(const BTModel& m, const NodeAnalysis& a, const std::vector<VertexId>& P,
                                   std::optional<double> delta) {
  const AbstractionVerdict av = validate_abstraction(m, a, P);
  if (!av.valid) throw AbstractionError("abstraction is not a partition of the universe", av);

  std::vector<VertexId> owners = P;
  std::sort(owners.begin(), owners.end());
  PreparesGraph g;
  g.delta = resolve_delta(m, delta);
  std::map<VertexId, const Doa*> doa;
  for (VertexId i : owners) {
    const Node& nd = m.node(i);
    if (!nd.doa) throw PreconditionError("abstraction member '" + nd.name + "' has no DOA");
    doa[i] = &*nd.doa;
    const Region& om = a.omega(i);
    const Region slices[3] = {om - nd.doa->basin, om & (nd.doa->basin - nd.doa->goal), om & nd.doa->goal};
    const Flavor flavors[3] = {Flavor::A, Flavor::B, Flavor::C};
    for (int k = 0; k < 3; ++k)
      if (!slices[k].empty()) g.vertices.push_back({i, flavors[k], slices[k]});
  }

  const std::size_t n = g.vertices.size();
  g.edges = Digraph(n);
  std::vector<std::vector<signed char>> near(n, std::vector<signed char>(n, -1));
  auto is_near = [&](std::size_t u, std::size_t v) {
    if (near[u][v] < 0) near[u][v] = near[v][u] = neighboring(g.vertices[u].cells, g.vertices[v].cells, m.world(), g.delta);
    return near[u][v] == 1;
  };
  for (std::size_t u = 0; u < n; ++u) {
    const PreparesVertex& src = g.vertices[u];
    if (src.flavor == Flavor::C) continue;
    for (std::size_t v = 0; v < n; ++v) {
      if (u == v) continue;
      const PreparesVertex& dst = g.vertices[v];
      const bool same = src.owner == dst.owner;
      bool rule = false;
      if (src.flavor == Flavor::A) {
        rule = dst.flavor != Flavor::A || !same;
      } else {
        const bool lands = doa[src.owner]->basin.intersects(dst.cells);
        rule = lands && (dst.flavor == Flavor::C || !same);
      }
      if (rule && is_near(u, v)) g.edges.successors[u].push_back(v);
    }
  }
  return g;
}

std::vector<std::size_t> analysis_set(const Condensation& c, const std::vector<std::size_t>& seed_classes) {
  return forward_closure(c.dag, seed_classes);
}

std::vector<std::size_t> flatten_classes(const Condensation& c, const std::vector<std::size_t>& classes) {
  std::vector<std::size_t> out;
  for (std::size_t k : classes) out.insert(out.end(), c.classes.at(k).begin(), c.classes.at(k).end());
  std::sort(out.begin(), out.end());
  return out;
}

Region cells_of_classes(const PreparesGraph& g, const Condensation& c, const std::vector<std::size_t>& classes) {
  Region r(g.vertices.empty() ? 0 : g.vertices.front().cells.size());
  for (std::size_t v : flatten_classes(c, classes)) r |= g.vertices[v].cells;
  return r;
}

CertifyOutcome certify_convergence(const BTModel& m, const PreparesGraph& g, const Condensation& c,
                                   const std::vector<std::size_t>& analysis_classes, std::size_t max_steps) {
  std::vector<bool> in_set(c.size(), false);
  for (std::size_t k : analysis_classes) in_set.at(k) = true;

  Certificate cert;
  cert.analysis_set = analysis_classes;
  for (std::size_t k : analysis_classes) {
    if (!c.dag.successors[k].empty()) continue;
    for (std::size_t v : c.classes[k])
      if (g.vertices[v].flavor != Flavor::C) return Refutation{RefutationKind::NonGoalSink, k, std::nullopt, {}};
    cert.sinks.push_back(k);
  }

  const ClosedLoop loop = closed_loop(m);
  std::vector<std::size_t> weight(c.size(), 0);
  for (std::size_t k : analysis_classes) {
    if (c.dag.successors[k].empty()) continue;
    Region cells = m.world().empty_region();
    for (std::size_t v : c.classes[k]) cells |= g.vertices[v].cells;
    const ExitTime et = empirical_exit_time(loop, cells, max_steps);
    if (!et.steps) return Refutation{RefutationKind::NeverExits, k, et.witness, et.witness_trace};
    cert.exit_times.push_back({k, *et.steps});
    weight[k] = *et.steps;
    cert.max_exit = std::max(cert.max_exit, *et.steps);
  }

  cert.bound = analysis_classes.size() * cert.max_exit;
  cert.theorem_bound = (analysis_classes.size() - cert.sinks.size()) * cert.max_exit;
  // Longest weighted path; the class graph is a DAG and the set is forward closed.
  std::vector<std::optional<std::size_t>> best(c.size());
  std::function<std::size_t(std::size_t)> longest = [&](std::size_t k) -> std::size_t {
    if (best[k]) return *best[k];
    std::size_t tail = 0;
    for (std::size_t s : c.dag.successors[k]) tail = std::max(tail, longest(s));
    best[k] = weight[k] + tail;
    return *best[k];
  };
  for (std::size_t k : analysis_classes) cert.longest_path_bound = std::max(cert.longest_path_bound, longest(k));
  return cert;
}

BehaviorGraph behavior_graph(const PreparesGraph& g, const std::vector<std::size_t>& prepares_vertices) {
  std::vector<bool> in(g.size(), false);
  for (std::size_t v : prepares_vertices) in.at(v) = true;
  BehaviorGraph b;
  for (std::size_t v : prepares_vertices) b.vertices.push_back(g.vertices[v].owner);
  for (std::size_t u : prepares_vertices)
    for (std::size_t v : g.edges.successors[u])
      if (in[v]) b.edges.emplace_back(g.vertices[u].owner, g.vertices[v].owner);
  std::sort(b.vertices.begin(), b.vertices.end());
  b.vertices.erase(std::unique(b.vertices.begin(), b.vertices.end()), b.vertices.end());
  std::sort(b.edges.begin(), b.edges.end());
  b.edges.erase(std::unique(b.edges.begin(), b.edges.end()), b.edges.end());
  return b;
}

AcyclicVerdict check_acyclic_corollary(const Condensation& c, const std::vector<std::size_t>& analysis_classes) {
  AcyclicVerdict v;
  v.acyclic = std::all_of(analysis_classes.begin(), analysis_classes.end(),
                          [&](std::size_t k) { return c.classes.at(k).size() == 1; });
  if (v.acyclic) v.transition_bound = analysis_classes.size();
  return v;
}

Doa certificate_doa(const PreparesGraph& g, const Condensation& c, const Certificate& cert) {
  Doa d;
  d.basin = cells_of_classes(g, c, cert.analysis_set);
  d.goal = cells_of_classes(g, c, cert.sinks);
  d.tau = std::max<std::size_t>(cert.bound, 1);
  return d;
}

ConvergenceResult run_convergence(const BTModel& m, const std::vector<VertexId>& P, const ConvergenceOptions& opts) {
  NodeAnalysis a = analyze(m);
  const AbstractionVerdict av = validate_abstraction(m, a, P);
  if (!av.valid) throw AbstractionError("abstraction is not a partition of the universe", av);

  std::vector<FtsVerdict> fts;
  std::vector<FtsVerdict> failures;
  for (VertexId i : P) {
    fts.push_back(check_fts(m, i, a.metadata));
    if (!fts.back().ok()) failures.push_back(fts.back());
  }
  if (!failures.empty()) {
    std::string msg = "finite-time success fails for";
    for (const auto& f : failures) msg += " '" + m.name(f.vertex) + "'";
    throw FtsError(msg, failures);
  }

  PreparesGraph g = build_prepares_graph(m, a, P, opts.delta);
  Condensation c = condense(g.edges);
  std::vector<std::size_t> seeds;
  if (opts.seeds.empty()) {
    for (std::size_t k = 0; k < c.size(); ++k) seeds.push_back(k);
  } else {
    for (const Seed& s : opts.seeds) {
      const auto v = g.find(s.owner, s.flavor);
      if (!v)
        throw PreconditionError(std::string("seed v_") + to_char(s.flavor) + "(" + m.name(s.owner) +
                                ") is empty or not in the abstraction");
      seeds.push_back(c.class_of[*v]);
    }
    std::sort(seeds.begin(), seeds.end());
    seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
  }
  std::vector<std::size_t> vset = analysis_set(c, seeds);
  CertifyOutcome out = certify_convergence(m, g, c, vset, opts.max_steps);
  return ConvergenceResult{std::move(a), std::move(fts), std::move(g), std::move(c), std::move(seeds), std::move(vset),
                           std::move(out)};
}

}  // namespace btconv
