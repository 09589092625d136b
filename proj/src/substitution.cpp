#include "btconv/substitution.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "btconv/error.hpp"

namespace btconv {

AugmentedWorld::AugmentedWorld(const World& base, std::size_t time_cap, std::size_t hyst_cap)
    : base_cells_(base.cell_count()), time_cap_(time_cap), hyst_cap_(hyst_cap) {
  const std::size_t per = (time_cap + 1) * (hyst_cap + 1);
  const std::size_t n = base_cells_ * per;
  switch (base.mode()) {
    case NeighborMode::Metric: {
      std::vector<std::vector<double>> coords;
      coords.reserve(n);
      for (CellId b = 0; b < base_cells_; ++b)
        for (std::size_t k = 0; k < per; ++k) coords.push_back(base.coords()[b]);
      world_ = World::with_coords(std::move(coords));
      break;
    }
    case NeighborMode::Adjacency: {
      std::vector<std::pair<CellId, CellId>> pairs;
      for (CellId b = 0; b < base_cells_; ++b) {
        for (std::size_t i = 0; i < per; ++i)
          for (std::size_t j = i + 1; j < per; ++j) pairs.emplace_back(b * per + i, b * per + j);
        base.adjacent(b).for_each([&](CellId o) {
          if (o <= b) return;
          for (std::size_t i = 0; i < per; ++i)
            for (std::size_t j = 0; j < per; ++j) pairs.emplace_back(b * per + i, o * per + j);
        });
      }
      world_ = World::with_adjacency(n, pairs);
      break;
    }
    case NeighborMode::None:
      world_ = World(n);
      break;
  }
  if (!base.labels().empty()) {
    std::vector<std::string> labels;
    labels.reserve(n);
    for (CellId c = 0; c < n; ++c)
      labels.push_back(base.label(base_of(c)) + "|t" + std::to_string(time_of(c)) + "|h" + std::to_string(hyst_of(c)));
    world_.set_labels(std::move(labels));
  }
}

CellId AugmentedWorld::index(CellId base, std::size_t t, std::size_t h) const {
  if (base >= base_cells_ || t > time_cap_ || h > hyst_cap_) throw Error("augmented index out of range");
  return (base * (time_cap_ + 1) + t) * (hyst_cap_ + 1) + h;
}

Region AugmentedWorld::lift(const Region& base) const {
  if (base.size() != base_cells_) throw Error("lift: region size does not match the base world");
  Region out(world_.cell_count());
  const std::size_t per = (time_cap_ + 1) * (hyst_cap_ + 1);
  base.for_each([&](CellId b) {
    for (std::size_t k = 0; k < per; ++k) out.insert(b * per + k);
  });
  return out;
}

Region AugmentedWorld::project(const Region& aug) const {
  Region out(base_cells_);
  aug.for_each([&](CellId c) { out.insert(base_of(c)); });
  return out;
}

SuccessorMap AugmentedWorld::lift(const SuccessorMap& base, const Region& ok_region) const {
  if (base.size() != base_cells_) throw Error("lift: map size does not match the base world");
  SuccessorMap out;
  out.next.resize(world_.cell_count());
  for (CellId c = 0; c < out.next.size(); ++c) {
    const CellId b = base_of(c);
    const std::size_t t = std::min(time_of(c) + 1, time_cap_);
    const std::size_t h = ok_region.contains(b) ? std::min(hyst_of(c) + 1, hyst_cap_) : 0;
    out.next[c] = index(base(b), t, h);
  }
  return out;
}

Region AugmentedWorld::time_below_cap() const {
  Region out(world_.cell_count());
  for (CellId c = 0; c < out.size(); ++c)
    if (time_of(c) < time_cap_) out.insert(c);
  return out;
}

Region AugmentedWorld::hyst_at_cap() const {
  Region out(world_.cell_count());
  for (CellId c = 0; c < out.size(); ++c)
    if (hyst_of(c) == hyst_cap_) out.insert(c);
  return out;
}

namespace {

void check_shape(const BTModel& old, VertexId target) {
  if (target >= old.size()) throw ValidationError("substitution target out of range");
  const auto& kids = old.tree().children(target);
  if (old.kind(target) != NodeKind::Fallback || kids.size() != 2 || old.kind(kids[0]) != NodeKind::Condition ||
      old.kind(kids[1]) != NodeKind::Action)
    throw ValidationError("substitution target '" + old.name(target) +
                          "' is not a Fallback of a condition and an action");
}

Doa lift_doa(const AugmentedWorld& aug, const Doa& d) { return Doa{aug.lift(d.basin), aug.lift(d.goal), d.tau}; }

Node lift_leaf(const AugmentedWorld& aug, const Node& nd, const Region& ok) {
  Node out;
  out.kind = nd.kind;
  out.name = nd.name;
  out.success = aug.lift(nd.success);
  out.failure = aug.lift(nd.failure);
  if (nd.controller) out.controller = aug.lift(*nd.controller, ok);
  if (nd.doa) out.doa = lift_doa(aug, *nd.doa);
  return out;
}

Node make_condition(std::string name, const Region& s) {
  Node nd;
  nd.kind = NodeKind::Condition;
  nd.name = std::move(name);
  nd.failure = s.complement();
  nd.success = s;
  return nd;
}

Node make_action(std::string name, Region s, Region f, SuccessorMap u, Doa doa) {
  Node nd;
  nd.kind = NodeKind::Action;
  nd.name = std::move(name);
  nd.success = std::move(s);
  nd.failure = std::move(f);
  nd.controller = std::move(u);
  nd.doa = std::move(doa);
  return nd;
}

}  // namespace

std::vector<std::string> substitution_condition_violations(const BTModel& old, const SubstitutionSpec& spec) {
  check_shape(old, spec.target);
  const std::size_t n = old.world().cell_count();
  for (const Region* r : {&spec.dd_success, &spec.dd_failure, &spec.rr_success, &spec.rr_failure, &spec.rok_success})
    if (r->size() != n) throw ValidationError("substitution region size does not match the universe");
  const auto& kids = old.tree().children(spec.target);
  const Node& td = old.node(kids[0]);
  const Node& mb = old.node(kids[1]);
  std::vector<std::string> out;
  if (!mb.success.is_subset_of(td.success)) out.push_back("S_MB ⊆ S_TD");
  if (!spec.dd_success.empty() || !spec.dd_failure.empty()) out.push_back("R_DD = U");
  if (!spec.rr_success.is_subset_of(spec.rok_success)) out.push_back("S_RR ⊆ S_ROK");
  if (td.failure.intersects(mb.failure)) out.push_back("F_TD ∩ F_MB = ∅");
  if (spec.hysteresis > 0 && !spec.rr_failure.empty()) out.push_back("F_RR = ∅ (hysteresis)");
  if (spec.rr_success.intersects(spec.rr_failure) || spec.dd_success.intersects(spec.dd_failure))
    out.push_back("leaf regions disjoint");
  return out;
}

SubstitutionResult substitute(const BTModel& old, const SubstitutionSpec& spec, const SubstitutionOptions& opts) {
  const auto violations = substitution_condition_violations(old, spec);
  if (opts.check_conditions && !violations.empty()) {
    std::string msg = "substitution violates";
    for (const auto& v : violations) msg += " [" + v + "]";
    throw ValidationError(msg);
  }
  for (const auto* nm : {&spec.dd_name, &spec.rr_name, &spec.tok_name, &spec.rok_name})
    if (old.find(*nm) || old.find(*nm + "_rr"))
      throw ValidationError("substitution name '" + *nm + "' already used in the tree");

  AugmentedWorld aug(old.world(), spec.time_budget, spec.hysteresis);
  const Region& ok = spec.rok_success;
  const Region at_cap = aug.hyst_at_cap();
  const std::size_t T = spec.hysteresis;

  std::function<TreeBuilder::Spec(VertexId)> rebuild = [&](VertexId v) -> TreeBuilder::Spec {
    if (v == spec.target) {
      const auto& kids = old.tree().children(v);
      Node dd = make_action(spec.dd_name, aug.lift(spec.dd_success), aug.lift(spec.dd_failure),
                            aug.lift(spec.dd_controller, ok), Doa{aug.world().empty_region(), aug.world().empty_region(), 1});
      Doa rr_doa{aug.world().empty_region(), aug.world().empty_region(), 1};
      if (spec.rr_doa) rr_doa = Doa{aug.lift(spec.rr_doa->basin), aug.lift(spec.rr_doa->goal) & at_cap, spec.rr_doa->tau + T};
      Node rr = make_action(spec.rr_name, aug.lift(spec.rr_success) & at_cap, aug.lift(spec.rr_failure),
                            aug.lift(spec.rr_controller, ok), std::move(rr_doa));
      const Region tok = aug.time_below_cap();
      return TreeBuilder::fal(
          old.name(v),
          {TreeBuilder::leaf(lift_leaf(aug, old.node(kids[0]), ok)),
           TreeBuilder::seq(spec.dd_name + "_seq", {TreeBuilder::leaf(make_condition(spec.tok_name, tok)),
                                                    TreeBuilder::leaf(make_condition(spec.rok_name, aug.lift(ok) & at_cap)),
                                                    TreeBuilder::leaf(std::move(dd))}),
           TreeBuilder::seq(spec.rr_name + "_seq", {TreeBuilder::leaf(make_condition(spec.tok_name + "_rr", tok)),
                                                    TreeBuilder::leaf(std::move(rr))}),
           TreeBuilder::leaf(lift_leaf(aug, old.node(kids[1]), ok))});
    }
    if (old.is_leaf(v)) return TreeBuilder::leaf(lift_leaf(aug, old.node(v), ok));
    std::vector<TreeBuilder::Spec> kids;
    for (VertexId c : old.tree().children(v)) kids.push_back(rebuild(c));
    return old.kind(v) == NodeKind::Sequence ? TreeBuilder::seq(old.name(v), std::move(kids))
                                             : TreeBuilder::fal(old.name(v), std::move(kids));
  };
  BTModel model = TreeBuilder::build(aug.world(), rebuild(old.root()));

  std::vector<VertexId> old_to_new(old.size());
  for (VertexId v = 0; v < old.size(); ++v) {
    old_to_new[v] = model.require(old.name(v));
    if (!old.is_leaf(v) && old.node(v).doa) model = model.with_doa(old_to_new[v], lift_doa(aug, *old.node(v).doa));
  }
  const auto& kids = old.tree().children(spec.target);
  SubstitutedVertices sv{old_to_new[spec.target],
                         old_to_new[kids[0]],
                         model.require(spec.dd_name + "_seq"),
                         model.require(spec.tok_name),
                         model.require(spec.rok_name),
                         model.require(spec.dd_name),
                         model.require(spec.rr_name + "_seq"),
                         model.require(spec.tok_name + "_rr"),
                         model.require(spec.rr_name),
                         old_to_new[kids[1]]};
  return SubstitutionResult{std::move(aug), std::move(model), sv, std::move(old_to_new)};
}

PreservationVerdict verify_preservation(const BTModel& old, const SubstitutionResult& sub) {
  const auto om = propagate_metadata(old);
  const auto nm = propagate_metadata(sub.model);
  const AugmentedWorld& aug = sub.aug;
  PreservationVerdict out;
  auto differ = [&](const char* clause, const std::string& vertex, const Region& a, const Region& b) {
    if (a == b) return false;
    out.ok = false;
    out.clause = clause;
    out.vertex = vertex;
    const Region d = (a - b) | (b - a);
    out.witness = d.first();
    return true;
  };
  const VertexId tgt = std::find(sub.old_to_new.begin(), sub.old_to_new.end(), sub.v.subtree) - sub.old_to_new.begin();
  const Metadata& o = om[tgt];
  const Metadata& n = nm[sub.v.subtree];
  const std::string name = old.name(tgt);
  if (differ("S_new = S_old", name, n.success, aug.lift(o.success))) return out;
  if (differ("F_new = F_old", name, n.failure, aug.lift(o.failure))) return out;
  if (differ("R_new = R_old", name, n.running, aug.lift(o.running))) return out;
  if (differ("S_new = S_TD", name, n.success, sub.model.node(sub.v.td).success)) return out;
  if (differ("F_new = empty", name, n.failure, aug.world().empty_region())) return out;
  for (VertexId v = 0; v < old.size(); ++v) {
    const VertexId w = sub.old_to_new[v];
    if (differ("S preserved", old.name(v), nm[w].success, aug.lift(om[v].success))) return out;
    if (differ("F preserved", old.name(v), nm[w].failure, aug.lift(om[v].failure))) return out;
  }
  return out;
}

std::string to_string(const ProjectedVertex& v) { return std::string("v_") + to_char(v.flavor) + "(" + v.owner + ")"; }

std::vector<ProjectedEdge> project_edges(const BTModel& m, const PreparesGraph& g) {
  std::set<ProjectedEdge> s;
  for (std::size_t u = 0; u < g.size(); ++u)
    for (std::size_t v : g.edges.successors[u])
      s.insert({{m.name(g.vertices[u].owner), g.vertices[u].flavor}, {m.name(g.vertices[v].owner), g.vertices[v].flavor}});
  return {s.begin(), s.end()};
}

SubstitutedConvergenceVerdict verify_substituted_convergence(const BTModel& old, const ConvergenceResult& old_result,
                                                             const SubstitutionResult& sub,
                                                             const ConvergenceOptions& opts) {
  if (!old_result.certified()) throw PreconditionError("old model carries no certificate");
  SubstitutedConvergenceVerdict out;
  const BTModel& nm = sub.model;
  out.convergence = run_convergence(nm, nm.actions(), opts);
  const ConvergenceResult& cr = *out.convergence;

  const std::string& dd = nm.name(sub.v.dd);
  const std::string& rr = nm.name(sub.v.rr);
  const std::string& mb = nm.name(sub.v.mb);
  auto is_new = [&](const ProjectedVertex& p) { return p.owner == dd || p.owner == rr; };

  const auto old_edges = project_edges(old, old_result.graph);
  const auto new_edges = project_edges(nm, cr.graph);
  const std::set<ProjectedEdge> old_set(old_edges.begin(), old_edges.end());
  std::set<ProjectedVertex> mb_pred, mb_next;
  for (const auto& [x, y] : old_edges) {
    if (y.owner == mb && x.owner != mb) mb_pred.insert(x);
    if (x.owner == mb && y.owner != mb) mb_next.insert(y);
  }
  for (const auto& e : new_edges) {
    const auto& [x, y] = e;
    if (is_new(x)) {
      if (!is_new(y) && y.owner != mb && !mb_next.count(y))
        throw PreconditionError("illegal edge " + to_string(x) + " -> " + to_string(y));
    } else if (is_new(y)) {
      if (!mb_pred.count(x) && x.owner != mb) out.unexpected_edges.push_back(e);
    } else if (!old_set.count(e)) {
      out.unexpected_edges.push_back(e);
    }
  }
  const std::set<ProjectedEdge> new_set(new_edges.begin(), new_edges.end());
  for (const auto& e : old_edges)
    if (!new_set.count(e)) out.missing_edges.push_back(e);

  Region loop = nm.world().empty_region();
  for (const auto& pv : cr.graph.vertices)
    if (pv.owner == sub.v.dd || pv.owner == sub.v.rr) loop |= pv.cells;
  if (loop.empty()) {
    out.loop_exit = 0;
  } else {
    out.loop_exit = empirical_exit_time(nm, loop).steps;
  }
  out.loop_within_budget = out.loop_exit && *out.loop_exit <= sub.aug.time_cap();

  auto well_behaved = [&](VertexId v) {
    const Doa& d = *nm.node(v).doa;
    return cr.analysis.omega(v).is_subset_of(d.basin - d.goal);
  };
  out.rr_well_behaved = well_behaved(sub.v.rr);
  out.mb_well_behaved = well_behaved(sub.v.mb);
  return out;
}

}  // namespace btconv
