#include "btconv/analysis.hpp"

namespace btconv {

std::vector<Metadata> propagate_metadata(const BTModel& m) {
  const World& w = m.world();
  std::vector<Metadata> meta(m.size());
  for (VertexId v : m.tree().postorder()) {
    const Node& nd = m.node(v);
    Metadata& out = meta[v];
    if (m.is_leaf(v)) {
      out.success = nd.success;
      out.failure = nd.failure;
      out.running = (nd.success | nd.failure).complement();
      continue;
    }
    // Sequence: advance while children succeed. Fallback: while they fail.
    const bool is_seq = nd.kind == NodeKind::Sequence;
    Region gate = w.universe();  // cells where every earlier child passed
    out.running = w.empty_region();
    Region stop = w.empty_region();
    for (VertexId c : m.tree().children(v)) {
      const Metadata& cm = meta[c];
      out.running |= cm.running & gate;
      stop |= (is_seq ? cm.failure : cm.success) & gate;
      gate &= is_seq ? cm.success : cm.failure;
    }
    if (is_seq) {
      out.failure = stop;
      out.success = gate;
    } else {
      out.success = stop;
      out.failure = gate;
    }
  }
  return meta;
}

namespace {

Status leaf_status(const Node& nd, CellId x) {
  if (nd.success.contains(x)) return Status::Success;
  if (nd.failure.contains(x)) return Status::Failure;
  return Status::Running;
}

}  // namespace

TickResult tick(const BTModel& m, CellId x) { return tick(m, x, m.root()); }

TickResult tick(const BTModel& m, CellId x, VertexId from) {
  if (x >= m.world().cell_count()) throw ValidationError("tick: cell " + std::to_string(x) + " outside universe");
  TickResult r{from, Status::Running, {}};
  VertexId v = from;
  r.path.push_back(v);
  // Walk down the cascade; a composite's result equals that of the first
  // child that does not pass, or of its last child.
  while (!m.is_leaf(v)) {
    const bool is_seq = m.kind(v) == NodeKind::Sequence;
    const auto& kids = m.tree().children(v);
    VertexId chosen = kids.back();
    for (std::size_t k = 0; k + 1 < kids.size(); ++k) {
      const TickResult sub = tick(m, x, kids[k]);
      const Status pass = is_seq ? Status::Success : Status::Failure;
      if (sub.status != pass) {
        chosen = kids[k];
        break;
      }
    }
    v = chosen;
    r.path.push_back(v);
  }
  r.leaf = v;
  r.status = leaf_status(m.node(v), x);
  return r;
}

std::vector<Region> influence_regions(const BTModel& m, const TreeOrders& orders,
                                      const std::vector<Metadata>& meta) {
  std::vector<Region> inf(m.size(), m.world().universe());
  for (VertexId i = 0; i < m.size(); ++i) {
    const VertexSet uncles = orders.left_uncle.column(i);
    uncles.for_each([&](VertexId j) {
      const auto p = orders.parent_map[j];
      if (m.kind(*p) == NodeKind::Sequence)
        inf[i] &= meta[j].success;
      else
        inf[i] &= meta[j].failure;
    });
  }
  return inf;
}

Pathways pathways(const BTModel& m, const TreeOrders& orders) {
  Pathways p{VertexSet::full(m.size()), VertexSet::full(m.size())};
  for (VertexId i = 0; i < m.size(); ++i) {
    orders.right_uncle.column(i).for_each([&](VertexId j) {
      const NodeKind pk = m.kind(*orders.parent_map[j]);
      if (pk == NodeKind::Sequence) p.success.erase(i);
      if (pk == NodeKind::Fallback) p.failure.erase(i);
    });
  }
  return p;
}

std::vector<Region> operating_regions(const BTModel& m, const std::vector<Metadata>& meta,
                                      const std::vector<Region>& influence, const Pathways& paths) {
  std::vector<Region> omega;
  omega.reserve(m.size());
  for (VertexId i = 0; i < m.size(); ++i) {
    const bool s = paths.success.contains(i), f = paths.failure.contains(i);
    const Metadata& md = meta[i];
    if (s && f)
      omega.push_back(influence[i]);
    else if (s)
      omega.push_back(influence[i] & (md.running | md.success));
    else if (f)
      omega.push_back(influence[i] & (md.running | md.failure));
    else
      omega.push_back(influence[i] & md.running);
  }
  return omega;
}

NodeAnalysis analyze(const BTModel& m) {
  NodeAnalysis a;
  a.orders = derive_orders(m.tree());
  a.metadata = propagate_metadata(m);
  a.influence = influence_regions(m, a.orders, a.metadata);
  a.paths = pathways(m, a.orders);
  a.operating = operating_regions(m, a.metadata, a.influence, a.paths);
  return a;
}

AbstractionVerdict validate_abstraction(const BTModel& m, const NodeAnalysis& a,
                                        const std::vector<VertexId>& P) {
  AbstractionVerdict v;
  Region covered = m.world().empty_region();
  for (std::size_t x = 0; x < P.size(); ++x) {
    if (P[x] >= m.size()) throw ValidationError("abstraction: vertex " + std::to_string(P[x]) + " out of range");
    for (std::size_t y = x + 1; y < P.size(); ++y)
      if (P[x] == P[y] || a.omega(P[x]).intersects(a.omega(P[y]))) v.overlaps.emplace_back(P[x], P[y]);
    covered |= a.omega(P[x]);
  }
  v.uncovered = covered.complement();
  v.valid = v.overlaps.empty() && v.uncovered.empty();
  return v;
}

}  // namespace btconv
