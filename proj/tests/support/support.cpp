#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>

#ifndef BTCONV_MODELS_DIR
#define BTCONV_MODELS_DIR "models"
#endif

namespace btconv::testing {

std::uint64_t base_seed() {
  if (const char* s = std::getenv("BTCONV_RNG_SEED"); s && *s) return std::strtoull(s, nullptr, 10);
  return 20240611;
}

Rng make_rng(const std::string& suite) {
  // FNV-1a keeps the per-suite offset stable across standard libraries.
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : suite) h = (h ^ ch) * 1099511628211ull;
  return Rng(base_seed() ^ h);
}

std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

bool coin(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

Region random_region(Rng& rng, std::size_t cells, double p) {
  Region r(cells);
  for (std::size_t c = 0; c < cells; ++c)
    if (coin(rng, p)) r.insert(c);
  return r;
}

std::string model_path(const std::string& name) { return std::string(BTCONV_MODELS_DIR) + "/" + name; }

SpecDocument load_model(const std::string& name) { return load_spec(model_path(name)); }

// --- random trees -----------------------------------------------------------

namespace {

SuccessorMap random_map(Rng& rng, std::size_t n) {
  SuccessorMap u = SuccessorMap::identity(n);
  for (auto& c : u.next) c = pick(rng, 0, n - 1);
  return u;
}

struct ShapeState {
  Rng& rng;
  const RandomTreeOptions& opts;
  std::size_t cells;
  std::size_t leaf_count = 0;
  std::size_t composite_count = 0;
};

TreeBuilder::Spec random_leaf(ShapeState& st) {
  const std::size_t n = st.cells;
  const std::string name = "l" + std::to_string(st.leaf_count++);
  Region s(n), f(n);
  if (coin(st.rng, st.opts.condition_share)) {
    for (std::size_t c = 0; c < n; ++c) (coin(st.rng, 0.5) ? s : f).insert(c);
    Node nd;
    nd.kind = NodeKind::Condition;
    nd.name = name;
    nd.success = s;
    nd.failure = f;
    return TreeBuilder::leaf(nd);
  }
  for (std::size_t c = 0; c < n; ++c) {
    const std::size_t k = pick(st.rng, 0, 2);
    if (k == 1) s.insert(c);
    if (k == 2) f.insert(c);
  }
  return TreeBuilder::action(name, s, f, random_map(st.rng, n));
}

TreeBuilder::Spec random_shape(ShapeState& st, std::size_t leaves, std::size_t depth) {
  if (leaves == 1 && (depth == st.opts.max_depth || coin(st.rng, 0.7))) return random_leaf(st);
  std::vector<TreeBuilder::Spec> kids;
  if (depth + 1 == st.opts.max_depth || leaves == 1) {
    for (std::size_t k = 0; k < leaves; ++k) kids.push_back(random_leaf(st));
  } else {
    // split into 2..3 nonempty groups
    const std::size_t groups = pick(st.rng, 2, std::min<std::size_t>(3, leaves));
    std::vector<std::size_t> sizes(groups, 1);
    for (std::size_t k = groups; k < leaves; ++k) ++sizes[pick(st.rng, 0, groups - 1)];
    for (std::size_t g : sizes) kids.push_back(random_shape(st, g, depth + 1));
  }
  const std::string name = "c" + std::to_string(st.composite_count++);
  return coin(st.rng, 0.5) ? TreeBuilder::seq(name, std::move(kids)) : TreeBuilder::fal(name, std::move(kids));
}

}  // namespace

BTModel random_tree(Rng& rng, const RandomTreeOptions& opts) {
  const std::size_t n = pick(rng, 1, opts.max_cells);
  ShapeState st{rng, opts, n};
  const std::size_t leaves = pick(rng, 1, opts.max_leaves);
  return TreeBuilder::build(World(n), random_shape(st, leaves, 0));
}

// --- tree oracles -------------------------------------------------------------

Status oracle_status(const BTModel& m, VertexId v, CellId x) {
  switch (m.kind(v)) {
    case NodeKind::Action:
    case NodeKind::Condition:
      if (m.node(v).success.contains(x)) return Status::Success;
      if (m.node(v).failure.contains(x)) return Status::Failure;
      return Status::Running;
    case NodeKind::Sequence:
      for (VertexId c : m.tree().children(v)) {
        const Status s = oracle_status(m, c, x);
        if (s != Status::Success) return s;
      }
      return Status::Success;
    case NodeKind::Fallback:
      for (VertexId c : m.tree().children(v)) {
        const Status s = oracle_status(m, c, x);
        if (s != Status::Failure) return s;
      }
      return Status::Failure;
  }
  return Status::Running;
}

namespace {

Status ticked_walk(const BTModel& m, VertexId v, CellId x, std::vector<VertexId>& out) {
  out.push_back(v);
  if (m.is_leaf(v)) return oracle_status(m, v, x);
  const Status pass = m.kind(v) == NodeKind::Sequence ? Status::Success : Status::Failure;
  for (VertexId c : m.tree().children(v)) {
    const Status s = ticked_walk(m, c, x, out);
    if (s != pass) return s;
  }
  return pass;
}

}  // namespace

std::vector<VertexId> oracle_ticked(const BTModel& m, CellId x) {
  std::vector<VertexId> out;
  ticked_walk(m, m.root(), x, out);
  return out;
}

bool in_subtree(const BTModel& m, VertexId top, VertexId v) {
  for (std::optional<VertexId> p = v; p; p = m.tree().parent(*p))
    if (*p == top) return true;
  return false;
}

Region oracle_influence(const BTModel& m, VertexId v) {
  const std::size_t n = m.world().cell_count();
  Region r(n);
  for (CellId x = 0; x < n; ++x) {
    const auto t = oracle_ticked(m, x);
    if (std::find(t.begin(), t.end(), v) != t.end()) r.insert(x);
  }
  return r;
}

Region oracle_operating(const BTModel& m, VertexId v) {
  const std::size_t n = m.world().cell_count();
  Region r(n);
  for (CellId x = 0; x < n; ++x) {
    const auto t = oracle_ticked(m, x);
    if (std::find(t.begin(), t.end(), v) == t.end()) continue;
    // the last evaluated vertex is the resolved leaf
    if (in_subtree(m, v, t.back())) r.insert(x);
  }
  return r;
}

// --- relations and graphs -------------------------------------------------------

Relation oracle_closure(const Relation& r) {
  const std::size_t n = r.size();
  std::vector<std::vector<bool>> a(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) {
    a[i][i] = true;
    for (std::size_t j = 0; j < n; ++j)
      if (r.contains(i, j)) a[i][j] = true;
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (a[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (a[k][j]) a[i][j] = true;
  Relation out(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (a[i][j]) out.insert(i, j);
  return out;
}

std::vector<std::vector<bool>> oracle_reachability(const Digraph& g) {
  const std::size_t n = g.size();
  std::vector<std::vector<bool>> a(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) {
    a[i][i] = true;
    for (std::size_t j : g.successors[i]) a[i][j] = true;
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (a[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (a[k][j]) a[i][j] = true;
  return a;
}

Digraph random_digraph(Rng& rng, std::size_t n, double p) {
  Digraph g(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && coin(rng, p)) g.add_edge(i, j);
  g.normalize();
  return g;
}

// --- prepares graph ---------------------------------------------------------------

bool oracle_neighboring(const Region& a, const Region& b, const World& w, double delta) {
  for (CellId p : a.members())
    for (CellId q : b.members()) {
      if (p == q) return true;
      if (w.has_coords()) {
        const auto& cp = w.coords()[p];
        const auto& cq = w.coords()[q];
        double d2 = 0;
        for (std::size_t k = 0; k < cp.size(); ++k) d2 += (cp[k] - cq[k]) * (cp[k] - cq[k]);
        if (std::sqrt(d2) <= delta) return true;
      } else {
        for (const auto& [u, v] : w.adjacency_pairs())
          if ((u == p && v == q) || (u == q && v == p)) return true;
      }
    }
  return false;
}

Digraph oracle_prepares_edges(const BTModel& m, const PreparesGraph& g) {
  Digraph out(g.size());
  for (std::size_t s = 0; s < g.size(); ++s)
    for (std::size_t t = 0; t < g.size(); ++t) {
      if (s == t) continue;
      const PreparesVertex& from = g.vertices[s];
      const PreparesVertex& to = g.vertices[t];
      if (!oracle_neighboring(from.cells, to.cells, m.world(), g.delta)) continue;
      const bool same = from.owner == to.owner;
      bool edge = false;
      if (from.flavor == Flavor::A) {
        // rule 1: a(i) -> a(j), j != i; rules 2-3: a(i) -> b(j), c(j)
        edge = to.flavor != Flavor::A || !same;
      } else if (from.flavor == Flavor::B) {
        const Region& basin = m.node(from.owner).doa->basin;
        const bool hits = basin.intersects(to.cells);
        // rules 4-5 need j != i; rule 6 allows i = j
        edge = hits && (to.flavor == Flavor::C || !same);
      }
      if (edge) out.add_edge(s, t);
    }
  out.normalize();
  return out;
}

std::size_t vertex_of_cell(const PreparesGraph& g, CellId x) {
  for (std::size_t v = 0; v < g.size(); ++v)
    if (g.vertices[v].cells.contains(x)) return v;
  return g.size();
}

// --- libraries ------------------------------------------------------------------

namespace {

struct LibraryState {
  Rng& rng;
  std::size_t n;
  Library lib;
  std::size_t budget;  // actions still allowed
};

// Creates action a<k> with its precondition conditions and their achievers;
// returns the action's success region.
Region grow_action(LibraryState& st) {
  const std::size_t n = st.n;
  const std::string id = "a" + std::to_string(st.lib.actions.size());
  st.lib.actions.push_back({});
  const std::size_t slot = st.lib.actions.size() - 1;
  --st.budget;
  std::vector<std::string> pre;
  Region basin = Region::full(n);
  const std::size_t pc = pick(st.rng, 0, 2);
  for (std::size_t k = 0; k < pc; ++k) {
    const std::string cid = "k" + std::to_string(st.lib.conditions.size());
    st.lib.conditions.push_back({cid, Region(n), Region(n), {}});
    const std::size_t cslot = st.lib.conditions.size() - 1;
    Region s = Region::full(n), f(n);
    if (st.budget > 0 && coin(st.rng, 0.7)) {
      const std::string achiever = "a" + std::to_string(st.lib.actions.size());
      const Region as = grow_action(st);
      // the achiever succeeds inside its postcondition
      s = as | random_region(st.rng, n, 0.3);
      f = s.complement();
      st.lib.conditions[cslot].achievers = {achiever};
    }
    st.lib.conditions[cslot].success = s;
    st.lib.conditions[cslot].failure = f;
    pre.push_back(cid);
    basin &= s;
  }
  // Action regions: success anywhere, failure outside the basin so that
  // B_i = meet of precondition successes stays within R_i | S_i.
  Region s = random_region(st.rng, n, 0.35);
  Region f = random_region(st.rng, n, 0.3) - s - basin;
  SuccessorMap u = SuccessorMap::identity(n);
  for (auto& c : u.next) c = pick(st.rng, 0, n - 1);
  LibraryAction& a = st.lib.actions[slot];
  a.id = id;
  a.success = s;
  a.failure = f;
  a.controller = u;
  a.doa = Doa{basin, basin & s, 1};
  a.preconditions = pre;
  return s;
}

}  // namespace

Library random_library(Rng& rng, std::size_t max_cells) {
  const std::size_t n = pick(rng, 2, max_cells);
  LibraryState st{rng, n, Library{World(n), {}, {}}, pick(rng, 1, 7)};
  grow_action(st);
  return st.lib;
}

// --- substitution -----------------------------------------------------------------

RandomSubstitution random_substitution(Rng& rng) {
  const std::size_t n = pick(rng, 3, 10);
  World w(n);
  auto map = [&] {
    SuccessorMap u = SuccessorMap::identity(n);
    for (auto& c : u.next) c = pick(rng, 0, n - 1);
    return u;
  };
  // TD: a condition; MB: succeeds inside S_TD and only fails where TD holds.
  const Region s_td = random_region(rng, n, 0.5);
  const Region s_mb = s_td & random_region(rng, n, 0.6);
  const Region f_mb = (s_td - s_mb) & random_region(rng, n, 0.4);
  Node td;
  td.kind = NodeKind::Condition;
  td.name = "task_done";
  td.success = s_td;
  td.failure = s_td.complement();
  const auto mb = TreeBuilder::action("model_based", s_mb, f_mb, map());
  auto target = TreeBuilder::fal("guard", {TreeBuilder::leaf(td), mb});

  // A sibling leaf on either side, under a random composite.
  std::vector<TreeBuilder::Spec> kids{target};
  if (coin(rng, 0.5)) {
    Region s = random_region(rng, n, 0.4);
    kids.insert(kids.begin(), TreeBuilder::action("before", s, random_region(rng, n, 0.3) - s, map()));
  }
  if (coin(rng, 0.5)) {
    Region s = random_region(rng, n, 0.4);
    kids.push_back(TreeBuilder::action("after", s, random_region(rng, n, 0.3) - s, map()));
  }
  auto root = coin(rng, 0.5) ? TreeBuilder::seq("root", std::move(kids)) : TreeBuilder::fal("root", std::move(kids));
  BTModel old = TreeBuilder::build(w, root);

  SubstitutionSpec spec;
  spec.target = old.require("guard");
  spec.dd_controller = map();
  spec.dd_success = Region(n);
  spec.dd_failure = Region(n);
  spec.rok_success = random_region(rng, n, 0.6);
  spec.rr_success = spec.rok_success & random_region(rng, n, 0.6);
  spec.time_budget = pick(rng, 1, 3);
  spec.hysteresis = pick(rng, 0, 2);
  spec.rr_failure = spec.hysteresis > 0 ? Region(n) : (random_region(rng, n, 0.3) - spec.rr_success);
  spec.rr_controller = map();
  return {std::move(old), std::move(spec)};
}

}  // namespace btconv::testing
