#include "btconv/backchain.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "btconv/error.hpp"

namespace btconv {

namespace {

const std::string kSeqPrefix = "seq:";
const std::string kFalPrefix = "fal:";

template <class T>
const T* find_by_id(const std::vector<T>& items, const std::string& id) {
  for (const auto& it : items)
    if (it.id == id) return &it;
  return nullptr;
}

Region running_of(const Region& s, const Region& f) { return (s | f).complement(); }

std::optional<CellId> first_of(const Region& r) {
  if (r.empty()) return std::nullopt;
  return r.first();
}

void push_unique(std::vector<std::string>& v, const std::string& s) {
  if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(s);
}

// Finds an action that reaches itself through links, as "a -> b -> a".
std::optional<std::string> find_cycle(const Library& lib) {
  std::map<std::string, std::vector<std::string>> next;
  for (const auto& c : lib.actions)
    for (const auto& b : c.preconditions)
      for (const auto& a : lib.condition(b).achievers) next[a].push_back(c.id);
  std::map<std::string, int> color;
  std::vector<std::string> stack;
  std::optional<std::string> found;
  std::function<void(const std::string&)> dfs = [&](const std::string& v) {
    color[v] = 1;
    stack.push_back(v);
    for (const auto& w : next[v]) {
      if (found) return;
      if (color[w] == 1) {
        auto it = std::find(stack.begin(), stack.end(), w);
        std::string s;
        for (; it != stack.end(); ++it) s += *it + " -> ";
        found = s + w;
        return;
      }
      if (color[w] == 0) dfs(w);
    }
    stack.pop_back();
    color[v] = 2;
  };
  for (const auto& a : lib.actions) {
    if (found) break;
    if (color[a.id] == 0) dfs(a.id);
  }
  return found;
}

}  // namespace

bool Library::is_action(const std::string& id) const { return find_by_id(actions, id) != nullptr; }
bool Library::is_condition(const std::string& id) const { return find_by_id(conditions, id) != nullptr; }

const LibraryAction& Library::action(const std::string& id) const {
  if (const auto* a = find_by_id(actions, id)) return *a;
  throw ValidationError("unknown library action '" + id + "'");
}

const LibraryCondition& Library::condition(const std::string& id) const {
  if (const auto* c = find_by_id(conditions, id)) return *c;
  throw ValidationError("unknown library condition '" + id + "'");
}

void validate_library_structure(const Library& lib) {
  const std::size_t n = lib.world.cell_count();
  std::set<std::string> ids;
  for (const auto& a : lib.actions) {
    if (a.id.empty()) throw ValidationError("library action with empty id");
    if (!ids.insert(a.id).second) throw ValidationError("duplicate library id '" + a.id + "'");
    if (a.success.size() != n || a.failure.size() != n)
      throw ValidationError("action '" + a.id + "' region size does not match the universe");
    validate_map(lib.world, a.controller, "action " + a.id);
  }
  for (const auto& c : lib.conditions) {
    if (c.id.empty()) throw ValidationError("library condition with empty id");
    if (!ids.insert(c.id).second) throw ValidationError("duplicate library id '" + c.id + "'");
    if (c.success.size() != n || c.failure.size() != n)
      throw ValidationError("condition '" + c.id + "' region size does not match the universe");
  }
  std::set<std::string> used_pre, used_ach;
  for (const auto& a : lib.actions)
    for (const auto& j : a.preconditions) {
      if (!lib.is_condition(j))
        throw ValidationError("action '" + a.id + "' lists unknown precondition '" + j + "'");
      if (!used_pre.insert(j).second)
        throw ValidationError("condition '" + j + "' is a precondition of more than one action");
    }
  for (const auto& c : lib.conditions)
    for (const auto& j : c.achievers) {
      if (!lib.is_action(j))
        throw ValidationError("condition '" + c.id + "' lists unknown achiever '" + j + "'");
      if (!used_ach.insert(j).second)
        throw ValidationError("action '" + j + "' achieves more than one condition");
    }
}

std::vector<LibraryIssue> library_issues(const Library& lib) {
  std::vector<LibraryIssue> out;
  const Region all = lib.world.universe();
  for (const auto& a : lib.actions) {
    if (!a.doa || a.doa->basin.empty()) continue;
    Region meet = all;
    for (const auto& j : a.preconditions) meet &= lib.condition(j).success;
    if (meet != a.doa->basin)
      out.push_back({"basin_equals_precondition_meet", a.id, first_of((meet - a.doa->basin) | (a.doa->basin - meet))});
  }
  for (const auto& c : lib.conditions) {
    const Region r = running_of(c.success, c.failure);
    if (!r.empty()) out.push_back({"condition_never_runs", c.id, first_of(r)});
    if (c.success.intersects(c.failure)) out.push_back({"condition_regions_disjoint", c.id, first_of(c.success & c.failure)});
    for (const auto& j : c.achievers) {
      const Region extra = lib.action(j).success - c.success;
      if (!extra.empty()) out.push_back({"achiever_success_inside_condition", c.id + "<-" + j, first_of(extra)});
    }
  }
  return out;
}

BTModel build_bcbt(const Library& lib, const std::string& root_action, const BcbtOptions& opts) {
  validate_library_structure(lib);
  if (!lib.is_action(root_action)) throw ValidationError("root '" + root_action + "' is not a library action");
  if (auto cyc = find_cycle(lib)) throw ValidationError("cyclic library: " + *cyc);

  std::function<TreeBuilder::Spec(const std::string&)> action_bt;
  auto condition_bt = [&](const std::string& id) {
    const auto& c = lib.condition(id);
    Node nd;
    nd.kind = NodeKind::Condition;
    nd.name = id;
    nd.success = c.success;
    nd.failure = c.failure;
    auto leaf = TreeBuilder::leaf(std::move(nd));
    if (c.achievers.empty() && !opts.wrap_bare_conditions) return leaf;
    std::vector<TreeBuilder::Spec> kids{std::move(leaf)};
    for (const auto& a : c.achievers) kids.push_back(action_bt(a));
    return TreeBuilder::fal(kFalPrefix + id, std::move(kids));
  };
  action_bt = [&](const std::string& id) {
    const auto& a = lib.action(id);
    std::vector<TreeBuilder::Spec> kids;
    for (const auto& j : a.preconditions) kids.push_back(condition_bt(j));
    kids.push_back(TreeBuilder::action(id, a.success, a.failure, a.controller, a.doa));
    return TreeBuilder::seq(kSeqPrefix + id, std::move(kids));
  };
  return TreeBuilder::build(lib.world, action_bt(root_action));
}

bool LinkStructure::precedes(const std::string& a, const std::string& c) const {
  auto ia = std::find(action_ids.begin(), action_ids.end(), a);
  auto ic = std::find(action_ids.begin(), action_ids.end(), c);
  if (ia == action_ids.end() || ic == action_ids.end()) throw ValidationError("unknown action in link order");
  return order.contains(ia - action_ids.begin(), ic - action_ids.begin());
}

LinkStructure compute_links(const Library& lib) {
  validate_library_structure(lib);
  LinkStructure ls;
  for (const auto& a : lib.actions) ls.action_ids.push_back(a.id);
  auto index = [&](const std::string& id) {
    return std::size_t(std::find(ls.action_ids.begin(), ls.action_ids.end(), id) - ls.action_ids.begin());
  };
  for (const auto& c : lib.actions)
    for (const auto& b : c.preconditions)
      for (const auto& a : lib.condition(b).achievers) ls.links.push_back({a, b, c.id});
  std::sort(ls.links.begin(), ls.links.end());

  Relation direct(ls.action_ids.size());
  for (const auto& l : ls.links) direct.insert(index(l.achiever), index(l.consumer));
  ls.order = reflexive_transitive_closure(direct);

  for (const auto& i : ls.action_ids) {
    auto& rel = ls.related[i];
    auto& post = ls.post[i];
    auto& acc = ls.acc[i];
    for (const auto& l : ls.links) {
      if (!ls.order.contains(index(i), index(l.achiever))) continue;
      rel.push_back(l);
      push_unique(post, l.condition);
      for (const auto& j : lib.action(l.consumer).preconditions) {
        if (j == l.condition) break;
        push_unique(acc, j);
      }
    }
  }
  return ls;
}

std::vector<LibraryIssue> bcbt_assumption_issues(const Library& lib, const LinkStructure& links,
                                                 const std::string& root_action) {
  std::vector<LibraryIssue> out;
  auto it = links.related.find(root_action);
  if (it == links.related.end()) throw ValidationError("root '" + root_action + "' is not a library action");
  for (const auto& l : it->second)
    out.push_back({"root_has_no_postcondition", l.achiever + "," + l.condition + "," + l.consumer, std::nullopt});
  for (const auto& c : lib.conditions) {
    if (c.achievers.size() > 1) out.push_back({"single_achiever", c.id, std::nullopt});
    if (c.achievers.empty() && !c.failure.empty())
      out.push_back({"achieverless_condition_never_fails", c.id, first_of(c.failure)});
  }
  return out;
}

Region bc_influence(const Library& lib, const LinkStructure& links, const std::string& action) {
  // Only the single-achiever clause enters the formula: with two achievers
  // the second is also gated by the first one failing.
  for (const auto& c : lib.conditions)
    if (c.achievers.size() > 1)
      throw PreconditionError("assumption violated: condition '" + c.id + "' has more than one achiever");
  Region out = lib.world.universe();
  for (const auto& j : links.acc.at(action)) out &= lib.condition(j).success;
  for (const auto& j : lib.action(action).preconditions) out &= lib.condition(j).success;
  for (const auto& j : links.post.at(action)) out &= lib.condition(j).failure;
  return out;
}

BcMetadata bc_metadata(const Library& lib, const std::string& root_action) {
  BcMetadata md;
  const Region all = lib.world.universe();
  const Region none = lib.world.empty_region();

  std::function<const Metadata&(const std::string&)> action_md;
  auto condition_md = [&](const std::string& id) -> const Metadata& {
    auto it = md.condition_subtree.find(id);
    if (it != md.condition_subtree.end()) return it->second;
    const auto& c = lib.condition(id);
    // Fallback rule with R = empty for the condition: every running term is
    // gated by the condition's own failure region.
    Region fail_acc = c.failure;
    Region running = none;
    for (const auto& a : c.achievers) {
      const Metadata& sub = action_md(a);
      running |= sub.running & fail_acc;
      fail_acc &= sub.failure;
    }
    return md.condition_subtree[id] = Metadata{running, c.success, fail_acc};
  };
  action_md = [&](const std::string& id) -> const Metadata& {
    auto it = md.action_subtree.find(id);
    if (it != md.action_subtree.end()) return it->second;
    const auto& a = lib.action(id);
    Region succ_acc = all;
    Region running = none;
    Region failure = none;
    for (const auto& j : a.preconditions) {
      const Metadata& sub = condition_md(j);
      running |= sub.running & succ_acc;
      failure |= sub.failure & succ_acc;
      succ_acc &= lib.condition(j).success;
    }
    running |= running_of(a.success, a.failure) & succ_acc;
    return md.action_subtree[id] = Metadata{running, a.success & succ_acc, failure};
  };
  if (auto cyc = find_cycle(lib)) throw ValidationError("cyclic library: " + *cyc);
  action_md(root_action);
  return md;
}

VertexId subtree_vertex(const BTModel& m, const Library& lib, const std::string& id) {
  const VertexId v = m.require(id);
  const auto p = m.tree().parent(v);
  if (!p) return v;
  const std::string& wrapper = lib.is_action(id) ? kSeqPrefix + id : kFalPrefix + id;
  return m.name(*p) == wrapper ? *p : v;
}

BcOperatingVerdict verify_bc_operating(const Library& lib, const LinkStructure& links, const BTModel& m,
                                       const NodeAnalysis& a) {
  BcOperatingVerdict out;
  auto fail = [&](std::string clause, const std::string& id, std::optional<CellId> w) {
    out.ok = false;
    out.failures.push_back({std::move(clause), id, w});
  };
  for (VertexId v : m.leaves()) {
    const std::string& id = m.name(v);
    const Region& om = a.omega(v);
    if (lib.is_action(id)) {
      const auto& act = lib.action(id);
      if (om.intersects(act.failure)) fail("omega_outside_failure", id, first_of(om & act.failure));
      const bool related = !links.related.at(id).empty();
      if (related && om.intersects(act.success)) fail("omega_outside_success", id, first_of(om & act.success));
      if (a.in_success_pathway(v) != !related) fail("success_pathway", id, std::nullopt);
      if (!a.in_failure_pathway(v)) fail("failure_pathway", id, std::nullopt);
    } else if (lib.is_condition(id)) {
      if (!om.empty()) fail("condition_omega_empty", id, first_of(om));
      if (a.in_success_pathway(v)) fail("success_pathway", id, std::nullopt);
      if (a.in_failure_pathway(v) != lib.condition(id).achievers.empty()) fail("failure_pathway", id, std::nullopt);
    }
  }
  return out;
}

BcConvergenceVerdict check_bc_convergence(const Library& lib, const BTModel& m, const BcConvergenceOptions& opts) {
  BcConvergenceVerdict out;
  const LinkStructure links = compute_links(lib);
  const std::string& root_name = m.name(m.root());
  const std::string root = root_name.rfind(kSeqPrefix, 0) == 0 ? root_name.substr(kSeqPrefix.size()) : root_name;
  out.library_issues = library_issues(lib);
  out.assumption_issues = bcbt_assumption_issues(lib, links, root);

  for (VertexId v : m.actions()) {
    const std::string& id = m.name(v);
    if (!lib.is_action(id) || !m.node(v).doa) continue;
    Region meet = lib.world.universe();
    for (const auto& j : links.acc.at(id)) meet &= lib.condition(j).success;
    const Region extra = m.node(v).doa->basin - meet;
    if (!extra.empty()) out.hypothesis_issues.push_back({"basin_inside_acc_success", id, first_of(extra)});
  }
  if (opts.strict && !out.hypothesis_issues.empty()) {
    const auto& h = out.hypothesis_issues.front();
    throw PreconditionError("action '" + h.id + "': DOA cell " + std::to_string(*h.witness) +
                            " lies outside the success regions of its ACC conditions");
  }

  out.convergence = run_convergence(m, m.actions(), opts.convergence);
  const auto& cr = *out.convergence;
  out.behavior = behavior_graph(cr.graph, flatten_classes(cr.condensed, cr.analysis_classes));

  auto pattern = [&](VertexId i, VertexId j) {
    const std::string &a = m.name(i), &b = m.name(j);
    if (!lib.is_action(a) || !lib.is_action(b)) return false;
    const auto& acc = links.acc.at(b);
    const auto& pre = lib.action(b).preconditions;
    for (const auto& c : links.post.at(a))
      if (std::find(acc.begin(), acc.end(), c) != acc.end() || std::find(pre.begin(), pre.end(), c) != pre.end())
        return true;
    return false;
  };
  Relation rel(m.size());
  for (auto [i, j] : out.behavior.edges) {
    if (i == j) continue;
    rel.insert(i, j);
    if (!pattern(i, j)) out.edge_violations.emplace_back(m.name(i), m.name(j));
  }
  const Relation closed = reflexive_transitive_closure(rel);
  for (auto [i, j] : closed.pairs())
    if (i != j && !pattern(i, j)) out.closure_violations.emplace_back(m.name(i), m.name(j));
  return out;
}

}  // namespace btconv
