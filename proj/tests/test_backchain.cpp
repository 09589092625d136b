#include <doctest.h>

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "btconv/backchain.hpp"
#include "support/support.hpp"

using namespace btconv;
using namespace btconv::testing;

namespace {

// Numbering of the manipulator drawing: conditions 1..8, actions 9..14.
const std::map<int, std::string> kManipulator = {
    {1, "in_safe_area"},   {2, "safe_area_reachable"}, {3, "object_at_goal"}, {4, "object_in_gripper"},
    {5, "near_object"},    {6, "object_reachable"},    {7, "near_goal"},      {8, "goal_reachable"},
    {9, "go_to_safe_area"}, {10, "go_to_object"},      {11, "grasp_object"},  {12, "go_to_goal"},
    {13, "place_object"},  {14, "idle"},
};

const std::string& id(int k) { return kManipulator.at(k); }

Link link(int a, int b, int c) { return {id(a), id(b), id(c)}; }

Library manipulator() {
  const SpecDocument doc = load_model("manipulator_lib.json");
  REQUIRE(doc.library);
  return *doc.library;
}

const Region& S(const Library& lib, int k) {
  return lib.is_action(id(k)) ? lib.action(id(k)).success : lib.condition(id(k)).success;
}
const Region& F(const Library& lib, int k) {
  return lib.is_action(id(k)) ? lib.action(id(k)).failure : lib.condition(id(k)).failure;
}

// Nested "name[child,...]" rendering of a tree.
std::string shape(const BTModel& m, VertexId v) {
  std::string out = m.name(v);
  const auto& kids = m.tree().children(v);
  if (kids.empty()) return out;
  out += "[";
  for (std::size_t i = 0; i < kids.size(); ++i) out += (i ? "," : "") + shape(m, kids[i]);
  return out + "]";
}

std::vector<std::string> leaf_names(const BTModel& m) {
  std::vector<std::string> out;
  for (VertexId v : m.tree().preorder())
    if (m.is_leaf(v)) out.push_back(m.name(v));
  return out;
}

LibraryAction* find_action(Library& lib, const std::string& name) {
  for (auto& a : lib.actions)
    if (a.id == name) return &a;
  return nullptr;
}

LibraryCondition* find_condition(Library& lib, const std::string& name) {
  for (auto& c : lib.conditions)
    if (c.id == name) return &c;
  return nullptr;
}

// The two tables verbatim, with the manipulator's regions. Go to object has
// no action-table row, so it gets one with no preconditions.
Library tables_only() {
  Library lib = manipulator();
  for (auto& a : lib.actions) a.preconditions.clear();
  for (auto& c : lib.conditions) c.achievers.clear();
  find_action(lib, "grasp_object")->preconditions = {"object_reachable"};
  find_action(lib, "place_object")->preconditions = {"object_in_gripper", "near_goal"};
  find_action(lib, "go_to_safe_area")->preconditions = {"safe_area_reachable"};
  find_action(lib, "idle")->preconditions = {"in_safe_area", "object_at_goal"};
  find_condition(lib, "object_at_goal")->achievers = {"place_object"};
  find_condition(lib, "in_safe_area")->achievers = {"go_to_safe_area"};
  find_condition(lib, "near_object")->achievers = {"go_to_object"};
  return lib;
}

World line(std::size_t n) {
  std::vector<std::vector<double>> c;
  for (std::size_t i = 0; i < n; ++i) c.push_back({double(i)});
  return World::with_coords(c);
}

}  // namespace

TEST_CASE("manipulator links and related conditions") {
  const Library lib = manipulator();
  const LinkStructure ls = compute_links(lib);
  std::vector<Link> want{link(9, 1, 14), link(10, 5, 11), link(11, 4, 13), link(12, 7, 13), link(13, 3, 14)};
  std::sort(want.begin(), want.end());
  CHECK(ls.links == want);

  std::vector<Link> l12 = ls.related.at(id(12));
  std::sort(l12.begin(), l12.end());
  std::vector<Link> want12{link(12, 7, 13), link(13, 3, 14)};
  std::sort(want12.begin(), want12.end());
  CHECK(l12 == want12);
  const auto as_set = [](const std::vector<std::string>& v) { return std::set<std::string>(v.begin(), v.end()); };
  CHECK(as_set(ls.post.at(id(12))) == std::set<std::string>{id(7), id(3)});
  CHECK(as_set(ls.acc.at(id(12))) == std::set<std::string>{id(4), id(1)});

  // the root has no postconditions
  CHECK(ls.related.at(id(14)).empty());
  CHECK(ls.post.at(id(14)).empty());
  CHECK(ls.acc.at(id(14)).empty());

  CHECK(ls.precedes(id(10), id(14)));
  CHECK(ls.precedes(id(12), id(13)));
  CHECK_FALSE(ls.precedes(id(14), id(10)));
  CHECK_FALSE(ls.precedes(id(12), id(11)));
  CHECK(ls.order.is_reflexive());
  CHECK(ls.order.is_transitive());
  CHECK(ls.order.is_antisymmetric());
}

TEST_CASE("links follow their definition on random libraries") {
  auto rng = make_rng("links");
  for (int k = 0; k < 40; ++k) {
    const Library lib = random_library(rng);
    const LinkStructure ls = compute_links(lib);
    std::set<Link> want;
    for (const auto& c : lib.actions)
      for (const auto& b : c.preconditions)
        for (const auto& a : lib.condition(b).achievers) want.insert({a, b, c.id});
    CHECK(std::set<Link>(ls.links.begin(), ls.links.end()) == want);
    CHECK(ls.order.is_antisymmetric());
    for (const auto& i : ls.action_ids) {
      std::set<std::string> post, acc;
      for (const Link& l : ls.links) {
        if (!ls.precedes(i, l.achiever)) continue;
        post.insert(l.condition);
        for (const auto& j : lib.action(l.consumer).preconditions) {
          if (j == l.condition) break;
          acc.insert(j);
        }
      }
      CHECK(std::set<std::string>(ls.post.at(i).begin(), ls.post.at(i).end()) == post);
      CHECK(std::set<std::string>(ls.acc.at(i).begin(), ls.acc.at(i).end()) == acc);
    }
    CHECK(library_issues(lib).empty());
    CHECK(bcbt_assumption_issues(lib, ls, "a0").empty());
  }
}

TEST_CASE("manipulator tree shape") {
  const Library lib = manipulator();
  const BTModel bare = build_bcbt(lib, "idle");
  CHECK(bare.size() == 25);
  const BTModel drawn = build_bcbt(lib, "idle", {true});
  CHECK(drawn.size() == 28);
  std::vector<std::string> want;
  for (int k : {1, 2, 9, 3, 4, 5, 6, 10, 11, 7, 8, 12, 13, 14}) want.push_back(id(k));
  CHECK(leaf_names(drawn) == want);
  CHECK(leaf_names(bare) == want);
  CHECK(shape(drawn, drawn.root()) ==
        "seq:idle[fal:in_safe_area[in_safe_area,seq:go_to_safe_area[fal:safe_area_reachable[safe_area_reachable],"
        "go_to_safe_area]],fal:object_at_goal[object_at_goal,seq:place_object[fal:object_in_gripper[object_in_gripper,"
        "seq:grasp_object[fal:near_object[near_object,seq:go_to_object[fal:object_reachable[object_reachable],"
        "go_to_object]],grasp_object]],fal:near_goal[near_goal,seq:go_to_goal[fal:goal_reachable[goal_reachable],"
        "go_to_goal]],place_object]],idle]");

  // preorder respects the C^Post / C^ACC pattern
  const LinkStructure ls = compute_links(lib);
  const auto pre = drawn.tree().preorder();
  auto position = [&](const std::string& name) {
    return std::find(pre.begin(), pre.end(), drawn.require(name)) - pre.begin();
  };
  for (const auto& i : ls.action_ids)
    for (const auto& j : ls.action_ids) {
      bool meets = false;
      for (const auto& c : ls.post.at(i)) {
        const auto& acc = ls.acc.at(j);
        const auto& cj = lib.action(j).preconditions;
        meets = meets || std::count(acc.begin(), acc.end(), c) || std::count(cj.begin(), cj.end(), c);
      }
      if (meets) CHECK(position(i) < position(j));
    }
}

TEST_CASE("tables-only library and the top-level tree") {
  const Library lib = tables_only();
  const BTModel m = build_bcbt(lib, "idle");
  CHECK(shape(m, m.root()) ==
        "seq:idle[fal:in_safe_area[in_safe_area,seq:go_to_safe_area[safe_area_reachable,go_to_safe_area]],"
        "fal:object_at_goal[object_at_goal,seq:place_object[object_in_gripper,near_goal,place_object]],idle]");
  CHECK_FALSE(m.find("go_to_object"));

  Library top = lib;
  for (auto& c : top.conditions) c.achievers.clear();
  const BTModel t = build_bcbt(top, "idle");
  CHECK(shape(t, t.root()) == "seq:idle[in_safe_area,object_at_goal,idle]");
  const BTModel tw = build_bcbt(top, "idle", {true});
  CHECK(shape(tw, tw.root()) == "seq:idle[fal:in_safe_area[in_safe_area],fal:object_at_goal[object_at_goal],idle]");

  const BTModel lone = build_bcbt(top, "go_to_object");
  CHECK(shape(lone, lone.root()) == "seq:go_to_object[go_to_object]");
}

TEST_CASE("manipulator influence regions") {
  const Library lib = manipulator();
  const LinkStructure ls = compute_links(lib);
  const Region i12 = S(lib, 1) & S(lib, 4) & S(lib, 8) & F(lib, 3) & F(lib, 7);
  CHECK(bc_influence(lib, ls, id(12)) == i12);
  CHECK(bc_influence(lib, ls, id(14)) == (S(lib, 1) & S(lib, 3)));
  const BTModel m = build_bcbt(lib, "idle");
  const NodeAnalysis a = analyze(m);
  for (const auto& act : lib.actions) CHECK(bc_influence(lib, ls, act.id) == a.influence[m.require(act.id)]);
  const VertexId idle = m.require(id(14));
  CHECK(a.omega(idle) == (bc_influence(lib, ls, id(14)) & (a.metadata[idle].running | m.node(idle).success)));
}

TEST_CASE("manipulator library sets, link order and the six influence rows") {
  const Library lib = manipulator();
  const LinkStructure ls = compute_links(lib);
  const auto ids = [](std::initializer_list<int> ks) {
    std::set<std::string> out;
    for (int k : ks) out.insert(id(k));
    return out;
  };
  const auto as_set = [](const std::vector<std::string>& v) { return std::set<std::string>(v.begin(), v.end()); };
  const std::map<int, std::set<std::string>> pre{{9, ids({2})},  {10, ids({6})},    {11, ids({5})},
                                                 {12, ids({8})}, {13, ids({4, 7})}, {14, ids({1, 3})}};
  for (const auto& [k, want] : pre) CHECK(as_set(lib.action(id(k)).preconditions) == want);
  const std::map<int, std::set<std::string>> ach{{1, ids({9})}, {2, {}},         {3, ids({13})}, {4, ids({11})},
                                                 {5, ids({10})}, {6, {}},        {7, ids({12})}, {8, {}}};
  for (const auto& [k, want] : ach) CHECK(as_set(lib.condition(id(k)).achievers) == want);

  std::set<std::pair<int, int>> order{{9, 9},   {9, 14},  {10, 10}, {10, 11}, {10, 13}, {10, 14}, {11, 11}, {11, 13},
                                      {11, 14}, {12, 12}, {12, 13}, {12, 14}, {13, 13}, {13, 14}, {14, 14}};
  for (int a = 9; a <= 14; ++a)
    for (int c = 9; c <= 14; ++c) {
      CAPTURE(a);
      CAPTURE(c);
      CHECK(ls.precedes(id(a), id(c)) == (order.count({a, c}) > 0));
    }

  const Region all = lib.world.universe();
  const auto s = [&](int k) { return S(lib, k); };
  const auto f = [&](int k) { return F(lib, k); };
  const std::map<int, Region> rows{
      {9, all & s(2) & f(1)},
      {10, s(1) & s(6) & f(3) & f(4) & f(5)},
      {11, s(1) & s(5) & f(3) & f(4)},
      {12, (s(1) & s(4)) & s(8) & (f(3) & f(7))},
      {13, s(1) & (s(4) & s(7)) & f(3)},
      {14, all & (s(1) & s(3)) & all},
  };
  const BTModel m = build_bcbt(lib, "idle", {true});
  const NodeAnalysis a = analyze(m);
  for (const auto& [k, want] : rows) {
    CAPTURE(k);
    CHECK(bc_influence(lib, ls, id(k)) == want);
    CHECK(a.influence[m.require(id(k))] == want);
    const Region running = (s(k) | f(k)).complement();
    CHECK(a.omega(m.require(id(k))) == (k == 14 ? want & (running | s(k)) : want & running));
  }
  // C_i^Post meets C_j^ACC u C_j exactly when i comes before j in preorder
  for (int i = 9; i <= 14; ++i)
    for (int j = 9; j <= 14; ++j) {
      bool meets = false;
      for (const auto& c : ls.post.at(id(i))) {
        const auto& acc = ls.acc.at(id(j));
        const auto& cj = lib.action(id(j)).preconditions;
        meets = meets || std::count(acc.begin(), acc.end(), c) || std::count(cj.begin(), cj.end(), c);
      }
      CAPTURE(i);
      CAPTURE(j);
      CHECK(meets == (i < j));
    }
}

TEST_CASE("backchained pathways") {
  const Library lib = manipulator();
  const BTModel m = build_bcbt(lib, "idle");
  const NodeAnalysis a = analyze(m);
  for (int k = 1; k <= 14; ++k) {
    CAPTURE(k);
    const VertexId v = m.require(id(k));
    CHECK(a.in_success_pathway(v) == (k == 14));
    const bool achieverless = k <= 8 && lib.condition(id(k)).achievers.empty();
    CHECK(a.in_failure_pathway(v) == (k >= 9 || achieverless));
  }
}

TEST_CASE("manipulator operating-region lemma") {
  const Library lib = manipulator();
  const LinkStructure ls = compute_links(lib);
  for (bool wrap : {false, true}) {
    const BTModel m = build_bcbt(lib, "idle", {wrap});
    const BcOperatingVerdict v = verify_bc_operating(lib, ls, m, analyze(m));
    CHECK(v.ok);
    for (const auto& f : v.failures) MESSAGE(f.clause << " " << f.id);
  }
}

TEST_CASE("specialized formulas equal the generic pipeline on random libraries") {
  auto rng = make_rng("bc_generic");
  std::size_t actions = 0;
  for (int k = 0; k < 40; ++k) {
    const Library lib = random_library(rng);
    const LinkStructure ls = compute_links(lib);
    for (bool wrap : {false, true}) {
      const BTModel m = build_bcbt(lib, "a0", {wrap});
      const NodeAnalysis a = analyze(m);
      const BcMetadata md = bc_metadata(lib, "a0");
      for (const auto& act : lib.actions) {
        if (!m.find(act.id)) continue;
        ++actions;
        CHECK(bc_influence(lib, ls, act.id) == a.influence[m.require(act.id)]);
        const Metadata& want = a.metadata[subtree_vertex(m, lib, act.id)];
        const Metadata& got = md.action_subtree.at(act.id);
        CHECK(got.running == want.running);
        CHECK(got.success == want.success);
        CHECK(got.failure == want.failure);
      }
      for (const auto& c : lib.conditions) {
        if (!m.find(c.id)) continue;
        const Metadata& want = a.metadata[subtree_vertex(m, lib, c.id)];
        const Metadata& got = md.condition_subtree.at(c.id);
        CHECK(got.running == want.running);
        CHECK(got.success == want.success);
        CHECK(got.failure == want.failure);
      }
      const BcOperatingVerdict v = verify_bc_operating(lib, ls, m, a);
      CHECK(v.ok);
    }
  }
  CHECK(actions >= 40);
}

TEST_CASE("cyclic libraries are rejected") {
  const std::size_t n = 3;
  Library lib{World(n), {}, {}};
  const SuccessorMap id3 = SuccessorMap::identity(n);
  lib.actions.push_back({"a", Region(n, {0}), Region(n), id3, std::nullopt, {"p"}});
  lib.actions.push_back({"b", Region(n, {1}), Region(n), id3, std::nullopt, {"q"}});
  lib.conditions.push_back({"p", Region(n, {1}), Region(n, {0, 2}), {"b"}});
  lib.conditions.push_back({"q", Region(n, {0}), Region(n, {1, 2}), {"a"}});
  CHECK_THROWS_AS(build_bcbt(lib, "a"), ValidationError);
  CHECK_THROWS_AS(bc_metadata(lib, "a"), ValidationError);
  CHECK_FALSE(compute_links(lib).order.is_antisymmetric());

  // breaking the loop makes generation terminate
  lib.conditions[1].achievers.clear();
  CHECK_NOTHROW(build_bcbt(lib, "a"));
}

TEST_CASE("library structure validation") {
  const std::size_t n = 2;
  const SuccessorMap id2 = SuccessorMap::identity(n);
  Library dup{World(n), {{"x", Region(n), Region(n), id2, std::nullopt, {}}}, {{"x", Region(n), Region(n), {}}}};
  CHECK_THROWS_AS(validate_library_structure(dup), ValidationError);
  Library dangling{World(n), {{"x", Region(n), Region(n), id2, std::nullopt, {"nope"}}}, {}};
  CHECK_THROWS_AS(validate_library_structure(dangling), ValidationError);
  Library shared{World(n),
                 {{"x", Region(n), Region(n), id2, std::nullopt, {"c"}}, {"y", Region(n), Region(n), id2, std::nullopt, {"c"}}},
                 {{"c", Region::full(n), Region(n), {}}}};
  CHECK_THROWS_AS(validate_library_structure(shared), ValidationError);
  CHECK_THROWS_AS(build_bcbt(shared, "z"), ValidationError);

  Library two{World(n),
              {{"x", Region(n), Region(n), id2, std::nullopt, {"c"}},
               {"y", Region(n, {0}), Region(n), id2, std::nullopt, {}},
               {"z", Region(n, {0}), Region(n), id2, std::nullopt, {}}},
              {{"c", Region(n, {0}), Region(n, {1}), {"y", "z"}}}};
  CHECK_NOTHROW(build_bcbt(two, "x"));  // generation allows several achievers
  const LinkStructure ls = compute_links(two);
  const auto issues = bcbt_assumption_issues(two, ls, "x");
  CHECK(std::any_of(issues.begin(), issues.end(), [](const LibraryIssue& i) { return i.clause == "single_achiever"; }));
  CHECK_THROWS_AS(bc_influence(two, ls, "x"), PreconditionError);
}

TEST_CASE("manipulator backchained convergence") {
  const Library lib = manipulator();
  const BTModel m = build_bcbt(lib, "idle");
  const BcConvergenceVerdict v = check_bc_convergence(lib, m);
  CHECK(v.library_issues.empty());
  CHECK(v.hypothesis_issues.empty());
  std::set<std::string> clauses;
  for (const auto& i : v.assumption_issues) clauses.insert(i.clause + ":" + i.id);
  CHECK(clauses == std::set<std::string>{"achieverless_condition_never_fails:object_reachable",
                                         "achieverless_condition_never_fails:goal_reachable"});
  CHECK(v.pattern_holds());
  CHECK(v.closure_violations.empty());
  REQUIRE(v.convergence);
  REQUIRE(v.convergence->certified());
  CHECK(check_acyclic_corollary(v.convergence->condensed, v.convergence->analysis_classes).acyclic);
  CHECK_FALSE(v.behavior.edges.empty());
}

TEST_CASE("surveying library backchained convergence") {
  const SpecDocument doc = load_model("surveying_lib.json");
  REQUIRE(doc.library);
  const BTModel m = build_bcbt(*doc.library, *doc.library_root);
  BcConvergenceOptions opts;
  opts.convergence = convergence_options(doc);
  opts.strict = false;
  const BcConvergenceVerdict v = check_bc_convergence(*doc.library, m, opts);
  REQUIRE(v.convergence);
  const ConvergenceResult& r = *v.convergence;
  REQUIRE(r.certified());
  const auto gh = r.graph.find(m.require("go_home"), Flavor::B);
  REQUIRE(gh);
  std::set<std::string> merged;
  for (std::size_t u : r.condensed.classes[r.condensed.class_of[*gh]]) merged.insert(r.graph.label(m, u));
  CHECK(merged == std::set<std::string>{"v_b(go_home)", "v_b(charge)", "v_b(go_to_path)", "v_b(follow_path)"});
  CHECK(r.certificate().analysis_set.size() == 3);
  CHECK(r.certificate().bound == 3 * r.certificate().max_exit);
  CHECK_FALSE(v.library_issues.empty());
  if (!v.hypothesis_issues.empty()) {
    opts.strict = true;
    CHECK_THROWS_AS(check_bc_convergence(*doc.library, m, opts), PreconditionError);
  }
}

TEST_CASE("hypothesis violations raise in strict mode") {
  Library lib = manipulator();
  // widen go_to_goal's basin by one cell outside the ACC success regions
  LibraryAction& g = *find_action(lib, "go_to_goal");
  const Region acc = lib.condition("object_in_gripper").success & lib.condition("in_safe_area").success;
  const Region outside = lib.world.universe() - acc;
  REQUIRE(g.doa);
  REQUIRE_FALSE(outside.empty());
  g.doa->basin.insert(outside.first());
  const BTModel m = build_bcbt(lib, "idle");
  CHECK_THROWS_WITH_AS(check_bc_convergence(lib, m), doctest::Contains("go_to_goal"), PreconditionError);
}

TEST_CASE("single-action library") {
  const std::size_t n = 3;
  SuccessorMap right{{1, 2, 2}};
  Library lib{line(n), {{"go", Region(n, {2}), Region(n), right, Doa{Region::full(n), Region(n, {2}), 2}, {}}}, {}};
  const BTModel m = build_bcbt(lib, "go");
  CHECK(shape(m, m.root()) == "seq:go[go]");
  const BcConvergenceVerdict v = check_bc_convergence(lib, m);
  REQUIRE(v.convergence);
  REQUIRE(v.convergence->certified());
  const Certificate& c = v.convergence->certificate();
  CHECK(c.theorem_bound == 2);
  CHECK(c.longest_path_bound == 2);
  CHECK(v.pattern_holds());
}
