#include "btconv/spec_io.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace btconv {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

constexpr const char* kFormat = "btconv/1";

std::string at(const std::string& base, const std::string& key) { return base.empty() ? key : base + "." + key; }
std::string at(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

const json& field(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_object()) throw SpecError(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw SpecError(at(where, key), "missing field");
  return *it;
}

std::size_t to_index(const json& j, const std::string& where) {
  if (!j.is_number_unsigned()) throw SpecError(where, "expected a non-negative integer");
  return j.get<std::size_t>();
}

std::string to_str(const json& j, const std::string& where) {
  if (!j.is_string()) throw SpecError(where, "expected a string");
  return j.get<std::string>();
}

Region parse_region(const json& j, std::size_t n, const std::string& where) {
  if (!j.is_array()) throw SpecError(where, "expected a list of cells");
  Region r(n);
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::size_t c = to_index(j[i], at(where, i));
    if (c >= n) throw SpecError(at(where, i), "cell " + std::to_string(c) + " outside universe of " + std::to_string(n));
    r.insert(c);
  }
  return r;
}

SuccessorMap parse_map(const json& j, std::size_t n, const std::string& where) {
  if (!j.is_array()) throw SpecError(where, "expected a successor array");
  if (j.size() != n)
    throw SpecError(where, "successor array has " + std::to_string(j.size()) + " entries, universe has " + std::to_string(n));
  SuccessorMap m;
  m.next.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = to_index(j[i], at(where, i));
    if (c >= n) throw SpecError(at(where, i), "successor " + std::to_string(c) + " outside universe");
    m.next.push_back(c);
  }
  return m;
}

// "auto" DOAs are derived once the controller is known.
struct DoaField {
  bool automatic = false;
  std::optional<Doa> doa;
};

DoaField parse_doa(const json& j, std::size_t n, const std::string& where) {
  if (j.is_string()) {
    if (j.get<std::string>() != "auto") throw SpecError(where, "expected a DOA object or \"auto\"");
    return {true, std::nullopt};
  }
  Doa d{parse_region(field(j, "basin", where), n, at(where, "basin")),
        parse_region(field(j, "goal", where), n, at(where, "goal")), 1};
  if (j.contains("tau")) d.tau = to_index(j["tau"], at(where, "tau"));
  if (d.tau == 0) throw SpecError(at(where, "tau"), "deadline must be positive");
  return {false, d};
}

std::optional<Doa> resolve_doa(const DoaField& f, const std::optional<SuccessorMap>& u, const Region& s, const Region& fail,
                               const std::string& where) {
  if (!f.automatic) return f.doa;
  if (!u) throw SpecError(where, "\"auto\" DOA needs a controller");
  return derive_doa(*u, fail.complement(), s);
}

struct LeafEntry {
  Node node;
  bool used = false;
};

struct ParseState {
  std::size_t n = 0;
  std::map<std::string, LeafEntry> leaves;
  std::vector<std::pair<std::string, Doa>> composite_doas;
  std::set<std::string> names;
};

TreeBuilder::Spec parse_tree(const json& j, ParseState& st, const std::string& where) {
  if (j.is_string()) {
    const std::string id = j.get<std::string>();
    auto it = st.leaves.find(id);
    if (it == st.leaves.end()) throw SpecError(where, "unknown leaf '" + id + "'");
    if (it->second.used) throw SpecError(where, "leaf '" + id + "' used twice");
    it->second.used = true;
    return TreeBuilder::leaf(it->second.node);
  }
  if (!j.is_object()) throw SpecError(where, "expected a leaf id or a {\"seq\"|\"fal\": [...]} node");
  const bool seq = j.contains("seq");
  if (seq == j.contains("fal")) throw SpecError(where, "node needs exactly one of \"seq\" or \"fal\"");
  const std::string key = seq ? "seq" : "fal";
  const json& kids = j[key];
  if (!kids.is_array() || kids.empty()) throw SpecError(at(where, key), "expected a nonempty child list");
  std::string name;
  if (j.contains("name")) name = to_str(j["name"], at(where, "name"));
  std::vector<TreeBuilder::Spec> children;
  for (std::size_t i = 0; i < kids.size(); ++i) children.push_back(parse_tree(kids[i], st, at(at(where, key), i)));
  if (j.contains("doa")) {
    if (name.empty()) throw SpecError(at(where, "doa"), "composite DOA needs a node name");
    auto f = parse_doa(j["doa"], st.n, at(where, "doa"));
    if (f.automatic) throw SpecError(at(where, "doa"), "composite DOAs cannot be \"auto\"");
    st.composite_doas.emplace_back(name, *f.doa);
  }
  return seq ? TreeBuilder::seq(name, std::move(children)) : TreeBuilder::fal(name, std::move(children));
}

std::vector<const SuccessorMap*> document_maps(const ParseState& st, const std::vector<LibraryAction>& lib,
                                               const std::vector<SuccessorMap>& extra) {
  std::vector<const SuccessorMap*> out;
  for (const auto& [id, e] : st.leaves)
    if (e.node.controller) out.push_back(&*e.node.controller);
  for (const auto& a : lib) out.push_back(&a.controller);
  for (const auto& m : extra) out.push_back(&m);
  return out;
}

ojson region_json(const Region& r) { return ojson(r.members()); }

ojson doa_json(const Doa& d) {
  ojson j = ojson::object();
  j["basin"] = region_json(d.basin);
  j["goal"] = region_json(d.goal);
  j["tau"] = d.tau;
  return j;
}

ojson tree_json(const BTModel& m, VertexId v) {
  if (m.is_leaf(v)) return m.name(v);
  ojson j = ojson::object();
  ojson kids = ojson::array();
  for (VertexId c : m.tree().children(v)) kids.push_back(tree_json(m, c));
  j[m.kind(v) == NodeKind::Sequence ? "seq" : "fal"] = std::move(kids);
  j["name"] = m.name(v);
  if (m.node(v).doa) j["doa"] = doa_json(*m.node(v).doa);
  return j;
}

}  // namespace

SpecDocument parse_spec(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SpecError("", std::string("malformed JSON: ") + e.what());
  }
  if (!root.is_object()) throw SpecError("", "document must be an object");
  const std::string fmt = to_str(field(root, "format", ""), "format");
  if (fmt != kFormat) throw SpecError("format", "unsupported format '" + fmt + "', expected " + kFormat);

  SpecDocument doc;
  ParseState st;
  const json& uni = field(root, "universe", "");
  st.n = to_index(field(uni, "cells", "universe"), "universe.cells");
  if (st.n == 0) throw SpecError("universe.cells", "universe must be nonempty");
  const std::size_t n = st.n;

  // Leaves first: "dynamics" adjacency needs every controller.
  if (root.contains("leaves")) {
    const json& ls = root["leaves"];
    if (!ls.is_array()) throw SpecError("leaves", "expected a list");
    for (std::size_t i = 0; i < ls.size(); ++i) {
      const std::string w = at("leaves", i);
      Node nd;
      nd.name = to_str(field(ls[i], "id", w), at(w, "id"));
      const std::string kind = to_str(field(ls[i], "kind", w), at(w, "kind"));
      if (kind == "action") nd.kind = NodeKind::Action;
      else if (kind == "condition") nd.kind = NodeKind::Condition;
      else throw SpecError(at(w, "kind"), "expected \"action\" or \"condition\"");
      nd.success = parse_region(field(ls[i], "success", w), n, at(w, "success"));
      if (ls[i].contains("failure")) nd.failure = parse_region(ls[i]["failure"], n, at(w, "failure"));
      else nd.failure = nd.kind == NodeKind::Condition ? nd.success.complement() : Region(n);
      if (ls[i].contains("controller")) nd.controller = parse_map(ls[i]["controller"], n, at(w, "controller"));
      if (ls[i].contains("doa")) nd.doa = resolve_doa(parse_doa(ls[i]["doa"], n, at(w, "doa")), nd.controller,
                                                      nd.success, nd.failure, at(w, "doa"));
      if (st.leaves.count(nd.name)) throw SpecError(at(w, "id"), "duplicate leaf id '" + nd.name + "'");
      const std::string id = nd.name;
      st.leaves[id] = LeafEntry{std::move(nd), false};
    }
  }

  std::vector<LibraryAction> lib_actions;
  std::vector<LibraryCondition> lib_conditions;
  if (root.contains("library")) {
    const json& lj = root["library"];
    const json& as = field(lj, "actions", "library");
    for (std::size_t i = 0; i < as.size(); ++i) {
      const std::string w = at("library.actions", i);
      LibraryAction a;
      a.id = to_str(field(as[i], "id", w), at(w, "id"));
      a.success = parse_region(field(as[i], "success", w), n, at(w, "success"));
      a.failure = as[i].contains("failure") ? parse_region(as[i]["failure"], n, at(w, "failure")) : Region(n);
      a.controller = parse_map(field(as[i], "controller", w), n, at(w, "controller"));
      if (as[i].contains("doa"))
        a.doa = resolve_doa(parse_doa(as[i]["doa"], n, at(w, "doa")), a.controller, a.success, a.failure, at(w, "doa"));
      if (as[i].contains("preconditions"))
        for (std::size_t k = 0; k < as[i]["preconditions"].size(); ++k)
          a.preconditions.push_back(to_str(as[i]["preconditions"][k], at(at(w, "preconditions"), k)));
      lib_actions.push_back(std::move(a));
    }
    const json& cs = field(lj, "conditions", "library");
    for (std::size_t i = 0; i < cs.size(); ++i) {
      const std::string w = at("library.conditions", i);
      LibraryCondition c;
      c.id = to_str(field(cs[i], "id", w), at(w, "id"));
      c.success = parse_region(field(cs[i], "success", w), n, at(w, "success"));
      c.failure = cs[i].contains("failure") ? parse_region(cs[i]["failure"], n, at(w, "failure")) : c.success.complement();
      if (cs[i].contains("achievers"))
        for (std::size_t k = 0; k < cs[i]["achievers"].size(); ++k)
          c.achievers.push_back(to_str(cs[i]["achievers"][k], at(at(w, "achievers"), k)));
      lib_conditions.push_back(std::move(c));
    }
    if (lj.contains("root")) doc.library_root = to_str(lj["root"], "library.root");
  }

  std::vector<SuccessorMap> sub_maps;
  const json* sub = root.contains("substitution") ? &root["substitution"] : nullptr;
  if (sub) {
    sub_maps.push_back(parse_map(field(field(*sub, "dd", "substitution"), "controller", "substitution.dd"), n,
                                 "substitution.dd.controller"));
    sub_maps.push_back(parse_map(field(field(*sub, "rr", "substitution"), "controller", "substitution.rr"), n,
                                 "substitution.rr.controller"));
  }

  try {
    if (uni.contains("coords")) {
      if (uni.contains("adjacency")) throw SpecError("universe", "give either coords or adjacency, not both");
      const json& cj = uni["coords"];
      if (!cj.is_array() || cj.size() != n) throw SpecError("universe.coords", "expected one coordinate row per cell");
      std::vector<std::vector<double>> coords;
      for (std::size_t i = 0; i < n; ++i) {
        if (!cj[i].is_array()) throw SpecError(at("universe.coords", i), "expected a list of numbers");
        std::vector<double> row;
        for (std::size_t k = 0; k < cj[i].size(); ++k) {
          if (!cj[i][k].is_number()) throw SpecError(at(at("universe.coords", i), k), "expected a number");
          row.push_back(cj[i][k].get<double>());
        }
        coords.push_back(std::move(row));
      }
      doc.world = World::with_coords(std::move(coords));
    } else if (uni.contains("adjacency")) {
      const json& aj = uni["adjacency"];
      std::vector<std::pair<CellId, CellId>> pairs;
      if (aj.is_string()) {
        if (aj.get<std::string>() != "dynamics") throw SpecError("universe.adjacency", "expected pairs or \"dynamics\"");
        doc.adjacency_from_dynamics = true;
        World tmp(n);
        pairs = transition_pairs(tmp, document_maps(st, lib_actions, sub_maps));
      } else {
        if (!aj.is_array()) throw SpecError("universe.adjacency", "expected a list of pairs");
        for (std::size_t i = 0; i < aj.size(); ++i) {
          const std::string w = at("universe.adjacency", i);
          if (!aj[i].is_array() || aj[i].size() != 2) throw SpecError(w, "expected a [cell, cell] pair");
          const std::size_t p = to_index(aj[i][0], at(w, 0)), q = to_index(aj[i][1], at(w, 1));
          if (p >= n || q >= n) throw SpecError(w, "cell outside universe");
          pairs.emplace_back(p, q);
        }
      }
      doc.world = World::with_adjacency(n, pairs);
    } else {
      doc.world = World(n);
    }
    if (uni.contains("labels")) {
      const json& lj = uni["labels"];
      if (!lj.is_array() || lj.size() != n) throw SpecError("universe.labels", "expected one label per cell");
      std::vector<std::string> labels;
      for (std::size_t i = 0; i < n; ++i) labels.push_back(to_str(lj[i], at("universe.labels", i)));
      doc.world.set_labels(std::move(labels));
    }
  } catch (const SpecError&) {
    throw;
  } catch (const Error& e) {
    throw SpecError("universe", e.what());
  }

  if (root.contains("tree")) {
    TreeBuilder::Spec spec = parse_tree(root["tree"], st, "tree");
    try {
      BTModel m = TreeBuilder::build(doc.world, spec);
      for (const auto& [name, d] : st.composite_doas) m = m.with_doa(m.require(name), d);
      doc.model.emplace(std::move(m));
    } catch (const Error& e) {
      throw SpecError("tree", e.what());
    }
  }

  if (root.contains("abstraction")) {
    if (!doc.model) throw SpecError("abstraction", "abstraction needs a tree");
    const json& aj = root["abstraction"];
    if (!aj.is_array()) throw SpecError("abstraction", "expected a list");
    for (std::size_t i = 0; i < aj.size(); ++i) {
      std::string name;
      if (aj[i].is_number_unsigned()) {
        const std::size_t v = aj[i].get<std::size_t>();
        if (v >= doc.model->size()) throw SpecError(at("abstraction", i), "vertex out of range");
        name = doc.model->name(v);
      } else {
        name = to_str(aj[i], at("abstraction", i));
        if (!doc.model->find(name)) throw SpecError(at("abstraction", i), "unknown vertex '" + name + "'");
      }
      doc.abstraction.push_back(name);
    }
  }

  if (root.contains("analysis")) {
    const json& an = root["analysis"];
    if (an.contains("seeds")) {
      for (std::size_t i = 0; i < an["seeds"].size(); ++i) {
        const std::string s = to_str(an["seeds"][i], at("analysis.seeds", i));
        if (doc.model) {
          try {
            parse_seed(*doc.model, s);
          } catch (const Error& e) {
            throw SpecError(at("analysis.seeds", i), e.what());
          }
        }
        doc.seeds.push_back(s);
      }
    }
    if (an.contains("delta")) {
      if (!an["delta"].is_number() || an["delta"].get<double>() < 0)
        throw SpecError("analysis.delta", "expected a non-negative number");
      doc.delta = an["delta"].get<double>();
    }
    if (an.contains("max_steps")) doc.max_steps = to_index(an["max_steps"], "analysis.max_steps");
  }

  if (!lib_actions.empty() || !lib_conditions.empty()) {
    Library lib{doc.world, std::move(lib_actions), std::move(lib_conditions)};
    try {
      validate_library_structure(lib);
    } catch (const Error& e) {
      throw SpecError("library", e.what());
    }
    if (doc.library_root && !lib.is_action(*doc.library_root))
      throw SpecError("library.root", "unknown action '" + *doc.library_root + "'");
    doc.library.emplace(std::move(lib));
  }

  if (sub) {
    if (!doc.model) throw SpecError("substitution", "substitution needs a tree");
    const std::string w = "substitution";
    SubstitutionBlock b;
    b.target = to_str(field(*sub, "target", w), at(w, "target"));
    auto tv = doc.model->find(b.target);
    if (!tv) throw SpecError(at(w, "target"), "unknown vertex '" + b.target + "'");
    SubstitutionSpec& s = b.spec;
    s.target = *tv;
    const json& dd = (*sub)["dd"];
    s.dd_controller = sub_maps[0];
    s.dd_success = dd.contains("success") ? parse_region(dd["success"], n, "substitution.dd.success") : Region(n);
    s.dd_failure = dd.contains("failure") ? parse_region(dd["failure"], n, "substitution.dd.failure") : Region(n);
    const json& rr = (*sub)["rr"];
    s.rr_controller = sub_maps[1];
    s.rr_success = parse_region(field(rr, "success", at(w, "rr")), n, "substitution.rr.success");
    s.rr_failure = rr.contains("failure") ? parse_region(rr["failure"], n, "substitution.rr.failure") : Region(n);
    if (rr.contains("doa"))
      s.rr_doa = resolve_doa(parse_doa(rr["doa"], n, "substitution.rr.doa"), s.rr_controller, s.rr_success,
                             s.rr_failure, "substitution.rr.doa");
    s.rok_success = parse_region(field(*sub, "rok", w), n, at(w, "rok"));
    s.time_budget = to_index(field(*sub, "time_budget", w), at(w, "time_budget"));
    if (sub->contains("hysteresis")) s.hysteresis = to_index((*sub)["hysteresis"], at(w, "hysteresis"));
    if (dd.contains("name")) s.dd_name = to_str(dd["name"], "substitution.dd.name");
    if (rr.contains("name")) s.rr_name = to_str(rr["name"], "substitution.rr.name");
    doc.substitution = std::move(b);
  }
  return doc;
}

SpecDocument load_spec(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SpecError("", "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_spec(ss.str());
}

std::string serialize_spec(const SpecDocument& doc) {
  const World& w = doc.world;
  ojson root = ojson::object();
  root["format"] = kFormat;
  ojson uni = ojson::object();
  uni["cells"] = w.cell_count();
  if (w.has_coords()) {
    uni["coords"] = w.coords();
  } else if (w.has_adjacency()) {
    if (doc.adjacency_from_dynamics) {
      uni["adjacency"] = "dynamics";
    } else {
      ojson pairs = ojson::array();
      for (auto [p, q] : w.adjacency_pairs()) pairs.push_back({p, q});
      uni["adjacency"] = std::move(pairs);
    }
  }
  if (!w.labels().empty()) uni["labels"] = w.labels();
  root["universe"] = std::move(uni);

  if (doc.model) {
    const BTModel& m = *doc.model;
    ojson leaves = ojson::array();
    for (VertexId v : m.tree().preorder()) {
      if (!m.is_leaf(v)) continue;
      const Node& nd = m.node(v);
      ojson l = ojson::object();
      l["id"] = nd.name;
      l["kind"] = nd.kind == NodeKind::Action ? "action" : "condition";
      l["success"] = region_json(nd.success);
      if (nd.kind == NodeKind::Action || nd.failure != nd.success.complement()) l["failure"] = region_json(nd.failure);
      if (nd.controller) l["controller"] = nd.controller->next;
      if (nd.doa) l["doa"] = doa_json(*nd.doa);
      leaves.push_back(std::move(l));
    }
    root["leaves"] = std::move(leaves);
    root["tree"] = tree_json(m, m.root());
    if (!doc.abstraction.empty()) root["abstraction"] = doc.abstraction;
  }
  if (!doc.seeds.empty() || doc.delta || doc.max_steps) {
    ojson an = ojson::object();
    if (!doc.seeds.empty()) an["seeds"] = doc.seeds;
    if (doc.delta) an["delta"] = *doc.delta;
    if (doc.max_steps) an["max_steps"] = doc.max_steps;
    root["analysis"] = std::move(an);
  }
  if (doc.library) {
    ojson lj = ojson::object();
    if (doc.library_root) lj["root"] = *doc.library_root;
    ojson as = ojson::array();
    for (const auto& a : doc.library->actions) {
      ojson j = ojson::object();
      j["id"] = a.id;
      j["preconditions"] = a.preconditions;
      j["success"] = region_json(a.success);
      j["failure"] = region_json(a.failure);
      j["controller"] = a.controller.next;
      if (a.doa) j["doa"] = doa_json(*a.doa);
      as.push_back(std::move(j));
    }
    ojson cs = ojson::array();
    for (const auto& c : doc.library->conditions) {
      ojson j = ojson::object();
      j["id"] = c.id;
      j["achievers"] = c.achievers;
      j["success"] = region_json(c.success);
      if (c.failure != c.success.complement()) j["failure"] = region_json(c.failure);
      cs.push_back(std::move(j));
    }
    lj["actions"] = std::move(as);
    lj["conditions"] = std::move(cs);
    root["library"] = std::move(lj);
  }
  if (doc.substitution) {
    const SubstitutionSpec& s = doc.substitution->spec;
    ojson sj = ojson::object();
    sj["target"] = doc.substitution->target;
    ojson dd = ojson::object();
    dd["name"] = s.dd_name;
    dd["controller"] = s.dd_controller.next;
    if (!s.dd_success.empty()) dd["success"] = region_json(s.dd_success);
    if (!s.dd_failure.empty()) dd["failure"] = region_json(s.dd_failure);
    ojson rr = ojson::object();
    rr["name"] = s.rr_name;
    rr["success"] = region_json(s.rr_success);
    rr["failure"] = region_json(s.rr_failure);
    rr["controller"] = s.rr_controller.next;
    if (s.rr_doa) rr["doa"] = doa_json(*s.rr_doa);
    sj["dd"] = std::move(dd);
    sj["rr"] = std::move(rr);
    sj["rok"] = region_json(s.rok_success);
    sj["time_budget"] = s.time_budget;
    sj["hysteresis"] = s.hysteresis;
    root["substitution"] = std::move(sj);
  }
  return root.dump(2) + "\n";
}

std::vector<VertexId> resolve_abstraction(const SpecDocument& doc) {
  if (!doc.model) throw SpecError("tree", "document has no tree");
  if (doc.abstraction.empty()) return doc.model->actions();
  std::vector<VertexId> out;
  for (const auto& name : doc.abstraction) out.push_back(doc.model->require(name));
  return out;
}

Seed parse_seed(const BTModel& m, const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos || colon + 2 != text.size())
    throw ValidationError("seed '" + text + "' is not of the form owner:flavor");
  const auto f = parse_flavor(text.back());
  if (!f) throw ValidationError("seed '" + text + "' has flavor other than a, b or c");
  const auto v = m.find(text.substr(0, colon));
  if (!v) throw ValidationError("seed '" + text + "' names an unknown vertex");
  return Seed{*v, *f};
}

ConvergenceOptions convergence_options(const SpecDocument& doc) {
  ConvergenceOptions o;
  o.delta = doc.delta;
  o.max_steps = doc.max_steps;
  if (doc.model)
    for (const auto& s : doc.seeds) o.seeds.push_back(parse_seed(*doc.model, s));
  return o;
}

bool same_model(const BTModel& a, const BTModel& b) {
  const World &wa = a.world(), &wb = b.world();
  if (wa.cell_count() != wb.cell_count() || wa.mode() != wb.mode() || wa.labels() != wb.labels()) return false;
  if (wa.has_coords() && wa.coords() != wb.coords()) return false;
  if (wa.has_adjacency() && wa.adjacency_pairs() != wb.adjacency_pairs()) return false;
  if (a.size() != b.size()) return false;
  for (VertexId v = 0; v < a.size(); ++v) {
    if (a.tree().children(v) != b.tree().children(v)) return false;
    const Node &x = a.node(v), &y = b.node(v);
    if (x.kind != y.kind || x.name != y.name || x.success != y.success || x.failure != y.failure ||
        x.controller != y.controller)
      return false;
    if (x.doa.has_value() != y.doa.has_value()) return false;
    if (x.doa && (x.doa->basin != y.doa->basin || x.doa->goal != y.doa->goal || x.doa->tau != y.doa->tau)) return false;
  }
  return true;
}

}  // namespace btconv
