// btconv: command-line front end for the convergence analyzer.
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "btconv/backchain.hpp"
#include "btconv/dot.hpp"
#include "btconv/generate.hpp"
#include "btconv/spec_io.hpp"
#include "btconv/substitution.hpp"

using namespace btconv;
using ojson = nlohmann::ordered_json;

namespace {

constexpr int kCertificate = 0;
constexpr int kRefutation = 1;
constexpr int kSpecError = 2;

struct Common {
  std::string spec;
  std::string out;
  std::string format = "text";
  std::vector<std::string> seeds;
  std::optional<double> delta;
  std::optional<std::size_t> max_steps;
};

void emit(const Common& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw SpecError("", "cannot write '" + c.out + "'");
  f << text;
}

ConvergenceOptions options_for(const SpecDocument& doc, const Common& c) {
  ConvergenceOptions o = convergence_options(doc);
  if (!c.seeds.empty()) {
    o.seeds.clear();
    for (const auto& s : c.seeds) o.seeds.push_back(parse_seed(*doc.model, s));
  }
  if (c.delta) o.delta = *c.delta;
  if (c.max_steps) o.max_steps = *c.max_steps;
  return o;
}

SpecDocument load_with_tree(const Common& c) {
  SpecDocument doc = load_spec(c.spec);
  // a bare library document stands for the tree backchained from its root
  if (!doc.model && doc.library && doc.library_root) doc.model.emplace(build_bcbt(*doc.library, *doc.library_root));
  if (!doc.model) throw SpecError("tree", "document has no tree");
  return doc;
}

std::string class_members(const BTModel& m, const PreparesGraph& g, const Condensation& cd, std::size_t k) {
  std::string s = "{";
  for (std::size_t i = 0; i < cd.classes[k].size(); ++i) s += (i ? ", " : "") + g.label(m, cd.classes[k][i]);
  return s + "}";
}

ojson trace_json(const BTModel& m, const Trace& t) {
  ojson steps = ojson::array();
  for (std::size_t k = 0; k < t.size(); ++k) {
    ojson s = ojson::object();
    s["step"] = k;
    s["cell"] = t.states[k];
    s["label"] = m.world().label(t.states[k]);
    s["leaf"] = m.name(t.leaves[k]);
    s["status"] = to_string(t.statuses[k]);
    steps.push_back(std::move(s));
  }
  ojson j = ojson::object();
  j["steps"] = std::move(steps);
  j["halt"] = to_string(t.halt);
  return j;
}

std::string trace_text(const BTModel& m, const Trace& t) {
  std::ostringstream os;
  for (std::size_t k = 0; k < t.size(); ++k)
    os << k << " " << t.states[k] << " " << m.world().label(t.states[k]) << " " << m.name(t.leaves[k]) << " "
       << to_string(t.statuses[k]) << "\n";
  os << "halt: " << to_string(t.halt) << "\n";
  return os.str();
}

int fts_failure(const Common& c, const BTModel& m, const FtsError& e) {
  if (c.format == "json") {
    ojson j = ojson::object();
    j["verdict"] = "refutation";
    j["kind"] = "fts";
    ojson fails = ojson::array();
    for (const auto& f : e.failures) {
      ojson x = ojson::object();
      x["vertex"] = m.name(f.vertex);
      x["violation"] = to_string(f.violation->kind);
      x["cell"] = f.violation->cell;
      x["step"] = f.violation->step;
      fails.push_back(std::move(x));
    }
    j["failures"] = std::move(fails);
    emit(c, j.dump(2) + "\n");
  } else {
    std::string s = "refutation: finite-time success fails\n";
    for (const auto& f : e.failures) s += "  " + f.describe(m) + "\n";
    emit(c, s);
  }
  return kRefutation;
}

int cmd_check(const Common& c) {
  const SpecDocument doc = load_with_tree(c);
  const BTModel& m = *doc.model;
  const auto P = resolve_abstraction(doc);
  const ConvergenceOptions opts = options_for(doc, c);
  std::optional<ConvergenceResult> res;
  try {
    res.emplace(run_convergence(m, P, opts));
  } catch (const FtsError& e) {
    return fts_failure(c, m, e);
  }
  const auto& g = res->graph;
  const auto& cd = res->condensed;
  const bool ok = res->certified();

  if (c.format == "json") {
    ojson j = ojson::object();
    j["verdict"] = ok ? "certificate" : "refutation";
    j["cells"] = m.world().cell_count();
    j["delta"] = g.delta;
    ojson classes = ojson::array();
    for (std::size_t k = 0; k < cd.size(); ++k) {
      ojson x = ojson::object();
      x["id"] = k;
      ojson mem = ojson::array();
      for (std::size_t v : cd.classes[k]) mem.push_back(g.label(m, v));
      x["members"] = std::move(mem);
      ojson succ = ojson::array();
      for (std::size_t l : cd.dag.successors[k]) succ.push_back(l);
      x["successors"] = std::move(succ);
      classes.push_back(std::move(x));
    }
    j["classes"] = std::move(classes);
    j["seed_classes"] = res->seed_classes;
    j["analysis_set"] = res->analysis_classes;
    if (ok) {
      const Certificate& cert = res->certificate();
      j["sinks"] = cert.sinks;
      ojson ex = ojson::array();
      for (const auto& e : cert.exit_times) ex.push_back({{"class", e.cls}, {"steps", e.steps}});
      j["exit_times"] = std::move(ex);
      j["T"] = cert.max_exit;
      j["bound"] = cert.bound;
      j["bound_expression"] = std::to_string(cert.analysis_set.size()) + " × T";
      j["theorem_bound"] = cert.theorem_bound;
      j["longest_path_bound"] = cert.longest_path_bound;
    } else {
      const Refutation& r = res->refutation();
      j["kind"] = to_string(r.kind);
      j["class"] = r.cls;
      if (r.witness) j["witness"] = *r.witness;
      j["trace"] = trace_json(m, r.trace);
    }
    emit(c, j.dump(2) + "\n");
  } else {
    std::ostringstream os;
    os << "cells: " << m.world().cell_count() << "  prepares vertices: " << g.size() << "  delta: " << g.delta << "\n";
    os << "classes: " << cd.size() << "\n";
    for (std::size_t k = 0; k < cd.size(); ++k) {
      os << "  class " << k << " " << class_members(m, g, cd, k);
      if (!cd.dag.successors[k].empty()) {
        os << " ->";
        for (std::size_t l : cd.dag.successors[k]) os << " " << l;
      }
      os << "\n";
    }
    os << "analysis set:";
    for (std::size_t k : res->analysis_classes) os << " " << k;
    os << "\n";
    if (ok) {
      const Certificate& cert = res->certificate();
      os << "sinks:";
      for (std::size_t k : cert.sinks) os << " " << k;
      os << "\nexit times:";
      for (const auto& e : cert.exit_times) os << " " << e.cls << ":" << e.steps;
      os << "\ncertificate: bound = " << cert.analysis_set.size() << " × T = " << cert.analysis_set.size() << " × "
         << cert.max_exit << " = " << cert.bound << "\n";
      os << "non-sink bound: " << cert.theorem_bound << "  longest path bound: " << cert.longest_path_bound << "\n";
    } else {
      const Refutation& r = res->refutation();
      os << "refutation: " << to_string(r.kind) << " in class " << r.cls << " " << class_members(m, g, cd, r.cls);
      if (r.witness) os << " witness cell " << *r.witness << " (" << m.world().label(*r.witness) << ")";
      os << "\n" << trace_text(m, r.trace);
    }
    emit(c, os.str());
  }
  return ok ? kCertificate : kRefutation;
}

int cmd_simulate(const Common& c, std::size_t x0, bool run_on) {
  const SpecDocument doc = load_with_tree(c);
  const BTModel& m = *doc.model;
  const std::size_t steps = c.max_steps ? *c.max_steps : m.world().cell_count() + 1;
  StopPredicate stop;
  if (!run_on) stop = [](CellId, Status s) { return s == Status::Success; };
  const Trace t = simulate(m, x0, steps, stop);
  emit(c, c.format == "json" ? trace_json(m, t).dump(2) + "\n" : trace_text(m, t));
  return kCertificate;
}

int cmd_export(const Common& c, const std::string& which) {
  const SpecDocument doc = load_with_tree(c);
  const BTModel& m = *doc.model;
  if (which == "tree") {
    emit(c, tree_dot(m));
    return kCertificate;
  }
  const ConvergenceResult res = run_convergence(m, resolve_abstraction(doc), options_for(doc, c));
  if (which == "prepares") {
    emit(c, prepares_dot(m, res.graph));
  } else if (which == "condensed") {
    emit(c, condensed_dot(m, res.graph, res.condensed, res.analysis_classes));
  } else {
    emit(c, behavior_dot(m, behavior_graph(res.graph, flatten_classes(res.condensed, res.analysis_classes))));
  }
  return kCertificate;
}

void write_side(const Common& c, const std::string& spec_text, const std::string& report) {
  if (c.out.empty()) {
    std::cout << spec_text;
    std::cerr << report;
  } else {
    emit(c, spec_text);
    std::cout << report;
  }
}

int cmd_backchain(const Common& c, std::string root, bool wrap) {
  SpecDocument doc = load_spec(c.spec);
  if (!doc.library) throw SpecError("library", "document has no library");
  if (root.empty()) {
    if (!doc.library_root) throw SpecError("library.root", "no root action given");
    root = *doc.library_root;
  }
  const Library& lib = *doc.library;
  BcbtOptions bo;
  bo.wrap_bare_conditions = wrap;
  BTModel m = build_bcbt(lib, root, bo);
  const LinkStructure links = compute_links(lib);
  const auto assumption = bcbt_assumption_issues(lib, links, root);
  const auto issues = library_issues(lib);

  std::ostringstream os;
  os << "tree: " << m.size() << " vertices, " << m.actions().size() << " actions\n";
  os << "links:";
  for (const auto& l : links.links) os << " (" << l.achiever << "," << l.condition << "," << l.consumer << ")";
  os << "\n";
  for (const auto& i : assumption) os << "assumption: " << i.clause << " " << i.id << "\n";
  for (const auto& i : issues) os << "library: " << i.clause << " " << i.id << "\n";

  SpecDocument out;
  out.world = doc.world;
  out.adjacency_from_dynamics = doc.adjacency_from_dynamics;
  out.model.emplace(std::move(m));
  out.library = doc.library;
  out.library_root = root;
  out.delta = doc.delta;
  out.max_steps = doc.max_steps;
  write_side(c, serialize_spec(out), os.str());
  return kCertificate;
}

int cmd_substitute(const Common& c, bool check_convergence) {
  const SpecDocument doc = load_with_tree(c);
  if (!doc.substitution) throw SpecError("substitution", "document has no substitution block");
  const BTModel& old = *doc.model;
  const SubstitutionResult sub = substitute(old, doc.substitution->spec);
  const PreservationVerdict pv = verify_preservation(old, sub);
  std::ostringstream os;
  const std::size_t n = sub.aug.world().cell_count();
  if (pv.ok) {
    os << "S_new = S_old on " << n << " cells\nF_new = F_old = empty on " << n << " cells\n";
  } else {
    os << "preservation fails: " << pv.clause << " at '" << pv.vertex << "' cell " << *pv.witness << " ("
       << sub.aug.world().label(*pv.witness) << ")\n";
  }
  bool ok = pv.ok;
  if (check_convergence) {
    const ConvergenceResult old_res = run_convergence(old, resolve_abstraction(doc), options_for(doc, c));
    ConvergenceOptions no = options_for(doc, c);
    for (auto& s : no.seeds) s.owner = sub.old_to_new[s.owner];
    const auto v = verify_substituted_convergence(old, old_res, sub, no);
    os << "loop exit: " << (v.loop_exit ? std::to_string(*v.loop_exit) : "never") << " (budget "
       << sub.aug.time_cap() << ")\n";
    os << "well-behaved RR: " << (v.rr_well_behaved ? "yes" : "no") << "  MB: " << (v.mb_well_behaved ? "yes" : "no")
       << "\n";
    for (const auto& [x, y] : v.unexpected_edges) os << "unexpected edge " << to_string(x) << " -> " << to_string(y) << "\n";
    if (v.convergence->certified()) {
      const auto& cert = v.convergence->certificate();
      os << "certificate: bound = " << cert.analysis_set.size() << " × T = " << cert.analysis_set.size() << " × "
         << cert.max_exit << " = " << cert.bound << "\n";
    } else {
      os << "refutation: " << to_string(v.convergence->refutation().kind) << "\n";
    }
    ok = ok && v.ok();
  }
  SpecDocument out;
  out.world = sub.aug.world();
  out.model.emplace(sub.model);
  out.delta = doc.delta;
  out.max_steps = doc.max_steps;
  for (const auto& s : doc.seeds) out.seeds.push_back(s);
  write_side(c, serialize_spec(out), os.str());
  return ok ? kCertificate : kRefutation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Behavior-tree convergence analyzer"};
  app.require_subcommand(1);
  Common c;
  std::string seed_list;
  auto add_common = [&](CLI::App* sub, bool analysis) {
    sub->add_option("--spec", c.spec, "spec file (JSON)")->required();
    sub->add_option("--out", c.out, "write output here instead of stdout");
    sub->add_option("--format", c.format, "report format")->check(CLI::IsMember({"text", "json"}));
    if (analysis) {
      sub->add_option("--seed-classes", seed_list, "comma-separated owner:flavor seeds, e.g. go_home:b");
      sub->add_option("--delta", c.delta, "neighboring distance for metric worlds")->check(CLI::NonNegativeNumber);
      sub->add_option("--max-steps", c.max_steps, "step limit for simulations");
    }
  };

  auto* check = app.add_subcommand("check", "certify convergence or produce a counterexample");
  add_common(check, true);

  auto* sim = app.add_subcommand("simulate", "closed-loop trace from one cell");
  add_common(sim, true);
  std::size_t x0 = 0;
  bool run_on = false;
  sim->add_option("--x0", x0, "start cell")->required();
  sim->add_flag("--run-on", run_on, "keep stepping after the root succeeds");

  auto* exp = app.add_subcommand("export", "DOT rendering of a graph");
  add_common(exp, true);
  std::string which = "condensed";
  exp->add_option("--graph", which, "graph to render")->check(CLI::IsMember({"tree", "prepares", "condensed", "behavior"}));

  auto* bc = app.add_subcommand("backchain", "generate a backchained tree from a library");
  add_common(bc, false);
  std::string root;
  bool wrap = false;
  bc->add_option("--root", root, "root action id");
  bc->add_flag("--wrap-bare-conditions", wrap, "keep one-child fallbacks around achieverless conditions");

  auto* subst = app.add_subcommand("substitute", "insert a data-driven controller and verify preservation");
  add_common(subst, true);
  bool verify_conv = false;
  subst->add_flag("--verify-convergence", verify_conv, "also rebuild and certify the new prepares graph");

  auto* gen = app.add_subcommand("generate", "emit a random gridworld spec");
  std::uint64_t rng_seed = 1;
  if (const char* env = std::getenv("BTCONV_RNG_SEED")) rng_seed = std::strtoull(env, nullptr, 10);
  gen->add_option("--rng-seed", rng_seed, "generator seed (default BTCONV_RNG_SEED or 1)");
  gen->add_option("--out", c.out, "write output here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kSpecError;
  }
  std::stringstream ss(seed_list);
  for (std::string s; std::getline(ss, s, ',');)
    if (!s.empty()) c.seeds.push_back(s);

  try {
    if (*check) return cmd_check(c);
    if (*sim) return cmd_simulate(c, x0, run_on);
    if (*exp) return cmd_export(c, which);
    if (*bc) return cmd_backchain(c, root, wrap);
    if (*subst) return cmd_substitute(c, verify_conv);
    if (*gen) {
      emit(c, serialize_spec(random_gridworld(rng_seed)));
      return kCertificate;
    }
  } catch (const FtsError& e) {
    std::cerr << "btconv: " << e.what() << "\n";
    return kRefutation;
  } catch (const std::exception& e) {
    std::cerr << "btconv: " << e.what() << "\n";
    return kSpecError;
  }
  return kSpecError;
}
