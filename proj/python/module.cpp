#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "btconv/backchain.hpp"
#include "btconv/dot.hpp"
#include "btconv/generate.hpp"
#include "btconv/spec_io.hpp"
#include "btconv/substitution.hpp"

namespace py = pybind11;
using namespace btconv;

namespace {

ConvergenceResult check_doc(const SpecDocument& doc, const std::vector<std::string>& seeds, std::optional<double> delta,
                            std::optional<std::size_t> max_steps) {
  if (!doc.model) throw SpecError("tree", "document has no tree");
  ConvergenceOptions o = convergence_options(doc);
  if (!seeds.empty()) {
    o.seeds.clear();
    for (const auto& s : seeds) o.seeds.push_back(parse_seed(*doc.model, s));
  }
  if (delta) o.delta = *delta;
  if (max_steps) o.max_steps = *max_steps;
  return run_convergence(*doc.model, resolve_abstraction(doc), o);
}

py::dict trace_dict(const BTModel& m, const Trace& t) {
  py::list steps;
  for (std::size_t k = 0; k < t.size(); ++k)
    steps.append(py::dict(py::arg("cell") = t.states[k], py::arg("leaf") = m.name(t.leaves[k]),
                          py::arg("status") = to_string(t.statuses[k])));
  return py::dict(py::arg("steps") = steps, py::arg("halt") = to_string(t.halt));
}

}  // namespace

PYBIND11_MODULE(_btconv, mod) {
  mod.doc() = "Convergence analysis of behavior trees over finite state spaces.";

  // translators run newest first, so the base class goes in first
  const auto& base = py::register_exception<Error>(mod, "Error", PyExc_RuntimeError);
  py::register_exception<SpecError>(mod, "SpecError", base.ptr());

  py::enum_<Flavor>(mod, "Flavor").value("A", Flavor::A).value("B", Flavor::B).value("C", Flavor::C);
  py::enum_<Status>(mod, "Status")
      .value("RUNNING", Status::Running)
      .value("SUCCESS", Status::Success)
      .value("FAILURE", Status::Failure);
  py::enum_<NodeKind>(mod, "NodeKind")
      .value("SEQUENCE", NodeKind::Sequence)
      .value("FALLBACK", NodeKind::Fallback)
      .value("ACTION", NodeKind::Action)
      .value("CONDITION", NodeKind::Condition);

  py::class_<Region>(mod, "Region")
      .def(py::init([](std::size_t n, const std::vector<std::size_t>& cells) { return Region::from_members(n, cells); }),
           py::arg("size"), py::arg("cells") = std::vector<std::size_t>{})
      .def_property_readonly("size", &Region::size)
      .def("cells", &Region::members)
      .def("__len__", &Region::count)
      .def("__contains__", &Region::contains)
      .def("complement", &Region::complement)
      .def("is_subset_of", &Region::is_subset_of)
      .def("__or__", [](const Region& a, const Region& b) { return a | b; })
      .def("__and__", [](const Region& a, const Region& b) { return a & b; })
      .def("__sub__", [](const Region& a, const Region& b) { return a - b; })
      .def("__eq__", [](const Region& a, const Region& b) { return a == b; })
      .def("__repr__", [](const Region& r) { return "Region(" + r.to_string() + ")"; });

  py::class_<Doa>(mod, "Doa")
      .def_readonly("basin", &Doa::basin)
      .def_readonly("goal", &Doa::goal)
      .def_readonly("tau", &Doa::tau);

  py::class_<BTModel>(mod, "Model")
      .def_property_readonly("cells", [](const BTModel& m) { return m.world().cell_count(); })
      .def_property_readonly("root", &BTModel::root)
      .def("__len__", &BTModel::size)
      .def("name", &BTModel::name)
      .def("kind", &BTModel::kind)
      .def("children", [](const BTModel& m, VertexId v) { return m.tree().children(v); })
      .def("find", &BTModel::find)
      .def("leaves", &BTModel::leaves)
      .def("success", [](const BTModel& m, VertexId v) { return m.node(v).success; })
      .def("failure", [](const BTModel& m, VertexId v) { return m.node(v).failure; })
      .def("doa", [](const BTModel& m, VertexId v) { return m.node(v).doa; })
      .def("tick", [](const BTModel& m, CellId x) {
        const TickResult t = tick(m, x);
        return py::make_tuple(t.leaf, t.status);
      })
      .def("simulate",
           [](const BTModel& m, CellId x0, std::size_t steps, bool run_on) {
             StopPredicate stop;
             if (!run_on) stop = [](CellId, Status s) { return s == Status::Success; };
             return trace_dict(m, simulate(m, x0, steps, stop));
           },
           py::arg("x0"), py::arg("steps"), py::arg("run_on") = false)
      .def("same_as", [](const BTModel& a, const BTModel& b) { return same_model(a, b); })
      .def("tree_dot", [](const BTModel& m) { return tree_dot(m); });

  py::class_<NodeAnalysis>(mod, "Analysis")
      .def("success", [](const NodeAnalysis& a, VertexId v) { return a.metadata.at(v).success; })
      .def("failure", [](const NodeAnalysis& a, VertexId v) { return a.metadata.at(v).failure; })
      .def("running", [](const NodeAnalysis& a, VertexId v) { return a.metadata.at(v).running; })
      .def("influence", [](const NodeAnalysis& a, VertexId v) { return a.influence.at(v); })
      .def("operating", [](const NodeAnalysis& a, VertexId v) { return a.omega(v); });
  mod.def("analyze", [](const BTModel& m) { return analyze(m); });

  py::class_<SpecDocument>(mod, "Spec")
      .def_property_readonly("model", [](const SpecDocument& d) { return d.model; })
      .def_property_readonly("seeds", [](const SpecDocument& d) { return d.seeds; })
      .def_property_readonly("has_library", [](const SpecDocument& d) { return d.library.has_value(); })
      .def_property_readonly("has_substitution", [](const SpecDocument& d) { return d.substitution.has_value(); })
      .def("serialize", [](const SpecDocument& d) { return serialize_spec(d); });
  mod.def("parse_spec", &parse_spec, py::arg("text"));
  mod.def("load_spec", &load_spec, py::arg("path"));
  mod.def("generate", [](std::uint64_t seed) { return random_gridworld(seed); }, py::arg("seed"));

  py::class_<ConvergenceResult>(mod, "Convergence")
      .def_property_readonly("certified", &ConvergenceResult::certified)
      .def_property_readonly("classes",
                             [](const ConvergenceResult& r) {
                               return r.condensed.classes;
                             })
      .def_property_readonly("class_edges", [](const ConvergenceResult& r) { return r.condensed.dag.successors; })
      .def_property_readonly("analysis_set", [](const ConvergenceResult& r) { return r.analysis_classes; })
      .def("label", [](const ConvergenceResult& r, const BTModel& m, std::size_t v) { return r.graph.label(m, v); })
      .def_property_readonly("certificate",
                             [](const ConvergenceResult& r) -> py::object {
                               if (!r.certified()) return py::none();
                               const Certificate& c = r.certificate();
                               return py::dict(py::arg("T") = c.max_exit, py::arg("bound") = c.bound,
                                               py::arg("theorem_bound") = c.theorem_bound,
                                               py::arg("longest_path_bound") = c.longest_path_bound,
                                               py::arg("sinks") = c.sinks, py::arg("analysis_set") = c.analysis_set);
                             })
      .def_property_readonly("refutation", [](const ConvergenceResult& r) -> py::object {
        if (r.certified()) return py::none();
        const Refutation& f = r.refutation();
        return py::dict(py::arg("kind") = to_string(f.kind), py::arg("cls") = f.cls, py::arg("witness") = f.witness);
      });

  mod.def("check", &check_doc, py::arg("spec"), py::arg("seeds") = std::vector<std::string>{},
          py::arg("delta") = std::nullopt, py::arg("max_steps") = std::nullopt);

  mod.def(
      "export_dot",
      [](const SpecDocument& doc, const std::string& which) {
        if (!doc.model) throw SpecError("tree", "document has no tree");
        const BTModel& m = *doc.model;
        if (which == "tree") return tree_dot(m);
        const ConvergenceResult r = check_doc(doc, {}, std::nullopt, std::nullopt);
        if (which == "prepares") return prepares_dot(m, r.graph);
        if (which == "condensed") return condensed_dot(m, r.graph, r.condensed, r.analysis_classes);
        if (which == "behavior") return behavior_dot(m, behavior_graph(r.graph, flatten_classes(r.condensed, r.analysis_classes)));
        throw SpecError("graph", "unknown graph '" + which + "'");
      },
      py::arg("spec"), py::arg("graph") = "condensed");

  mod.def(
      "backchain",
      [](const SpecDocument& doc, std::optional<std::string> root, bool wrap) {
        if (!doc.library) throw SpecError("library", "document has no library");
        if (!root) root = doc.library_root;
        if (!root) throw SpecError("library.root", "no root action given");
        BcbtOptions bo;
        bo.wrap_bare_conditions = wrap;
        return build_bcbt(*doc.library, *root, bo);
      },
      py::arg("spec"), py::arg("root") = std::nullopt, py::arg("wrap_bare_conditions") = false);

  mod.def(
      "substitute",
      [](const SpecDocument& doc) {
        if (!doc.model || !doc.substitution) throw SpecError("substitution", "document has no substitution block");
        const SubstitutionResult sub = substitute(*doc.model, doc.substitution->spec);
        const PreservationVerdict v = verify_preservation(*doc.model, sub);
        return py::make_tuple(sub.model, py::dict(py::arg("ok") = v.ok, py::arg("clause") = v.clause,
                                                  py::arg("vertex") = v.vertex, py::arg("witness") = v.witness));
      },
      py::arg("spec"));
}
