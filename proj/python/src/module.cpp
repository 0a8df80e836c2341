#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "theoria/parser.hpp"
#include "theoria/printer.hpp"
#include "theoria/service.hpp"

namespace py = pybind11;
using namespace theoria;

namespace {

PrintMode mode_of(bool ascii) { return ascii ? PrintMode::Ascii : PrintMode::Unicode; }

Formula typed_in(Workspace& ws, const std::vector<std::string>& theories, const std::string& text) {
  RuleBase base = ws.rule_base(theories);
  return typecheck(parse_formula(text, base.factory()), {});
}

py::tuple run_check(const std::vector<std::string>& paths, const std::string& root) {
  std::ostringstream out, err;
  int code = cmd_check(paths, root, out, err);
  return py::make_tuple(code, out.str(), err.str());
}

py::tuple run_prove(const std::vector<std::string>& files, const std::string& root, bool run_auto, bool replay,
                    const std::string& order, std::optional<std::size_t> budget) {
  ProveOptions opts;
  opts.run_auto = run_auto;
  opts.replay = replay;
  opts.order = parse_auto_order(order);
  opts.budget = budget ? *budget : step_budget_from_env();
  std::ostringstream out, err;
  int code = cmd_prove(files, root, opts, true, out, err);
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "theoria proof kernel";

  PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> kernel_error;
  kernel_error.call_once_and_store_result([&]() { return py::exception<Error>(m, "KernelError"); });
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const py::object& type = kernel_error.get_stored();
      py::object exc = type(py::str(e.what()));
      exc.attr("kind") = std::string(to_string(e.kind()));
      exc.attr("subject") = e.subject();
      PyErr_SetObject(type.ptr(), exc.ptr());
    }
  });

  m.def(
      "format_formula",
      [](const std::string& text, bool ascii) {
        return print_formula(parse_formula(text, FormulaFactory::core()), mode_of(ascii));
      },
      py::arg("text"), py::arg("ascii") = false);
  m.def("check", &run_check, py::arg("paths"), py::arg("root") = "");
  m.def("prove", &run_prove, py::arg("files"), py::arg("root") = "", py::arg("run_auto") = true,
        py::arg("replay") = false, py::arg("order") = "expand,rewrite,inference", py::arg("budget") = py::none());
  m.def("default_step_budget", &step_budget_from_env);

  py::class_<Workspace>(m, "Workspace")
      .def(py::init<fs::path>(), py::arg("root"))
      .def_property_readonly("root", &Workspace::root)
      .def("theory_names", &Workspace::theory_names)
      .def("diagnostics",
           [](Workspace& ws, const std::string& name) {
             std::vector<std::tuple<std::string, std::string, std::string>> out;
             for (const auto& d : ws.load_theory(name).diagnostics) out.emplace_back(d.code, d.subject, d.detail);
             return out;
           })
      .def("add_sequent_file", &Workspace::add_sequent_file, py::arg("path"))
      .def("obligation_ids",
           [](const Workspace& ws) {
             std::vector<std::string> ids;
             for (const auto& po : ws.obligations()) ids.push_back(po.id);
             return ids;
           })
      .def(
          "prove_json",
          [](Workspace& ws, const std::string& id, bool run_auto, bool replay, const std::string& order,
             std::optional<std::size_t> budget) {
            ProveOptions opts;
            opts.run_auto = run_auto;
            opts.replay = replay;
            opts.order = parse_auto_order(order);
            opts.budget = budget ? *budget : step_budget_from_env();
            return outcome_to_json(prove_obligation(ws, ws.obligation(id), opts)).dump();
          },
          py::arg("po"), py::arg("run_auto") = true, py::arg("replay") = false,
          py::arg("order") = "expand,rewrite,inference", py::arg("budget") = py::none())
      .def(
          "format",
          [](Workspace& ws, const std::string& text, const std::vector<std::string>& theories, bool ascii) {
            return print_formula(typed_in(ws, theories, text), mode_of(ascii));
          },
          py::arg("text"), py::arg("theories"), py::arg("ascii") = false)
      .def(
          "type_of",
          [](Workspace& ws, const std::string& text, const std::vector<std::string>& theories) {
            Formula f = typed_in(ws, theories, text);
            return f.type() ? f.type()->to_string() : std::string("predicate");
          },
          py::arg("text"), py::arg("theories"))
      .def(
          "wd",
          [](Workspace& ws, const std::string& text, const std::vector<std::string>& theories) {
            RuleBase base = ws.rule_base(theories);
            return print_formula(wd(typecheck(parse_formula(text, base.factory()), {}), base), PrintMode::Unicode);
          },
          py::arg("text"), py::arg("theories"));

  py::class_<Service>(m, "Service")
      .def(py::init<fs::path>(), py::arg("root"))
      .def(
          "handle",
          [](Service& s, const std::string& method, const std::string& path, const std::string& body) {
            Service::Response r;
            {
              py::gil_scoped_release release;
              r = s.handle(method, path, body);
            }
            return py::make_tuple(r.status, r.body.dump());
          },
          py::arg("method"), py::arg("path"), py::arg("body") = "");
}
