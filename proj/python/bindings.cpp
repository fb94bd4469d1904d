#include "minimod/cli.hpp"
#include "minimod/desugar.hpp"
#include "minimod/eval.hpp"
#include "minimod/mod_typing.hpp"
#include "minimod/printer.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace minimod;

namespace {

struct CheckFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

PrintMode mode_from(const std::string &m) {
  if (m == "plain") return PrintMode::Plain;
  if (m == "stamps") return PrintMode::Stamps;
  if (m == "aliases") return PrintMode::Aliases;
  throw py::value_error("print mode must be plain, stamps or aliases");
}

template <typename F>
auto guarded(const std::string &source, F &&f) {
  try {
    return f();
  } catch (const Diagnostic &d) {
    throw CheckFailure(render_diagnostic(d, source, false));
  }
}

std::string infer(const std::string &source, const std::string &mode, const std::string &filename) {
  PrintMode pm = mode_from(mode);
  return guarded(source, [&] {
    Session session;
    TypedProgram t = check_program(session, parse_program(source, filename));
    return print_signature(t.signature, pm);
  });
}

void check(const std::string &source, const std::string &filename) {
  guarded(source, [&] {
    Session session;
    check_program(session, parse_program(source, filename));
    return 0;
  });
}

py::tuple run(const std::string &source, const std::string &filename) {
  std::ostringstream out;
  std::optional<std::string> uncaught = guarded(source, [&]() -> std::optional<std::string> {
    Session session;
    TypedProgram t = check_program(session, parse_program(source, filename));
    EvalResult r = eval_program(t.elaborated, out);
    if (r.uncaught) return render_diagnostic(*r.uncaught, source, false);
    return std::nullopt;
  });
  return py::make_tuple(out.str(), uncaught ? py::object(py::str(*uncaught)) : py::object(py::none()));
}

std::string desugar(const std::string &source, const std::string &eliminate, const std::string &via) {
  return guarded(source, [&] {
    auto items = parse_program(source).items;
    if (eliminate == "local") return print_source(expand_local(items));
    if (eliminate == "private") return print_source(expand_private(items));
    if (eliminate != "open") throw py::value_error("eliminate must be local, private or open");
    if (via == "private") return print_source(introduce_private(items));
    if (via != "local") throw py::value_error("via must be local or private");
    return print_source(introduce_local(items));
  });
}

py::tuple cli(const std::vector<std::string> &args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return py::make_tuple(code, out.str(), err.str());
}

} // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "MiniMod type checker and interpreter";
  py::register_exception<CheckFailure>(m, "MiniModError");
  m.def("check", &check, py::arg("source"), py::arg("filename") = "<string>",
        "Type-check a program; raises MiniModError with the rendered diagnostic.");
  m.def("infer", &infer, py::arg("source"), py::arg("mode") = "aliases", py::arg("filename") = "<string>",
        "Exported signature of a program.");
  m.def("run", &run, py::arg("source"), py::arg("filename") = "<string>",
        "Evaluate a program; returns (output, uncaught exception report or None).");
  m.def("desugar", &desugar, py::arg("source"), py::arg("eliminate"), py::arg("via") = "local",
        "Translate between local, private and extended open.");
  m.def("cli", &cli, py::arg("args"), "Run the command-line driver; returns (exit code, stdout, stderr).");
}
