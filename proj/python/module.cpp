#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "graver_opt/document.hpp"
#include "graver_opt/graver.hpp"
#include "graver_opt/models.hpp"
#include "graver_opt/nfold.hpp"

namespace py = pybind11;
using namespace graver_opt;

namespace {

// Python ints are arbitrary precision, so values cross as decimal text.
Int to_int(py::handle h) {
  if (!py::isinstance<py::int_>(h)) throw py::type_error("expected an int");
  return Int(py::str(h).cast<std::string>());
}

py::int_ to_py(const Int& x) {
  const std::string s = x.get_str();
  return py::reinterpret_steal<py::int_>(PyLong_FromString(s.c_str(), nullptr, 10));
}

IntMat to_mat(const py::sequence& rows, std::optional<std::size_t> cols = std::nullopt) {
  std::vector<IntVec> out;
  for (py::handle r : rows) {
    IntVec row;
    for (py::handle x : py::reinterpret_borrow<py::sequence>(r)) row.push_back(to_int(x));
    out.push_back(std::move(row));
  }
  std::size_t n = cols ? *cols : (out.empty() ? 0 : out[0].size());
  for (const IntVec& r : out)
    if (r.size() != n) throw py::value_error("matrix rows differ in length");
  return IntMat::from_rows(out, n);
}

py::list to_py(const std::vector<IntVec>& vs) {
  py::list out;
  for (const IntVec& v : vs) {
    py::list row;
    for (const Int& x : v) row.append(to_py(x));
    out.append(row);
  }
  return out;
}

Json to_doc_json(const py::object& doc) {
  if (py::isinstance<py::str>(doc)) return Json::parse(doc.cast<std::string>());
  py::object dumps = py::module_::import("json").attr("dumps");
  return Json::parse(dumps(doc).cast<std::string>());
}

py::object from_json(const Json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

RunFlags make_flags(unsigned threads, std::optional<std::string> mode, bool trace, std::size_t graver_cap,
                    std::size_t direct_threshold) {
  RunFlags f;
  f.threads = threads;
  f.mode = std::move(mode);
  f.trace = trace;
  f.graver_cap = graver_cap;
  f.direct_threshold = direct_threshold;
  return f;
}

py::tuple outcome(const RunOutcome& out) { return py::make_tuple(from_json(out.document), out.exit_code); }

}  // namespace

PYBIND11_MODULE(graver_opt, m) {
  m.doc() = "Graver basis augmentation for integer, N-fold and two-stage programs";

  py::register_exception<Error>(m, "GraverOptError");

  m.def("graver", [](const py::sequence& a) { return to_py(graver(to_mat(a)).elements); }, py::arg("A"),
        "Graver basis of A in canonical order.");
  m.def("circuits", [](const py::sequence& a) { return to_py(circuits(to_mat(a)).elements); }, py::arg("A"),
        "Circuits of A in canonical order.");
  m.def(
      "graver_composite",
      [](const py::sequence& a, const py::sequence& c) {
        const IntMat am = to_mat(a);
        const GraverBasis g = graver_composite(am, to_mat(c, am.cols()));
        return py::make_tuple(to_py(g.elements), to_py(g.lifted));
      },
      py::arg("A"), py::arg("C"), "Projected and lifted elements of the composite basis G(A, C).");
  m.def(
      "graver_complexity",
      [](const py::sequence& a, const py::sequence& b, std::size_t cap) {
        const IntMat am = to_mat(a);
        return graver_complexity(am, to_mat(b, am.cols()), cap);
      },
      py::arg("A"), py::arg("B"), py::arg("cap") = 6);
  m.def(
      "linf_q", [](const py::int_& nn, const py::int_& w) { return linf_q(to_int(nn), to_int(w)); },
      py::arg("nn"), py::arg("w"));

  m.def(
      "solve",
      [](const py::object& doc, unsigned threads, std::optional<std::string> mode, bool trace,
         std::size_t graver_cap, std::size_t direct_threshold) {
        const InstanceDocument d = parse_document(to_doc_json(doc));
        RunOutcome out;
        {
          py::gil_scoped_release release;
          out = run_solve(d, make_flags(threads, std::move(mode), trace, graver_cap, direct_threshold));
        }
        return outcome(out);
      },
      py::arg("doc"), py::arg("threads") = 1, py::arg("mode") = py::none(), py::arg("trace") = false,
      py::arg("graver_cap") = 6, py::arg("direct_threshold") = 24,
      "Solve an instance document (dict or JSON text); returns (result, exit_code).");
  m.def(
      "oracle",
      [](const py::object& doc, std::optional<py::int_> radius) {
        RunFlags f;
        if (radius) f.radius = to_int(*radius);
        return outcome(run_oracle(parse_document(to_doc_json(doc)), f));
      },
      py::arg("doc"), py::arg("radius") = py::none(), "Exhaustive enumeration; returns (result, exit_code).");
  m.def(
      "basis",
      [](const py::object& doc, const std::string& kind) {
        BasisKind k;
        if (kind == "circuits") k = BasisKind::kCircuits;
        else if (kind == "graver") k = BasisKind::kGraver;
        else if (kind == "composite") k = BasisKind::kComposite;
        else throw py::value_error("kind must be circuits, graver or composite");
        return outcome(run_basis(parse_document(to_doc_json(doc)), k));
      },
      py::arg("doc"), py::arg("kind") = "graver");
  m.def(
      "model", [](const py::object& doc) { return outcome(run_model(parse_document(to_doc_json(doc)))); },
      py::arg("doc"), "Translate a model document to an nfold document.");
}
