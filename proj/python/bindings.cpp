#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "homdyn/catalog.hpp"
#include "homdyn/classify.hpp"
#include "homdyn/errors.hpp"
#include "homdyn/experiment.hpp"
#include "homdyn/group.hpp"

namespace py = pybind11;

namespace {

// Configs and reports cross the boundary as JSON text; the Python wrapper
// converts them to and from dicts.
std::string run_json(const std::string& config) {
  const homdyn::ExperimentConfig c = homdyn::parse_config(nlohmann::json::parse(config));
  homdyn::ExperimentResult r;
  {
    py::gil_scoped_release release;
    r = homdyn::run_experiment(c);
  }
  nlohmann::json out = {{"pass", r.pass},
                        {"exit_code", homdyn::exit_code(r)},
                        {"config", homdyn::to_json(c)},
                        {"report", r.report},
                        {"series_columns", r.series_columns},
                        {"series", r.series}};
  return out.dump();
}

std::string resolve_json(const std::string& config) {
  return homdyn::to_json(homdyn::parse_config(nlohmann::json::parse(config))).dump();
}

py::tuple iwasawa(const homdyn::Matrix& g) {
  const homdyn::IwasawaFactors f = homdyn::iwasawa_decompose(g);
  return py::make_tuple(f.k, f.a, f.nu);
}

std::string classify_example(const std::string& name) {
  const homdyn::CannedExample& ex = homdyn::find_example(name);
  return homdyn::to_string(homdyn::classify(ex.flag, ex.embedding).label);
}

py::list examples() {
  py::list out;
  for (const homdyn::CannedExample& ex : homdyn::canned_examples()) {
    py::dict d;
    d["name"] = ex.name;
    d["description"] = ex.description;
    d["expected"] = homdyn::to_string(ex.expected);
    d["fibre"] = homdyn::to_string(ex.fibre);
    out.append(d);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_homdyn, m) {
  m.doc() = "Random walks on homogeneous bundles: classifier and experiment harness";

  static py::exception<homdyn::Error> error(m, "HomdynError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const homdyn::ConfigurationError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const homdyn::PreconditionError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const homdyn::Error& e) {
      py::set_error(error, e.what());
    } catch (const nlohmann::json::exception& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  m.def("run_json", &run_json, py::arg("config"), "Run an experiment from a JSON config and return JSON.");
  m.def("resolve_json", &resolve_json, py::arg("config"), "Validate a JSON config and fill its defaults.");
  m.def("iwasawa", &iwasawa, py::arg("g"), "Iwasawa factors (k, a, nu) with g = k a nu.");
  m.def("classify_example", &classify_example, py::arg("name"), "Case label of a canned example.");
  m.def("examples", &examples, "The canned example catalog.");
  m.def("versions_json", [] { return homdyn::versions().dump(); });
  m.attr("__version__") = HOMDYN_VERSION;
}
