#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ivf/adiabatic.hpp"
#include "ivf/coeffs.hpp"
#include "ivf/errors.hpp"
#include "ivf/experiment.hpp"
#include "ivf/field.hpp"
#include "ivf/flow.hpp"
#include "ivf/section.hpp"

#ifndef IVF_VERSION
#define IVF_VERSION "0.0.0"
#endif

namespace py = pybind11;
using namespace ivf;

// Vec <-> Python sequence of floats.
namespace pybind11::detail {
template <>
struct type_caster<Vec> {
  PYBIND11_TYPE_CASTER(Vec, const_name("list[float]"));

  bool load(handle src, bool convert) {
    make_caster<std::vector<double>> inner;
    if (!inner.load(src, convert)) return false;
    const std::vector<double>& v = cast_op<const std::vector<double>&>(inner);
    if (v.size() > kMaxDim) return false;
    value = Vec::from(v);
    return true;
  }

  static handle cast(const Vec& v, return_value_policy, handle) {
    list out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = py::float_(v[i]);
    return out.release();
  }
};
}  // namespace pybind11::detail

namespace {

Matrix to_matrix(const std::vector<std::vector<double>>& rows) {
  Matrix m(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.size()) throw std::invalid_argument("matrix must be square");
    for (std::size_t j = 0; j < rows.size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

py::dict record_dict(const CloudRecord& r) {
  py::dict d;
  d["seed_id"] = r.seed_id;
  d["k"] = r.crossing.k;
  d["t"] = r.crossing.t;
  d["x"] = r.crossing.x_k;
  d["y"] = r.crossing.y;
  d["psi"] = r.psi;
  d["phi"] = r.phi;
  d["residual"] = r.crossing.residual;
  d["direction"] = r.crossing.direction;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Interpolating vector fields of near-identity maps";
  m.attr("__version__") = IVF_VERSION;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericalFailure>(m, "NumericalFailure", PyExc_ArithmeticError);

  m.def("coefficients", [](int n) { return CoeffTable(n).values(); }, py::arg("n"),
        "p_{n,k} for k = -n..n.");
  m.def("moment_sum", [](int n, int j) { return moment_sum(CoeffTable(n), j); }, py::arg("n"), py::arg("j"));
  m.def("abs_sum", [](int n) { return abs_sum(CoeffTable(n)); }, py::arg("n"));

  py::class_<MapFamily>(m, "MapFamily")
      .def_property_readonly("name", &MapFamily::name)
      .def_property_readonly("dim", &MapFamily::dim)
      .def_property_readonly("epsilon", &MapFamily::epsilon)
      .def_property_readonly("time_step", &MapFamily::time_step)
      .def_property_readonly("fixed_points", &MapFamily::fixed_points)
      .def("apply", &MapFamily::apply, py::arg("x"))
      .def("apply_inverse", &MapFamily::apply_inverse, py::arg("x"))
      .def("forward", &MapFamily::forward, py::arg("x"))
      .def("inverse", &MapFamily::inverse, py::arg("x"))
      .def("reduce", &MapFamily::reduce, py::arg("x"))
      .def("limit_hamiltonian", [](const MapFamily& map, const Vec& x) { return limit_hamiltonian(map, x); },
           py::arg("x"));

  m.def("standard_map", &standard_map, py::arg("epsilon"));
  m.def(
      "froeschle_map",
      [](double eps, double a1, double a2, double a3, double eta) {
        return froeschle_map(eps, FroeschleParams{a1, a2, a3, eta});
      },
      py::arg("epsilon"), py::arg("a1") = 1.0, py::arg("a2") = 0.5, py::arg("a3") = 1.25, py::arg("eta") = 0.5);
  m.def(
      "pendulum_flow_map",
      [](double eps, double integ_tol) { return flow_map(pendulum_field(), 2, eps, integ_tol, "pendulum", {true, false}); },
      py::arg("epsilon"), py::arg("integ_tol") = 1e-13);
  m.def("iterate_power", &iterate_power, py::arg("base"), py::arg("q"), py::arg("winding") = std::vector<int>{});

  py::class_<InterpolatingField>(m, "InterpolatingField")
      .def(py::init<MapFamily, int>(), py::arg("map"), py::arg("n"))
      .def("__call__", &InterpolatingField::eval, py::arg("x"), py::call_guard<py::gil_scoped_release>())
      .def("eval", &InterpolatingField::eval, py::arg("x"), py::call_guard<py::gil_scoped_release>())
      .def("iterates", &InterpolatingField::iterates, py::arg("x"))
      .def("interp_curve", &InterpolatingField::interp_curve, py::arg("x"), py::arg("t"))
      .def_property_readonly("order", &InterpolatingField::order)
      .def_property_readonly("map", &InterpolatingField::map)
      .def_property_readonly("eval_count", &InterpolatingField::eval_count);

  m.def(
      "advance",
      [](const InterpolatingField& f, const Vec& x, double t, double tol) {
        IntegratorSettings s;
        s.abs_tol = s.rel_tol = tol;
        py::gil_scoped_release release;
        return advance(f, x, t, s);
      },
      py::arg("field"), py::arg("x"), py::arg("t"), py::arg("tol") = 1e-11);

  m.def(
      "flowmap_error_grid",
      [](const MapFamily& map, int n, const std::vector<double>& lower, const std::vector<double>& upper,
         const std::vector<std::size_t>& resolution, double tol, int workers) {
        IntegratorSettings s;
        s.abs_tol = s.rel_tol = tol;
        ErrorGrid g;
        {
          py::gil_scoped_release release;
          g = flowmap_error_grid(map, n, GridSpec{lower, upper, resolution}, s, workers);
        }
        py::dict d;
        d["points"] = g.points;
        d["log10_err"] = g.log10_err;
        d["failures"] = g.failures;
        d["max_log10"] = g.max_log10();
        return d;
      },
      py::arg("map"), py::arg("n"), py::arg("lower"), py::arg("upper"), py::arg("resolution"),
      py::arg("tol") = 1e-11, py::arg("workers") = 1);

  m.def(
      "reversibility_defect",
      [](const InterpolatingField& f, const std::vector<std::vector<double>>& r, const std::vector<Vec>& pts) {
        return reversibility_defect(f, to_matrix(r), pts);
      },
      py::arg("field"), py::arg("reversor"), py::arg("points"));

  py::class_<AdiabaticInvariant>(m, "AdiabaticInvariant")
      .def(py::init([](const InterpolatingField& f, const Vec& base, double quad_tol, int max_levels) {
             InvariantOptions o;
             o.quad_tol = quad_tol;
             o.max_levels = max_levels;
             return AdiabaticInvariant(f, base, o);
           }),
           py::arg("field"), py::arg("base"), py::arg("quad_tol") = 1e-8, py::arg("max_levels") = 20)
      .def("__call__", &AdiabaticInvariant::operator(), py::arg("x"), py::call_guard<py::gil_scoped_release>())
      .def_property_readonly("base", &AdiabaticInvariant::base);

  m.def(
      "delta_h_scan",
      [](const std::string& family, const std::vector<int>& ns, const std::vector<double>& eps,
         const std::vector<double>& lower, const std::vector<double>& upper, const std::vector<std::size_t>& resolution,
         const Vec& base, double quad_tol) {
        MapFactory make;
        if (family == "standard") make = [](double e) { return standard_map(e); };
        else if (family == "froeschle") make = [](double e) { return froeschle_map(e); };
        else throw ConfigError("unknown family '" + family + "'");
        InvariantOptions o;
        o.quad_tol = quad_tol;
        std::vector<DeltaHRow> rows;
        {
          py::gil_scoped_release release;
          rows = delta_h_scan(make, ns, eps, GridSpec{lower, upper, resolution}, base, o);
        }
        py::list out;
        for (const DeltaHRow& r : rows) {
          py::dict d;
          d["n"] = r.n;
          d["epsilon"] = r.epsilon;
          d["max_delta_h"] = r.max_delta_h;
          d["failures"] = r.failures;
          out.append(d);
        }
        return out;
      },
      py::arg("family"), py::arg("n_list"), py::arg("epsilon_list"), py::arg("lower"), py::arg("upper"),
      py::arg("resolution"), py::arg("base"), py::arg("quad_tol") = 1e-8);

  m.def(
      "seed_levelset",
      [](const AdiabaticInvariant& h, double energy, const std::vector<double>& psi, std::size_t count) {
        py::gil_scoped_release release;
        return seed_levelset(h, energy, psi, count).seeds;
      },
      py::arg("invariant"), py::arg("energy"), py::arg("psi_values"), py::arg("count"));

  m.def(
      "section_cloud",
      [](const InterpolatingField& f, const std::vector<Vec>& seeds, std::size_t crossings, std::size_t i,
         std::size_t j, long max_iterates, int workers) {
        const SectionSpec spec = angle_difference_section(i, j, f.map().dim());
        SectionCloud c;
        {
          py::gil_scoped_release release;
          c = section_cloud(f, spec, seeds, crossings, IntegratorSettings{}, max_iterates, workers);
        }
        py::list out;
        for (const CloudRecord& r : c.records) out.append(record_dict(r));
        return out;
      },
      py::arg("field"), py::arg("seeds"), py::arg("crossings_per_seed"), py::arg("i") = 0, py::arg("j") = 1,
      py::arg("max_iterates_per_seed") = 10'000'000, py::arg("workers") = 1,
      "Crossings of psi_i = psi_j projected along the field.");

  m.def(
      "validate_config",
      [](const std::string& text) {
        const ValidationReport r = validate_config(Json::parse(text));
        py::dict d;
        d["ok"] = r.ok();
        d["errors"] = r.errors;
        d["notes"] = r.notes;
        d["estimated_map_applications"] = r.estimated_map_applications;
        return d;
      },
      py::arg("config_json"));

  m.def(
      "run_experiment",
      [](const std::string& text, const std::string& out_dir, int workers) {
        RunOptions o;
        o.out_dir = out_dir;
        o.workers = workers;
        RunSummary s;
        const Json cfg = Json::parse(text);
        {
          py::gil_scoped_release release;
          s = run_experiment(cfg, o);
        }
        py::dict d;
        d["exit_code"] = s.exit_code;
        std::vector<std::string> outputs;
        for (const auto& p : s.outputs) outputs.push_back(p.string());
        d["outputs"] = outputs;
        d["failures"] = s.failure_log;
        d["map_applications"] = s.map_applications;
        d["message"] = s.message;
        return d;
      },
      py::arg("config_json"), py::arg("out_dir"), py::arg("workers") = 0);
}
