#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <optional>
#include <vector>

#include "gkdv/config.hpp"
#include "gkdv/direct.hpp"
#include "gkdv/fits.hpp"
#include "gkdv/io.hpp"
#include "gkdv/model.hpp"
#include "gkdv/rescaled.hpp"
#include "gkdv/run.hpp"
#include "gkdv/spectral.hpp"

namespace py = pybind11;
using namespace gkdv;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vector(const Array& a) {
  if (a.ndim() != 1) throw py::value_error("expected a one-dimensional array");
  return {a.data(), a.data() + a.size()};
}

Array to_array(const std::vector<double>& v) {
  Array a(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), a.mutable_data());
  return a;
}

Field make_field(const Grid& g, const Array& values) {
  std::vector<double> v = to_vector(values);
  if (static_cast<int>(v.size()) != g.size()) throw py::value_error("field length does not match the grid");
  return Field(g, std::move(v));
}

py::dict fit_dict(const FitResult& r) {
  py::dict d;
  for (const auto& [k, v] : r.params) d[py::str(k)] = v;
  d["residual_l2"] = r.residual_l2;
  d["residual_linf"] = r.residual_linf;
  if (r.correlation) d["correlation"] = *r.correlation;
  if (r.stddev) d["stddev"] = *r.stddev;
  d["window"] = py::make_tuple(r.window.begin, r.window.end);
  d["flags"] = r.flags;
  return d;
}

FitWindow window_or_last(std::size_t n, std::optional<std::pair<std::size_t, std::size_t>> w) {
  return w ? FitWindow{w->first, w->second} : window_last(n);
}

// column arrays keyed by name
template <class Rec, class... Cols>
py::dict columns(const std::vector<Rec>& recs, const std::pair<const char*, Cols>&... cols) {
  py::dict d;
  auto one = [&](const char* name, auto get) {
    std::vector<double> v;
    v.reserve(recs.size());
    for (const auto& r : recs) v.push_back(get(r));
    d[name] = to_array(v);
  };
  (one(cols.first, cols.second), ...);
  return d;
}

py::dict direct_result(const DirectTrajectory& tr) {
  using R = DirectRecord;
  py::dict d = columns(tr.records,
                       std::pair{"t", +[](const R& r) { return r.t; }},
                       std::pair{"mass", +[](const R& r) { return r.inv.mass; }},
                       std::pair{"energy", +[](const R& r) { return r.inv.energy; }},
                       std::pair{"linf", +[](const R& r) { return r.inv.linf; }},
                       std::pair{"l2ux", +[](const R& r) { return r.inv.l2_ux; }},
                       std::pair{"delta", +[](const R& r) { return r.delta; }},
                       std::pair{"x_max", +[](const R& r) { return r.x_max; }});
  d["stop"] = to_string(tr.stop);
  d["message"] = tr.message;
  d["final"] = to_array(tr.final_state.values);
  d["final_time"] = tr.final_time;
  d["steps"] = tr.steps;
  return d;
}

py::dict rescaled_result(const RescaledTrajectory& tr) {
  using R = RescaledRecord;
  py::dict d = columns(tr.records,
                       std::pair{"tau", +[](const R& r) { return r.tau; }},
                       std::pair{"t", +[](const R& r) { return r.t; }},
                       std::pair{"L", +[](const R& r) { return r.L; }},
                       std::pair{"a", +[](const R& r) { return r.a; }},
                       std::pair{"v", +[](const R& r) { return r.v; }},
                       std::pair{"x_m", +[](const R& r) { return r.x_m; }},
                       std::pair{"linf", +[](const R& r) { return r.linf; }},
                       std::pair{"l2ux", +[](const R& r) { return r.l2ux; }},
                       std::pair{"delta", +[](const R& r) { return r.delta; }});
  d["stop"] = to_string(tr.stop);
  d["message"] = tr.message;
  d["final"] = to_array(tr.final_state.U.values);
  d["final_tau"] = tr.final_state.tau;
  d["final_L"] = tr.final_state.L();
  d["steps"] = tr.steps;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Spectral solvers for the generalized KdV equation";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<FitError>(m, "FitError", PyExc_ArithmeticError);

  py::class_<Grid>(m, "Grid")
      .def(py::init(&make_grid), py::arg("N"), py::arg("D"))
      .def_property_readonly("N", &Grid::size)
      .def_property_readonly("D", &Grid::half_width)
      .def_property_readonly("spacing", &Grid::spacing)
      .def_property_readonly("nodes", [](const Grid& g) { return to_array(g.nodes()); })
      .def("__repr__", [](const Grid& g) {
        return "Grid(N=" + std::to_string(g.size()) + ", D=" + format_double(g.half_width()) + ")";
      });

  py::class_<ModelParams>(m, "Model")
      .def(py::init([](int n, double eps) {
             ModelParams p{n, eps};
             p.validate();
             return p;
           }),
           py::arg("n"), py::arg("eps"))
      .def_readonly("n", &ModelParams::n)
      .def_readonly("eps", &ModelParams::eps);

  m.def("soliton", [](double c, double x0, const ModelParams& p, const Grid& g) {
    return to_array(soliton(c, x0, p, g).values);
  }, py::arg("c"), py::arg("x0"), py::arg("model"), py::arg("grid"));

  m.def("invariants", [](const Grid& g, const Array& u, const ModelParams& p) {
    const Invariants inv = invariants(make_field(g, u), p);
    py::dict d;
    d["mass"] = inv.mass;
    d["energy"] = inv.energy;
    d["linf"] = inv.linf;
    d["l2ux"] = inv.l2_ux;
    return d;
  }, py::arg("grid"), py::arg("u"), py::arg("model"));

  m.def("derivative", [](const Grid& g, const Array& u, int order) {
    return to_array(spectral_derivative(make_field(g, u), order).values);
  }, py::arg("grid"), py::arg("u"), py::arg("order") = 1);

  m.def("hopf_critical_time", [](double beta, const ModelParams& p) { return hopf_critical_time(beta, p); },
        py::arg("beta"), py::arg("model"));

  m.def("run_direct",
        [](const Grid& g, const Array& u0, const ModelParams& p, double T, double h, int stride,
           bool refine_max) {
          Irk4Config cfg;
          cfg.h = h;
          DirectOptions opts;
          opts.record_stride = stride;
          opts.refine_max = refine_max;
          const Field f = make_field(g, u0);
          std::optional<DirectTrajectory> tr;
          {
            py::gil_scoped_release nogil;
            tr.emplace(run_direct(f, cfg, p, T, opts));
          }
          return direct_result(*tr);
        },
        py::arg("grid"), py::arg("u0"), py::arg("model"), py::arg("T"), py::arg("h"),
        py::arg("stride") = 1, py::arg("refine_max") = false);

  m.def("run_rescaled",
        [](const Grid& g, const Array& u0, const ModelParams& p, double tau_end, double h,
           const std::string& closure, int stride) {
          RescaledConfig cfg;
          cfg.h = h;
          cfg.closure = closure_from_string(closure);
          RescaledOptions opts;
          opts.record_stride = stride;
          const Field f = make_field(g, u0);
          std::optional<RescaledTrajectory> tr;
          {
            py::gil_scoped_release nogil;
            tr.emplace(run_rescaled(f, cfg, p, tau_end, opts));
          }
          return rescaled_result(*tr);
        },
        py::arg("grid"), py::arg("u0"), py::arg("model"), py::arg("tau_end"), py::arg("h"),
        py::arg("closure") = "l2ux", py::arg("stride") = 1);

  m.def("fit_blowup_time",
        [](const Array& t, const Array& y, std::optional<double> alpha,
           std::optional<std::pair<std::size_t, std::size_t>> window) {
          const auto tv = to_vector(t), yv = to_vector(y);
          return fit_dict(fit_blowup_time(tv, yv, alpha, window_or_last(tv.size(), window)));
        },
        py::arg("t"), py::arg("y"), py::arg("alpha") = py::none(), py::arg("window") = py::none());

  m.def("fit_L_linear",
        [](const Array& t, const Array& L, double t_min) {
          const auto tv = to_vector(t), lv = to_vector(L);
          return fit_dict(fit_L_linear(tv, lv, window_after(tv, t_min)));
        },
        py::arg("t"), py::arg("L"), py::arg("t_min"));

  m.def("fit_L_powerlaw",
        [](const Array& t, const Array& L, double t_star, double saturation_floor) {
          return fit_dict(fit_L_powerlaw(to_vector(t), to_vector(L), t_star, saturation_floor));
        },
        py::arg("t"), py::arg("L"), py::arg("t_star"), py::arg("saturation_floor") = -8.0);

  m.def("fit_epsilon_law",
        [](const Array& eps, const Array& t_star, double t_c) {
          const EpsilonLawResult r = fit_epsilon_law(to_vector(eps), to_vector(t_star), t_c);
          py::dict d;
          d["exponential"] = fit_dict(r.exponential);
          d["algebraic"] = fit_dict(r.algebraic);
          return d;
        },
        py::arg("eps"), py::arg("t_star"), py::arg("t_c"));

  m.def("scaling_from_norms",
        [](const Array& t, const Array& norm, const std::string& kind, const ModelParams& p) {
          const NormKind k = kind == "linf" ? NormKind::linf : NormKind::l2ux;
          if (kind != "linf" && kind != "l2ux") throw py::value_error("kind must be 'l2ux' or 'linf'");
          return to_array(scaling_from_norms(to_vector(t), to_vector(norm), k, p).L);
        },
        py::arg("t"), py::arg("norm"), py::arg("kind"), py::arg("model"));

  m.def("blowup_exponents", [](const ModelParams& p) {
    const BlowupExponents e = blowup_exponents(p);
    return py::dict(py::arg("L") = e.L, py::arg("linf") = e.linf, py::arg("l2ux_sq") = e.l2ux_sq);
  }, py::arg("model"));

  m.def("run_config",
        [](const std::string& text, const std::vector<std::string>& overrides) {
          const RunConfig cfg = parse_config(text, overrides);
          RunOutcome out;
          {
            py::gil_scoped_release nogil;
            out = run(cfg);
          }
          py::dict d;
          d["status"] = static_cast<int>(out.status);
          d["summary"] = out.summary;
          d["files"] = out.files;
          return d;
        },
        py::arg("text"), py::arg("overrides") = std::vector<std::string>{},
        "Parse a configuration document and run it, writing the usual output files.");
}
