#include "harnack/convexity.hpp"
#include "harnack/csf_flow.hpp"
#include "harnack/experiments.hpp"
#include "harnack/expander_lab.hpp"
#include "harnack/heat_harnack.hpp"
#include "harnack/path_energy.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace harnack;

namespace {

using Source = std::tuple<double, double, double>;  // x, y, weight

heat::HeatSolution solution(int dim, const std::vector<Source>& sources, double time_shift) {
  if (sources.empty()) return heat::FundamentalSolution{dim};
  std::vector<heat::PointSource> s;
  for (const auto& [x, y, w] : sources) s.push_back({heat::Point(x, y), w});
  return heat::PointSourceSolution(dim, std::move(s), time_shift);
}

heat::Point point(const std::vector<double>& x) {
  if (x.empty() || x.size() > 2) throw std::invalid_argument("points have 1 or 2 coordinates");
  return heat::Point(x[0], x.size() > 1 ? x[1] : 0.0);
}

py::object to_python(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

py::array_t<double> to_array(const GridField& f) {
  const auto n = static_cast<py::ssize_t>(f.resolution());
  py::array_t<double> out({n, n});
  std::copy(f.values().begin(), f.values().end(), out.mutable_data());
  return out;
}

py::dict sample_dict(const HarnackSample& s) {
  py::dict d;
  d["theta"] = s.theta;
  d["t"] = s.t;
  d["v"] = s.v;
  d["Z"] = s.Z;
  d["Z_min"] = s.Z_min;
  d["v_star"] = s.v_star;
  d["dH_dt"] = s.dH_dt;
  d["truncation"] = s.truncation;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Harnack inequality and expander laboratory";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  // heat
  m.def("log_solution", [](std::vector<double> x, double t, std::vector<Source> sources, int dim, double shift) {
        return heat::log_solution(solution(dim, sources, shift), point(x), t);
      }, py::arg("x"), py::arg("t"), py::arg("sources") = std::vector<Source>{}, py::arg("dim") = 1,
      py::arg("time_shift") = 0.0);
  m.def("matrix_harnack_defect", [](std::vector<double> x, double t, std::vector<Source> sources, int dim) {
        const auto e = heat::matrix_harnack_defect(solution(dim, sources, 0.0), point(x), t);
        return std::pair{e.value, e.truncation};
      }, py::arg("x"), py::arg("t"), py::arg("sources") = std::vector<Source>{}, py::arg("dim") = 1,
      "Smallest eigenvalue of Hess(log u) + I/(2t) and its truncation estimate.");
  m.def("trace_defects", [](std::vector<double> x, double t, std::vector<Source> sources, int dim) {
        const auto d = heat::trace_defects(solution(dim, sources, 0.0), point(x), t);
        return std::pair{d.li_yau.value, d.trace_harnack.value};
      }, py::arg("x"), py::arg("t"), py::arg("sources") = std::vector<Source>{}, py::arg("dim") = 1);
  m.def("classical_harnack_gap",
      [](std::vector<double> x1, double t1, std::vector<double> x2, double t2, std::vector<Source> sources, int dim) {
        return heat::classical_harnack_gap(solution(dim, sources, 0.0), point(x1), t1, point(x2), t2);
      }, py::arg("x1"), py::arg("t1"), py::arg("x2"), py::arg("t2"), py::arg("sources") = std::vector<Source>{},
      py::arg("dim") = 1);

  // curves and flow
  m.def("circle_samples", [](double r, std::size_t M) { return preset_samples(CirclePreset{r}, M); },
        py::arg("radius") = 1.0, py::arg("M") = kDefaultCurveSamples);
  m.def("ellipse_samples", [](double a, double b, std::size_t M) { return preset_samples(EllipsePreset{a, b}, M); },
        py::arg("a") = 2.0, py::arg("b") = 1.0, py::arg("M") = kDefaultCurveSamples);
  m.def("curve_convexity", [](std::vector<double> h) { return to_python(curve_convexity(h)); }, py::arg("samples"));
  m.def("extinction_time", [](std::vector<double> h) { return extinction_time(SupportCurve::from_samples(h)); });

  py::class_<FlowHistory>(m, "FlowHistory")
      .def_property_readonly("t_end", &FlowHistory::t_end)
      .def("support", [](const FlowHistory& h, double t) {
        const CurveSlice s = h.slice(t);
        return std::vector<double>(s.samples().begin(), s.samples().end());
      }, py::arg("t"))
      .def("harnack_Z", [](const FlowHistory& h, double theta, double t, double v) {
        return sample_dict(harnack_Z(h, theta, t, v));
      }, py::arg("theta"), py::arg("t"), py::arg("v") = 0.0)
      .def("harnack_lattice", [](const FlowHistory& h, std::size_t nth, std::size_t nt, double lo, double hi) {
        const HarnackLattice lat = harnack_lattice(h, nth, nt, lo, hi);
        return std::pair{lat.Z_min, lat.budget};
      });
  m.def("run_flow", [](std::vector<double> h, double t_end, double dt) {
        FlowOptions fo;
        fo.dt = dt;
        py::gil_scoped_release release;
        return run_flow(SupportCurve::from_samples(std::move(h)), t_end, fo);
      }, py::arg("samples"), py::arg("t_end"), py::arg("dt") = 1e-5);
  m.def("path_energy",
      [](const FlowHistory& h, double th1, double t1, double th2, double t2, std::size_t K, std::size_t M) {
        PathEnergyOptions po;
        po.time_steps = K;
        po.angle_nodes = M;
        return path_energy(h, th1, t1, th2, t2, po).delta;
      }, py::arg("history"), py::arg("theta1"), py::arg("t1"), py::arg("theta2"), py::arg("t2"),
      py::arg("time_steps") = 200, py::arg("angle_nodes") = 128);
  m.def("integrated_harnack_gap", [](const FlowHistory& h, double th1, double t1, double th2, double t2) {
        return integrated_harnack_gap(h, th1, t1, th2, t2).gap;
      });

  // expanders
  m.def("gauge", [](std::vector<double> h, double x, double y) {
        return gauge_function(SupportCurve::from_samples(std::move(h)), Vec2(x, y));
      }, py::arg("samples"), py::arg("x"), py::arg("y"));
  m.def("build_cone", [](std::vector<double> h, double N, double L, std::size_t n) {
        return to_array(build_cone(SupportCurve::from_samples(std::move(h)), N, L, n));
      }, py::arg("samples"), py::arg("N"), py::arg("L"), py::arg("resolution") = kDefaultResolution);
  m.def("compute_expander", [](std::vector<double> h, double N, double L, std::size_t n) {
        ExpanderResult r;
        {
          py::gil_scoped_release release;
          r = compute_expander(SupportCurve::from_samples(std::move(h)), N, L, n);
        }
        const ExpanderValidation& v = r.validation;
        py::dict d;
        d["lipschitz_cone"] = v.lipschitz_cone;
        d["lipschitz_expander"] = v.lipschitz_expander;
        d["lipschitz_ok"] = v.lipschitz_ok;
        d["min_value"] = v.min_value;
        d["min_bound"] = v.min_bound;
        d["min_ok"] = v.min_ok;
        d["asymptotics_ok"] = v.asymptotics_ok;
        return py::make_tuple(to_array(r.expander), d);
      }, py::arg("samples"), py::arg("N"), py::arg("L"), py::arg("resolution") = kDefaultResolution);
  m.def("radial_expander", [](double N, double R_max) {
        const RadialProfile p = radial_expander(N, R_max);
        py::dict d;
        d["a"] = p.a;
        d["r"] = p.r;
        d["u"] = p.u;
        d["max_residual"] = p.max_residual(0.05, p.r_max());
        return d;
      }, py::arg("N"), py::arg("R_max"));
  m.def("convexity_chain", [](std::vector<double> h, std::vector<double> Ns, std::size_t resolution) {
        ChainOptions opt;
        opt.resolution = resolution;
        ChainReport r;
        {
          py::gil_scoped_release release;
          r = convexity_chain(h, Ns, opt);
        }
        return to_python(r);
      }, py::arg("samples"), py::arg("N_sequence"), py::arg("resolution") = kDefaultResolution);

  // experiments
  m.def("run_experiment", [](const std::string& config_json) {
        const ExperimentConfig c = config_from_json(nlohmann::json::parse(config_json));
        RunResult r;
        {
          py::gil_scoped_release release;
          r = run_experiment(c);
        }
        return to_python(r.report);
      }, py::arg("config_json"), "Runs the configured suites and returns report.json as a dict.");
}
