#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ftlab/curves.hpp"
#include "ftlab/errors.hpp"
#include "ftlab/experiments.hpp"
#include "ftlab/fronttrack.hpp"
#include "ftlab/riemann.hpp"
#include "ftlab/system.hpp"

namespace py = pybind11;
using namespace ftlab;

namespace {

py::dict wave_dict(const ElementaryWave& w) {
    py::dict d;
    d["family"] = w.family;
    d["kind"] = w.kind == WaveKind::Shock ? "shock" : "rarefaction";
    d["left"] = w.left.u;
    d["right"] = w.right.u;
    d["speed"] = w.speed;
    d["strength"] = w.strength;
    return d;
}

py::dict glimm_dict(const GlimmFunctionals& g) {
    py::dict d;
    d["V"] = g.V;
    d["Q"] = g.Q;
    d["U"] = g.U;
    d["kappa"] = g.kappa;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "front tracking core";
    py::register_exception<Error>(m, "Error");

    m.def("list_systems", [] {
        std::vector<std::string> out;
        for (const FluxSystem& s : builtin_systems()) out.push_back(s.name);
        return out;
    });
    m.def("system_info", [](const std::string& name) {
        const FluxSystem& s = system_by_name(name);
        py::dict d;
        d["name"] = s.name;
        d["description"] = s.description;
        d["center"] = s.center;
        d["radius"] = s.radius;
        d["s_max"] = s.s_max;
        d["has_entropy"] = s.has_entropy();
        d["has_chart"] = s.chart.has_value();
        return d;
    });
    m.def("flux", [](const std::string& name, const State& u) { return system_by_name(name).flux(u); });
    m.def("eigensystem", [](const std::string& name, const State& u) {
        const EigenData e = eigensystem(system_by_name(name), u);
        py::dict d;
        d["lambda"] = e.lambda;
        d["r"] = e.r;
        d["l"] = e.l;
        return d;
    });
    m.def("riemann_invariants", [](const std::string& name, const State& u) {
        return riemann_invariants(system_by_name(name), u);
    });
    m.def("rarefaction_curve", [](const std::string& name, const State& base, int family, double s) {
        return rarefaction_curve(system_by_name(name), base, family, s).state;
    });
    m.def("shock_curve", [](const std::string& name, const State& base, int family, double s) {
        const WaveCurvePoint p = shock_curve(system_by_name(name), base, family, s);
        return py::make_tuple(p.state, p.sigma);
    });
    m.def("solve_riemann", [](const std::string& name, double nu, const State& ul, const State& ur) {
        const RiemannFan f = solve_riemann(system_by_name(name), nu, ul, ur);
        py::list waves;
        for (const ElementaryWave& w : f.waves) waves.append(wave_dict(w));
        py::dict d;
        d["middle"] = f.middle.u;
        d["sigma1"] = f.sigma1;
        d["sigma2"] = f.sigma2;
        d["waves"] = waves;
        return d;
    });

    py::class_<PiecewiseSolution>(m, "Solution")
        .def(py::init([](const std::string& name, double nu, const State& left,
                         const std::vector<std::pair<double, State>>& jumps, double kappa) {
                 TrackOptions o;
                 o.kappa = kappa;
                 return init_solution(system_by_name(name), nu, left, jumps, o);
             }),
             py::arg("system"), py::arg("nu"), py::arg("left"), py::arg("jumps"), py::arg("kappa") = 40.0)
        .def("advance", [](PiecewiseSolution& s, double t) { advance(s, t); })
        .def_readonly("time", &PiecewiseSolution::time)
        .def_readonly("nu", &PiecewiseSolution::nu)
        .def_readonly("interactions", &PiecewiseSolution::interactions)
        .def("positions", &PiecewiseSolution::positions)
        .def("states", [](const PiecewiseSolution& s) {
            std::vector<State> out;
            for (const StatePoint& p : s.states) out.push_back(p.u);
            return out;
        })
        .def("speeds", [](const PiecewiseSolution& s) {
            std::vector<double> out;
            for (const Front& f : s.fronts) out.push_back(f.speed);
            return out;
        })
        .def("families", [](const PiecewiseSolution& s) {
            std::vector<int> out;
            for (const Front& f : s.fronts) out.push_back(f.family);
            return out;
        })
        .def("__call__", [](const PiecewiseSolution& s, double x) { return s.right_limit(x).u; })
        .def("glimm", [](const PiecewiseSolution& s) { return glimm_dict(glimm_functionals(s)); });

    m.def("experiment_names", &experiment_names);
    m.def("default_config_json", [](const std::string& e) { return config_to_json(default_config(e)).dump(); });
    m.def(
        "run_experiment_json",
        [](const std::string& config, const std::string& out) {
            const ExperimentConfig c = config_from_json(json::parse(config));
            ExperimentReport r;
            {
                py::gil_scoped_release nogil;
                r = run_experiment(c);
            }
            json rep = report_to_json(r);
            if (!out.empty()) rep["run_directory"] = write_run_directory(r, out);
            return rep.dump();
        },
        py::arg("config"), py::arg("out") = "");
}
