#include <pybind11/pybind11.h>
#include <pybind11/complex.h>
#include <pybind11/stl.h>

#include <sstream>

#include "epdyn/error.hpp"
#include "epdyn/pipeline.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace epdyn;

namespace {

ScenarioConfig parse_config(const std::string& text) { return config_from_json(Json::parse(text)); }

std::string summary(const std::string& config) { return run_scenario(parse_config(config)).summary.dump(); }

py::dict trajectory(const std::string& config) {
    const ScenarioConfig c = parse_config(config);
    const TrajectoryRecord r = propagate(c.scenario.hamiltonian, c.scenario.loop,
                                         resolve_initial(c.scenario.hamiltonian, c.scenario.loop,
                                                         c.scenario.initial),
                                         c.scenario.loop.samples);
    std::vector<double> t, delta, j, ova, ovb, c1, c2, lognorm;
    std::vector<std::complex<double>> psi0, psi1;
    for (const TrajectorySample& s : r.samples) {
        t.push_back(s.t);
        delta.push_back(s.point.delta);
        j.push_back(s.point.j);
        ova.push_back(s.ov_alpha);
        ovb.push_back(s.ov_beta);
        c1.push_back(std::abs(s.c1));
        c2.push_back(std::abs(s.c2));
        lognorm.push_back(s.raw_log_norm);
        psi0.push_back(s.psi.a0);
        psi1.push_back(s.psi.a1);
    }
    return py::dict("t_us"_a = t, "delta"_a = delta, "j"_a = j, "ov_alpha"_a = ova,
                    "ov_beta"_a = ovb, "abs_c1"_a = c1, "abs_c2"_a = c2, "raw_log_norm"_a = lognorm,
                    "psi0"_a = psi0, "psi1"_a = psi1);
}

std::string vorticity(const std::string& config) {
    const ScenarioConfig c = parse_config(config);
    return vorticity_json(c.scenario.hamiltonian, c.scenario.loop).dump();
}

std::string sweep(const std::string& spec, int workers) {
    const SweepSpec s = sweep_from_json(Json::parse(spec));
    std::ostringstream os;
    write_sweep_csv(os, s, run_sweep(s, workers));
    return os.str();
}

std::string table(int samples) { return table_json(reproduce_table(samples)).dump(); }

std::string riemann(double gamma, int resolution) {
    const double g = std::max(gamma, 1e-3);
    std::ostringstream os;
    write_mesh_csv(os, riemann_mesh({Family::PT_PASSIVE, gamma, {}}, {-2 * g, 2 * g, 0.0, 2 * g},
                                    resolution));
    return os.str();
}

std::string preset_config(const std::string& name) { return to_json(preset(name)).dump(); }

}  // namespace

PYBIND11_MODULE(_epdyn, m) {
    m.doc() = "Encircling exceptional points of a dissipative qubit (C++ core)";

    static PyObject* numeric_error =
        py::exception<Error>(m, "NumericError", PyExc_RuntimeError).release().ptr();
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            const std::string msg = std::string(to_string(e.code())) + ": " + e.what() +
                                    (e.field().empty() ? "" : " [" + e.field() + "]");
            if (e.code() == ErrorCode::Validation || e.code() == ErrorCode::MissingCustomMatrix ||
                e.code() == ErrorCode::UnsupportedFamily || e.code() == ErrorCode::OutOfRange)
                PyErr_SetString(PyExc_ValueError, msg.c_str());
            else
                PyErr_SetString(numeric_error, msg.c_str());
        } catch (const Json::exception& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        }
    });

    m.def("preset_names", &preset_names);
    m.def("preset_config", &preset_config, "name"_a, "preset as a JSON configuration string");
    m.def("summary", &summary, "config"_a, "run a JSON configuration; returns summary JSON");
    m.def("trajectory", &trajectory, "config"_a, "sampled trajectory columns");
    m.def("vorticity", &vorticity, "config"_a, "spectral and dynamic vorticity as JSON");
    m.def("sweep", &sweep, "spec"_a, "workers"_a = 1, "parameter sweep; returns CSV text");
    m.def("table", &table, "samples"_a = 1001, "chirality/reciprocity table as JSON");
    m.def("riemann", &riemann, "gamma"_a = 0.06, "resolution"_a = 65, "eigenvalue mesh CSV");
}
