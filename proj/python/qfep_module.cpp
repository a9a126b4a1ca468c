// Python bindings for the scenario runner and the headline diagnostics.

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qfep/error.hpp"
#include "qfep/harness.hpp"
#include "qfep/inequalities.hpp"
#include "qfep/screen.hpp"

namespace py = pybind11;
using namespace qfep;

namespace {

py::dict chsh_py(std::vector<double> angles, std::optional<std::size_t> shots, std::uint64_t seed) {
    if (angles.size() != 4) fail(ErrorKind::invalid_argument, "chsh needs four angles");
    CHSHConfig c;
    c.a = BasisAxis::from_angle(angles[0]);
    c.a_prime = BasisAxis::from_angle(angles[1]);
    c.b = BasisAxis::from_angle(angles[2]);
    c.b_prime = BasisAxis::from_angle(angles[3]);
    c.shots = shots;
    Rng rng(seed);
    const CHSHResult r = chsh(c, shots ? &rng : nullptr);
    py::dict d;
    d["S"] = r.s;
    d["correlators"] = std::vector<double>(r.correlators.begin(), r.correlators.end());
    d["standard_error"] = r.standard_error;
    return d;
}

py::dict lg_py(double omega, double tau, std::optional<std::size_t> shots, std::uint64_t seed) {
    LGConfig c;
    c.hamiltonian = HermitianOperator(pauli::x() * (0.5 * omega));
    c.times = {0.0, tau, 2 * tau};
    c.shots = shots;
    Rng rng(seed);
    const LGResult r = leggett_garg_k3(c, shots ? &rng : nullptr);
    py::dict d;
    d["K3"] = r.k3;
    d["C12"] = r.c12;
    d["C23"] = r.c23;
    d["C13"] = r.c13;
    d["standard_error"] = r.standard_error;
    return d;
}

double entropy_py(const std::vector<std::complex<double>> &amps, std::size_t qubits, const Subsystems &cut) {
    if (amps.size() != (std::size_t{1} << qubits)) fail(ErrorKind::invalid_argument, "amplitude count is not 2^qubits");
    Eigen::VectorXcd v(static_cast<Eigen::Index>(amps.size()));
    for (std::size_t i = 0; i < amps.size(); ++i) v[static_cast<Eigen::Index>(i)] = amps[i];
    return entanglement_entropy(StateVector(Dims(qubits, 2), v), cut);
}

std::string feasibility_py(const std::string &path) {
    const ContextFamily f = ingest_contexts(path);
    return feasibility_report(f, joint_feasible(f)).dump();
}

std::map<std::string, py::bytes> run_py(const std::string &scenario, const std::string &config_text,
                                        std::uint64_t seed, std::optional<std::size_t> shots) {
    RunConfig c;
    c.scenario = scenario;
    c.seed = seed;
    c.config_text = config_text;
    c.params = parse_config_text(config_text, scenario);
    c.shots = shots;
    std::map<std::string, py::bytes> out;
    for (const auto &[name, body] : run_in_memory(c).files) out.emplace(name, py::bytes(body));
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Quantum reference frames and free-energy alignment";

    static py::exception<Error> error(m, "QfepError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error &e) {
            PyErr_SetString(error.ptr(), e.what());
        }
    });

    m.def("chsh", &chsh_py, py::arg("angles"), py::arg("shots") = py::none(), py::arg("seed") = 0,
          "CHSH value on the singlet for angles (a, a', b, b') in radians.");
    m.def("leggett_garg", &lg_py, py::arg("omega") = 1.0, py::arg("tau") = M_PI / 3, py::arg("shots") = py::none(),
          py::arg("seed") = 0, "Three-time Leggett-Garg K3 for a precessing qubit.");
    m.def("entanglement_entropy", &entropy_py, py::arg("amplitudes"), py::arg("qubits"), py::arg("cut"),
          "Von Neumann entropy in bits of the qubits in `cut`.");
    m.def("minimal_bit_time", &minimal_bit_time, py::arg("temperature"));
    m.def("dissipation_time", &dissipation_time, py::arg("temperature"));
    m.def("_feasibility_json", &feasibility_py, py::arg("path"));
    m.def("scenario_names", &scenario_names);
    m.def("_run", &run_py, py::arg("scenario"), py::arg("config_text") = "", py::arg("seed") = 0,
          py::arg("shots") = py::none());
}
