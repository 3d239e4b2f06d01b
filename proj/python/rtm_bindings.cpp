#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rtm/decay_rates.hpp"
#include "rtm/entropy_bounds.hpp"
#include "rtm/replica_average.hpp"
#include "rtm/rtm_compress.hpp"

namespace py = pybind11;
using namespace rtm;

namespace {

Gate as_gate(const Mat& m) {
    const int d = int(std::lround(std::sqrt(double(m.rows()))));
    if (m.rows() != m.cols() || d * d != m.rows()) throw ConfigError("gate must be a d^2 x d^2 matrix");
    return Gate{d, m};
}

struct Chains {
    InfluenceMatrix L, R;
};

Chains chains(const Mat& gate, int t, const Vec& psi) {
    CircuitSpec c = uniform_circuit(as_gate(gate), t, psi);
    return {build_influence(c, Side::left), build_influence(c, Side::right)};
}

py::dict report_dict(const BoundReport& r) {
    py::dict d;
    d["t"] = r.t;
    d["t0"] = r.t0;
    d["p"] = r.p;
    d["s_sigma"] = r.s_sigma;
    d["shannon"] = r.shannon;
    d["lower"] = r.lower;
    d["upper"] = r.upper;
    d["exact"] = r.exact ? py::cast(*r.exact) : py::none();
    return d;
}

}  // namespace

PYBIND11_MODULE(rtmpy, m) {
    m.doc() = "Reduced transition matrices, entropy bounds and replica averages for brickwork circuits";
    py::register_exception<Error>(m, "RtmError", PyExc_ValueError);

    // gates
    m.def("du_gate_u", [](double p) { return du_gate_u(p).m; }, py::arg("p"));
    m.def("du_gate_w_fixed", [](double p) { return du_gate_w_fixed(p).m; }, py::arg("p"));
    m.def("du_gate_w_symmetric", [](double p, std::uint64_t seed) { return du_gate_w_symmetric(p, seed).m; },
          py::arg("p"), py::arg("seed"));
    m.def("haar_gate", [](int d, std::uint64_t seed) { return haar_gate(d, seed).m; }, py::arg("d"), py::arg("seed"));
    m.def("is_dual_unitary", [](const Mat& g, double tol) { return is_dual_unitary(as_gate(g), tol); }, py::arg("gate"),
          py::arg("tol") = kDuTol);
    m.def("entangling_power", [](const Mat& g, double tol) { return entangling_power(as_gate(g), tol); },
          py::arg("gate"), py::arg("tol") = kDuTol);
    m.def("averaged_gate", &averaged_gate, py::arg("d"), py::arg("p"));

    // states and dense oracle
    m.def("random_dimer", &random_dimer, py::arg("d"), py::arg("seed"));
    m.def("bell_dimer", &bell_dimer, py::arg("d"));
    m.def("product_dimer", &product_dimer, py::arg("d"), py::arg("a"), py::arg("b"));
    m.def("pauli", &pauli, py::arg("which"));

    // influence matrices and transition matrices
    m.def(
        "one_point",
        [](const Mat& g, int t, const Vec& psi, const Mat& o) {
            Chains c = chains(g, t, psi);
            return expectation(c.L, c.R, o);
        },
        py::arg("gate"), py::arg("t"), py::arg("psi0"), py::arg("observable"),
        "Expectation of a single-site observable after t rows, from the influence matrices.");
    m.def(
        "rtm_spectra",
        [](const Mat& g, int t, const Vec& psi) {
            Chains c = chains(g, t, psi);
            std::vector<std::vector<double>> out;
            for (const RTM& T : build_rtm_all(c.L, c.R)) out.push_back(T.spectrum().values);
            return out;
        },
        py::arg("gate"), py::arg("t"), py::arg("psi0"), "Singular values of T_t0 for t0 = 0..t+1.");
    m.def(
        "rtm_entropies",
        [](const Mat& g, int t, const Vec& psi, double alpha) {
            Chains c = chains(g, t, psi);
            std::vector<double> out;
            for (const RTM& T : build_rtm_all(c.L, c.R)) out.push_back(entropy(T, alpha));
            return out;
        },
        py::arg("gate"), py::arg("t"), py::arg("psi0"), py::arg("alpha") = 1.0);
    m.def(
        "bounds",
        [](const Mat& g, int t, const Vec& psi, const std::string& mode) {
            if (mode != "dual-unitary" && mode != "generic") throw ConfigError("mode must be dual-unitary or generic");
            Chains c = chains(g, t, psi);
            py::list out;
            for (const auto& r : bounds_from_influence(c.L, c.R, mode == "generic" ? BoundMode::generic
                                                                                  : BoundMode::dual_unitary))
                out.append(report_dict(r));
            return out;
        },
        py::arg("gate"), py::arg("t"), py::arg("psi0"), py::arg("mode") = "dual-unitary");
    m.def(
        "sweep",
        [](const Mat& g, int t, const Vec& psi, const std::vector<int>& chi) {
            Chains c = chains(g, t, psi);
            SweepResult r = joint_sweep(c.L, c.R, Schedule::ranks(chi));
            for (char p : {'X', 'Y', 'Z'}) r.probe(c.L, c.R, std::string(1, p), pauli(p));
            return r.report.to_json();
        },
        py::arg("gate"), py::arg("t"), py::arg("psi0"), py::arg("chi"), "Joint sweep report as a JSON string.");

    // replica averages
    m.def("critical_p", &critical_p, py::arg("d"));
    m.def("c_constant", &c_constant, py::arg("psi0"), py::arg("d"));
    m.def(
        "averaged_Ak",
        [](int d, double p, int t0, int t1, int k, double c) { return averaged_Ak_contract({d, p, t0, t1, k, c}); },
        py::arg("d"), py::arg("p"), py::arg("t0"), py::arg("t1"), py::arg("k"), py::arg("c"));
    m.def(
        "closed_form_EAk",
        [](int d, double p, int t0, int t1, int k, double c) { return closed_form_EAk({d, p, t0, t1, k, c}); },
        py::arg("d"), py::arg("p"), py::arg("t0"), py::arg("t1"), py::arg("k"), py::arg("c"));

    // rates
    m.def("r_mag_avg", &r_mag_avg, py::arg("p"), py::arg("d"));
    m.def(
        "r_mag_gate",
        [](const Mat& g) {
            GateRates r = r_mag_gate(as_gate(g));
            return py::make_tuple(r.left.rate, r.right.rate);
        },
        py::arg("gate"), "(left, right) magnon rates of a dual-unitary gate.");
    m.def(
        "fit_pk_decay",
        [](const std::vector<std::pair<int, double>>& series, int d) {
            RateReport r = fit_pk_decay(series, d);
            py::dict out;
            out["r_fit"] = r.r_fit;
            out["r2"] = r.r2;
            out["slope"] = r.slope;
            out["intercept"] = r.intercept;
            out["window"] = py::make_tuple(r.window_lo, r.window_hi);
            return out;
        },
        py::arg("series"), py::arg("d") = 2);
}
