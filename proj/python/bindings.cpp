#include <sstream>

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ouselect/basis.hpp"
#include "ouselect/noise.hpp"
#include "ouselect/risklab.hpp"
#include "ouselect/runner.hpp"
#include "ouselect/selector.hpp"
#include "ouselect/signals.hpp"
#include "ouselect/transforms.hpp"

namespace py = pybind11;
using namespace ouselect;

namespace {

py::dict estimation_dict(const EstimationResult& r, const WeightGrid& grid) {
    py::dict d;
    const auto& chosen = grid.sequences.at(static_cast<std::size_t>(r.selected));
    d["n"] = r.n;
    d["theta_hat"] = r.theta_hat;
    d["sigma_hat"] = r.sigma_hat;
    d["sigma_used"] = r.sigma_used;
    d["rho"] = r.rho;
    d["costs"] = r.costs;
    d["selected"] = r.selected;
    d["selected_label"] = chosen.label();
    d["support"] = chosen.support();
    d["final_coeffs"] = r.final_coeffs;
    return d;
}

py::dict mean_se(const MeanSE& m) {
    py::dict d;
    d["mean"] = m.mean;
    d["se"] = m.se;
    return d;
}

} // namespace

PYBIND11_MODULE(_ouselect, m) {
    m.doc() = "Adaptive Pinsker-weight selection under Levy-driven OU noise";

    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    py::enum_<JumpLaw>(m, "JumpLaw")
        .value("rademacher", JumpLaw::rademacher)
        .value("gaussian", JumpLaw::gaussian);

    py::class_<NoiseParams>(m, "NoiseParams")
        .def(py::init([](double a, double lambda, double rho1, double rho2, JumpLaw law) {
                 NoiseParams p{a, lambda, rho1, rho2, law};
                 p.validate();
                 return p;
             }),
             py::arg("a") = 0.0, py::arg("lam") = 0.0, py::arg("rho1") = 1.0, py::arg("rho2") = 0.0,
             py::arg("jump_law") = JumpLaw::rademacher)
        .def_readwrite("a", &NoiseParams::a)
        .def_readwrite("lam", &NoiseParams::lambda)
        .def_readwrite("rho1", &NoiseParams::rho1)
        .def_readwrite("rho2", &NoiseParams::rho2)
        .def_readwrite("jump_law", &NoiseParams::jump_law)
        .def_property_readonly("rho_star", &NoiseParams::rho_star)
        .def("__repr__", [](const NoiseParams& p) {
            std::ostringstream s;
            s << "NoiseParams(a=" << p.a << ", lam=" << p.lambda << ", rho1=" << p.rho1
              << ", rho2=" << p.rho2 << ", jump_law=" << to_string(p.jump_law) << ")";
            return s.str();
        });

    py::class_<FamilyBounds>(m, "FamilyBounds")
        .def(py::init([](double a_max, double lambda_max, double lo, double hi) {
                 FamilyBounds b{a_max, lambda_max, lo, hi};
                 b.validate();
                 return b;
             }),
             py::arg("a_max") = 1.0, py::arg("lambda_max") = 1.0, py::arg("rho_star_min") = 1.0,
             py::arg("rho_star_max") = 2.0)
        .def_readwrite("a_max", &FamilyBounds::a_max)
        .def_readwrite("lambda_max", &FamilyBounds::lambda_max)
        .def_readwrite("rho_star_min", &FamilyBounds::rho_star_min)
        .def_readwrite("rho_star_max", &FamilyBounds::rho_star_max);

    // basis and signals
    m.def("phi", [](int j, double x) { return phi(BasisIndex(j), x); }, py::arg("j"), py::arg("x"));
    m.def("signal_names", &catalogue_names);
    m.def("signal_value", [](const std::string& name, double t) { return catalogue_signal(name)(t); },
          py::arg("name"), py::arg("t"));
    m.def("fourier_coeffs",
          [](const std::string& name, int J) { return fourier_coeffs(catalogue_signal(name), J).values; },
          py::arg("name"), py::arg("truncation"));
    m.def("ellipsoid_weight", [](int j, int k) { return ellipsoid_weight(BasisIndex(j), k); },
          py::arg("j"), py::arg("k"));

    // noise
    m.def("replicate_seed", &replicate_seed, py::arg("master"), py::arg("replicate"));
    m.def(
        "simulate",
        [](const NoiseParams& p, int n, double dt, std::uint64_t seed, const std::string& signal) {
            auto path = std::make_shared<const NoisePath>(simulate_noise(p, n, dt, seed));
            py::dict d;
            d["grid"] = path->grid;
            d["xi"] = path->xi;
            d["dw"] = path->brownian_increments;
            d["jump_times"] = path->jump_times;
            d["jump_marks"] = path->jump_marks;
            if (!signal.empty()) {
                const ObservationPath obs = observe(catalogue_signal(signal), path);
                d["times"] = obs.times;
                d["y_increments"] = obs.y_increments;
            }
            return d;
        },
        py::arg("params"), py::arg("n"), py::arg("dt") = 1.0 / 64.0, py::arg("seed") = 1,
        py::arg("signal") = "");
    m.def(
        "ito_integral",
        [](const std::function<double(double)>& f, const NoiseParams& p, int n, double dt,
           std::uint64_t seed) { return ito_integral(f, simulate_noise(p, n, dt, seed)); },
        py::arg("f"), py::arg("params"), py::arg("n"), py::arg("dt") = 1.0 / 64.0, py::arg("seed") = 1);

    // transforms
    m.def(
        "cov_I",
        [](int i, int j, const NoiseParams& p, double t) {
            return cov_I(basis_function(i), basis_function(j), p, t);
        },
        py::arg("i"), py::arg("j"), py::arg("params"), py::arg("t"));
    m.def(
        "epsilon",
        [](const std::function<double(double)>& f, double a, double t) { return epsilon_f(f, a, t); },
        py::arg("f"), py::arg("a"), py::arg("t"));
    m.def(
        "moment_constants",
        [](const NoiseParams& p, const FamilyBounds& b) {
            const MomentConstants c = moment_constants(p, b);
            py::dict d;
            d["rho_star"] = c.rho_star;
            d["lambda1"] = c.lambda1;
            d["lambda2"] = c.lambda2;
            d["rho3"] = c.rho3;
            d["D1"] = c.D1;
            d["D2"] = c.D2;
            d["Mstar"] = c.Mstar;
            d["L1star"] = c.L1star;
            d["sigma_Q"] = c.sigma_Q;
            return d;
        },
        py::arg("params"), py::arg("bounds") = FamilyBounds{});

    // selector
    m.def("pinsker_weight", [](int beta, double t, int n) { return pinsker_weight(beta, t, n).gamma; },
          py::arg("beta"), py::arg("t"), py::arg("n"));
    m.def("rho_schedule", &rho_schedule, py::arg("n"));
    m.def(
        "grid_labels",
        [](int n) {
            std::vector<std::string> out;
            for (const auto& w : build_default_grid(n).sequences) {
                out.push_back(w.label());
            }
            return out;
        },
        py::arg("n"));
    m.def(
        "estimate",
        [](const std::vector<double>& times, const std::vector<double>& dy, int n, double rho,
           const std::string& sigma, double sigma_known) {
            if (times.size() != dy.size()) {
                throw std::invalid_argument("times and y_increments differ in length");
            }
            ObservationPath obs;
            obs.n = n;
            obs.times = times;
            obs.y_increments = dy;
            const WeightGrid grid = build_default_grid(n);
            SelectionConfig cfg;
            cfg.rho = rho > 0.0 ? rho : rho_schedule(n);
            cfg.sigma_mode = sigma_mode_from_string(sigma);
            cfg.sigma_known = sigma_known;
            return estimation_dict(select(estimate_thetas(obs, n), grid, cfg), grid);
        },
        py::arg("times"), py::arg("y_increments"), py::arg("n"), py::arg("rho") = 0.0,
        py::arg("sigma") = "estimated", py::arg("sigma_known") = 0.0);

    // risk
    m.def(
        "mc_risk",
        [](const std::string& signal, const NoiseParams& p, int n, int beta, double t, int replicates,
           std::uint64_t seed) {
            MCConfig cfg;
            cfg.replicates = replicates;
            cfg.seed = seed;
            return mean_se(mc_risk(catalogue_signal(signal), p, n, pinsker_weight(beta, t, n), cfg));
        },
        py::arg("signal"), py::arg("params"), py::arg("n"), py::arg("beta"), py::arg("t"),
        py::arg("replicates") = 500, py::arg("seed") = 1);
    m.def("pinsker_constant", &pinsker_constant, py::arg("k"), py::arg("r"), py::arg("sigma_star"));

    // runner
    m.def(
        "run",
        [](const std::string& config_json) {
            const ExperimentConfig cfg = config_from_json(json::parse(config_json));
            std::ostringstream log;
            const int code = run(cfg, log);
            return py::make_tuple(code, log.str());
        },
        py::arg("config_json"));
}
