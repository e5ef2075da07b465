#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "xyflow/circle_kernel.hpp"
#include "xyflow/config.hpp"
#include "xyflow/errors.hpp"
#include "xyflow/experiments.hpp"
#include "xyflow/gibbs_probe.hpp"
#include "xyflow/ground_state.hpp"
#include "xyflow/lattice_model.hpp"
#include "xyflow/mc_engine.hpp"

namespace py = pybind11;
using namespace xyflow;

namespace {

LatticeConfig config_from(int d, int L, const std::vector<double>& angles) {
    LatticeConfig x(d, L, Boundary::periodic());
    if (static_cast<int>(angles.size()) != x.size()) {
        throw ShapeError("expected " + std::to_string(x.size()) + " angles, got " +
                         std::to_string(angles.size()));
    }
    for (int i = 0; i < x.size(); ++i) x.set(i, Angle(angles[i]));
    return x;
}

ModelParams params_of(double beta, double J, double h, double t, int d, int L) {
    ModelParams p{beta, J, h, t, d, L};
    p.validate();
    return p;
}

Boundary boundary_of(const std::string& kind, double angle) {
    if (kind == "periodic") return Boundary::periodic();
    if (kind == "free") return Boundary::free();
    if (kind == "fixed") return Boundary::fixed(Angle(angle));
    throw DomainError("boundary must be periodic, free or fixed");
}

}  // namespace

PYBIND11_MODULE(_xyflow, m) {
    m.doc() = "XY model under heat-kernel dynamics on the circle";
    m.attr("__version__") = XYFLOW_VERSION;

    py::class_<KernelEval>(m, "KernelEval")
        .def_readonly("value", &KernelEval::value)
        .def_readonly("trunc_error", &KernelEval::trunc_error)
        .def_readonly("n_terms", &KernelEval::n_terms)
        .def("__repr__", [](const KernelEval& k) {
            std::ostringstream s;
            s << "KernelEval(value=" << k.value << ", trunc_error=" << k.trunc_error
              << ", n_terms=" << k.n_terms << ")";
            return s.str();
        });

    py::class_<ExpansionCoeffs>(m, "ExpansionCoeffs")
        .def_readonly("t", &ExpansionCoeffs::t)
        .def_readonly("h_t", &ExpansionCoeffs::h_t)
        .def_readonly("c1", &ExpansionCoeffs::c1)
        .def_readonly("c2", &ExpansionCoeffs::c2)
        .def_readonly("c3", &ExpansionCoeffs::c3)
        .def_readonly("rest_bound", &ExpansionCoeffs::rest_bound)
        .def("evaluate", &ExpansionCoeffs::evaluate, py::arg("c"));

    m.def("kernel", [](double x, double y, double t, double tol) { return kernel(Angle(x), Angle(y), t, tol); },
          py::arg("x"), py::arg("y"), py::arg("t"), py::arg("tol") = 1e-12);
    m.def("log_kernel",
          [](double x, double y, double t, double tol) { return log_kernel(Angle(x), Angle(y), t, tol); },
          py::arg("x"), py::arg("y"), py::arg("t"), py::arg("tol") = 1e-12);
    m.def("expansion", &expansion, py::arg("t"));
    m.def("sample_steps",
          [](double x0, double t, int n, std::uint64_t seed) {
              Rng rng = make_rng(seed);
              std::vector<double> out(static_cast<std::size_t>(n));
              for (double& v : out) v = sample_step(Angle(x0), t, rng).radians();
              return out;
          },
          py::arg("x0"), py::arg("t"), py::arg("n"), py::arg("seed") = 0);

    m.def("initial_energy",
          [](const std::vector<double>& x, int d, int L, double J, double h) {
              return initial_energy(config_from(d, L, x), params_of(1.0, J, h, 1.0, d, L));
          },
          py::arg("x"), py::arg("d"), py::arg("L"), py::arg("J") = 1.0, py::arg("h") = 0.0);
    m.def("dynamical_energy",
          [](const std::vector<double>& x, const std::vector<double>& y, int d, int L, double beta, double J,
             double h, double t) {
              return dynamical_energy(config_from(d, L, x), config_from(d, L, y), params_of(beta, J, h, t, d, L));
          },
          py::arg("x"), py::arg("y"), py::arg("d"), py::arg("L"), py::arg("beta"), py::arg("J"), py::arg("h"),
          py::arg("t"));
    m.def("restricted_energy",
          [](const std::vector<double>& x, int d, int L, double beta, double J, double h, double t) {
              return restricted_energy(config_from(d, L, x), params_of(beta, J, h, t, d, L));
          },
          py::arg("x"), py::arg("d"), py::arg("L"), py::arg("beta"), py::arg("J"), py::arg("h"), py::arg("t"));

    m.def("find_maximizers",
          [](double beta_h, double t, bool full_log) {
              const auto sp = full_log ? SitePotential::full_log(beta_h, t) : SitePotential::restricted(beta_h, t);
              const auto r = find_maximizers(sp);
              std::vector<double> angles;
              for (const auto& a : r.maximizers) angles.push_back(a.radians());
              py::dict out;
              out["maximizers"] = angles;
              out["epsilon_t"] = r.epsilon_t;
              out["degenerate"] = r.degenerate;
              out["g_max"] = r.g_max;
              return out;
          },
          py::arg("beta_h"), py::arg("t"), py::arg("full_log") = false);
    m.def("transition_window",
          [](double beta, double h, double t_lo, double t_hi, bool full_log) -> py::object {
              const auto w = transition_window(beta, h, t_lo, t_hi, full_log);
              if (!w) return py::none();
              return py::make_tuple(w->t0, w->t1);
          },
          py::arg("beta"), py::arg("h"), py::arg("t_lo") = 1.0, py::arg("t_hi") = 10.0,
          py::arg("full_log") = false);
    m.def("closed_form_window", [](double beta_h) -> py::object {
        const auto w = closed_form_window(beta_h);
        if (!w) return py::none();
        return py::make_tuple(w->t0, w->t1);
    });

    m.def("run_chain",
          [](int d, int L, double beta, double J, double h, double t, const std::string& mode,
             const std::string& boundary, double boundary_angle, int sweeps, int burn_in, std::uint64_t seed) {
              ChainSpec s;
              s.params = params_of(beta, J, h, t, d, L);
              s.mode = chain_mode_from_string(mode);
              s.boundary = boundary_of(boundary, boundary_angle);
              s.sweeps = sweeps;
              s.burn_in = burn_in;
              s.seed = seed;
              ObservableTrace tr;
              {
                  py::gil_scoped_release release;
                  tr = run_chain(s);
              }
              py::dict out;
              out["energy"] = tr.energy;
              out["m_sin"] = tr.m_sin;
              out["m_cos"] = tr.m_cos;
              out["center_histogram"] = tr.center_histogram;
              out["acceptance"] = tr.acceptance;
              out["proposal_width"] = tr.proposal_width;
              return out;
          },
          py::arg("d"), py::arg("L"), py::arg("beta"), py::arg("J"), py::arg("h"), py::arg("t"),
          py::arg("mode") = "initial", py::arg("boundary") = "periodic", py::arg("boundary_angle") = 0.0,
          py::arg("sweeps") = 1000, py::arg("burn_in") = 100, py::arg("seed") = 0);

    m.def("conditional_density",
          [](int d, double beta, double J, double h, double t, int r_in, int r_out, double boundary_angle,
             int sweeps, int burn_in, std::uint64_t seed) {
              ProbeSpec s;
              s.params = params_of(beta, J, h, t, d, 2);
              s.region = {r_in, r_out};
              s.boundary_angle = boundary_angle;
              s.sweeps = sweeps;
              s.burn_in = burn_in;
              s.seed = seed;
              DensityEstimate est;
              {
                  py::gil_scoped_release release;
                  est = conditional_density(s);
              }
              return py::make_tuple(est.density, est.error);
          },
          py::arg("d"), py::arg("beta"), py::arg("J"), py::arg("h"), py::arg("t"), py::arg("r_in") = 1,
          py::arg("r_out") = 2, py::arg("boundary_angle") = kPi / 2, py::arg("sweeps") = 4000,
          py::arg("burn_in") = 1000, py::arg("seed") = 0);
    m.def("oracle_density",
          [](double beta, double J, double h, double t, int r_in, int r_out, double boundary_angle, int n_bins) {
              const auto r = oracle_marginal(params_of(beta, J, h, t, 1, 2), Region{r_in, r_out}, boundary_angle,
                                             n_bins);
              return r.y_density;
          },
          py::arg("beta"), py::arg("J"), py::arg("h"), py::arg("t"), py::arg("r_in") = 1, py::arg("r_out") = 2,
          py::arg("boundary_angle") = kPi / 2, py::arg("n_bins") = 256);
    m.def("tv_distance", &tv_distance, py::arg("f"), py::arg("g"));

    m.def("canonical_config", [](const std::string& text) { return to_canonical(parse_config(text)); },
          py::arg("text"));
    m.def("config_hash", [](const std::string& text) { return config_hash(parse_config(text)); },
          py::arg("text"));
    m.def("run",
          [](const std::string& text, const std::string& out_dir, int threads) {
              const auto cfg = parse_config(text);
              RunResult r;
              {
                  py::gil_scoped_release release;
                  r = run(cfg, {out_dir, threads, false});
              }
              return py::make_tuple(r.exit_code, r.artifacts, r.message);
          },
          py::arg("config"), py::arg("out_dir"), py::arg("threads") = 1);

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
}
