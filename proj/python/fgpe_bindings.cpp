#include "fgpe/config.hpp"
#include "fgpe/dynamics.hpp"
#include "fgpe/errors.hpp"
#include "fgpe/groundstate.hpp"
#include "fgpe/io.hpp"
#include "fgpe/kernels.hpp"
#include "fgpe/observables.hpp"
#include "fgpe/physics.hpp"

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace fgpe;

namespace {

std::vector<py::ssize_t> numpy_shape(const Grid& g) {
    std::vector<py::ssize_t> shape;
    for (int a = 0; a < g.dim(); ++a) shape.push_back(g.points(a));
    return shape;
}

ComplexField field_from_array(const GridPtr& grid, const py::array& arr) {
    auto a = py::array_t<cplx, py::array::c_style | py::array::forcecast>::ensure(arr);
    if (!a) throw ConfigError("field must be convertible to a complex array");
    if (static_cast<std::size_t>(a.size()) != grid->size())
        throw ConfigError("field size does not match the grid");
    ComplexField f(grid);
    std::memcpy(f.values.data(), a.data(), sizeof(cplx) * grid->size());
    return f;
}

py::array_t<cplx> array_from_field(const ComplexField& f) {
    py::array_t<cplx> out(numpy_shape(*f.grid));
    std::memcpy(out.mutable_data(), f.values.data(), sizeof(cplx) * f.values.size());
    return out;
}

py::array_t<double> array_from_real(const RealField& f) {
    py::array_t<double> out(numpy_shape(*f.grid));
    std::memcpy(out.mutable_data(), f.values.data(), sizeof(double) * f.values.size());
    return out;
}

KernelSpec kernel_from_args(const std::string& variant, double mu,
                            std::array<double, 3> axis) {
    if (variant == "coulomb") return KernelSpec::coulomb(mu);
    if (variant == "dipole3d") return KernelSpec::dipole3d(axis);
    if (variant == "dipole2d") return KernelSpec::dipole2d(axis);
    throw ConfigError("kernel variant must be coulomb|dipole3d|dipole2d, got '" + variant +
                      "'");
}

py::dict breakdown_to_dict(const EnergyBreakdown& e) {
    py::dict d;
    d["kinetic"] = e.kinetic;
    d["potential"] = e.potential;
    d["rotation"] = e.rotation;
    d["local"] = e.local;
    d["nonlocal"] = e.nonlocal;
    d["total"] = e.total;
    return d;
}

py::dict record_to_dict(const DiagnosticsRecord& r) {
    py::dict d;
    d["t"] = r.t;
    d["mass"] = r.mass;
    d["energy"] = breakdown_to_dict(r.energy);
    d["angular_momentum"] = r.angular_momentum;
    d["center"] = r.center;
    d["widths"] = r.widths;
    d["momentum"] = r.momentum;
    d["ame_production"] = r.ame_production;
    return d;
}

} // namespace

PYBIND11_MODULE(_fgpe, mod) {
    mod.doc() = "spectral solver for the rotating fractional Gross-Pitaevskii equation";

    py::register_exception<ConfigError>(mod, "FgpeConfigError", PyExc_ValueError);
    py::register_exception<NumericalError>(mod, "FgpeNumericalError", PyExc_RuntimeError);
    py::register_exception<NonexistenceError>(mod, "FgpeNonexistenceError",
                                              PyExc_RuntimeError);

    py::class_<Grid, std::shared_ptr<Grid>>(mod, "Grid")
        .def(py::init([](int dim, std::array<double, 3> lo, std::array<double, 3> hi,
                         std::array<int, 3> n) {
                 return std::make_shared<Grid>(dim, lo, hi, n);
             }),
             py::arg("dim"), py::arg("lo"), py::arg("hi"), py::arg("points"))
        .def_static(
            "square",
            [](int dim, double half_width, int points) {
                return std::make_shared<Grid>(Grid::square(dim, half_width, points));
            },
            py::arg("dim"), py::arg("half_width"), py::arg("points"))
        .def_property_readonly("dim", &Grid::dim)
        .def_property_readonly("shape",
                               [](const Grid& g) {
                                   std::vector<int> s;
                                   for (int a = 0; a < g.dim(); ++a) s.push_back(g.points(a));
                                   return s;
                               })
        .def("spacing", &Grid::spacing, py::arg("axis"))
        .def("coords",
             [](const Grid& g, int axis) {
                 return py::array_t<double>(py::cast(g.coords(axis)));
             },
             py::arg("axis"))
        .def("cell_volume", &Grid::cell_volume);

    py::class_<PhysicsParams>(mod, "Params")
        .def(py::init([](double s, double m, double beta, double lam, double omega,
                         std::array<double, 3> gamma, const std::string& kernel, double mu,
                         std::array<double, 3> axis) {
                 PhysicsParams p;
                 p.s = s;
                 p.m = m;
                 p.beta = beta;
                 p.lambda = lam;
                 p.omega = omega;
                 p.gamma = gamma;
                 p.kernel = kernel_from_args(kernel, mu, axis);
                 return p;
             }),
             py::arg("s") = 1.0, py::arg("m") = 0.0, py::arg("beta") = 0.0,
             py::arg("lam") = 0.0, py::arg("omega") = 0.0,
             py::arg("gamma") = std::array<double, 3>{1.0, 1.0, 1.0},
             py::arg("kernel") = "coulomb", py::arg("mu") = 1.0,
             py::arg("axis") = std::array<double, 3>{0.0, 0.0, 1.0})
        .def_readwrite("s", &PhysicsParams::s)
        .def_readwrite("m", &PhysicsParams::m)
        .def_readwrite("beta", &PhysicsParams::beta)
        .def_readwrite("lam", &PhysicsParams::lambda)
        .def_readwrite("omega", &PhysicsParams::omega)
        .def_readwrite("gamma", &PhysicsParams::gamma);

    mod.def(
        "gaussian_sum_fit",
        [](const std::string& variant, int dim, double mu, std::array<double, 3> axis,
           double delta, double eps) {
            const auto fit =
                fit_gaussian_sum(kernel_from_args(variant, mu, axis), dim, delta, eps);
            py::dict d;
            d["weights"] = py::array_t<double>(py::cast(fit.weights));
            d["taus"] = py::array_t<double>(py::cast(fit.taus));
            d["achieved_error"] = fit.achieved_error;
            return d;
        },
        py::arg("kernel") = "coulomb", py::arg("dim") = 2, py::arg("mu") = 1.0,
        py::arg("axis") = std::array<double, 3>{0.0, 0.0, 1.0}, py::arg("delta") = 1e-3,
        py::arg("eps") = 1e-12);

    mod.def("harmonic_gaussian",
            [](const GridPtr& g) { return array_from_field(harmonic_gaussian(g)); });
    mod.def("central_vortex",
            [](const GridPtr& g) { return array_from_field(central_vortex(g)); });
    mod.def(
        "initial_guess",
        [](const GridPtr& g, double omega) { return array_from_field(initial_guess(g, omega)); },
        py::arg("grid"), py::arg("omega") = 0.0);

    mod.def("mass", [](const GridPtr& g, const py::array& psi) {
        return mass(field_from_array(g, psi));
    });

    mod.def("energy", [](const GridPtr& g, const py::array& psi, const PhysicsParams& p) {
        p.validate(g->dim());
        const auto ws = make_workspace(g, p);
        const ComplexField f = field_from_array(g, psi);
        const RealField phi = interaction_potential(f, p, ws);
        return breakdown_to_dict(energy(f, p, ws.trap, phi));
    });

    mod.def("nonlocal_potential",
            [](const GridPtr& g, const py::array& rho_arr, const PhysicsParams& p) {
                p.validate(g->dim());
                auto a = py::array_t<double, py::array::c_style | py::array::forcecast>::
                    ensure(rho_arr);
                if (!a || static_cast<std::size_t>(a.size()) != g->size())
                    throw ConfigError("density size does not match the grid");
                RealField rho(g);
                std::memcpy(rho.values.data(), a.data(), sizeof(double) * g->size());
                const auto fit = fit_gaussian_sum(p.kernel, g->dim(), p.kernel_delta,
                                                  p.kernel_eps);
                const auto tables = build_convolution_tables(*g, fit);
                return array_from_real(evaluate_nonlocal_potential(rho, p.kernel, fit, tables));
            });

    mod.def(
        "ground_state",
        [](const GridPtr& g, const PhysicsParams& p, double dt, double stop_eps,
           int max_outer) {
            p.validate(g->dim());
            GroundStateRun run;
            run.dt = dt;
            run.stop_eps = stop_eps;
            run.max_outer = max_outer;
            const auto ws = make_workspace(g, p);
            const auto result = run_ground_state(p, run, initial_guess(g, p.omega), ws);
            py::dict d;
            d["phi"] = array_from_field(result.phi);
            d["energy"] = breakdown_to_dict(result.energy);
            d["iterations"] = result.history.size();
            d["converged"] = result.converged;
            return d;
        },
        py::arg("grid"), py::arg("params"), py::arg("dt") = 1e-3,
        py::arg("stop_eps") = 1e-9, py::arg("max_outer") = 200000);

    mod.def(
        "dynamics",
        [](const GridPtr& g, const py::array& psi0, const PhysicsParams& p, double dt,
           double t_final, int diagnostics_every) {
            p.validate(g->dim());
            DynamicsRun run;
            run.dt = dt;
            run.t_final = t_final;
            run.diagnostics_every = diagnostics_every;
            const auto ws = make_workspace(g, p);
            const auto result = run_dynamics(field_from_array(g, psi0), p, run, ws);
            py::list series;
            for (const auto& r : result.series) series.append(record_to_dict(r));
            py::dict d;
            d["phi"] = array_from_field(result.phi);
            d["t"] = result.t;
            d["series"] = series;
            return d;
        },
        py::arg("grid"), py::arg("psi0"), py::arg("params"), py::arg("dt") = 1e-3,
        py::arg("t_final") = 1.0, py::arg("diagnostics_every") = 10);
}
