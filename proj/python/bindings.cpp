#include "wgqed/analytic.h"
#include "wgqed/errors.h"
#include "wgqed/model.h"
#include "wgqed/pulse.h"
#include "wgqed/specfun.h"
#include "wgqed/spectral.h"

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>

namespace py = pybind11;
using namespace wgqed;

namespace {

py::array_t<double> to_array(const std::vector<double> &v)
{
    py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

py::array_t<cplx> to_array(const std::vector<cplx> &v)
{
    py::array_t<cplx> out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

py::dict field_dict(const pulse::FieldTrace &f)
{
    py::dict d;
    d["times"] = to_array(f.times());
    d["output"] = to_array(f.samples);
    d["input"] = to_array(f.input);
    d["emitted"] = to_array(f.emitted);
    return d;
}

pulse::TimeGrid make_grid(std::size_t count, double span, std::size_t origin)
{
    return pulse::TimeGrid::from_span(count, span, origin);
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Collective decay of single excitations in waveguide-coupled atom chains";
    m.attr("__version__") = "0.3.0";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<UnsupportedConfiguration>(m, "UnsupportedConfiguration", base.ptr());
    py::register_exception<PreconditionError>(m, "PreconditionError", base.ptr());

    m.def("laguerre", &specfun::laguerre, py::arg("n"), py::arg("alpha"), py::arg("x"));
    m.def("laguerre_roots",
          [](int degree, int alpha) { return to_array(specfun::laguerre_roots(degree, alpha).values); },
          py::arg("degree"), py::arg("alpha"));
    m.def("bessel_j", &specfun::bessel_j, py::arg("order"), py::arg("x"));
    m.def("bessel_j1_zeros", [](int count) { return to_array(specfun::bessel_j1_zeros(count).values); },
          py::arg("count"));

    py::class_<model::EnsembleParams>(m, "EnsembleParams")
        .def_static("uniform", &model::EnsembleParams::uniform, py::arg("n_atoms"), py::arg("beta"),
                    py::arg("gamma") = 1.0)
        .def_static("from_betas", &model::EnsembleParams::from_betas, py::arg("betas"),
                    py::arg("gamma") = 1.0)
        .def_property_readonly("n_atoms", &model::EnsembleParams::n_atoms)
        .def_property_readonly("betas", &model::EnsembleParams::betas)
        .def_property_readonly("gamma", &model::EnsembleParams::gamma)
        .def("__repr__", [](const model::EnsembleParams &p) {
            return "EnsembleParams(n_atoms=" + std::to_string(p.n_atoms()) + ")";
        });

    py::class_<pulse::TimeGrid>(m, "TimeGrid")
        .def(py::init(&make_grid), py::arg("count"), py::arg("span"), py::arg("origin"))
        .def_readonly("dt", &pulse::TimeGrid::dt)
        .def_readonly("count", &pulse::TimeGrid::count)
        .def_readonly("origin", &pulse::TimeGrid::origin)
        .def("times", [](const pulse::TimeGrid &g) { return to_array(g.times()); });

    m.def("od", [](const model::EnsembleParams &p) {
        const auto o = model::od(p);
        return o.infinite ? INFINITY : o.value;
    });
    m.def("od_linear", &model::od_linear);
    m.def("atoms_for_od",
          [](double target, double beta, bool exact) {
              return model::atoms_for_od(target, beta,
                                         exact ? model::OdDefinition::Exact : model::OdDefinition::Linear);
          },
          py::arg("target"), py::arg("beta"), py::arg("exact") = false);
    m.def("timed_dicke", [](const model::EnsembleParams &p) { return to_array(model::timed_dicke(p).phis); });

    m.def("phi_td", &analytic::phi_td, py::arg("n"), py::arg("t"), py::arg("params"));
    m.def("chi_td", &analytic::chi_td, py::arg("n"), py::arg("t"), py::arg("params"));
    m.def("phi_heaviside", &analytic::phi_heaviside, py::arg("n"), py::arg("t"), py::arg("params"));
    m.def("subradiant_times",
          [](const model::EnsembleParams &p) { return to_array(analytic::subradiant_times(p)); });
    m.def("subradiant_state", [](std::size_t k, const model::EnsembleParams &p) {
        return to_array(analytic::subradiant_state(k, p));
    });
    m.def("gamma_ens_t0", &analytic::gamma_ens_t0);

    m.def("ensemble_transmission",
          [](py::array_t<double> deltas, const model::EnsembleParams &p) {
              auto d = deltas.unchecked<1>();
              py::array_t<cplx> out(d.shape(0));
              auto o = out.mutable_unchecked<1>();
              for (py::ssize_t i = 0; i < d.shape(0); ++i) {
                  o(i) = spectral::ensemble_transmission(d(i), p);
              }
              return out;
          },
          py::arg("deltas"), py::arg("params"));

    m.def("propagate_delta",
          [](const model::EnsembleParams &p, const pulse::TimeGrid &g) {
              return field_dict(pulse::propagate(pulse::Pulse::delta(), p, g));
          },
          py::arg("params"), py::arg("grid"));
    m.def("propagate_boxcar",
          [](const model::EnsembleParams &p, double duration, const pulse::TimeGrid &g, double detuning) {
              auto pl = pulse::Pulse::boxcar(duration);
              pl.carrier_detuning = detuning;
              return field_dict(pulse::propagate(pl, p, g));
          },
          py::arg("params"), py::arg("duration"), py::arg("grid"), py::arg("detuning") = 0.0);
    m.def("find_power_minima",
          [](const model::EnsembleParams &p, double duration, const pulse::TimeGrid &g) {
              const auto f = pulse::propagate(pulse::Pulse::boxcar(duration), p, g);
              return to_array(pulse::find_power_minima(f));
          },
          py::arg("params"), py::arg("duration"), py::arg("grid"));
}
