#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <span>
#include <vector>

#include "dampinv/diagnostics.hpp"
#include "dampinv/error.hpp"
#include "dampinv/harness.hpp"
#include "dampinv/inverse_source.hpp"
#include "dampinv/reconstruction.hpp"
#include "dampinv/spectral.hpp"
#include "dampinv/wave.hpp"

namespace py = pybind11;
using namespace dampinv;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vec(const Array& a) { return {a.data(), a.data() + a.size()}; }

Array to_array(std::span<const double> v) {
  Array out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

Array to_array_2d(std::span<const double> v, std::size_t rows, std::size_t cols) {
  Array out({static_cast<py::ssize_t>(rows), static_cast<py::ssize_t>(cols)});
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

DampingPair pair_from(const Array& a1, const Array& a2) {
  return DampingPair(SampledFunction1D(to_vec(a1)), SampledFunction1D(to_vec(a2)));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Damped wave forward solver and boundary damping reconstruction";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ResolutionError>(m, "ResolutionError", m.attr("Error").ptr());
  py::register_exception<CflError>(m, "CflError", m.attr("Error").ptr());
  py::register_exception<ObservabilityError>(m, "ObservabilityError", m.attr("Error").ptr());
  py::register_exception<RegimeError>(m, "RegimeError", m.attr("Error").ptr());
  py::register_exception<InvalidArgument>(m, "InvalidArgument", m.attr("Error").ptr());

  m.def("eigenvalue", [](int k, int l) { return eigenpair({k, l}).lambda; });
  m.def("phi2d", [](int k, int l, double x, double y) { return eval_phi2d({k, l}, x, y); });
  m.def("phi1d", &eval_phi1d, py::arg("k"), py::arg("s"));

  m.def("fourier_project",
        [](const Array& f, int order) {
          return fourier_project(SampledFunction1D(to_vec(f)), order).coeffs;
        },
        py::arg("values"), py::arg("order"));
  m.def("fourier_synthesize",
        [](std::vector<double> c, std::size_t n) {
          const auto f = fourier_synthesize(FourierCoeffs{Side::Gamma11, std::move(c)}, n);
          return to_array(f.values());
        },
        py::arg("coeffs"), py::arg("n"));
  m.def("sobolev_norms", [](const Array& f) {
    const auto s = sobolev_norms(SampledFunction1D(to_vec(f)));
    return py::dict(py::arg("l2") = s.l2, py::arg("h1") = s.h1, py::arg("h_half") = s.h_half);
  });

  m.def(
      "solve",
      [](std::size_t n, int k, int l, const Array& a1, const Array& a2, double tau,
         double dt_factor) {
        const Grid2D g(n);
        const auto a = pair_from(a1, a2);
        SolveResult r;
        {
          py::gil_scoped_release nogil;
          r = solve(g, mode_field(g, {k, l}), Field(g.size(), 0.0), a, nullptr, tau, dt_factor);
        }
        const auto& tr = r.trace;
        return py::dict(py::arg("times") = to_array(r.times), py::arg("energy") = to_array(r.energy),
                        py::arg("dt") = r.dt,
                        py::arg("trace11") = to_array_2d(tr.normal11, tr.steps + 1, tr.n),
                        py::arg("trace12") = to_array_2d(tr.normal12, tr.steps + 1, tr.n),
                        py::arg("trace_l2") = tr.l2_norm(),
                        py::arg("dissipation_residual") = dissipation_residual(r, g, a));
      },
      py::arg("n"), py::arg("k"), py::arg("l"), py::arg("a1"), py::arg("a2"), py::arg("tau"),
      py::arg("dt_factor") = 0.5);

  m.def(
      "fit_decay",
      [](const Array& t, const Array& e) {
        const auto f = fit_decay(to_vec(t), to_vec(e));
        return py::dict(py::arg("omega_fit") = f.omega_fit, py::arg("M_fit") = f.M_fit,
                        py::arg("residual") = f.residual);
      },
      py::arg("times"), py::arg("energy"));

  m.def(
      "convolve_S",
      [](const Array& lam, const Array& h, double dt) {
        return to_array(convolve_S(Modulation(to_vec(lam), dt), TimeSignal(to_vec(h), 1, dt)).data());
      },
      py::arg("lam"), py::arg("h"), py::arg("dt"));
  m.def(
      "convolve_Sstar",
      [](const Array& lam, const Array& h, double dt) {
        return to_array(
            convolve_Sstar(Modulation(to_vec(lam), dt), TimeSignal(to_vec(h), 1, dt)).data());
      },
      py::arg("lam"), py::arg("h"), py::arg("dt"));
  m.def(
      "stability_factor",
      [](const Array& lam, double dt) {
        const Modulation mod(to_vec(lam), dt);
        return stability_factor(mod, mod.tau());
      },
      py::arg("lam"), py::arg("dt"));

  m.def("select_N0", &select_N0, py::arg("C"), py::arg("m"), py::arg("alpha"), py::arg("delta"));
  m.def("stability_rhs", &stability_rhs, py::arg("delta"), py::arg("m"), py::arg("M"),
        py::arg("c_cal"));

  m.def(
      "estimate_gap",
      [](std::size_t n, const Array& a1, const Array& a2, int K, double tau) {
        const Grid2D g(n);
        const auto a = pair_from(a1, a2);
        py::gil_scoped_release nogil;
        return estimate_gap(g, a, K, tau).value;
      },
      py::arg("n"), py::arg("a1"), py::arg("a2"), py::arg("K"), py::arg("tau"));

  m.def(
      "linearized_reconstruct",
      [](std::size_t n, const Array& a1, const Array& a2, double tau, double guard) {
        const Grid2D g(n);
        const auto a = pair_from(a1, a2);
        LinearizedEstimate est{DampingPair::zero(n), {}, {}};
        {
          py::gil_scoped_release nogil;
          est = linearized_recover(time_project(probe_mode(g, a, {0, 0}, tau)), guard);
        }
        return py::make_tuple(to_array(est.damping.a1().values()),
                              to_array(est.damping.a2().values()));
      },
      py::arg("n"), py::arg("a1"), py::arg("a2"), py::arg("tau"), py::arg("guard") = 0.2);

  m.def(
      "verify",
      [](const std::string& prefix, std::uint64_t seed) {
        ExperimentConfig cfg;
        cfg.seed = seed;
        py::list out;
        for (const auto& c : run_checks(cfg, prefix)) {
          out.append(py::dict(py::arg("name") = c.name, py::arg("value") = c.value,
                              py::arg("tolerance") = c.tolerance, py::arg("pass") = c.pass));
        }
        return out;
      },
      py::arg("prefix") = "", py::arg("seed") = 20240601);

  m.attr("__version__") = kToolVersion;
}
