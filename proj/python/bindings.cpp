#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "modalstab/controller.hpp"
#include "modalstab/diagnostics.hpp"
#include "modalstab/errors.hpp"
#include "modalstab/lifting.hpp"
#include "modalstab/pipeline.hpp"
#include "modalstab/run_config.hpp"
#include "modalstab/simulator.hpp"
#include "modalstab/special_functions.hpp"
#include "modalstab/spectral_basis.hpp"

namespace py = pybind11;
using namespace modalstab;

namespace {

py::dict norms_dict(const NormSeries& s) {
  py::dict d;
  d["times"] = s.times;
  d["h2_surrogate"] = s.h2_surrogate;
  d["h2_full"] = s.h2_full;
  d["linf"] = s.linf;
  d["laplacian_l2"] = s.laplacian_l2;
  d["l2"] = s.l2;
  d["u_norm"] = s.u_norm;
  d["dudt_l2"] = s.dudt_l2;
  d["xi"] = s.xi;
  return d;
}

py::dict claims_dict(const VerificationResult& v) {
  py::list claims;
  for (const auto& c : v.claims.claims) {
    py::dict d;
    d["metric"] = c.metric;
    d["pass"] = c.pass;
    d["envelope"] = c.envelope;
    if (c.fit) {
      d["gamma_hat"] = c.fit->amplitude;
      d["sigma_hat"] = c.fit->rate;
      d["residual"] = c.fit->residual;
    }
    claims.append(d);
  }
  py::dict out;
  out["claims"] = claims;
  out["degenerate"] = v.claims.degenerate;
  out["pass"] = v.pass;
  if (v.reduced_fit) {
    out["reduced_generator"] = v.reduced_fit->generator;
    out["reduced_residual"] = v.reduced_fit->residual;
    out["distance_direct"] = v.reduced_fit->distance_direct;
    out["distance_weighted"] = v.reduced_fit->distance_weighted;
  }
  out["commutation_deviation"] = v.commutation_deviation;
  out["gn_ratio"] = v.gn_ratio;
  out["laplacian_consistency"] = v.laplacian_consistency;
  return out;
}

template <int (*Command)(const RunConfig&, std::ostream&)>
py::tuple run_command(const RunConfig& config) {
  std::ostringstream log;
  const int code = Command(config, log);
  return py::make_tuple(code, log.str());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Modal boundary stabilization of the heat equation on a disk or ball";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", error.ptr());
  py::register_exception<ResonanceError>(m, "ResonanceError", error.ptr());
  py::register_exception<SynthesisError>(m, "SynthesisError", error.ptr());
  py::register_exception<GainValidationError>(m, "GainValidationError", error.ptr());
  py::register_exception<InsufficientDataError>(m, "InsufficientDataError", error.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", error.ptr());

  m.def("bessel_j", &special::bessel_j, py::arg("order"), py::arg("x"));
  m.def("bessel_j_zero", &special::bessel_j_zero, py::arg("order"), py::arg("k"));
  m.def("spherical_bessel_j", &special::spherical_bessel_j, py::arg("degree"), py::arg("x"));
  m.def("spherical_bessel_zero", &special::spherical_bessel_zero, py::arg("degree"), py::arg("k"));

  py::enum_<Shape>(m, "Shape").value("disk", Shape::disk).value("ball", Shape::ball);

  py::class_<EigenMode>(m, "EigenMode")
      .def_readonly("index", &EigenMode::index)
      .def_readonly("angular", &EigenMode::angular)
      .def_readonly("azimuthal", &EigenMode::azimuthal)
      .def_readonly("k", &EigenMode::k)
      .def_readonly("alpha", &EigenMode::alpha)
      .def_readonly("kappa", &EigenMode::kappa)
      .def_readonly("mu", &EigenMode::mu)
      .def_readonly("norm_const", &EigenMode::norm_const)
      .def_readonly("trace_amp", &EigenMode::trace_amp)
      .def_property_readonly("parity", [](const EigenMode& e) { return e.parity == Parity::cos ? "cos" : "sin"; });

  py::class_<ModeTable>(m, "ModeTable")
      .def_static(
          "enumerate",
          [](Shape shape, double radius, double lambda, int n_sim) {
            return ModeTable::enumerate(make_domain(shape, radius), lambda, n_sim);
          },
          py::arg("shape"), py::arg("radius"), py::arg("lambda_"), py::arg("n_sim"))
      .def("__len__", &ModeTable::size)
      .def("__getitem__",
           [](const ModeTable& t, int i) {
             if (i < 0) i += t.size();
             if (i < 0 || i >= t.size()) throw py::index_error();
             return t[static_cast<std::size_t>(i)];
           })
      .def_property_readonly("unstable_count", &ModeTable::unstable_count)
      .def_property_readonly("lambda_", &ModeTable::lambda)
      .def_property_readonly("mu", &ModeTable::mu)
      .def_property_readonly("kappa", &ModeTable::kappa)
      .def("gram", [](const ModeTable& t) { return build_gram(t.unstable_modes(), t.domain()); })
      .def("extended_gram", &extended_gram);

  py::class_<GainSet>(m, "GainSet")
      .def_readonly("gammas", &GainSet::gammas)
      .def_readonly("mu", &GainSet::mu)
      .def_readonly("gram", &GainSet::gram)
      .def_readonly("A", &GainSet::A)
      .def_readonly("feedback", &GainSet::feedback)
      .def_readonly("weighted_sum", &GainSet::weighted_sum)
      .def_readonly("generator_weighted", &GainSet::generator_weighted)
      .def_readonly("generator_direct", &GainSet::generator_direct)
      .def_readonly("condition_number", &GainSet::condition_number)
      .def_readonly("notes", &GainSet::notes);

  py::class_<StabilityReport>(m, "StabilityReport")
      .def_readonly("margin_weighted", &StabilityReport::margin_weighted)
      .def_readonly("margin_direct", &StabilityReport::margin_direct)
      .def_readonly("hurwitz_weighted", &StabilityReport::hurwitz_weighted)
      .def_readonly("hurwitz_direct", &StabilityReport::hurwitz_direct)
      .def_readonly("c1_hat", &StabilityReport::c1_hat)
      .def_readonly("sigma_hat", &StabilityReport::sigma_hat);

  m.def("synthesize", py::overload_cast<const ModeTable&, std::vector<double>>(&synthesize),
        py::arg("table"), py::arg("gammas"));
  m.def("hurwitz_margin", &hurwitz_margin, py::arg("matrix"));
  m.def("validate_gains", &validate_gains, py::arg("gains"), py::arg("horizon") = 4.0,
        py::arg("samples") = 81);
  m.def(
      "auto_scale_gains",
      [](const ModeTable& t, const std::vector<double>& g0, double target) {
        const auto r = auto_scale_gains(t, g0, target);
        return py::make_tuple(r.gammas, r.scale, r.margins);
      },
      py::arg("table"), py::arg("gammas0"), py::arg("target_margin") = -0.5);
  m.def(
      "lifting_coefficients",
      [](double gamma, const Eigen::VectorXd& f, const ModeTable& t) {
        return lifting_coefficients(gamma, BoundaryFunction{f}, t).d;
      },
      py::arg("gamma"), py::arg("boundary_coeffs"), py::arg("table"));

  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def_static("default", &default_config, py::arg("shape"))
      .def_static("parse", &parse_config, py::arg("text"))
      .def_static("load", &load_config, py::arg("path"))
      .def("serialize", &serialize_config)
      .def("set", &apply_setting, py::arg("key"), py::arg("value"))
      .def("validate", &RunConfig::validate)
      .def_readwrite("radius", &RunConfig::radius)
      .def_readwrite("lambda_", &RunConfig::lambda)
      .def_readwrite("n_sim", &RunConfig::n_sim)
      .def_readwrite("dt", &RunConfig::dt)
      .def_readwrite("horizon", &RunConfig::horizon)
      .def_readwrite("grid", &RunConfig::grid)
      .def_readwrite("seed", &RunConfig::seed)
      .def_readwrite("output_dir", &RunConfig::output_dir)
      .def_readonly("shape", &RunConfig::shape)
      .def("__eq__", [](const RunConfig& a, const RunConfig& b) { return a == b; });

  m.def(
      "simulate",
      [](const RunConfig& c) {
        const SimulationResult s = simulate(c);
        py::dict d;
        d["times"] = s.trajectory.times;
        d["states"] = s.trajectory.states;
        d["boundary"] = s.trajectory.boundary;
        d["u0"] = s.u0;
        d["diverged"] = s.diverged;
        d["truncated"] = s.trajectory.truncated;
        d["norms"] = norms_dict(s.norms);
        if (s.gains) {
          d["gammas"] = s.gains->gains.gammas;
          d["margin_direct"] = s.gains->stability.margin_direct;
          d["gains_source"] = s.gains->source;
        }
        return d;
      },
      py::arg("config"));
  m.def(
      "verify",
      [](const RunConfig& c) {
        const SimulationResult s = simulate(c);
        return claims_dict(verify(c, s));
      },
      py::arg("config"));

  m.def("run_spectrum", &run_command<run_spectrum>, py::arg("config"));
  m.def("run_synthesize", &run_command<run_synthesize>, py::arg("config"));
  m.def("run_simulate", &run_command<run_simulate>, py::arg("config"));
  m.def("run_verify", &run_command<run_verify>, py::arg("config"));
}
