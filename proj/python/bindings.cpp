#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hawking/errors.hpp"
#include "hawking/expansion.hpp"
#include "hawking/functionals.hpp"
#include "hawking/moments.hpp"
#include "hawking/optimizer.hpp"
#include "hawking/variation.hpp"

namespace py = pybind11;
using namespace hawking;

namespace {

Tensor4 tensor4_from_list(const std::vector<double>& q) {
  if (q.size() != 81) throw DomainError("quadratic perturbation needs 81 entries (i, j, a, b row-major)");
  Tensor4 t = zero_tensor4();
  int idx = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) t[i][j](a, b) = q[idx++];
  return t;
}

ExtrinsicData extrinsic(const std::array<double, 6>& k0, const std::array<double, 18>& k1) {
  return ExtrinsicData::from_components(k0, k1);
}

py::dict report_dict(const FunctionalReport& r) {
  py::dict d;
  d["area"] = r.area;
  d["R"] = r.R;
  d["R_E"] = r.R_E;
  d["W"] = r.W;
  d["L_integral"] = r.L_integral;
  d["H_L"] = r.H_L;
  d["E"] = r.E;
  d["U"] = r.U;
  d["V"] = r.V;
  d["gauss_bonnet_total"] = r.gauss_bonnet_total;
  d["gauss_identity_defect"] = r.gauss_identity_defect;
  d["el_residual_L2"] = r.el_residual_L2;
  d["lambda"] = r.lambda;
  d["is_hawking"] = r.is_hawking;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Hawking-type functionals on small spheres in model 3-manifolds";

  static py::exception<Error> base(m, "HawkingError", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<SingularMetricError>(m, "SingularMetricError", base.ptr());
  py::register_exception<ImmersionError>(m, "ImmersionError", base.ptr());
  py::register_exception<GridMismatchError>(m, "GridMismatchError", base.ptr());
  py::register_exception<NoConvergenceError>(m, "NoConvergenceError", base.ptr());
  py::register_exception<UnsupportedDegreeError>(m, "UnsupportedDegreeError", base.ptr());
  py::register_exception<DegenerateProbeError>(m, "DegenerateProbeError", base.ptr());
  py::register_exception<FitError>(m, "FitError", base.ptr());
  py::register_exception<StepSizeError>(m, "StepSizeError", base.ptr());
  py::register_exception<StallError>(m, "StallError", base.ptr());

  const std::array<double, 6> no_k0{};
  const std::array<double, 18> no_k1{};

  py::class_<ManifoldModel>(m, "ManifoldModel")
      .def_static(
          "flat", [](double chart_radius, const std::array<double, 6>& k0, const std::array<double, 18>& k1) {
            return ManifoldModel::flat(chart_radius, extrinsic(k0, k1));
          },
          py::arg("chart_radius") = 1.0, py::arg("k0") = no_k0, py::arg("k1") = no_k1)
      .def_static(
          "round_sphere",
          [](double curvature, double chart_radius, const std::array<double, 6>& k0,
             const std::array<double, 18>& k1) {
            return ManifoldModel::round_sphere(curvature, chart_radius, extrinsic(k0, k1));
          },
          py::arg("curvature") = 1.0, py::arg("chart_radius") = 1.0, py::arg("k0") = no_k0, py::arg("k1") = no_k1)
      .def_static(
          "schwarzschild",
          [](double mass, const Vec3& chart_center, double chart_radius, const std::array<double, 6>& k0,
             const std::array<double, 18>& k1) {
            return ManifoldModel::schwarzschild(mass, chart_center, chart_radius, extrinsic(k0, k1));
          },
          py::arg("mass"), py::arg("chart_center"), py::arg("chart_radius"), py::arg("k0") = no_k0,
          py::arg("k1") = no_k1)
      .def_static(
          "perturbed_flat",
          [](const std::vector<double>& q, double chart_radius, const std::array<double, 6>& k0,
             const std::array<double, 18>& k1) {
            return ManifoldModel::perturbed_flat(tensor4_from_list(q), chart_radius, extrinsic(k0, k1));
          },
          py::arg("quadratic"), py::arg("chart_radius") = 1.0, py::arg("k0") = no_k0, py::arg("k1") = no_k1)
      .def_static(
          "conformal_flat",
          [](double a, double b, double chart_radius, const std::array<double, 6>& k0,
             const std::array<double, 18>& k1) {
            return ManifoldModel::conformal_flat(a, b, chart_radius, extrinsic(k0, k1));
          },
          py::arg("a"), py::arg("b"), py::arg("chart_radius") = 1.0, py::arg("k0") = no_k0, py::arg("k1") = no_k1)
      .def("metric", [](const ManifoldModel& model, const Vec3& x) { return metric_at(model, x); })
      .def("scalar_curvature",
           [](const ManifoldModel& model, const Vec3& x) { return curvature_at(model, x).scalar; });

  py::class_<LagrangianSpec>(m, "Lagrangian")
      .def_static("zero", &LagrangianSpec::zero)
      .def_static("hawking", &LagrangianSpec::hawking)
      .def_static("family", &LagrangianSpec::family, py::arg("alpha"), py::arg("beta"), py::arg("c0"),
                  py::arg("ct") = 0.0)
      .def_readonly("alpha", &LagrangianSpec::alpha)
      .def_readonly("beta", &LagrangianSpec::beta)
      .def_readonly("c0", &LagrangianSpec::c0)
      .def_readonly("ct", &LagrangianSpec::ct)
      .def("is_hawking", &LagrangianSpec::is_hawking);

  py::class_<SurfaceShape>(m, "SurfaceShape")
      .def_static("round", &SurfaceShape::round, py::arg("center"), py::arg("radius"), py::arg("l_max"))
      .def_readwrite("center", &SurfaceShape::center)
      .def_readonly("l_max", &SurfaceShape::l_max)
      .def_readwrite("coeffs", &SurfaceShape::coeffs)
      .def("mean_radius", &SurfaceShape::mean_radius)
      .def("scaled", &SurfaceShape::scaled)
      .def("save", [](const SurfaceShape& s, const std::string& path) { save_shape(path, s); })
      .def_static("load", &load_shape);

  m.def(
      "evaluate",
      [](const SurfaceShape& shape, const ManifoldModel& model, const LagrangianSpec& L, int n_theta) {
        return report_dict(evaluate_functionals(embed(shape, model, build_grid(n_theta)), L));
      },
      py::arg("shape"), py::arg("model"), py::arg("lagrangian"), py::arg("n_theta") = 24,
      "Area, W, H_L, Hawking energy, multiplier and diagnostics of the embedded shape.");

  m.def(
      "minimize",
      [](const ManifoldModel& model, const LagrangianSpec& L, const SurfaceShape& init, double target_area,
         int n_theta, int max_iters, double grad_tol) {
        OptimizerOptions o;
        o.target_area = target_area;
        o.max_iters = max_iters;
        o.grad_tol = grad_tol;
        const CriticalSurfaceReport r = minimize_area_constrained(model, L, o, init, build_grid(n_theta));
        py::dict d = report_dict(r.report);
        d["shape"] = r.shape;
        d["converged"] = r.converged;
        d["iterations"] = r.iterations;
        d["grad_norm"] = r.grad_norm;
        d["center"] = r.center;
        return d;
      },
      py::arg("model"), py::arg("lagrangian"), py::arg("init"), py::arg("target_area"), py::arg("n_theta") = 24,
      py::arg("max_iters") = 500, py::arg("grad_tol") = 1e-8);

  m.def(
      "exact_moment",
      [](const std::string& key) {
        const Rational c = exact_monomial_integral(MomentKey::parse(key)).coefficient;
        return py::make_tuple(c.num, c.den);
      },
      py::arg("key"), "Integral of ν^α over the unit sphere as (num, den), meaning num/den · π.");

  m.def("moment_suite", [](int n_theta) {
    const MomentSuiteReport r = moment_suite(n_theta);
    py::dict d;
    d["keys"] = r.keys;
    d["max_quadrature_error"] = r.max_quadrature_error;
    d["contraction_consistent"] = r.contraction_consistent;
    d["pass"] = r.pass();
    return d;
  }, py::arg("n_theta") = 8);

  m.def(
      "identity_suite",
      [](const ManifoldModel& model, const Vec3& a, int draws, unsigned seed) {
        py::list out;
        for (const IdentityRow& row : identity_suite(model, a, draws, seed)) {
          py::dict d;
          d["name"] = row.name;
          d["exact_error"] = row.exact_error;
          d["quadrature_error"] = row.quadrature_error;
          d["pass"] = row.pass();
          out.append(d);
        }
        return out;
      },
      py::arg("model"), py::arg("point"), py::arg("draws") = 100, py::arg("seed") = 1);

  m.def(
      "expansion_check",
      [](const ManifoldModel& model, const Vec3& p, const std::vector<double>& radii, const LagrangianSpec& L,
         int l_max, int n_theta) {
        ExpansionOptions o;
        o.l_max = l_max;
        o.n_theta = n_theta;
        const ExpansionReport r = expansion_check(model, p, radii, L, o);
        py::dict d;
        d["c_L"] = r.c_L;
        d["predicted_E3"] = r.predicted_E3;
        d["predicted_H2"] = r.predicted_H2;
        d["fitted_E3"] = r.E_fit.coefficient(3);
        d["fitted_H2"] = r.H_fit.coefficient(2);
        d["E3_ratio"] = r.E3_ratio;
        d["H2_ratio"] = r.H2_ratio;
        d["H0"] = r.H0;
        d["pass"] = r.pass;
        py::list E, H, R;
        for (const ExpansionSample& s : r.samples) {
          R.append(s.R);
          E.append(s.E);
          H.append(s.H_L);
        }
        d["R"] = R;
        d["E"] = E;
        d["H_L"] = H;
        return d;
      },
      py::arg("model"), py::arg("point"), py::arg("radii") = default_radii(), py::arg("lagrangian"),
      py::arg("l_max") = 0, py::arg("n_theta") = 24);

  m.def(
      "concentration_potential",
      [](const ManifoldModel& model, const Vec3& x, const LagrangianSpec& L) {
        Vec3 g;
        const double v = concentration_potential(model, x, L, &g);
        return py::make_tuple(v, g);
      },
      py::arg("model"), py::arg("x"), py::arg("lagrangian"), "Value and gradient of Sc − (3/2π) c(L, x).");
}
