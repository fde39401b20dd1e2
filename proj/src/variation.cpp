#include "hawking/variation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "hawking/errors.hpp"

namespace hawking {

VariationValues first_variation(const SurfaceGeometry& geom, const Eigen::VectorXd& f, const LagrangianSpec& L) {
  if (f.size() != geom.size()) throw GridMismatchError("speed samples do not match the surface grid");
  const Eigen::VectorXd H = geom.mean_curvature();
  const Eigen::VectorXd lap = laplace_beltrami(geom, H);
  const std::vector<Vec2> df = parameter_gradient(geom, f);
  VariationValues v;
  for (int q = 0; q < geom.size(); ++q) {
    const SurfacePoint& s = geom.points[q];
    const double w = s.weight;
    v.dA += w * f[q] * s.H;
    v.dW += w * (-0.5 * f[q] * (lap[q] + s.H * s.A0_norm2 + s.H * s.ric_nn));
    if (L.is_zero()) continue;
    const LagrangianJet j = L.evaluate(s.amb, s.nu);
    const Vec2 up = s.gamma_inv * df[q];
    const Vec3 grad = up[0] * s.tangent[0] + up[1] * s.tangent[1];
    v.dL += w * (f[q] * j.d_M.dot(s.nu) - j.d_V.dot(grad) + f[q] * j.value * s.H);
  }
  return v;
}

double VariationReport::max_rel_err() const { return std::max({rel_err_A, rel_err_W, rel_err_L}); }

namespace {

struct Sample {
  double A, W, L;
};

Sample functionals_at(const SurfaceShape& shape, const ManifoldModel& model, const GridPtr& grid,
                      const LagrangianSpec& L) {
  const FunctionalValues v = functional_values(embed(shape, model, grid), L);
  return {v.area, v.W, v.L_integral};
}

double relative_error(double fd, double analytic, double reference) {
  const double denom = std::max({std::abs(analytic), 1e-3 * reference, std::numeric_limits<double>::min()});
  return std::abs(fd - analytic) / denom;
}

}  // namespace

VariationReport fd_check(const SurfaceShape& shape, const ManifoldModel& model, GridPtr grid,
                         const Eigen::VectorXd& f, const LagrangianSpec& L, double step,
                         const std::string& f_spec) {
  if (!(step > 0.0) || !std::isfinite(step)) throw StepSizeError("finite-difference step must be positive");
  const SurfaceGeometry base = embed(shape, model, grid);
  if (f.size() != base.size()) throw GridMismatchError("speed samples do not match the surface grid");

  Eigen::VectorXd psi(base.size()), omega_nu(base.size());
  for (int q = 0; q < base.size(); ++q) {
    omega_nu[q] = base.points[q].omega_nu;
    psi[q] = f[q] / omega_nu[q];
  }
  const Eigen::VectorXd psi_coeffs = grid->analyze(psi, shape.l_max);
  const Eigen::VectorXd psi_band = grid->synthesize(psi_coeffs, shape.l_max);
  const Eigen::VectorXd f_eff = psi_band.cwiseProduct(omega_nu);

  VariationReport rep;
  rep.f_spec = f_spec;
  rep.step = step;
  const double psi_norm = std::sqrt(grid->integrate(psi.cwiseProduct(psi)));
  const Eigen::VectorXd drop = psi - psi_band;
  rep.projection_residual = psi_norm > 0.0 ? std::sqrt(grid->integrate(drop.cwiseProduct(drop))) / psi_norm : 0.0;
  rep.analytic = first_variation(base, f_eff, L);

  std::array<Sample, 4> s{};
  const std::array<double, 4> eps{-2.0 * step, -step, step, 2.0 * step};
  try {
    for (int i = 0; i < 4; ++i) {
      SurfaceShape p = shape;
      p.coeffs += eps[i] * psi_coeffs;
      s[i] = functionals_at(p, model, grid, L);
    }
  } catch (const ImmersionError&) {
    throw StepSizeError("finite-difference step too large: perturbed surface is not a valid immersion");
  }
  auto d4 = [&](auto get) { return (8.0 * (get(s[2]) - get(s[1])) - (get(s[3]) - get(s[0]))) / (12.0 * step); };
  auto d2 = [&](auto get) { return (get(s[2]) - get(s[1])) / (2.0 * step); };
  auto getA = [](const Sample& x) { return x.A; };
  auto getW = [](const Sample& x) { return x.W; };
  auto getL = [](const Sample& x) { return x.L; };
  rep.finite_difference = {d4(getA), d4(getW), d4(getL)};

  const FunctionalValues f0 = functional_values(base, L);
  const double fmax = f_eff.cwiseAbs().maxCoeff();
  const double refA = std::abs(f0.area) * fmax / base.R;
  const double refW = std::abs(f0.W) * fmax / base.R;
  const double refL = std::abs(f0.L_integral) * fmax / base.R;
  const double roundoff = 32.0 * std::numeric_limits<double>::epsilon() / step;
  const std::array<std::array<double, 3>, 3> checks{{{refA, std::abs(f0.area), std::abs(d4(getA) - d2(getA))},
                                                     {refW, std::abs(f0.W), std::abs(d4(getW) - d2(getW))},
                                                     {refL, std::abs(f0.L_integral), std::abs(d4(getL) - d2(getL))}}};
  for (const auto& c : checks) {
    const double ref = std::max(c[0], 1e-300);
    if (c[1] * roundoff > 1e-6 * ref) throw StepSizeError("finite-difference step too small: cancellation dominates");
    if (c[2] > 1e-1 * ref) throw StepSizeError("finite-difference step too large: Richardson estimates disagree");
  }

  rep.rel_err_A = relative_error(rep.finite_difference.dA, rep.analytic.dA, refA);
  rep.rel_err_W = relative_error(rep.finite_difference.dW, rep.analytic.dW, refW);
  rep.rel_err_L = relative_error(rep.finite_difference.dL, rep.analytic.dL, refL);
  return rep;
}

MultiplierEstimate lagrange_multiplier(const SurfaceGeometry& geom, const LagrangianSpec& L) {
  MultiplierEstimate m;
  try {
    m.probe_center = adapted_normal_chart(geom.model, geom).origin;
  } catch (const Error&) {
    Vec3 c = Vec3::Zero();
    for (const auto& s : geom.points) c += s.weight * s.x;
    m.probe_center = c / geom.area;
  }
  Eigen::VectorXd f(geom.size());
  for (int q = 0; q < geom.size(); ++q) {
    const SurfacePoint& s = geom.points[q];
    f[q] = (s.x - m.probe_center).dot(s.nu_flat);
  }
  const VariationValues v = first_variation(geom, f, L);
  m.probe_dA = v.dA;
  m.probe_dHL = v.dHL();
  if (std::abs(v.dA) < 1e-12 * geom.area) throw DegenerateProbeError("probe speed does not change the area");
  m.probe = v.dHL() / v.dA;
  m.least_squares = least_squares_multiplier(geom, L);
  return m;
}

}  // namespace hawking
