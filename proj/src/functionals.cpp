#include "hawking/functionals.hpp"

#include <cmath>

namespace hawking {

namespace {

double bilinear(const Vec3& u, const Mat3& m, const Vec3& v) { return u.dot(m * v); }

/// γ^{ij} u_i^T M u_j over the tangent frame.
double surface_trace(const SurfacePoint& s, const Mat3& m) {
  double acc = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) acc += s.gamma_inv(i, j) * bilinear(s.tangent[i], m, s.tangent[j]);
  return acc;
}

double pair(const SurfacePoint& s, const Mat2& a, const Mat2& b) {
  return (s.gamma_inv * a * s.gamma_inv).cwiseProduct(b).sum();
}

Mat3 directional(const AmbientEval& amb, const Vec3& v) {
  return v[0] * amb.nabla_k[0] + v[1] * amb.nabla_k[1] + v[2] * amb.nabla_k[2];
}

}  // namespace

std::vector<LagrangianJet> lagrangian_on_surface(const SurfaceGeometry& geom, const LagrangianSpec& L) {
  std::vector<LagrangianJet> out(geom.size());
  for (int q = 0; q < geom.size(); ++q) out[q] = L.evaluate(geom.points[q].amb, geom.points[q].nu);
  return out;
}

ELCoefficients el_coefficients(const SurfaceGeometry& geom, const LagrangianSpec& L) {
  const int n = geom.size();
  ELCoefficients c;
  c.Q.resize(n);
  c.T.resize(n);
  c.S.resize(n);
  for (int q = 0; q < n; ++q) {
    const SurfacePoint& s = geom.points[q];
    const LagrangianJet j = L.evaluate(s.amb, s.nu);
    c.Q[q] = s.ric_nn - 2.0 * j.value - surface_trace(s, j.hess_V) + 2.0 * j.d_V.dot(s.nu);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) c.S[q](a, b) = -2.0 * bilinear(s.tangent[a], j.hess_V, s.tangent[b]);
    c.T[q] = -2.0 * j.d_M.dot(s.nu) - 2.0 * surface_trace(s, j.nabla_d_V);
  }
  return c;
}

ELCoefficients hawking_el_coefficients(const SurfaceGeometry& geom) {
  const int n = geom.size();
  ELCoefficients c;
  c.Q.resize(n);
  c.T.resize(n);
  c.S.resize(n);
  for (int q = 0; q < n; ++q) {
    const SurfacePoint& s = geom.points[q];
    const AmbientEval& amb = s.amb;
    const double eta2 = s.eta.dot(s.gamma_inv * s.eta);
    c.Q[q] = s.ric_nn - 0.5 * s.P * s.P + 2.0 * eta2 + 2.0 * s.P * s.k_nn;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        c.S[q](a, b) = -2.0 * s.P * bilinear(s.tangent[a], amb.k, s.tangent[b]) + 4.0 * s.eta[a] * s.eta[b];
    const Vec2 eta_up = s.gamma_inv * s.eta;
    const Vec3 eta_sharp = eta_up[0] * s.tangent[0] + eta_up[1] * s.tangent[1];
    double div = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        div += s.gamma_inv(i, j) * bilinear(s.tangent[j], directional(amb, s.tangent[i]), s.nu);
    c.T[q] = s.P * surface_trace(s, directional(amb, s.nu)) - 2.0 * surface_trace(s, directional(amb, eta_sharp)) -
             2.0 * s.P * div;
  }
  return c;
}

namespace {

Eigen::VectorXd residual_without_multiplier(const SurfaceGeometry& geom, const LagrangianSpec& L) {
  const ELCoefficients c = el_coefficients(geom, L);
  const Eigen::VectorXd H = geom.mean_curvature();
  Eigen::VectorXd r = laplace_beltrami(geom, H);
  for (int q = 0; q < geom.size(); ++q) {
    const SurfacePoint& s = geom.points[q];
    r[q] += s.H * s.A0_norm2 + s.H * c.Q[q] + pair(s, s.A0, c.S[q]) + c.T[q];
  }
  return r;
}

double l2_norm(const SurfaceGeometry& geom, const Eigen::VectorXd& f) {
  return std::sqrt(geom.integrate(f.cwiseProduct(f)));
}

double multiplier_from(const SurfaceGeometry& geom, const Eigen::VectorXd& r0) {
  const Eigen::VectorXd H = geom.mean_curvature();
  return -geom.integrate(r0.cwiseProduct(H)) / (2.0 * geom.integrate(H.cwiseProduct(H)));
}

}  // namespace

ELResidual el_residual(const SurfaceGeometry& geom, const LagrangianSpec& L, double lambda) {
  ELResidual out;
  out.residual = residual_without_multiplier(geom, L) + 2.0 * lambda * geom.mean_curvature();
  out.l2 = l2_norm(geom, out.residual);
  return out;
}

double least_squares_multiplier(const SurfaceGeometry& geom, const LagrangianSpec& L) {
  return multiplier_from(geom, residual_without_multiplier(geom, L));
}

Eigen::VectorXd gradient_density(const SurfaceGeometry& geom, const LagrangianSpec& L) {
  return -0.5 * residual_without_multiplier(geom, L);
}

FunctionalValues functional_values(const SurfaceGeometry& geom, const LagrangianSpec& L) {
  FunctionalValues v;
  const bool zero = L.is_zero();
  for (const SurfacePoint& s : geom.points) {
    v.W += 0.25 * s.weight * s.H * s.H;
    if (!zero) v.L_integral += s.weight * L.evaluate(s.amb, s.nu).value;
  }
  v.area = geom.area;
  v.H_L = v.W + v.L_integral;
  return v;
}

FunctionalReport evaluate_functionals(const SurfaceGeometry& geom, const LagrangianSpec& L) {
  FunctionalReport r;
  r.area = geom.area;
  r.R = geom.R;
  r.R_E = geom.R_E;
  r.is_hawking = L.is_hawking();
  double h2 = 0.0, hp = 0.0, lint = 0.0, a0 = 0.0, v = 0.0, gb = 0.0, gnn = 0.0;
  for (const SurfacePoint& s : geom.points) {
    const double w = s.weight;
    h2 += w * s.H * s.H;
    hp += w * (s.H * s.H - s.P * s.P);
    lint += w * L.evaluate(s.amb, s.nu).value;
    a0 += w * s.A0_norm2;
    v += w * (s.ric_nn - 0.5 * s.amb.scalar);
    gnn += w * s.einstein_nn;
    gb += w * (0.5 * s.amb.scalar - s.ric_nn + 0.25 * s.H * s.H - 0.5 * s.A0_norm2);
  }
  r.W = 0.25 * h2;
  r.L_integral = lint;
  r.H_L = r.W + r.L_integral;
  r.E = std::sqrt(geom.area / (16.0 * M_PI)) * (1.0 - hp / (16.0 * M_PI));
  r.U = 0.5 * a0;
  r.V = v;
  r.gauss_bonnet_total = gb;
  r.gauss_identity_defect = 2.0 * r.W - 8.0 * M_PI - a0 - 2.0 * gnn;

  const Eigen::VectorXd r0 = residual_without_multiplier(geom, L);
  r.lambda = multiplier_from(geom, r0);
  r.el_residual_L2 = l2_norm(geom, r0 + 2.0 * r.lambda * geom.mean_curvature());
  return r;
}

}  // namespace hawking
