#include "hawking/surface.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "hawking/errors.hpp"

namespace hawking {

// ---------------------------------------------------------------------------
// Shapes

SurfaceShape SurfaceShape::round(const Vec3& center, double radius, int l_max) {
  if (!(radius > 0.0)) throw DomainError("radius must be positive");
  if (l_max < 0) throw DomainError("l_max must be nonnegative");
  SurfaceShape s;
  s.center = center;
  s.l_max = l_max;
  s.coeffs = Eigen::VectorXd::Zero(sh_count(l_max));
  s.coeffs[0] = radius * std::sqrt(4.0 * M_PI);
  return s;
}

double SurfaceShape::mean_radius() const { return coeffs[0] / std::sqrt(4.0 * M_PI); }

double SurfaceShape::radius_at(const Vec3& omega) const { return real_sh_all(l_max, omega).dot(coeffs); }

SurfaceShape SurfaceShape::with_l_max(int new_l_max) const {
  SurfaceShape s;
  s.center = center;
  s.l_max = new_l_max;
  s.coeffs = Eigen::VectorXd::Zero(sh_count(new_l_max));
  const int n = std::min(sh_count(new_l_max), sh_count(l_max));
  s.coeffs.head(n) = coeffs.head(n);
  return s;
}

SurfaceShape SurfaceShape::scaled(double factor) const {
  SurfaceShape s = *this;
  s.coeffs *= factor;
  return s;
}

void write_shape(std::ostream& os, const SurfaceShape& shape) {
  std::ostringstream buf;
  buf << std::setprecision(17);
  buf << "# radial spherical-harmonic shape\n";
  buf << "center " << shape.center[0] << ' ' << shape.center[1] << ' ' << shape.center[2] << '\n';
  buf << "l_max " << shape.l_max << '\n';
  for (int l = 0; l <= shape.l_max; ++l)
    for (int m = -l; m <= l; ++m) buf << l << ' ' << m << ' ' << shape.coeffs[sh_index(l, m)] << '\n';
  os << buf.str();
}

SurfaceShape read_shape(std::istream& is) {
  SurfaceShape s;
  bool have_center = false, have_lmax = false;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    auto fail = [&](const std::string& what) {
      return ParseError("shape line " + std::to_string(lineno) + ": " + what);
    };
    if (line.compare(first, 6, "center") == 0) {
      std::string tag;
      ls >> tag >> s.center[0] >> s.center[1] >> s.center[2];
      if (!ls) throw fail("expected three center coordinates");
      have_center = true;
    } else if (line.compare(first, 5, "l_max") == 0) {
      std::string tag;
      ls >> tag >> s.l_max;
      if (!ls || s.l_max < 0) throw fail("invalid l_max");
      s.coeffs = Eigen::VectorXd::Zero(sh_count(s.l_max));
      have_lmax = true;
    } else {
      if (!have_lmax) throw fail("coefficient before l_max");
      int l = 0, m = 0;
      double a = 0.0;
      ls >> l >> m >> a;
      if (!ls) throw fail("expected 'l m a_lm'");
      if (l < 0 || l > s.l_max || std::abs(m) > l) throw fail("index out of range");
      s.coeffs[sh_index(l, m)] = a;
    }
  }
  if (!have_center || !have_lmax) throw ParseError("shape file needs center and l_max lines");
  return s;
}

void save_shape(const std::string& path, const SurfaceShape& shape) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write shape file " + path);
  write_shape(f, shape);
}

SurfaceShape load_shape(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot read shape file " + path);
  return read_shape(f);
}

SurfaceShape rotate_shape(const SurfaceShape& shape, const Mat3& rotation) {
  const QuadratureGrid grid(std::max(4, shape.l_max + 1));
  Eigen::VectorXd samples(grid.size());
  for (int q = 0; q < grid.size(); ++q) samples[q] = shape.radius_at(rotation.transpose() * grid.nodes()[q]);
  SurfaceShape out;
  out.center = rotation * shape.center;
  out.l_max = shape.l_max;
  out.coeffs = grid.analyze(samples, shape.l_max);
  return out;
}

SurfaceShape recenter_shape(const SurfaceShape& shape, const Vec3& new_center) {
  const QuadratureGrid grid(std::max(8, 2 * shape.l_max + 2));
  const double scale = std::abs(shape.mean_radius());
  Eigen::VectorXd samples(grid.size());
  for (int q = 0; q < grid.size(); ++q) {
    const Vec3& dir = grid.nodes()[q];
    // Root of t ↦ |y| − ρ(y/|y|) with y = new_center + t·dir − center, by secant steps.
    auto mismatch = [&](double t) {
      const Vec3 y = new_center + t * dir - shape.center;
      const double r = y.norm();
      if (!(r > 0.0)) throw ImmersionError("recentering ray passes through the old center");
      return r - shape.radius_at(y / r);
    };
    double t0 = shape.radius_at(dir), t1 = t0 * (1.0 + 1e-3);
    double f0 = mismatch(t0), f1 = mismatch(t1);
    bool done = std::abs(f0) <= 1e-15 * scale;
    for (int it = 0; it < 100 && !done; ++it) {
      if (f1 == f0) break;
      const double t2 = t1 - f1 * (t1 - t0) / (f1 - f0);
      t0 = t1;
      f0 = f1;
      t1 = t2;
      f1 = mismatch(t1);
      done = std::abs(f1) <= 1e-15 * scale || std::abs(t1 - t0) <= 1e-16 * scale;
    }
    if (!done || !(t1 > 0.0)) throw ImmersionError("surface is not a radial graph about the new center");
    samples[q] = t1;
  }
  SurfaceShape out;
  out.center = new_center;
  out.l_max = shape.l_max;
  out.coeffs = grid.analyze(samples, shape.l_max);
  return out;
}

// ---------------------------------------------------------------------------
// Embedding

namespace {

struct ParamFrame {
  Vec3 w, w_t, w_p, w_tt, w_tp, w_pp;
};

ParamFrame param_frame(double theta, double phi) {
  const double st = std::sin(theta), ct = std::cos(theta), sp = std::sin(phi), cp = std::cos(phi);
  ParamFrame f;
  f.w = Vec3(st * cp, st * sp, ct);
  f.w_t = Vec3(ct * cp, ct * sp, -st);
  f.w_p = Vec3(-st * sp, st * cp, 0.0);
  f.w_tt = -f.w;
  f.w_tp = Vec3(-ct * sp, ct * cp, 0.0);
  f.w_pp = Vec3(-st * cp, -st * sp, 0.0);
  return f;
}

Vec3 christoffel_apply(const Tensor3& gam, const Vec3& u, const Vec3& v) {
  return Vec3(u.dot(gam[0] * v), u.dot(gam[1] * v), u.dot(gam[2] * v));
}

Mat2 trace_free(const Mat2& a, const Mat2& gamma, const Mat2& gamma_inv) {
  return a - 0.5 * (gamma_inv.cwiseProduct(a).sum()) * gamma;
}

double norm2(const Mat2& a, const Mat2& gamma_inv) {
  return (gamma_inv * a * gamma_inv).cwiseProduct(a).sum();
}

// Fills everything that depends on the ambient metric.  `sign` orients A.
void fill_point(SurfacePoint& s, double sign) {
  const AmbientEval& ev = s.amb;
  const Mat3& g = ev.g;
  const Vec3 n = s.tangent[0].cross(s.tangent[1]);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) s.gamma(i, j) = s.tangent[i].dot(g * s.tangent[j]);
  const double det = s.gamma.determinant();
  if (!(det > 0.0) || !std::isfinite(det)) throw ImmersionError("degenerate tangent plane");
  s.gamma_inv = s.gamma.inverse();

  const double nn = std::sqrt(n.dot(ev.g_inv * n));
  s.nu_flat = n / nn;
  s.nu = ev.g_inv * s.nu_flat;
  s.omega_nu = s.omega.dot(s.nu_flat);

  std::array<std::array<Vec3, 2>, 2> D;  // ∇_{e_i} e_j in chart components
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      D[i][j] = s.second[i][j] + christoffel_apply(ev.christoffel, s.tangent[i], s.tangent[j]);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) s.A(i, j) = -sign * s.nu_flat.dot(D[i][j]);
  s.A = 0.5 * (s.A + s.A.transpose()).eval();
  s.H = s.gamma_inv.cwiseProduct(s.A).sum();
  s.A0 = trace_free(s.A, s.gamma, s.gamma_inv);
  s.A0_norm2 = norm2(s.A0, s.gamma_inv);

  for (int k = 0; k < 2; ++k) s.connection[k].setZero();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const Vec3 gd = g * D[i][j];
      const Vec2 lower(s.tangent[0].dot(gd), s.tangent[1].dot(gd));
      const Vec2 upper = s.gamma_inv * lower;
      s.connection[0](i, j) = upper[0];
      s.connection[1](i, j) = upper[1];
    }

  s.ric_nn = s.nu.dot(ev.ricci * s.nu);
  s.einstein_nn = s.nu.dot(ev.einstein * s.nu);
  s.k_nn = s.nu.dot(ev.k * s.nu);
  s.P = ev.tr_k - s.k_nn;
  const Vec3 kn = ev.k * s.nu;
  s.eta = Vec2(s.tangent[0].dot(kn), s.tangent[1].dot(kn));
}

void fill_euclidean(SurfacePoint& s, double sign) {
  const Vec3 n = s.tangent[0].cross(s.tangent[1]);
  s.nu_E = n.normalized();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      s.gamma_E(i, j) = s.tangent[i].dot(s.tangent[j]);
      s.A_E(i, j) = -sign * s.nu_E.dot(s.second[i][j]);
    }
  const Mat2 gi = s.gamma_E.inverse();
  s.H_E = gi.cwiseProduct(s.A_E).sum();
  s.A0_E = trace_free(s.A_E, s.gamma_E, gi);
  s.A0_E_norm2 = norm2(s.A0_E, gi);
}

void set_parametrization(SurfacePoint& s, const Vec3& center, const ParamFrame& f, double r, double r_t,
                         double r_p, double r_tt, double r_tp, double r_pp) {
  s.omega = f.w;
  s.x = center + r * f.w;
  s.tangent[0] = r_t * f.w + r * f.w_t;
  s.tangent[1] = r_p * f.w + r * f.w_p;
  s.second[0][0] = r_tt * f.w + 2.0 * r_t * f.w_t + r * f.w_tt;
  s.second[1][1] = r_pp * f.w + 2.0 * r_p * f.w_p + r * f.w_pp;
  s.second[0][1] = r_tp * f.w + r_t * f.w_p + r_p * f.w_t + r * f.w_tp;
  s.second[1][0] = s.second[0][1];
}

// Pins the sign convention: a unit coordinate sphere in flat space must have H = +2.
double orientation_sign() {
  static const double sign = [] {
    SurfacePoint s;
    set_parametrization(s, Vec3::Zero(), param_frame(1.0, 0.5), 1.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    fill_point(s, 1.0);
    return s.H > 0.0 ? 1.0 : -1.0;
  }();
  return sign;
}

}  // namespace

double SurfaceGeometry::integrate(const Eigen::VectorXd& f) const {
  if (f.size() != size()) throw GridMismatchError("field size does not match the surface grid");
  double acc = 0.0;
  for (int q = 0; q < size(); ++q) acc += points[q].weight * f[q];
  return acc;
}

double SurfaceGeometry::integrate_euclidean(const Eigen::VectorXd& f) const {
  if (f.size() != size()) throw GridMismatchError("field size does not match the surface grid");
  double acc = 0.0;
  for (int q = 0; q < size(); ++q) acc += points[q].weight_E * f[q];
  return acc;
}

Eigen::VectorXd SurfaceGeometry::mean_curvature() const {
  return sample([](const SurfacePoint& p) { return p.H; });
}

SurfaceGeometry embed(const SurfaceShape& shape, const ManifoldModel& model, GridPtr grid) {
  if (!grid) throw GridMismatchError("no quadrature grid");
  if (shape.coeffs.size() != sh_count(shape.l_max)) throw GridMismatchError("coefficient count does not match l_max");
  if (shape.l_max > grid->band()) throw GridMismatchError("shape band exceeds grid resolution");
  const double sign = orientation_sign();

  SurfaceGeometry geom;
  geom.shape = shape;
  geom.grid = grid;
  geom.model = model;
  geom.points.resize(grid->size());
  const SphericalField rho = grid->synthesize_with_derivatives(shape.coeffs, shape.l_max);
  const bool flat = model.kind() == MetricKind::Flat;

  for (int q = 0; q < grid->size(); ++q) {
    if (!(rho.f[q] > 0.0)) throw ImmersionError("radial function is not positive at a quadrature node");
    SurfacePoint& s = geom.points[q];
    set_parametrization(s, shape.center, param_frame(grid->theta(q), grid->phi(q)), rho.f[q], rho.f_t[q],
                        rho.f_p[q], rho.f_tt[q], rho.f_tp[q], rho.f_pp[q]);
    if (!model.contains(s.x)) throw ImmersionError("surface leaves the chart ball");
    if (flat) {
      s.amb = AmbientEval{};
    } else {
      s.amb = assemble_ambient(model.jet(s.x, 2), AmbientLevel::Curvature);
    }
    s.amb.point = s.x;
    attach_extrinsic(model.extrinsic(), s.amb);
    fill_point(s, sign);
    fill_euclidean(s, sign);
    const double st = grid->sin_theta(q);
    s.weight = grid->weights()[q] * std::sqrt(s.gamma.determinant()) / st;
    s.weight_E = grid->weights()[q] * std::sqrt(s.gamma_E.determinant()) / st;
    geom.area += s.weight;
    geom.area_E += s.weight_E;
  }
  geom.R = std::sqrt(geom.area / (4.0 * M_PI));
  geom.R_E = std::sqrt(geom.area_E / (4.0 * M_PI));
  return geom;
}

std::vector<Vec2> parameter_gradient(const SurfaceGeometry& geom, const Eigen::VectorXd& f) {
  if (f.size() != geom.size()) throw GridMismatchError("field size does not match the surface grid");
  const SphericalField d = geom.grid->differentiate(f);
  std::vector<Vec2> out(geom.size());
  for (int q = 0; q < geom.size(); ++q) out[q] = Vec2(d.f_t[q], d.f_p[q]);
  return out;
}

Eigen::VectorXd laplace_beltrami(const SurfaceGeometry& geom, const Eigen::VectorXd& f) {
  if (f.size() != geom.size()) throw GridMismatchError("field size does not match the surface grid");
  const SphericalField d = geom.grid->differentiate(f);
  Eigen::VectorXd out(geom.size());
  for (int q = 0; q < geom.size(); ++q) {
    const SurfacePoint& s = geom.points[q];
    Mat2 hess;
    hess << d.f_tt[q], d.f_tp[q], d.f_tp[q], d.f_pp[q];
    const Vec2 grad(d.f_t[q], d.f_p[q]);
    hess -= grad[0] * s.connection[0] + grad[1] * s.connection[1];
    out[q] = s.gamma_inv.cwiseProduct(hess).sum();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Diagnostics

namespace {

double max_metric_eigenvalue(const SurfaceGeometry& geom) {
  double lam = 0.0;
  for (const auto& s : geom.points) {
    Eigen::SelfAdjointEigenSolver<Mat3> es(s.amb.g, Eigen::EigenvaluesOnly);
    lam = std::max(lam, es.eigenvalues().maxCoeff());
  }
  return lam;
}

double extrinsic_diameter(const SurfaceGeometry& geom) {
  double d2 = 0.0;
  const int n = geom.size();
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) d2 = std::max(d2, (geom.points[a].x - geom.points[b].x).squaredNorm());
  return std::sqrt(d2 * max_metric_eigenvalue(geom));
}

}  // namespace

ShapeDiagnostics shape_diagnostics(const SurfaceGeometry& geom) {
  ShapeDiagnostics d;
  d.R = geom.R;
  d.R_E = geom.R_E;
  d.diameter = extrinsic_diameter(geom);
  Vec3 c = Vec3::Zero();
  double a0 = 0.0, hdev = 0.0;
  for (const auto& s : geom.points) {
    c += s.weight_E * s.x;
    a0 += s.weight_E * s.A0_E_norm2;
    const double dh = s.H_E - 2.0 / geom.R_E;
    hdev += s.weight_E * dh * dh;
    d.normal_deviation_max = std::max(d.normal_deviation_max, (s.nu - s.nu_E).norm());
  }
  d.center_E = c / geom.area_E;
  d.A0_E_L2 = std::sqrt(a0);
  d.H_E_deviation_L2 = std::sqrt(hdev);
  return d;
}

AdaptedChart adapted_normal_chart(const ManifoldModel& model, const SurfaceGeometry& geom) {
  AdaptedChart out;
  out.diameter = extrinsic_diameter(geom);
  if (!(2.0 * out.diameter < model.chart_radius()))
    throw DomainError("surface too large for an adapted chart (2d must be below the chart radius)");

  const double tol = 1e-12 * out.diameter;
  Vec3 p = Vec3::Zero();
  for (const auto& s : geom.points) p += s.weight * s.x;
  p /= geom.area;

  for (int it = 1; it <= 100; ++it) {
    model.require_in_chart(p);
    const Tensor3 gam = model.kind() == MetricKind::Flat
                            ? zero_tensor3()
                            : assemble_ambient(model.jet(p, 1), AmbientLevel::Curvature).christoffel;
    Vec3 integral = Vec3::Zero();
    for (const auto& s : geom.points) {
      const Vec3 v = s.x - p;
      integral += s.weight * (v + 0.5 * christoffel_apply(gam, v, v));
    }
    const Vec3 mean = integral / geom.area;
    out.residual_mean = integral;
    out.iterations = it;
    if (mean.norm() <= tol) {
      out.origin = p;
      out.offset = p - geom.shape.center;
      const ShapeDiagnostics diag = shape_diagnostics(geom);
      out.center_E_offset = (diag.center_E - p).norm();
      out.center_E_ratio = out.center_E_offset / std::pow(out.diameter, 3);
      return out;
    }
    p += mean;
  }
  throw NoConvergenceError("adapted chart iteration did not converge in 100 steps");
}

}  // namespace hawking
