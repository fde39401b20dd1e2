#include "hawking/expansion.hpp"

#include <algorithm>
#include <cfloat>
#include <limits>

#include <Eigen/SVD>

#include "hawking/errors.hpp"

namespace hawking {

SurfaceShape geodesic_sphere_shape(const ManifoldModel& model, const Vec3& p, double r, int l_max) {
  if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("sphere radius must be positive");
  if (l_max < 0) throw DomainError("l_max must be nonnegative");
  model.require_in_chart(p);
  double rho = r;
  if (model.kind() == MetricKind::RoundSphere) {
    if (p.norm() > 1e-14) throw DomainError("geodesic spheres on the round model are built about the origin");
    const double s = std::sqrt(model.curvature());
    if (s * r >= M_PI) throw DomainError("radius reaches the antipode");
    rho = 2.0 * std::tan(0.5 * s * r) / s;
  }
  if ((p - model.chart_center()).norm() + rho >= model.chart_radius())
    throw DomainError("sphere of radius " + std::to_string(r) + " leaves the chart");
  return SurfaceShape::round(p, rho, l_max);
}

bool ExpansionFit::has(int power) const { return std::find(powers.begin(), powers.end(), power) != powers.end(); }

double ExpansionFit::coefficient(int power) const {
  const auto it = std::find(powers.begin(), powers.end(), power);
  if (it == powers.end()) throw FitError("power " + std::to_string(power) + " is not part of the fit");
  return coefficients[it - powers.begin()];
}

ExpansionFit fit_expansion(const std::vector<double>& radii, const std::vector<double>& values,
                           const std::vector<int>& powers) {
  if (radii.size() != values.size()) throw FitError("radii and values differ in length");
  if (powers.empty()) throw FitError("no powers to fit");
  if (radii.size() < powers.size() + 2)
    throw FitError("need at least " + std::to_string(powers.size() + 2) + " samples, got " +
                   std::to_string(radii.size()));
  for (std::size_t i = 0; i < radii.size(); ++i)
    if (!(radii[i] > 0.0) || !std::isfinite(radii[i]) || !std::isfinite(values[i]))
      throw FitError("samples must have positive radii and finite values");
  std::vector<int> sorted = powers;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) throw FitError("repeated power");

  const int n = static_cast<int>(radii.size()), m = static_cast<int>(powers.size());
  Eigen::MatrixXd A(n, m);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) {
    b[i] = values[i];
    for (int j = 0; j < m; ++j) A(i, j) = std::pow(radii[i], powers[j]);
  }
  Eigen::VectorXd scale = A.colwise().norm().transpose();
  for (int j = 0; j < m; ++j) {
    if (!(scale[j] > 0.0)) throw FitError("design column vanishes");
    A.col(j) /= scale[j];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv[m - 1] <= 1e-13 * sv[0]) throw FitError("rank-deficient design (distinct radii too few or too close)");

  ExpansionFit fit;
  fit.radii = radii;
  fit.values = values;
  fit.powers = powers;
  fit.coefficients = svd.solve(b).cwiseQuotient(scale);
  fit.condition = sv[0] / sv[m - 1];
  const Eigen::VectorXd res = A * fit.coefficients.cwiseProduct(scale) - b;
  fit.residual = std::sqrt(res.squaredNorm() / n);
  return fit;
}

ExpansionFit fit_with_nuisance(const std::vector<double>& radii, const std::vector<double>& values,
                               std::vector<int> powers, int nuisance) {
  ExpansionFit fit = fit_expansion(radii, values, powers);
  double vmax = 0.0;
  for (double v : values) vmax = std::max(vmax, std::abs(v));
  if (fit.residual > 10.0 * DBL_EPSILON * vmax && std::find(powers.begin(), powers.end(), nuisance) == powers.end() &&
      radii.size() >= powers.size() + 3) {
    powers.push_back(nuisance);
    fit = fit_expansion(radii, values, powers);
  }
  return fit;
}

std::vector<double> default_radii() { return {0.04, 0.028, 0.02, 0.014, 0.01, 0.007}; }

PointInvariants point_invariants(const ManifoldModel& model, const Vec3& p) {
  model.require_in_chart(p);
  const AmbientEval amb = curvature_at(model, p, AmbientLevel::Curvature);
  PointInvariants inv;
  inv.scalar = amb.scalar;
  inv.tr_k = amb.tr_k;
  inv.tr_k2 = amb.tr_k * amb.tr_k;
  inv.norm_k2 = amb.norm_k2;
  return inv;
}

double c_closed_form(const LagrangianSpec& L, const PointInvariants& inv) {
  if (L.extra) throw DomainError("closed-form c(L) needs a Lagrangian in the polynomial family");
  return 4.0 * M_PI * (L.alpha * inv.tr_k2 + L.beta * (inv.tr_k2 + 2.0 * inv.norm_k2) / 15.0 +
                       L.c0 * inv.tr_k2 / 3.0 + L.ct);
}

void ExpansionOptions::validate() const {
  if (l_max < 0) throw DomainError("l_max must be nonnegative");
  if (n_theta < 4) throw DomainError("n_theta must be at least 4");
  if (!(roundness_bound > 0.0)) throw DomainError("roundness bound must be positive");
  if (!(ratio_tolerance > 0.0)) throw DomainError("ratio tolerance must be positive");
  optimizer.validate();
}

namespace {

bool ratio_ok(double fitted, double predicted, double tol, double* ratio) {
  if (std::abs(predicted) < 1e-12) {
    *ratio = std::numeric_limits<double>::quiet_NaN();
    return std::abs(fitted) <= 1e-8;
  }
  *ratio = fitted / predicted;
  return std::abs(*ratio - 1.0) <= tol;
}

ExpansionSample make_sample(double r, const SurfaceGeometry& geom, const FunctionalReport& rep, const Vec3& center) {
  ExpansionSample s;
  s.r = r;
  s.area = rep.area;
  s.R = std::sqrt(rep.area / (4.0 * M_PI));
  s.E = rep.E;
  s.H_L = rep.H_L;
  s.W = rep.W;
  s.A0_L2_sq = 2.0 * rep.U;
  s.roundness_constant = s.A0_L2_sq / (r * geom.area);
  s.center = center;
  return s;
}

}  // namespace

ExpansionReport expansion_check(const ManifoldModel& model, const Vec3& p, const std::vector<double>& radii,
                                const LagrangianSpec& L, const ExpansionOptions& opts) {
  opts.validate();
  if (radii.empty()) throw DomainError("no radii given");
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] < radii[i - 1])) throw DomainError("radii must be strictly decreasing");

  ExpansionReport out;
  out.point = p;
  out.invariants = point_invariants(model, p);
  out.c_L = c_closed_form(L, out.invariants);
  out.predicted_E3 = out.invariants.hawking_potential() / 12.0;
  out.predicted_H2 = -(2.0 * M_PI / 3.0) * out.invariants.scalar + out.c_L;

  const GridPtr grid = build_grid(opts.n_theta);
  if (!opts.use_minimizers) {
    for (double r : radii) {
      const auto geom = embed(geodesic_sphere_shape(model, p, r, opts.l_max), model, grid);
      out.samples.push_back(make_sample(r, geom, evaluate_functionals(geom, L), p));
    }
  } else {
    std::vector<double> areas;
    for (double r : radii) areas.push_back(embed(geodesic_sphere_shape(model, p, r, 0), model, grid).area);
    OptimizerOptions o = opts.optimizer;
    const auto scan =
        area_scan(model, L, areas, o, geodesic_sphere_shape(model, p, radii.front(), opts.l_max), grid);
    for (std::size_t i = 0; i < scan.size(); ++i) {
      const auto geom = embed(scan[i].shape, model, grid);
      ExpansionSample s = make_sample(radii[i], geom, scan[i].report, scan[i].center);
      s.error = scan[i].error;
      if (!scan[i].converged && s.error.empty()) s.error = "not converged";
      out.samples.push_back(s);
    }
  }

  std::vector<double> R, E, H;
  for (auto& s : out.samples) {
    s.admitted = s.error.empty() && s.roundness_constant <= opts.roundness_bound;
    out.max_roundness_constant = std::max(out.max_roundness_constant, s.roundness_constant);
    if (!s.admitted) continue;
    R.push_back(s.R);
    E.push_back(s.E);
    H.push_back(s.H_L);
  }
  out.E_fit = fit_with_nuisance(R, E, {3});
  out.H_fit = fit_with_nuisance(R, H, {0, 2, 3});
  out.H0 = out.H_fit.coefficient(0);
  const bool e_ok = ratio_ok(out.E_fit.coefficient(3), out.predicted_E3, opts.ratio_tolerance, &out.E3_ratio);
  const bool h_ok = ratio_ok(out.H_fit.coefficient(2), out.predicted_H2, opts.ratio_tolerance, &out.H2_ratio);
  out.pass = e_ok && h_ok && std::abs(out.H0 - 4.0 * M_PI) <= 1e-6;
  return out;
}

void FieldGridSpec::validate() const {
  if (!(half_width > 0.0)) throw DomainError("field half width must be positive");
  if (points_per_axis < 3) throw DomainError("field grid needs at least 3 points per axis");
}

namespace {

// Coefficients of Ψ = Sc − A (trK)² − B |K|² − 6cₜ.
struct PotentialWeights {
  double A, B, C;
};

PotentialWeights potential_weights(const LagrangianSpec& L) {
  if (L.extra) throw DomainError("concentration potential needs a Lagrangian in the polynomial family");
  return {6.0 * L.alpha + 0.4 * L.beta + 2.0 * L.c0, 0.8 * L.beta, 6.0 * L.ct};
}

// Value and chart gradient of Sc + u (trK)² + v |K|².
double invariant_combination(const ManifoldModel& model, const Vec3& x, double u, double v, Vec3* gradient) {
  const AmbientEval amb = curvature_at(model, x, gradient ? AmbientLevel::Full : AmbientLevel::Curvature);
  if (gradient) {
    const Mat3 k_up = amb.g_inv * amb.k * amb.g_inv;
    for (int c = 0; c < 3; ++c) {
      const double d_tr = amb.g_inv.cwiseProduct(amb.nabla_k[c]).sum();
      const double d_norm = 2.0 * k_up.cwiseProduct(amb.nabla_k[c]).sum();
      (*gradient)[c] = amb.grad_scalar[c] + u * 2.0 * amb.tr_k * d_tr + v * d_norm;
    }
  }
  return amb.scalar + u * amb.tr_k * amb.tr_k + v * amb.norm_k2;
}

using ScalarField = std::function<double(const Vec3&, Vec3*)>;

bool inside_box(const FieldGridSpec& spec, const Vec3& x) {
  return ((x - spec.center).cwiseAbs().maxCoeff() <= spec.half_width * (1.0 + 1e-9));
}

std::vector<CriticalPoint> refine_critical_points(const ScalarField& f, const ManifoldModel& model,
                                                  const FieldGridSpec& spec, const std::vector<Vec3>& pts,
                                                  const std::vector<Vec3>& grads) {
  const int n = spec.points_per_axis;
  auto id = [n](int i, int j, int k) { return (i * n + j) * n + k; };
  const double h = 1e-4 * spec.half_width;
  auto hessian = [&](const Vec3& x) {
    Mat3 H;
    for (int c = 0; c < 3; ++c) {
      Vec3 gp, gm;
      Vec3 xp = x, xm = x;
      xp[c] += h;
      xm[c] -= h;
      f(xp, &gp);
      f(xm, &gm);
      H.col(c) = (gp - gm) / (2 * h);
    }
    return Mat3(0.5 * (H + H.transpose()));
  };

  std::vector<CriticalPoint> found;
  for (int i = 1; i < n - 1; ++i)
    for (int j = 1; j < n - 1; ++j)
      for (int k = 1; k < n - 1; ++k) {
        const double gn = grads[id(i, j, k)].norm();
        bool local_min = true;
        for (int di = -1; di <= 1 && local_min; ++di)
          for (int dj = -1; dj <= 1 && local_min; ++dj)
            for (int dk = -1; dk <= 1 && local_min; ++dk)
              if ((di || dj || dk) && grads[id(i + di, j + dj, k + dk)].norm() < gn) local_min = false;
        if (!local_min) continue;

        Vec3 x = pts[id(i, j, k)], g;
        bool ok = true;
        for (int it = 0; it < 60; ++it) {
          f(x, &g);
          if (g.norm() <= 1e-13) break;
          const Mat3 H = hessian(x);
          const Vec3 step = H.completeOrthogonalDecomposition().solve(g);
          x -= step;
          if (!inside_box(spec, x) || !model.contains(x)) {
            ok = false;
            break;
          }
          if (step.norm() <= 1e-15 * (1.0 + x.norm())) break;
        }
        if (!ok) continue;
        CriticalPoint cp;
        cp.x = x;
        cp.value = f(x, &cp.gradient);
        if (cp.gradient.norm() > 1e-8) continue;
        bool duplicate = false;
        for (const auto& q : found)
          if ((q.x - x).norm() <= 1e-6) duplicate = true;
        if (duplicate) continue;
        Eigen::SelfAdjointEigenSolver<Mat3> es(hessian(x));
        cp.hessian_eigenvalues = es.eigenvalues();
        const double scale = 1.0 + es.eigenvalues().cwiseAbs().maxCoeff();
        bool degenerate = false;
        for (int c = 0; c < 3; ++c) {
          if (std::abs(cp.hessian_eigenvalues[c]) <= 1e-6 * scale) degenerate = true;
          if (cp.hessian_eigenvalues[c] < 0) ++cp.negative_directions;
        }
        cp.kind = degenerate                       ? "degenerate"
                  : cp.negative_directions == 3 ? "maximum"
                  : cp.negative_directions == 0 ? "minimum"
                                                : "saddle";
        found.push_back(cp);
      }
  return found;
}

}  // namespace

double concentration_potential(const ManifoldModel& model, const Vec3& x, const LagrangianSpec& L, Vec3* gradient) {
  const PotentialWeights w = potential_weights(L);
  return invariant_combination(model, x, -w.A, -w.B, gradient) - w.C;
}

double energy_density16pi(const ManifoldModel& model, const Vec3& x, Vec3* gradient) {
  return invariant_combination(model, x, 1.0, -1.0, gradient);
}

ConcentrationField concentration_field(const ManifoldModel& model, const FieldGridSpec& spec,
                                       const LagrangianSpec& L) {
  spec.validate();
  potential_weights(L);
  const int n = spec.points_per_axis;
  ConcentrationField out;
  out.grid = spec;
  std::vector<Vec3> phi_grad, rho_grad;
  double phi_best = -std::numeric_limits<double>::infinity(), rho_best = phi_best;
  double phi_min = std::numeric_limits<double>::infinity(), phi_max = -phi_min;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const Vec3 x = spec.center + spec.half_width * (Vec3(i, j, k) * (2.0 / (n - 1)) - Vec3::Ones());
        model.require_in_chart(x);
        Vec3 gp, gr;
        const double phi = concentration_potential(model, x, L, &gp);
        const double rho = energy_density16pi(model, x, &gr) / (16.0 * M_PI);
        out.points.push_back(x);
        out.phi.push_back(phi);
        out.rho.push_back(rho);
        phi_grad.push_back(gp);
        rho_grad.push_back(gr);
        if (phi > phi_best) {
          phi_best = phi;
          out.phi_argmax = x;
        }
        if (rho > rho_best) {
          rho_best = rho;
          out.rho_argmax = x;
        }
        phi_min = std::min(phi_min, phi);
        phi_max = std::max(phi_max, phi);
      }

  out.degenerate = phi_max - phi_min <= 1e-12 * (1.0 + std::max(std::abs(phi_min), std::abs(phi_max)));
  if (!out.degenerate) {
    out.phi_critical = refine_critical_points(
        [&](const Vec3& x, Vec3* g) { return concentration_potential(model, x, L, g); }, model, spec, out.points,
        phi_grad);
  }
  double rho_min = std::numeric_limits<double>::infinity(), rho_max = -rho_min;
  for (double r : out.rho) {
    rho_min = std::min(rho_min, r);
    rho_max = std::max(rho_max, r);
  }
  if (rho_max - rho_min > 1e-12 * (1.0 + std::max(std::abs(rho_min), std::abs(rho_max)))) {
    out.rho_critical = refine_critical_points(
        [&](const Vec3& x, Vec3* g) { return energy_density16pi(model, x, g); }, model, spec, out.points, rho_grad);
  }

  out.critical_separation = std::numeric_limits<double>::infinity();
  bool all_matched = !out.phi_critical.empty() && !out.rho_critical.empty();
  for (const auto& a : out.phi_critical) {
    double nearest = std::numeric_limits<double>::infinity();
    for (const auto& b : out.rho_critical) nearest = std::min(nearest, (a.x - b.x).norm());
    out.critical_separation = std::min(out.critical_separation, nearest);
    if (nearest > 1e-6) all_matched = false;
  }
  out.critical_points_coincide = all_matched;
  return out;
}

ConcentrationExperiment concentration_experiment(const ManifoldModel& model, const LagrangianSpec& L,
                                                 const std::vector<double>& areas, const Vec3& start,
                                                 const FieldGridSpec& field_spec, const OptimizerOptions& opts,
                                                 int l_max, int n_theta) {
  if (areas.empty()) throw DomainError("no areas given");
  ConcentrationExperiment out;
  out.field = concentration_field(model, field_spec, L);
  std::vector<Vec3> isolated;
  for (const auto& cp : out.field.phi_critical)
    if (cp.kind != "degenerate") isolated.push_back(cp.x);
  out.degenerate = out.field.degenerate || isolated.empty();

  const auto scan = area_scan(model, L, areas, opts,
                              SurfaceShape::round(start, std::sqrt(areas.front() / (4.0 * M_PI)), l_max),
                              build_grid(n_theta));
  for (std::size_t i = 0; i < scan.size(); ++i) {
    ConcentrationRow row;
    row.area = areas[i];
    row.center = scan[i].center;
    row.H_L = scan[i].report.H_L;
    row.converged = scan[i].converged;
    row.error = scan[i].error;
    row.distance = std::numeric_limits<double>::quiet_NaN();
    out.rows.push_back(row);
  }
  if (!out.degenerate) {
    // Target: the isolated critical point nearest to the smallest-area center.
    const Vec3 last = out.rows.back().center;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& x : isolated)
      if ((x - last).norm() < best) {
        best = (x - last).norm();
        out.target = x;
      }
    out.has_target = true;
    for (auto& row : out.rows) {
      row.distance = std::numeric_limits<double>::infinity();
      for (const auto& x : isolated) row.distance = std::min(row.distance, (row.center - x).norm());
    }
    out.monotone = true;
    for (std::size_t i = 0; i < out.rows.size(); ++i) {
      if (!out.rows[i].converged || !out.rows[i].error.empty()) out.monotone = false;
      if (i > 0 && !(out.rows[i].distance < out.rows[i - 1].distance)) out.monotone = false;
    }
  }
  return out;
}

}  // namespace hawking
