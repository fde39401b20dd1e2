#include "hawking/optimizer.hpp"

#include <cmath>
#include <deque>
#include <limits>

#include "hawking/errors.hpp"
#include "hawking/variation.hpp"

namespace hawking {

void OptimizerOptions::validate() const {
  if (!(target_area > 0.0)) throw DomainError("target_area must be positive");
  if (max_iters < 0) throw DomainError("max_iters must be nonnegative");
  if (!(grad_tol > 0.0)) throw DomainError("grad_tol must be positive");
  if (!(armijo_c > 0.0 && armijo_c < 1.0)) throw DomainError("armijo_c must lie in (0, 1)");
  if (!(shrink > 0.0 && shrink < 1.0)) throw DomainError("shrink must lie in (0, 1)");
  if (max_backtracks < 1) throw DomainError("max_backtracks must be positive");
  if (!(area_restore_tol > 0.0)) throw DomainError("area_restore_tol must be positive");
  if (memory < 0) throw DomainError("memory must be nonnegative");
  if (!(translation_stiffness > 0.0)) throw DomainError("translation_stiffness must be positive");
}

SurfaceShape restore_area(const SurfaceShape& shape, const ManifoldModel& model, const GridPtr& grid,
                          double target_area, double rel_tol) {
  SurfaceGeometry geom = embed(shape, model, grid);
  double c = std::sqrt(target_area / geom.area);
  SurfaceShape out = shape.scaled(c);
  for (int it = 0; it < 50; ++it) {
    geom = embed(out, model, grid);
    const double defect = geom.area - target_area;
    if (std::abs(defect) <= rel_tol * target_area) return out;
    // dA/dc at c is ∫ (ρ/c) g(ω, ν) H dμ since ∂_c x = (ρ/c) ω.
    double slope = 0.0;
    for (const SurfacePoint& s : geom.points) slope += s.weight * (s.x - shape.center).norm() / c * s.omega_nu * s.H;
    if (!(std::abs(slope) > 0.0)) throw NoConvergenceError("area restoration: zero area derivative");
    c -= defect / slope;
    if (!(c > 0.0)) throw NoConvergenceError("area restoration: nonpositive scale factor");
    out = shape.scaled(c);
  }
  throw NoConvergenceError("area restoration did not converge");
}

ShapeGradient shape_gradient(const SurfaceGeometry& geom, const LagrangianSpec& L) {
  const Eigen::VectorXd density = gradient_density(geom, L);
  const auto& w = geom.grid->weights();
  Eigen::VectorXd fs(geom.size()), as(geom.size());
  ShapeGradient g;
  for (int q = 0; q < geom.size(); ++q) {
    const SurfacePoint& s = geom.points[q];
    const double jac = s.weight / w[q] * s.omega_nu;
    fs[q] = jac * density[q];
    as[q] = jac * s.H;
    // Translating the center moves every point with normal speed g(e_j, ν).
    g.center_functional += s.weight * density[q] * s.nu_flat;
    g.center_area += s.weight * s.H * s.nu_flat;
  }
  g.functional = geom.grid->analyze(fs, geom.shape.l_max);
  g.area = geom.grid->analyze(as, geom.shape.l_max);
  return g;
}

CriticalSurfaceReport summarize_surface(const SurfaceGeometry& geom, const LagrangianSpec& L) {
  CriticalSurfaceReport r;
  r.shape = geom.shape;
  r.report = evaluate_functionals(geom, L);
  r.lambda = r.report.lambda;
  double a0 = 0.0, hdev = 0.0;
  for (const SurfacePoint& s : geom.points) {
    a0 += s.weight * s.A0_norm2;
    hdev = std::max(hdev, std::abs(s.H - 2.0 / geom.R));
  }
  r.A0_L2 = std::sqrt(a0);
  r.H_deviation_max = hdev;
  try {
    r.center = adapted_normal_chart(geom.model, geom).origin;
  } catch (const Error&) {
    Vec3 c = Vec3::Zero();
    for (const SurfacePoint& s : geom.points) c += s.weight * s.x;
    r.center = c / geom.area;
  }
  return r;
}

namespace {

// Packed variables: shape center followed by the radial coefficients.  The l = 1 coefficients are
// held fixed because the center already carries the translations.
Eigen::VectorXd pack(const Vec3& c, const Eigen::VectorXd& coeffs) {
  Eigen::VectorXd z(3 + coeffs.size());
  z << c, coeffs;
  return z;
}

SurfaceShape unpack(const SurfaceShape& like, const Eigen::VectorXd& z) {
  SurfaceShape s = like;
  s.center = z.head<3>();
  s.coeffs = z.tail(like.coeffs.size());
  return s;
}

struct Packed {
  Eigen::VectorXd functional, area;
};

Packed packed_gradient(const ShapeGradient& g, int l_max) {
  Packed p{pack(g.center_functional, g.functional), pack(g.center_area, g.area)};
  if (l_max >= 1)
    for (int m = -1; m <= 1; ++m) p.functional[3 + sh_index(1, m)] = p.area[3 + sh_index(1, m)] = 0.0;
  return p;
}

struct Iterate {
  SurfaceShape shape;
  SurfaceGeometry geom;
  double F = 0.0;
  Packed grad;
};

Iterate make_iterate(const SurfaceShape& shape, const ManifoldModel& model, const GridPtr& grid,
                     const LagrangianSpec& L) {
  Iterate it{shape, embed(shape, model, grid), 0.0, {}};
  it.F = functional_values(it.geom, L).H_L;
  it.grad = packed_gradient(shape_gradient(it.geom, L), shape.l_max);
  return it;
}

// Diagonal model of the Hessian at a round sphere of radius R.  Shape modes stiffen like l⁴/R²;
// translations only feel the ambient curvature, which enters at order R².
Eigen::VectorXd preconditioner(int l_max, double R, double translation_stiffness) {
  Eigen::VectorXd d(3 + sh_count(l_max));
  d.head<3>().setConstant(translation_stiffness * R * R);
  for (int l = 0; l <= l_max; ++l)
    for (int m = -l; m <= l; ++m) d[3 + sh_index(l, m)] = (1.0 + 0.25 * l * l * (l + 1.0) * (l + 1.0)) / (R * R);
  return d;
}

SurfaceShape fold_translation(const SurfaceShape& shape) {
  if (shape.l_max < 1) return shape;
  const Eigen::VectorXd& c = shape.coeffs;
  const Vec3 shift = std::sqrt(3.0 / (4.0 * M_PI)) * Vec3(c[sh_index(1, 1)], c[sh_index(1, -1)], c[sh_index(1, 0)]);
  if (shift.norm() == 0.0) return shape;
  return recenter_shape(shape, shape.center + shift);
}

}  // namespace

CriticalSurfaceReport minimize_area_constrained(const ManifoldModel& model, const LagrangianSpec& L,
                                                const OptimizerOptions& opts, const SurfaceShape& init,
                                                const GridPtr& grid, CriticalSurfaceReport* partial) {
  opts.validate();
  const double a = opts.target_area;
  const double R = std::sqrt(a / (4.0 * M_PI));
  const Eigen::VectorXd D = preconditioner(init.l_max, R, opts.translation_stiffness);
  const Eigen::VectorXd Dinv = D.cwiseInverse();

  Iterate cur = make_iterate(restore_area(fold_translation(init), model, grid, a, opts.area_restore_tol), model,
                             grid, L);
  std::vector<IterationRecord> history;
  std::deque<std::pair<Eigen::VectorXd, Eigen::VectorXd>> pairs;

  // Gradient projected so that D⁻¹(projected) is tangent to the area constraint.
  auto project = [&](const Packed& g) {
    const Eigen::VectorXd dg = Dinv.cwiseProduct(g.area);
    return Eigen::VectorXd(g.functional - (dg.dot(g.functional) / dg.dot(g.area)) * g.area);
  };
  auto grad_norm = [&](const Packed& g) {
    const Eigen::VectorXd p = g.functional - (g.area.dot(g.functional) / g.area.squaredNorm()) * g.area;
    return 2.0 * p.norm() / R;
  };
  auto record = [&](int iter, const Iterate& it, double step) {
    history.push_back({iter, it.F, std::abs(it.geom.area - a) / a, grad_norm(it.grad), step});
  };
  auto finish = [&](const Iterate& it, int iters, bool converged) {
    CriticalSurfaceReport r = summarize_surface(it.geom, L);
    r.target_area = a;
    r.iterations = iters;
    r.converged = converged;
    r.grad_norm = grad_norm(it.grad);
    r.history = history;
    return r;
  };

  record(0, cur, 0.0);
  Eigen::VectorXd pg = project(cur.grad);
  const double slack = 1e-14;
  for (int iter = 1; iter <= opts.max_iters + 1; ++iter) {
    if (history.back().grad_norm <= opts.grad_tol) return finish(cur, iter - 1, true);
    if (iter > opts.max_iters) break;

    bool accepted = false;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      const bool quasi_newton = attempt == 0 && !pairs.empty();
      if (attempt == 1 && pairs.empty()) break;
      Eigen::VectorXd d;
      if (quasi_newton) {
        Eigen::VectorXd qv = pg;
        std::vector<double> alpha(pairs.size());
        for (int i = static_cast<int>(pairs.size()) - 1; i >= 0; --i) {
          alpha[i] = pairs[i].first.dot(qv) / pairs[i].first.dot(pairs[i].second);
          qv -= alpha[i] * pairs[i].second;
        }
        const auto& last = pairs.back();
        const double gamma = last.first.dot(last.second) / last.second.dot(Dinv.cwiseProduct(last.second));
        Eigen::VectorXd r = gamma * Dinv.cwiseProduct(qv);
        for (std::size_t i = 0; i < pairs.size(); ++i) {
          const double beta = pairs[i].second.dot(r) / pairs[i].first.dot(pairs[i].second);
          r += (alpha[i] - beta) * pairs[i].first;
        }
        d = -r;
        const Eigen::VectorXd dg = Dinv.cwiseProduct(cur.grad.area);
        d -= (cur.grad.area.dot(d) / cur.grad.area.dot(dg)) * dg;
      } else {
        pairs.clear();
        d = -Dinv.cwiseProduct(pg);
      }
      if (init.l_max >= 1)
        for (int m = -1; m <= 1; ++m) d[3 + sh_index(1, m)] = 0.0;
      const double slope = cur.grad.functional.dot(d);
      if (!(slope < 0.0)) {
        pairs.clear();
        continue;
      }
      const Eigen::VectorXd z = pack(cur.shape.center, cur.shape.coeffs);
      double t = 1.0;
      for (int bt = 0; bt < opts.max_backtracks; ++bt, t *= opts.shrink) {
        try {
          const SurfaceShape trial = unpack(cur.shape, z + t * d);
          Iterate next = make_iterate(restore_area(trial, model, grid, a, opts.area_restore_tol), model, grid, L);
          if (next.F > cur.F + opts.armijo_c * t * slope + slack * std::max(1.0, std::abs(cur.F))) continue;
          const Eigen::VectorXd pg_next = project(next.grad);
          const Eigen::VectorXd s = pack(next.shape.center, next.shape.coeffs) - z;
          const Eigen::VectorXd y = pg_next - pg;
          if (opts.memory > 0 && s.dot(y) > 1e-12 * s.norm() * y.norm()) {
            pairs.emplace_back(s, y);
            if (static_cast<int>(pairs.size()) > opts.memory) pairs.pop_front();
          }
          cur = std::move(next);
          pg = pg_next;
          record(iter, cur, t);
          accepted = true;
          break;
        } catch (const ImmersionError&) {
        } catch (const DomainError&) {
        } catch (const NoConvergenceError&) {
        }
      }
      if (!accepted) pairs.clear();
    }
    if (!accepted) {
      if (partial) *partial = finish(cur, iter - 1, false);
      throw StallError("line search failed after " + std::to_string(opts.max_backtracks) + " backtracks");
    }
  }
  return finish(cur, opts.max_iters, false);
}

std::vector<CriticalSurfaceReport> area_scan(const ManifoldModel& model, const LagrangianSpec& L,
                                             const std::vector<double>& areas, const OptimizerOptions& opts,
                                             const SurfaceShape& init, const GridPtr& grid) {
  for (std::size_t i = 1; i < areas.size(); ++i)
    if (!(areas[i] < areas[i - 1])) throw DomainError("areas must be strictly decreasing");
  std::vector<CriticalSurfaceReport> out;
  SurfaceShape start = init;
  for (std::size_t i = 0; i < areas.size(); ++i) {
    OptimizerOptions o = opts;
    o.target_area = areas[i];
    if (i > 0) start = out.back().shape.scaled(std::sqrt(areas[i] / areas[i - 1]));
    try {
      out.push_back(minimize_area_constrained(model, L, o, start, grid));
      continue;
    } catch (const Error&) {
    }
    const SurfaceShape fresh = SurfaceShape::round(init.center, std::sqrt(areas[i] / (4.0 * M_PI)), init.l_max);
    try {
      out.push_back(minimize_area_constrained(model, L, o, fresh, grid));
    } catch (const Error& e) {
      CriticalSurfaceReport failed;
      failed.shape = fresh;
      failed.target_area = areas[i];
      failed.error = e.what();
      out.push_back(failed);
    }
  }
  return out;
}

}  // namespace hawking
