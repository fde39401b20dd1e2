#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hawking/errors.hpp"
#include "hawking/optimizer.hpp"
#include "hawking/variation.hpp"
#include "support.hpp"

using namespace hawking;
using namespace hawking::testing;

namespace {

ExtrinsicData ramp_k() {
  ExtrinsicData k;
  k.constant(0, 0) = 1.0;
  k.linear[0](0, 0) = 1.0;
  return k;
}

// Closed-form potential along the x¹ axis for conformal_flat(a, b) with K = diag(1 + x¹, 0, 0):
// trK = e^{−2u}(1 + x), |K|² = e^{−4u}(1 + x)².
double axis_potential(double a, double b, double x) {
  const double s = x * x, u = a * s + b * s * s;
  const double sc = -std::exp(-2 * u) * (24 * a + 80 * b * s + 2 * std::pow(2 * a + 4 * b * s, 2) * s);
  return sc + 0.8 * std::exp(-4 * u) * (1 + x) * (1 + x);
}

double golden_max(double a, double b, double lo, double hi) {
  const double r = (std::sqrt(5.0) - 1) / 2;
  for (int i = 0; i < 200; ++i) {
    const double m1 = hi - r * (hi - lo), m2 = lo + r * (hi - lo);
    if (axis_potential(a, b, m1) > axis_potential(a, b, m2)) hi = m2;
    else lo = m1;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST(Optimizer, GradientMatchesFiniteDifferences) {
  std::mt19937 rng(3);
  auto grid = build_grid(24);
  auto model = ManifoldModel::conformal_flat(-0.125, 0.1, 0.5, ramp_k());
  const double R = 0.05;
  auto shape = random_shape(rng, Vec3(0.05, 0.01, 0), R, 8, 0.02, 6);
  const auto L = LagrangianSpec::hawking();
  auto g = shape_gradient(embed(shape, model, grid), L);
  const double h = 1e-3 * R;
  auto F = [&](auto perturb) { return functional_values(embed(perturb(), model, grid), L).H_L; };
  for (int idx : {0, 2, 5, 11, 30, 80}) {
    auto at = [&](double t) {
      return F([&] {
        SurfaceShape s = shape;
        s.coeffs[idx] += t;
        return s;
      });
    };
    const double fd = (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
    EXPECT_NEAR(g.functional[idx], fd, 1e-6 * std::abs(fd) + 1e-9) << idx;
  }
  for (int j = 0; j < 3; ++j) {
    auto at = [&](double t) {
      return F([&] {
        SurfaceShape s = shape;
        s.center[j] += t;
        return s;
      });
    };
    const double fd = (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
    EXPECT_NEAR(g.center_functional[j], fd, 1e-6 * std::abs(fd) + 1e-9) << j;
  }
}

TEST(Optimizer, DensityIntegratesToFirstVariation) {
  std::mt19937 rng(5);
  auto grid = build_grid(48);
  auto model = ManifoldModel::perturbed_flat(random_quadratic(rng, 0.3), 1.0, random_extrinsic(rng));
  auto geom = embed(random_shape(rng, Vec3(0.02, 0, 0.01), 0.3, 8, 0.05, 6), model, grid);
  const auto L = LagrangianSpec::family(0.3, -0.7, 0.4, 0.1);
  Eigen::VectorXd c(sh_count(5));
  std::normal_distribution<double> n(0, 1);
  for (int i = 0; i < c.size(); ++i) c[i] = n(rng);
  const Eigen::VectorXd f = grid->synthesize(c, 5);
  const Eigen::VectorXd density = gradient_density(geom, L);
  const double lhs = geom.integrate(f.cwiseProduct(density));
  const double rhs = first_variation(geom, f, L).dHL();
  EXPECT_NEAR(lhs, rhs, 1e-10 * (1 + std::abs(rhs)));
}

TEST(Optimizer, RestoreAreaHitsTarget) {
  std::mt19937 rng(7);
  auto grid = build_grid(16);
  auto model = ManifoldModel::round_sphere(1.0, 1.0);
  auto shape = random_shape(rng, Vec3(0.05, 0, 0), 0.2, 6, 0.05, 6);
  auto fixed = restore_area(shape, model, grid, 0.3);
  EXPECT_NEAR(embed(fixed, model, grid).area, 0.3, 1e-12 * 0.3);
}

TEST(Optimizer, FlatWillmoreRecoversRoundSphere) {
  std::mt19937 rng(11);
  auto grid = build_grid(24);
  OptimizerOptions opts;
  opts.target_area = 4 * M_PI;
  for (int draw = 0; draw < 2; ++draw) {
    auto init = random_shape(rng, Vec3::Zero(), 1.0, 8, 0.05, 6);
    auto r = minimize_area_constrained(ManifoldModel::flat(3.0), LagrangianSpec::zero(), opts, init, grid);
    EXPECT_TRUE(r.converged);
    EXPECT_LE(r.A0_L2, 1e-6);
    EXPECT_NEAR(r.report.H_L, 4 * M_PI, 1e-5);
    EXPECT_LE(r.report.el_residual_L2, 10 * opts.grad_tol);
    EXPECT_NEAR(r.report.area, opts.target_area, 1e-10 * opts.target_area);
    for (std::size_t i = 1; i < r.history.size(); ++i) {
      EXPECT_LE(r.history[i].H_L, r.history[i - 1].H_L + 1e-12 * std::abs(r.history[i - 1].H_L));
      EXPECT_LE(r.history[i].area_defect, 1e-10);
    }
  }
}

TEST(Optimizer, RoundThreeSphereMinimizerIsGeodesicSphere) {
  std::mt19937 rng(13);
  auto grid = build_grid(24);
  const double r = 0.3;
  OptimizerOptions opts;
  opts.target_area = 4 * M_PI * std::sin(r) * std::sin(r);
  auto init = random_shape(rng, Vec3(0.02, 0, 0), 2 * std::tan(r / 2), 8, 0.03, 6);
  auto rep = minimize_area_constrained(ManifoldModel::round_sphere(1.0, 1.0), LagrangianSpec::zero(), opts, init,
                                       grid);
  EXPECT_TRUE(rep.converged);
  EXPECT_NEAR(rep.report.W, 4 * M_PI * std::cos(r) * std::cos(r), 1e-8);
  EXPECT_NEAR(rep.lambda, -1.0, 1e-6);
}

TEST(Optimizer, CenterMovesToPotentialMaximum) {
  const double a = -0.125, b = 0.1;
  auto model = ManifoldModel::conformal_flat(a, b, 0.5, ramp_k());
  OptimizerOptions opts;
  opts.target_area = 5e-3;
  auto rep = minimize_area_constrained(model, LagrangianSpec::hawking(), opts,
                                       SurfaceShape::round(Vec3::Zero(), std::sqrt(5e-3 / (4 * M_PI)), 12),
                                       build_grid(32));
  EXPECT_TRUE(rep.converged);
  const double peak = golden_max(a, b, 0.0, 0.4);
  EXPECT_NEAR(rep.center[0], peak, 1e-4);
  EXPECT_NEAR(rep.center[1], 0.0, 1e-8);
  EXPECT_NEAR(rep.center[2], 0.0, 1e-8);
  // H_L − 4π ≈ −(2π/3) R² Φ at the peak.
  EXPECT_NEAR((rep.report.H_L - 4 * M_PI) / opts.target_area, -axis_potential(a, b, peak) / 6, 2e-3);
  EXPECT_LE(rep.report.el_residual_L2, 10 * opts.grad_tol);
}

TEST(Optimizer, RotationEquivarianceInFlatSpace) {
  std::mt19937 rng(17);
  auto grid = build_grid(24);
  ExtrinsicData k = random_extrinsic(rng);
  for (auto& m : k.linear) m.setZero();
  auto model = ManifoldModel::flat(2.0, k);
  OptimizerOptions opts;
  opts.target_area = 4 * M_PI * 0.04;
  auto init = random_shape(rng, Vec3::Zero(), 0.2, 8, 0.03, 6);
  const Mat3 rot = random_rotation(rng);
  auto a = minimize_area_constrained(model, LagrangianSpec::hawking(), opts, init, grid);
  auto b = minimize_area_constrained(rotate_model(model, rot), LagrangianSpec::hawking(), opts,
                                     rotate_shape(init, rot), grid);
  EXPECT_TRUE(a.converged);
  EXPECT_TRUE(b.converged);
  EXPECT_NEAR(a.report.H_L, b.report.H_L, 1e-9);
}

TEST(Optimizer, AreaScanInFlatSpace) {
  auto grid = build_grid(16);
  OptimizerOptions opts;
  std::mt19937 rng(19);
  auto scan = area_scan(ManifoldModel::flat(2.0), LagrangianSpec::zero(), {1.0, 0.5, 0.25}, opts,
                        random_shape(rng, Vec3::Zero(), 0.3, 6, 0.03, 4), grid);
  ASSERT_EQ(scan.size(), 3u);
  for (const auto& r : scan) {
    EXPECT_TRUE(r.error.empty());
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.report.H_L, 4 * M_PI, 1e-8);
    EXPECT_NEAR(r.report.area, r.target_area, 1e-10 * r.target_area);
  }
  EXPECT_THROW(area_scan(ManifoldModel::flat(2.0), LagrangianSpec::zero(), {0.5, 1.0}, opts,
                         SurfaceShape::round(Vec3::Zero(), 0.3, 4), grid),
               DomainError);
}

TEST(Optimizer, RejectsInvalidOptions) {
  OptimizerOptions opts;
  opts.grad_tol = 0.0;
  EXPECT_THROW(opts.validate(), DomainError);
  opts = OptimizerOptions{};
  opts.shrink = 1.5;
  EXPECT_THROW(opts.validate(), DomainError);
}
