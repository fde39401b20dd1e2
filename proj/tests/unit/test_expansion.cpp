#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hawking/errors.hpp"
#include "hawking/expansion.hpp"
#include "hawking/moments.hpp"
#include "support.hpp"

using namespace hawking;
using namespace hawking::testing;

namespace {

ExtrinsicData diag_k() {
  ExtrinsicData k;
  k.constant(0, 0) = 1.0;
  return k;
}

ExtrinsicData ramp_k() {
  ExtrinsicData k = diag_k();
  k.linear[0](0, 0) = 1.0;
  return k;
}

// K⁰ = diag(1,0,0), K_12 = x³, K_13 = x², K_23 = x¹: Φ = 4/5 + (2/5)|x|² on a flat metric.
ExtrinsicData bowl_k() {
  ExtrinsicData k = diag_k();
  auto set = [&](int i, int j, int c) {
    k.linear[c](i, j) = 1.0;
    k.linear[c](j, i) = 1.0;
  };
  set(0, 1, 2);
  set(0, 2, 1);
  set(1, 2, 0);
  return k;
}

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

TEST(Expansion, GeodesicSphereAreas) {
  auto grid = build_grid(16);
  auto flat = embed(geodesic_sphere_shape(ManifoldModel::flat(1.0), Vec3::Zero(), 0.1), ManifoldModel::flat(1.0),
                    grid);
  EXPECT_NEAR(flat.area, 4 * M_PI * 0.01, 1e-14);
  auto s3 = ManifoldModel::round_sphere(1.0, 2.0);
  EXPECT_NEAR(embed(geodesic_sphere_shape(s3, Vec3::Zero(), 0.2), s3, grid).area,
              4 * M_PI * std::sin(0.2) * std::sin(0.2), 1e-8);
  EXPECT_THROW(geodesic_sphere_shape(ManifoldModel::flat(1.0), Vec3(0.95, 0, 0), 0.1), DomainError);
}

TEST(Expansion, PerturbedFlatAreaDefectIsFourthOrder) {
  std::mt19937 rng(2);
  auto model = ManifoldModel::perturbed_flat(random_quadratic(rng, 0.3), 0.5);
  auto grid = build_grid(16);
  auto defect = [&](double r) {
    return (embed(geodesic_sphere_shape(model, Vec3::Zero(), r), model, grid).area - 4 * M_PI * r * r) /
           std::pow(r, 4);
  };
  const double a = defect(0.02), b = defect(0.01);
  EXPECT_NEAR(a, b, 1e-3 * std::abs(b) + 1e-9);
}

TEST(Expansion, FitRecoversSyntheticPolynomial) {
  std::vector<double> R = default_radii(), v;
  for (double r : R) v.push_back(4 * M_PI - 2 * r * r);
  auto fit = fit_expansion(R, v, {0, 2, 3});
  EXPECT_NEAR(fit.coefficient(0), 4 * M_PI, 1e-10);
  EXPECT_NEAR(fit.coefficient(2), -2.0, 1e-10);
  EXPECT_GT(fit.condition, 1.0);
  EXPECT_THROW(fit.coefficient(5), FitError);
  EXPECT_THROW(fit_expansion({0.1, 0.1, 0.1, 0.1, 0.1}, {1, 1, 1, 1, 1}, {0, 2, 3}), FitError);
  EXPECT_THROW(fit_expansion({0.1, 0.2, 0.3, 0.4}, {1, 1, 1, 1}, {0, 2, 3}), FitError);
}

TEST(Expansion, FlatHawkingOracle) {
  auto model = ManifoldModel::flat(1.0, diag_k());
  auto grid = build_grid(24);
  for (double R : {0.05, 0.1, 0.2}) {
    auto geom = embed(geodesic_sphere_shape(model, Vec3::Zero(), R), model, grid);
    EXPECT_NEAR(evaluate_functionals(geom, LagrangianSpec::hawking()).E, R * R * R / 15, 1e-9 * R * R * R);
  }
  auto rep = expansion_check(model, Vec3::Zero(), default_radii(), LagrangianSpec::hawking());
  EXPECT_NEAR(rep.E_fit.coefficient(3), 1.0 / 15, 1e-8);
  EXPECT_NEAR(rep.predicted_E3, 1.0 / 15, 1e-15);
  EXPECT_NEAR(rep.H0, 4 * M_PI, 1e-6);
  EXPECT_NEAR(rep.H_fit.coefficient(2), -8 * M_PI / 15, 1e-6);
  EXPECT_TRUE(rep.pass);
}

TEST(Expansion, RoundThreeSphereOracle) {
  auto model = ManifoldModel::round_sphere(1.0, 2.0);
  auto grid = build_grid(24);
  for (double r : {0.05, 0.1, 0.2}) {
    auto geom = embed(geodesic_sphere_shape(model, Vec3::Zero(), r), model, grid);
    EXPECT_NEAR(evaluate_functionals(geom, LagrangianSpec::hawking()).E, std::pow(std::sin(r), 3) / 2, 1e-8);
  }
  auto rep = expansion_check(model, Vec3::Zero(), default_radii(), LagrangianSpec::hawking());
  EXPECT_NEAR(rep.E_fit.coefficient(3), 0.5, 1e-6);
  EXPECT_NEAR(rep.predicted_E3, 0.5, 1e-12);
  EXPECT_TRUE(rep.pass);
}

TEST(Expansion, PerturbedFlatHawkingCoefficients) {
  std::mt19937 rng(1);
  auto model = ManifoldModel::perturbed_flat(random_quadratic(rng, 0.3), 0.5, random_extrinsic(rng));
  const auto L = LagrangianSpec::hawking();
  // c(L, 0) by exact moments, independent of the closed form used for the prediction.
  const double c_exact = concentration_vectors(L, model, Vec3::Zero()).c_L;
  auto rep = expansion_check(model, Vec3::Zero(), {0.02, 0.014, 0.01, 0.007, 0.005, 0.0035}, L);
  EXPECT_NEAR(rep.c_L, c_exact, 1e-12 * (1 + std::abs(c_exact)));
  const double predicted = -(2 * M_PI / 3) * rep.invariants.scalar + c_exact;
  EXPECT_NEAR(rep.H_fit.coefficient(2) / predicted, 1.0, 0.02);
  EXPECT_NEAR(rep.H0, 4 * M_PI, 1e-6);
  EXPECT_NEAR(rep.E3_ratio, 1.0, 0.02);
  EXPECT_LE(rep.max_roundness_constant, 1.0);
}

TEST(Expansion, ClosedFormCMatchesExactMoments) {
  std::mt19937 rng(4);
  auto model = ManifoldModel::flat(2.0, random_extrinsic(rng));
  const Vec3 a(0.2, -0.1, 0.3);
  const auto L = LagrangianSpec::family(0.7, -0.4, 1.3, 0.25);
  EXPECT_NEAR(c_closed_form(L, point_invariants(model, a)), concentration_vectors(L, model, a).c_L, 1e-12);
}

TEST(Expansion, PotentialGradientMatchesFiniteDifferences) {
  auto model = ManifoldModel::conformal_flat(-0.125, 0.1, 0.5, ramp_k());
  const Vec3 x(0.07, -0.03, 0.05);
  Vec3 g, r;
  concentration_potential(model, x, LagrangianSpec::hawking(), &g);
  energy_density16pi(model, x, &r);
  const double h = 1e-4;
  for (int c = 0; c < 3; ++c) {
    Vec3 xp = x, xm = x;
    xp[c] += h;
    xm[c] -= h;
    const double fd = (concentration_potential(model, xp, LagrangianSpec::hawking()) -
                       concentration_potential(model, xm, LagrangianSpec::hawking())) /
                      (2 * h);
    const double fr = (energy_density16pi(model, xp) - energy_density16pi(model, xm)) / (2 * h);
    EXPECT_NEAR(g[c], fd, 1e-6);
    EXPECT_NEAR(r[c], fr, 1e-6);
  }
  EXPECT_NEAR(concentration_potential(model, Vec3::Zero(), LagrangianSpec::hawking()), 3.0 + 0.8, 1e-12);
}

TEST(Expansion, FlatWithoutKIsDegenerate) {
  auto field = concentration_field(ManifoldModel::flat(1.0), FieldGridSpec{Vec3::Zero(), 0.2, 7});
  EXPECT_TRUE(field.degenerate);
  EXPECT_TRUE(field.phi_critical.empty());
}

TEST(Expansion, ConstructedFieldHasCriticalPointAtOrigin) {
  auto field = concentration_field(ManifoldModel::flat(1.0, bowl_k()), FieldGridSpec{Vec3(0.01, -0.02, 0.015), 0.2, 9});
  ASSERT_EQ(field.phi_critical.size(), 1u);
  EXPECT_NEAR(field.phi_critical[0].x.norm(), 0.0, 1e-10);
  EXPECT_LE(field.phi_critical[0].gradient.norm(), 1e-8);
  EXPECT_EQ(field.phi_critical[0].kind, "minimum");
  EXPECT_NEAR(field.phi_critical[0].value, 0.8, 1e-12);
  for (double e : {0, 1, 2}) EXPECT_NEAR(field.phi_critical[0].hessian_eigenvalues[e], 0.8, 1e-6);
}

TEST(Expansion, PotentialAndEnergyDensityCriticalPointsDiffer) {
  const double a = -0.125, b = 0.1;
  auto model = ManifoldModel::conformal_flat(a, b, 0.5, ramp_k());
  auto field = concentration_field(model, FieldGridSpec{Vec3::Zero(), 0.25, 11});
  const double peak = golden_max(a, b, 0.0, 0.4);
  bool found_max = false;
  for (const auto& cp : field.phi_critical)
    if (cp.kind == "maximum") {
      found_max = true;
      EXPECT_NEAR((cp.x - Vec3(peak, 0, 0)).norm(), 0.0, 1e-7);
    }
  EXPECT_TRUE(found_max);
  // 16πρ = Sc on this model; its maximum is the origin.
  bool rho_origin = false;
  for (const auto& cp : field.rho_critical)
    if (cp.x.norm() < 1e-8 && cp.kind == "maximum") rho_origin = true;
  EXPECT_TRUE(rho_origin);
  EXPECT_FALSE(field.critical_points_coincide);
  EXPECT_GT(field.critical_separation, 0.1);
}

TEST(Expansion, ConstantKGivesDegenerateExperiment) {
  ExtrinsicData k;
  k.constant = Vec3(1.0, 0.5, -0.3).asDiagonal();
  auto exp = concentration_experiment(ManifoldModel::flat(2.0, k), LagrangianSpec::hawking(), {0.5, 0.25},
                                      Vec3(0.1, 0, 0), FieldGridSpec{Vec3::Zero(), 0.3, 5}, {}, 6, 16);
  EXPECT_TRUE(exp.degenerate);
  EXPECT_FALSE(exp.has_target);
  ASSERT_EQ(exp.rows.size(), 2u);
  for (const auto& row : exp.rows) {
    EXPECT_TRUE(row.converged);
    EXPECT_NEAR((row.center - Vec3(0.1, 0, 0)).norm(), 0.0, 1e-6);
  }
}

TEST(Expansion, RejectsBadInputs) {
  auto model = ManifoldModel::flat(1.0);
  EXPECT_THROW(expansion_check(model, Vec3::Zero(), {0.01, 0.02}, LagrangianSpec::zero()), DomainError);
  EXPECT_THROW(concentration_field(model, FieldGridSpec{Vec3::Zero(), 0.0, 5}), DomainError);
}
