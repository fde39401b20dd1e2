#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <random>

#include "hawking/errors.hpp"
#include "hawking/moments.hpp"
#include "support.hpp"

using namespace hawking;
using namespace hawking::testing;

namespace {

// ∫_{S²} x^a y^b z^c dΩ = 2 Γ((a+1)/2) Γ((b+1)/2) Γ((c+1)/2) / Γ((a+b+c+3)/2) for even a, b, c.
double gamma_moment(const MomentKey& key) {
  int e[3] = {0, 0, 0};
  for (int a : key.alpha) ++e[a - 1];
  if (e[0] % 2 || e[1] % 2 || e[2] % 2) return 0.0;
  return 2.0 * std::tgamma((e[0] + 1) / 2.0) * std::tgamma((e[1] + 1) / 2.0) * std::tgamma((e[2] + 1) / 2.0) /
         std::tgamma((e[0] + e[1] + e[2] + 3) / 2.0);
}

ExtrinsicData ramp_k() {
  ExtrinsicData k;
  k.constant(0, 0) = 1.0;
  k.linear[0](0, 0) = 1.0;
  return k;
}

PointData random_point(std::mt19937& rng) {
  std::normal_distribution<double> n(0, 1);
  PointData p;
  Mat3 m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = n(rng);
  p.k = m + m.transpose();
  for (auto& t : p.nabla_k) {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m(i, j) = n(rng);
    t = m + m.transpose();
  }
  return p;
}

}  // namespace

TEST(Moments, ListedValues) {
  EXPECT_EQ(exact_monomial_integral(MomentKey{{1, 1}}).coefficient, Rational(4, 3));
  EXPECT_EQ(exact_monomial_integral(MomentKey{{1, 2, 3}}).coefficient, Rational(0));
  EXPECT_EQ(exact_monomial_integral(MomentKey{{1, 1, 1, 1}}).coefficient, Rational(4, 5));
  EXPECT_EQ(exact_monomial_integral(MomentKey{{1, 1, 2, 2}}).coefficient, Rational(4, 15));
  EXPECT_EQ(exact_monomial_integral(MomentKey{{1, 1, 2, 2, 3, 3}}).coefficient, Rational(4, 105));
  EXPECT_EQ(exact_monomial_integral(MomentKey{{1, 1, 1, 1, 1, 1}}).coefficient, Rational(4, 7));
  EXPECT_EQ(exact_monomial_integral(MomentKey{}).coefficient, Rational(4));
  EXPECT_EQ(exact_monomial_integral(MomentKey::parse("2, 1,2,1")).coefficient, Rational(4, 15));
}

TEST(Moments, RejectsBadKeys) {
  EXPECT_THROW(exact_monomial_integral(MomentKey{{1, 1, 1, 1, 1, 1, 1, 1}}), UnsupportedDegreeError);
  EXPECT_THROW(exact_monomial_integral(MomentKey{{1, 4}}), DomainError);
  EXPECT_THROW(MomentKey::parse("1,x"), ParseError);
}

TEST(Moments, AgreeWithGammaFormulaForEveryKey) {
  auto grid = build_grid(8);
  for (int n = 0; n <= 6; ++n) {
    std::vector<int> idx(n, 1);
    while (true) {
      const MomentKey key{idx};
      EXPECT_NEAR(exact_monomial_integral(key).value(), gamma_moment(key), 1e-14) << key.str();
      EXPECT_NEAR(quadrature_monomial_integral(key, *grid), gamma_moment(key), 1e-13) << key.str();
      int pos = n - 1;
      while (pos >= 0 && idx[pos] == 3) idx[pos--] = 1;
      if (pos < 0) break;
      ++idx[pos];
    }
  }
}

TEST(Moments, SuitePassesQuickly) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto rep = moment_suite(8);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_EQ(rep.keys, 1093);
  EXPECT_LE(rep.max_quadrature_error, 1e-12);
  EXPECT_TRUE(rep.contraction_consistent);
  EXPECT_LT(secs, 1.0);
}

TEST(Moments, CMomentsOfDiagonalK) {
  PointData p;
  p.k(0, 0) = 1.0;
  const auto kvv = NuPolynomial::quadratic(p.k);
  EXPECT_NEAR(c_moment(NuPolynomial::constant(p.tr_k() * p.tr_k()), {}), 4 * M_PI, 1e-14);
  EXPECT_NEAR(c_moment(kvv * kvv, {}), 4 * M_PI / 5, 1e-14);
  EXPECT_NEAR(c_moment(p.tr_k() * kvv, {}), 4 * M_PI / 3, 1e-14);
  EXPECT_NEAR(c_moment(kvv, {0, 0}), 4 * M_PI / 5, 1e-14);
  EXPECT_THROW(c_moment(kvv * kvv, {0, 1, 2}), UnsupportedDegreeError);
}

TEST(Moments, RampVectors) {
  auto model = ManifoldModel::flat(1.0, ramp_k());
  auto tr2 = concentration_vectors(LagrangianSpec::family(1, 0, 0), model, Vec3::Zero());
  EXPECT_NEAR((tr2.W - Vec3(12, 0, 0)).norm(), 0.0, 1e-12);
  // W[P²] = (4/5)·∂₁(4(1 + x¹)²) = 32/5, so −¼P² gives −8/5.
  auto h = concentration_vectors(LagrangianSpec::hawking(), model, Vec3::Zero());
  EXPECT_NEAR((h.W - Vec3(-1.6, 0, 0)).norm(), 0.0, 1e-12);
  EXPECT_NEAR((h.W_quadrature - Vec3(-1.6, 0, 0)).norm(), 0.0, 1e-12);
  EXPECT_NEAR(h.V.norm(), 0.0, 1e-14);
}

TEST(Moments, WIsScaledGradientOfCByFiniteDifferences) {
  std::mt19937 rng(23);
  auto model = ManifoldModel::flat(2.0, random_extrinsic(rng));
  const auto L = LagrangianSpec::family(0.3, -1.1, 0.7, 0.2);
  const Vec3 a(0.1, -0.2, 0.05);
  const auto cv = concentration_vectors(L, model, a);
  const double h = 1e-3;
  for (int j = 0; j < 3; ++j) {
    auto c_at = [&](double t) {
      Vec3 x = a;
      x[j] += t;
      return concentration_vectors(L, model, x).c_L;
    };
    const double fd = (-c_at(2 * h) + 8 * c_at(h) - 8 * c_at(-h) + c_at(-2 * h)) / (12 * h);
    EXPECT_NEAR(cv.W[j], 3.0 / (2 * M_PI) * fd, 1e-9 * (1 + std::abs(cv.W[j])));
  }
}

TEST(Moments, RotationEquivariance) {
  std::mt19937 rng(29);
  const auto L = LagrangianSpec::family(0.4, 0.9, -0.6);
  for (int draw = 0; draw < 5; ++draw) {
    const PointData p = random_point(rng);
    const Mat3 R = random_rotation(rng);
    PointData q;
    q.k = R * p.k * R.transpose();
    q.nabla_k = rotate_tensor3(p.nabla_k, R);
    const auto a = concentration_vectors(L, p);
    const auto b = concentration_vectors(L, q);
    EXPECT_NEAR((b.W - R * a.W).norm(), 0.0, 1e-10 * (1 + a.W.norm()));
    EXPECT_NEAR(b.c_L, a.c_L, 1e-10 * (1 + std::abs(a.c_L)));
  }
}

TEST(Moments, IdentitySuiteHolds) {
  std::mt19937 rng(31);
  auto model = ManifoldModel::perturbed_flat(random_quadratic(rng, 0.3), 1.0, random_extrinsic(rng));
  const auto t0 = std::chrono::steady_clock::now();
  const auto rows = identity_suite(model, Vec3(0.05, 0.02, -0.03), 100, 7);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  ASSERT_EQ(rows.size(), 9u);
  for (const auto& r : rows) {
    EXPECT_TRUE(r.pass()) << r.name << " exact " << r.exact_error << " quad " << r.quadrature_error;
  }
  EXPECT_LT(secs, 10.0);
}

TEST(Moments, RejectsExtensionTerms) {
  LagrangianSpec L = LagrangianSpec::hawking();
  L.extra = [](const AmbientEval&, const Vec3&) { return LagrangianJet{}; };
  EXPECT_THROW(concentration_vectors(L, PointData{}), DomainError);
}
