#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hawking/errors.hpp"
#include "hawking/spherical.hpp"

using namespace hawking;

TEST(Grid, WeightsSumToSphereArea) {
  for (int n : {4, 8, 24}) EXPECT_NEAR(build_grid(n)->weights().sum(), 4 * M_PI, 1e-13);
  EXPECT_THROW(build_grid(3), DomainError);
}

TEST(Grid, LayoutAndExactness) {
  auto g = build_grid(8);
  EXPECT_EQ(g->n_phi(), 16);
  EXPECT_EQ(g->exactness_degree(), 15);
  EXPECT_EQ(g->size(), 128);
  for (const auto& w : g->nodes()) EXPECT_NEAR(w.norm(), 1.0, 1e-15);
}

TEST(Grid, DegreeTwoHarmonicIsNormalized) {
  auto g = build_grid(8);
  // Y_21 is proportional to x z with normalization sqrt(15/4π).
  Eigen::VectorXd y(g->size());
  for (int q = 0; q < g->size(); ++q) {
    const Vec3& w = g->nodes()[q];
    y[q] = std::sqrt(15.0 / (4 * M_PI)) * w.x() * w.z();
  }
  EXPECT_NEAR(g->integrate(y.cwiseProduct(y)), 1.0, 1e-13);
  Eigen::VectorXd lib(g->size());
  for (int q = 0; q < g->size(); ++q) lib[q] = real_sh_all(2, g->nodes()[q])[sh_index(2, 1)];
  EXPECT_LT((lib.cwiseAbs() - y.cwiseAbs()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Grid, SixthDegreeMonomial) {
  auto g = build_grid(8);
  Eigen::VectorXd f(g->size());
  for (int q = 0; q < g->size(); ++q) {
    const Vec3& w = g->nodes()[q];
    f[q] = w.x() * w.x() * w.y() * w.y() * w.z() * w.z();
  }
  EXPECT_NEAR(g->integrate(f), 4 * M_PI / 105, 1e-13);
}

TEST(Grid, Orthonormality) {
  auto g = build_grid(10);
  const int L = 8;
  Eigen::MatrixXd y(g->size(), sh_count(L));
  for (int q = 0; q < g->size(); ++q) y.row(q) = real_sh_all(L, g->nodes()[q]).transpose();
  const Eigen::MatrixXd gram = y.transpose() * g->weights().asDiagonal() * y;
  EXPECT_LT((gram - Eigen::MatrixXd::Identity(sh_count(L), sh_count(L))).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Grid, AnalyzeSynthesizeRoundTrip) {
  auto g = build_grid(12);
  std::mt19937 rng(4);
  std::normal_distribution<double> n(0, 1);
  const int L = g->band();
  Eigen::VectorXd a(sh_count(L));
  for (int i = 0; i < a.size(); ++i) a[i] = n(rng);
  const Eigen::VectorXd f = g->synthesize(a, L);
  EXPECT_LT((g->analyze(f, L) - a).cwiseAbs().maxCoeff(), 1e-12);
  Eigen::VectorXd direct(g->size());
  for (int q = 0; q < g->size(); ++q) direct[q] = real_sh_all(L, g->nodes()[q]).dot(a);
  EXPECT_LT((direct - f).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Grid, ParameterDerivativesMatchFiniteDifferences) {
  auto g = build_grid(10);
  std::mt19937 rng(8);
  std::normal_distribution<double> n(0, 1);
  const int L = 6;
  Eigen::VectorXd a(sh_count(L));
  for (int i = 0; i < a.size(); ++i) a[i] = n(rng);
  auto eval = [&](double t, double p) {
    return real_sh_all(L, Vec3(std::sin(t) * std::cos(p), std::sin(t) * std::sin(p), std::cos(t))).dot(a);
  };
  const auto d = g->synthesize_with_derivatives(a, L);
  const double h = 1e-3;
  for (int q : {0, 17, 55, 130, g->size() - 1}) {
    const double t = g->theta(q), p = g->phi(q);
    auto dt = [&](double tt, double pp) {
      return (-eval(tt + 2 * h, pp) + 8 * eval(tt + h, pp) - 8 * eval(tt - h, pp) + eval(tt - 2 * h, pp)) / (12 * h);
    };
    auto dp = [&](double tt, double pp) {
      return (-eval(tt, pp + 2 * h) + 8 * eval(tt, pp + h) - 8 * eval(tt, pp - h) + eval(tt, pp - 2 * h)) / (12 * h);
    };
    EXPECT_NEAR(d.f[q], eval(t, p), 1e-12);
    EXPECT_NEAR(d.f_t[q], dt(t, p), 1e-8);
    EXPECT_NEAR(d.f_p[q], dp(t, p), 1e-8);
    EXPECT_NEAR(d.f_tt[q], (-dt(t + 2 * h, p) + 8 * dt(t + h, p) - 8 * dt(t - h, p) + dt(t - 2 * h, p)) / (12 * h), 1e-6);
    EXPECT_NEAR(d.f_tp[q], (-dp(t + 2 * h, p) + 8 * dp(t + h, p) - 8 * dp(t - h, p) + dp(t - 2 * h, p)) / (12 * h), 1e-6);
    EXPECT_NEAR(d.f_pp[q], (-dp(t, p + 2 * h) + 8 * dp(t, p + h) - 8 * dp(t, p - h) + dp(t, p - 2 * h)) / (12 * h), 1e-6);
  }
}

TEST(Grid, MismatchedSizesThrow) {
  auto g = build_grid(6);
  EXPECT_THROW(g->integrate(Eigen::VectorXd::Zero(5)), GridMismatchError);
  EXPECT_THROW(g->synthesize(Eigen::VectorXd::Zero(sh_count(7)), 7), GridMismatchError);
  EXPECT_THROW(g->synthesize(Eigen::VectorXd::Zero(3), 1), GridMismatchError);
}
