#include "hawking/ambient.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "hawking/errors.hpp"

namespace hawking {

std::string to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::Flat: return "flat";
    case MetricKind::RoundSphere: return "round-3-sphere";
    case MetricKind::Schwarzschild: return "schwarzschild-slice";
    case MetricKind::PerturbedFlat: return "perturbed-flat";
    case MetricKind::ConformalFlat: return "conformally-flat";
    case MetricKind::User: return "user";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// ExtrinsicData

namespace {

constexpr std::array<std::pair<int, int>, 6> kPairs{{{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}}};

}  // namespace

Mat3 ExtrinsicData::symmetric_from_six(const std::array<double, 6>& v) {
  Mat3 m;
  for (std::size_t p = 0; p < kPairs.size(); ++p) {
    auto [i, j] = kPairs[p];
    m(i, j) = v[p];
    m(j, i) = v[p];
  }
  return m;
}

std::array<double, 6> ExtrinsicData::six_from_symmetric(const Mat3& m) {
  std::array<double, 6> v{};
  for (std::size_t p = 0; p < kPairs.size(); ++p) v[p] = m(kPairs[p].first, kPairs[p].second);
  return v;
}

ExtrinsicData ExtrinsicData::from_components(const std::array<double, 6>& k0, const std::array<double, 18>& k1) {
  ExtrinsicData data;
  data.constant = symmetric_from_six(k0);
  for (std::size_t p = 0; p < kPairs.size(); ++p) {
    auto [i, j] = kPairs[p];
    for (int c = 0; c < 3; ++c) {
      data.linear[c](i, j) = k1[3 * p + c];
      data.linear[c](j, i) = k1[3 * p + c];
    }
  }
  return data;
}

std::array<double, 18> ExtrinsicData::linear_components() const {
  std::array<double, 18> out{};
  for (std::size_t p = 0; p < kPairs.size(); ++p)
    for (int c = 0; c < 3; ++c) out[3 * p + c] = linear[c](kPairs[p].first, kPairs[p].second);
  return out;
}

bool ExtrinsicData::is_zero() const {
  if (!constant.isZero(0.0)) return false;
  for (const auto& m : linear)
    if (!m.isZero(0.0)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// ManifoldModel construction

ManifoldModel ManifoldModel::flat(double chart_radius, ExtrinsicData k) {
  ManifoldModel m;
  m.kind_ = MetricKind::Flat;
  m.label_ = "flat";
  m.chart_radius_ = chart_radius;
  m.extrinsic_ = std::move(k);
  m.validate();
  return m;
}

ManifoldModel ManifoldModel::round_sphere(double curvature, double chart_radius, ExtrinsicData k) {
  ManifoldModel m;
  m.kind_ = MetricKind::RoundSphere;
  m.label_ = "round-3-sphere";
  m.curvature_ = curvature;
  m.chart_radius_ = chart_radius;
  m.extrinsic_ = std::move(k);
  m.validate();
  return m;
}

ManifoldModel ManifoldModel::schwarzschild(double mass, const Vec3& chart_center, double chart_radius,
                                           ExtrinsicData k) {
  ManifoldModel m;
  m.kind_ = MetricKind::Schwarzschild;
  m.label_ = "schwarzschild-slice";
  m.mass_ = mass;
  m.chart_center_ = chart_center;
  m.chart_radius_ = chart_radius;
  m.extrinsic_ = std::move(k);
  m.validate();
  return m;
}

ManifoldModel ManifoldModel::perturbed_flat(const Tensor4& q, double chart_radius, ExtrinsicData k) {
  ManifoldModel m;
  m.kind_ = MetricKind::PerturbedFlat;
  m.label_ = "perturbed-flat";
  m.chart_radius_ = chart_radius;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
          m.quadratic_[i][j](a, b) =
              0.25 * (q[i][j](a, b) + q[j][i](a, b) + q[i][j](b, a) + q[j][i](b, a));
  m.extrinsic_ = std::move(k);
  m.validate();
  return m;
}

ManifoldModel ManifoldModel::conformal_flat(double a, double b, double chart_radius, ExtrinsicData k) {
  ManifoldModel m;
  m.kind_ = MetricKind::ConformalFlat;
  m.label_ = "conformally-flat";
  m.conformal_ = Vec2(a, b);
  m.chart_radius_ = chart_radius;
  m.extrinsic_ = std::move(k);
  m.validate();
  return m;
}

ManifoldModel ManifoldModel::user(UserMetric metric, double chart_radius, const Vec3& chart_center,
                                  ExtrinsicData k, std::string label) {
  ManifoldModel m;
  m.kind_ = MetricKind::User;
  m.label_ = std::move(label);
  m.user_metric_ = std::move(metric);
  m.chart_radius_ = chart_radius;
  m.chart_center_ = chart_center;
  m.extrinsic_ = std::move(k);
  m.validate();
  return m;
}

ManifoldModel ManifoldModel::with_extrinsic(ExtrinsicData k) const {
  ManifoldModel m = *this;
  m.extrinsic_ = std::move(k);
  m.validate();
  return m;
}

namespace {

bool is_symmetric(const Mat3& m, double tol) { return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol; }

/// Deterministic sample set: the center and a Fibonacci sphere on several shells.
std::vector<Vec3> chart_samples(const Vec3& center, double radius) {
  std::vector<Vec3> pts{center};
  constexpr int kDirections = 48;
  const double golden = M_PI * (3.0 - std::sqrt(5.0));
  for (double shell : {0.3, 0.6, 0.9, 0.99}) {
    for (int n = 0; n < kDirections; ++n) {
      const double z = 1.0 - 2.0 * (n + 0.5) / kDirections;
      const double r = std::sqrt(1.0 - z * z);
      const double phi = golden * n;
      pts.push_back(center + shell * radius * Vec3(r * std::cos(phi), r * std::sin(phi), z));
    }
  }
  return pts;
}

}  // namespace

void ManifoldModel::validate() const {
  if (!(chart_radius_ > 0.0) || !std::isfinite(chart_radius_))
    throw DomainError("chart_radius must be positive and finite");
  if (!is_symmetric(extrinsic_.constant, 1e-14)) throw DomainError("K0 must be symmetric");
  for (const auto& m : extrinsic_.linear)
    if (!is_symmetric(m, 1e-14)) throw DomainError("K1 must be symmetric in its first two indices");

  switch (kind_) {
    case MetricKind::RoundSphere:
      if (!(curvature_ > 0.0)) throw DomainError("round-3-sphere curvature must be positive");
      break;
    case MetricKind::Schwarzschild:
      if (!(mass_ > 0.0)) throw DomainError("schwarzschild mass must be positive");
      if (chart_center_.norm() - chart_radius_ <= 0.5 * mass_)
        throw DomainError("schwarzschild chart ball must stay outside |x| <= m/2");
      break;
    case MetricKind::ConformalFlat:
      if (!conformal_.allFinite()) throw DomainError("conformal coefficients must be finite");
      break;
    case MetricKind::User:
      if (!user_metric_) throw DomainError("user metric callable is empty");
      break;
    default: break;
  }

  for (const Vec3& x : chart_samples(chart_center_, chart_radius_)) {
    const Mat3 g = metric(x);
    if (!g.allFinite() || !is_symmetric(g, 1e-12 * (1.0 + g.norm())))
      throw DomainError("metric is not symmetric at a sampled chart point");
    Eigen::SelfAdjointEigenSolver<Mat3> es(g, Eigen::EigenvaluesOnly);
    if (!(es.eigenvalues().minCoeff() > 0.0))
      throw DomainError("metric is not positive definite at a sampled chart point");
  }
}

bool ManifoldModel::contains(const Vec3& x) const { return (x - chart_center_).norm() < chart_radius_; }

void ManifoldModel::require_in_chart(const Vec3& x) const {
  if (!x.allFinite() || !contains(x)) {
    std::ostringstream os;
    os << "point (" << x.transpose() << ") is outside the chart ball of radius " << chart_radius_;
    throw DomainError(os.str());
  }
}

// ---------------------------------------------------------------------------
// Metric jets

Mat3 ManifoldModel::metric(const Vec3& x) const {
  switch (kind_) {
    case MetricKind::Flat: return Mat3::Identity();
    case MetricKind::User: return user_metric_(x);
    default: return jet(x, 0).g;
  }
}

MetricJet ManifoldModel::jet(const Vec3& x, int order) const {
  switch (kind_) {
    case MetricKind::Flat: {
      MetricJet j;
      j.order = order;
      return j;
    }
    case MetricKind::RoundSphere:
    case MetricKind::Schwarzschild:
    case MetricKind::ConformalFlat: return radial_conformal_jet(x, order);
    case MetricKind::PerturbedFlat: return perturbed_flat_jet(x, order);
    case MetricKind::User: return finite_difference_jet(x, order);
  }
  return {};
}

// g = ψ(u) δ with u = |x|².  Chain rule through u gives
//   ∂_a ψ = 2ψ' x_a,  ∂_a∂_b ψ = 4ψ'' x_a x_b + 2ψ' δ_ab,
//   ∂_a∂_b∂_c ψ = 8ψ''' x_a x_b x_c + 4ψ''(δ_ab x_c + δ_ac x_b + δ_bc x_a).
MetricJet ManifoldModel::radial_conformal_jet(const Vec3& x, int order) const {
  const double u = x.squaredNorm();
  double psi = 1.0, d1 = 0.0, d2 = 0.0, d3 = 0.0;
  if (kind_ == MetricKind::RoundSphere) {
    const double q = 0.25 * curvature_;
    const double s = 1.0 + q * u;
    psi = 1.0 / (s * s);
    d1 = -2.0 * q / (s * s * s);
    d2 = 6.0 * q * q / (s * s * s * s);
    d3 = -24.0 * q * q * q / (s * s * s * s * s);
  } else if (kind_ == MetricKind::ConformalFlat) {
    // ψ = exp(2(a u + b u²)), w = ψ'/ψ = 2(a + 2bu), w' = 4b.
    const double a = conformal_[0], b = conformal_[1];
    const double w = 2.0 * (a + 2.0 * b * u);
    const double dw = 4.0 * b;
    psi = std::exp(2.0 * (a * u + b * u * u));
    d1 = psi * w;
    d2 = psi * (w * w + dw);
    d3 = psi * (w * w * w + 3.0 * w * dw);
  } else {
    if (u <= 0.0) throw DomainError("schwarzschild metric is singular at the origin");
    const double r = std::sqrt(u);
    const double phi = 1.0 + 0.5 * mass_ / r;
    const double p1 = -0.25 * mass_ / (u * r);
    const double p2 = 0.375 * mass_ / (u * u * r);
    const double p3 = -0.9375 * mass_ / (u * u * u * r);
    psi = phi * phi * phi * phi;
    d1 = 4.0 * phi * phi * phi * p1;
    d2 = 12.0 * phi * phi * p1 * p1 + 4.0 * phi * phi * phi * p2;
    d3 = 24.0 * phi * p1 * p1 * p1 + 36.0 * phi * phi * p1 * p2 + 4.0 * phi * phi * phi * p3;
  }

  MetricJet j;
  j.order = order;
  j.g = psi * Mat3::Identity();
  if (order >= 1)
    for (int a = 0; a < 3; ++a) j.dg[a] = (2.0 * d1 * x[a]) * Mat3::Identity();
  if (order >= 2)
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        j.d2g[a][b] = (4.0 * d2 * x[a] * x[b] + (a == b ? 2.0 * d1 : 0.0)) * Mat3::Identity();
  if (order >= 3)
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        for (int c = 0; c < 3; ++c) {
          double v = 8.0 * d3 * x[a] * x[b] * x[c];
          v += 4.0 * d2 * ((a == b ? x[c] : 0.0) + (a == c ? x[b] : 0.0) + (b == c ? x[a] : 0.0));
          j.d3g[a][b][c] = v * Mat3::Identity();
        }
  return j;
}

MetricJet ManifoldModel::perturbed_flat_jet(const Vec3& x, int order) const {
  MetricJet j;
  j.order = order;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) j.g(i, k) += x.dot(quadratic_[i][k] * x);
  if (order >= 1)
    for (int a = 0; a < 3; ++a)
      for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) j.dg[a](i, k) = 2.0 * quadratic_[i][k].row(a).dot(x);
  if (order >= 2)
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        for (int i = 0; i < 3; ++i)
          for (int k = 0; k < 3; ++k) j.d2g[a][b](i, k) = 2.0 * quadratic_[i][k](a, b);
  return j;
}

// Nested 4th-order central differences.  Only sorted index tuples are computed.
MetricJet ManifoldModel::finite_difference_jet(const Vec3& x, int order) const {
  constexpr std::array<double, 4> kOffsets{-2.0, -1.0, 1.0, 2.0};
  constexpr std::array<double, 4> kWeights{1.0 / 12.0, -8.0 / 12.0, 8.0 / 12.0, -1.0 / 12.0};
  const double h = 1e-3 * chart_radius_;
  const Mat3 I = Mat3::Identity();

  MetricJet j;
  j.order = order;
  j.g = user_metric_(x);
  if (order >= 1) {
    for (int a = 0; a < 3; ++a) {
      Mat3 acc = Mat3::Zero();
      for (int s = 0; s < 4; ++s) acc += kWeights[s] * user_metric_(x + kOffsets[s] * h * I.col(a));
      j.dg[a] = acc / h;
    }
  }
  if (order >= 2) {
    for (int a = 0; a < 3; ++a)
      for (int b = a; b < 3; ++b) {
        Mat3 acc = Mat3::Zero();
        for (int s = 0; s < 4; ++s)
          for (int t = 0; t < 4; ++t)
            acc += kWeights[s] * kWeights[t] *
                   user_metric_(x + h * (kOffsets[s] * I.col(a) + kOffsets[t] * I.col(b)));
        j.d2g[a][b] = acc / (h * h);
        j.d2g[b][a] = j.d2g[a][b];
      }
  }
  if (order >= 3) {
    for (int a = 0; a < 3; ++a)
      for (int b = a; b < 3; ++b)
        for (int c = b; c < 3; ++c) {
          Mat3 acc = Mat3::Zero();
          for (int s = 0; s < 4; ++s)
            for (int t = 0; t < 4; ++t)
              for (int u = 0; u < 4; ++u)
                acc += kWeights[s] * kWeights[t] * kWeights[u] *
                       user_metric_(x + h * (kOffsets[s] * I.col(a) + kOffsets[t] * I.col(b) +
                                             kOffsets[u] * I.col(c)));
          const Mat3 val = acc / (h * h * h);
          const std::array<std::array<int, 3>, 6> perms{
              {{a, b, c}, {a, c, b}, {b, a, c}, {b, c, a}, {c, a, b}, {c, b, a}}};
          for (const auto& p : perms) j.d3g[p[0]][p[1]][p[2]] = val;
        }
  }
  return j;
}

// ---------------------------------------------------------------------------
// Curvature assembly

namespace {

// First-kind Christoffel symbols: first[l](i, j) = ½(∂_i g_jl + ∂_j g_il − ∂_l g_ij).
Tensor3 first_kind(const Tensor3& dg) {
  Tensor3 out;
  for (int l = 0; l < 3; ++l)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) out[l](i, j) = 0.5 * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
  return out;
}

Tensor3 first_kind_derivative(const Tensor4& d2g, int m) {
  Tensor3 out;
  for (int l = 0; l < 3; ++l)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        out[l](i, j) = 0.5 * (d2g[m][i](j, l) + d2g[m][j](i, l) - d2g[m][l](i, j));
  return out;
}

}  // namespace

AmbientEval assemble_ambient(const MetricJet& jet, AmbientLevel level) {
  AmbientEval ev;
  ev.g = jet.g;
  Eigen::LLT<Mat3> llt(jet.g);
  if (llt.info() != Eigen::Success || !jet.g.allFinite())
    throw SingularMetricError("metric is not positive definite");
  ev.g_inv = llt.solve(Mat3::Identity());
  ev.g_inv = 0.5 * (ev.g_inv + ev.g_inv.transpose());
  if (level == AmbientLevel::Metric) return ev;

  const Mat3& gi = ev.g_inv;
  const Tensor3 gam1 = first_kind(jet.dg);
  for (int k = 0; k < 3; ++k) {
    ev.christoffel[k].setZero();
    for (int l = 0; l < 3; ++l) ev.christoffel[k] += gi(k, l) * gam1[l];
  }

  // Rm_ijkl = ½(∂_j∂_k g_il + ∂_i∂_l g_jk − ∂_j∂_l g_ik − ∂_i∂_k g_jl)
  //         + g^{pq}(Γ_{p,jk} Γ_{q,il} − Γ_{p,jl} Γ_{q,ik})
  const auto& d2 = jet.d2g;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          double v = 0.5 * (d2[j][k](i, l) + d2[i][l](j, k) - d2[j][l](i, k) - d2[i][k](j, l));
          for (int p = 0; p < 3; ++p)
            for (int q = 0; q < 3; ++q)
              v += gi(p, q) * (gam1[p](j, k) * gam1[q](i, l) - gam1[p](j, l) * gam1[q](i, k));
          ev.riemann[i][j](k, l) = v;
        }

  // Ric_jl = g^{ik} Rm_ijkl
  for (int j = 0; j < 3; ++j)
    for (int l = 0; l < 3; ++l) {
      double v = 0.0;
      for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) v += gi(i, k) * ev.riemann[i][j](k, l);
      ev.ricci(j, l) = v;
    }
  ev.ricci = 0.5 * (ev.ricci + ev.ricci.transpose());
  ev.scalar = (gi.cwiseProduct(ev.ricci)).sum();
  ev.einstein = ev.ricci - 0.5 * ev.scalar * ev.g;

  if (level != AmbientLevel::Full) return ev;
  if (jet.order < 3) throw SingularMetricError("third metric derivatives required for grad Sc");

  // ∂_m Sc = ∂_m(g^{ik} g^{jl}) Rm_ijkl + g^{ik} g^{jl} ∂_m Rm_ijkl
  const auto& d3 = jet.d3g;
  for (int m = 0; m < 3; ++m) {
    const Mat3 dgi = -gi * jet.dg[m] * gi;
    const Tensor3 dgam1 = first_kind_derivative(d2, m);
    double acc = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          for (int l = 0; l < 3; ++l) {
            const double w = gi(i, k) * gi(j, l);
            const double dw = dgi(i, k) * gi(j, l) + gi(i, k) * dgi(j, l);
            double dr =
                0.5 * (d3[m][j][k](i, l) + d3[m][i][l](j, k) - d3[m][j][l](i, k) - d3[m][i][k](j, l));
            for (int p = 0; p < 3; ++p)
              for (int q = 0; q < 3; ++q) {
                dr += dgi(p, q) * (gam1[p](j, k) * gam1[q](i, l) - gam1[p](j, l) * gam1[q](i, k));
                dr += gi(p, q) * (dgam1[p](j, k) * gam1[q](i, l) + gam1[p](j, k) * dgam1[q](i, l) -
                                  dgam1[p](j, l) * gam1[q](i, k) - gam1[p](j, l) * dgam1[q](i, k));
              }
            acc += dw * ev.riemann[i][j](k, l) + w * dr;
          }
    ev.grad_scalar[m] = acc;
  }
  ev.has_grad_scalar = true;
  return ev;
}

void attach_extrinsic(const ExtrinsicData& data, AmbientEval& ev) {
  const Vec3& x = ev.point;
  ev.k = data.constant;
  for (int c = 0; c < 3; ++c) ev.k += x[c] * data.linear[c];
  const Mat3& gi = ev.g_inv;
  ev.tr_k = gi.cwiseProduct(ev.k).sum();
  const Mat3 kup = gi * ev.k * gi;
  ev.norm_k2 = kup.cwiseProduct(ev.k).sum();
  // ∇_c K_ij = ∂_c K_ij − Γ^l_ci K_lj − Γ^l_cj K_il
  for (int c = 0; c < 3; ++c) {
    Mat3 gam_c;  // gam_c(l, i) = Γ^l_ci
    for (int l = 0; l < 3; ++l) gam_c.row(l) = ev.christoffel[l].row(c);
    const Mat3 t = gam_c.transpose() * ev.k;  // t(i, j) = Γ^l_ci K_lj
    ev.nabla_k[c] = data.linear[c] - t - t.transpose();
  }
}

Mat3 metric_at(const ManifoldModel& model, const Vec3& x) {
  model.require_in_chart(x);
  return model.metric(x);
}

AmbientEval curvature_at(const ManifoldModel& model, const Vec3& x, AmbientLevel level) {
  model.require_in_chart(x);
  const int order = level == AmbientLevel::Metric ? 0 : (level == AmbientLevel::Curvature ? 2 : 3);
  AmbientEval ev = assemble_ambient(model.jet(x, order), level);
  ev.point = x;
  attach_extrinsic(model.extrinsic(), ev);
  return ev;
}

ExtrinsicEval extrinsic_at(const ManifoldModel& model, const Vec3& x) {
  model.require_in_chart(x);
  AmbientEval ev = assemble_ambient(model.jet(x, 1), AmbientLevel::Metric);
  ev.point = x;
  // Connection needs only first derivatives.
  const MetricJet j = model.jet(x, 1);
  const Tensor3 gam1 = first_kind(j.dg);
  for (int k = 0; k < 3; ++k) {
    ev.christoffel[k].setZero();
    for (int l = 0; l < 3; ++l) ev.christoffel[k] += ev.g_inv(k, l) * gam1[l];
  }
  attach_extrinsic(model.extrinsic(), ev);
  return {ev.k, ev.nabla_k, ev.tr_k, ev.norm_k2};
}

// ---------------------------------------------------------------------------
// Rotations

Tensor3 rotate_tensor3(const Tensor3& t, const Mat3& r) {
  Tensor3 out = zero_tensor3();
  for (int c = 0; c < 3; ++c)
    for (int d = 0; d < 3; ++d) out[c] += r(c, d) * (r * t[d] * r.transpose());
  return out;
}

ManifoldModel rotate_model(const ManifoldModel& model, const Mat3& r) {
  ExtrinsicData k;
  k.constant = r * model.extrinsic().constant * r.transpose();
  k.linear = rotate_tensor3(model.extrinsic().linear, r);
  switch (model.kind()) {
    case MetricKind::Flat: return ManifoldModel::flat(model.chart_radius(), k);
    case MetricKind::RoundSphere:
      return ManifoldModel::round_sphere(model.curvature(), model.chart_radius(), k);
    case MetricKind::Schwarzschild:
      return ManifoldModel::schwarzschild(model.mass(), r * model.chart_center(), model.chart_radius(), k);
    case MetricKind::ConformalFlat:
      return ManifoldModel::conformal_flat(model.conformal_coefficients()[0], model.conformal_coefficients()[1],
                                           model.chart_radius(), k);
    case MetricKind::PerturbedFlat: {
      Tensor4 q = zero_tensor4();
      const Tensor4& q0 = model.quadratic();
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
              const double w = r(i, a) * r(j, b);
              if (w == 0.0) continue;
              q[i][j] += w * (r * q0[a][b] * r.transpose());
            }
      return ManifoldModel::perturbed_flat(q, model.chart_radius(), k);
    }
    case MetricKind::User: {
      auto base = model;
      UserMetric rotated = [base, r](const Vec3& x) -> Mat3 {
        return r * base.metric(r.transpose() * x) * r.transpose();
      };
      return ManifoldModel::user(rotated, model.chart_radius(), r * model.chart_center(), k,
                                 model.label() + "-rotated");
    }
  }
  return model;
}

Mat3 orthonormal_frame(const Mat3& g) {
  Eigen::SelfAdjointEigenSolver<Mat3> es(g);
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0)
    throw SingularMetricError("metric is not positive definite");
  return es.eigenvectors() * es.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() *
         es.eigenvectors().transpose();
}

}  // namespace hawking
