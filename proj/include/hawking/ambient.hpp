#pragma once

#include <functional>
#include <string>

#include "hawking/tensor.hpp"

namespace hawking {

enum class MetricKind { Flat, RoundSphere, Schwarzschild, PerturbedFlat, ConformalFlat, User };

std::string to_string(MetricKind kind);

/// Affine extrinsic field K_ij(x) = K⁰_ij + K¹_ijk x^k in chart coordinates.
/// `linear[k](i, j)` stores K¹_ijk = ∂_k K_ij.
struct ExtrinsicData {
  Mat3 constant = Mat3::Zero();
  Tensor3 linear = zero_tensor3();

  /// Six reals in the order 11, 12, 13, 22, 23, 33.
  static Mat3 symmetric_from_six(const std::array<double, 6>& v);
  static std::array<double, 6> six_from_symmetric(const Mat3& m);
  /// K⁰ from six reals and K¹ from eighteen reals (pair-major, 6 pairs × 3 directions).
  static ExtrinsicData from_components(const std::array<double, 6>& k0, const std::array<double, 18>& k1);
  std::array<double, 18> linear_components() const;

  bool is_zero() const;
};

/// Metric components and their coordinate derivatives at one point.
/// dg[a](i, j) = ∂_a g_ij, d2g[a][b](i, j) = ∂_a ∂_b g_ij, d3g[a][b][c](i, j) = ∂_a ∂_b ∂_c g_ij.
struct MetricJet {
  Mat3 g = Mat3::Identity();
  Tensor3 dg = zero_tensor3();
  Tensor4 d2g = zero_tensor4();
  Tensor5 d3g = zero_tensor5();
  int order = 0;
};

/// How much of AmbientEval to fill in.
enum class AmbientLevel {
  Metric,     // g, g_inv, K, trK, |K|^2
  Curvature,  // + Γ, Rm, Ric, Sc, G, ∇K
  Full,       // + grad Sc (needs third metric derivatives)
};

/// Everything the surface code needs from the ambient manifold at one chart point.
struct AmbientEval {
  Vec3 point = Vec3::Zero();
  Mat3 g = Mat3::Identity();
  Mat3 g_inv = Mat3::Identity();
  Tensor3 christoffel = zero_tensor3();  // [k](i, j) = Γ^k_ij
  Tensor4 riemann = zero_tensor4();      // [i][j](k, l) = Rm_ijkl, Rm = κ(g_ik g_jl − g_il g_jk) on space forms
  Mat3 ricci = Mat3::Zero();
  double scalar = 0.0;
  Vec3 grad_scalar = Vec3::Zero();
  Mat3 einstein = Mat3::Zero();
  Mat3 k = Mat3::Zero();
  Tensor3 nabla_k = zero_tensor3();  // [c](i, j) = ∇_c K_ij
  double tr_k = 0.0;
  double norm_k2 = 0.0;
  bool has_grad_scalar = false;
};

struct ExtrinsicEval {
  Mat3 k = Mat3::Zero();
  Tensor3 nabla_k = zero_tensor3();
  double tr_k = 0.0;
  double norm_k2 = 0.0;
};

using UserMetric = std::function<Mat3(const Vec3&)>;

/// A coordinate chart of a Riemannian 3-manifold together with the extrinsic field K.
/// Immutable after construction; all queries are pure.
class ManifoldModel {
 public:
  static ManifoldModel flat(double chart_radius, ExtrinsicData k = {});
  /// Constant sectional curvature κ > 0 in the chart g = (1 + κ|x|²/4)^{-2} δ, so g(0) = δ, ∂g(0) = 0.
  static ManifoldModel round_sphere(double curvature, double chart_radius, ExtrinsicData k = {});
  /// Isotropic Schwarzschild slice g = (1 + m/(2|x|))⁴ δ.  The chart ball must stay outside |x| ≤ m/2.
  static ManifoldModel schwarzschild(double mass, const Vec3& chart_center, double chart_radius,
                                     ExtrinsicData k = {});
  /// g_ij = δ_ij + Q_ijkl x^k x^l with q[i][j](k, l) = Q_ijkl (symmetrized in ij and kl).
  static ManifoldModel perturbed_flat(const Tensor4& q, double chart_radius, ExtrinsicData k = {});
  /// g = exp(2u) δ with u = a|x|² + b|x|⁴, so g(0) = δ, ∂g(0) = 0 and Sc(0) = −24a.
  static ManifoldModel conformal_flat(double a, double b, double chart_radius, ExtrinsicData k = {});
  /// Arbitrary metric callable; derivatives by 4th-order central differences with step 1e-3·chart_radius.
  static ManifoldModel user(UserMetric metric, double chart_radius, const Vec3& chart_center = Vec3::Zero(),
                            ExtrinsicData k = {}, std::string label = "user");

  ManifoldModel with_extrinsic(ExtrinsicData k) const;

  MetricKind kind() const { return kind_; }
  const std::string& label() const { return label_; }
  double chart_radius() const { return chart_radius_; }
  const Vec3& chart_center() const { return chart_center_; }
  double curvature() const { return curvature_; }
  double mass() const { return mass_; }
  const Tensor4& quadratic() const { return quadratic_; }
  /// (a, b) of the conformal exponent; zero for other kinds.
  Vec2 conformal_coefficients() const { return conformal_; }
  const ExtrinsicData& extrinsic() const { return extrinsic_; }
  bool has_analytic_derivatives() const { return kind_ != MetricKind::User; }

  bool contains(const Vec3& x) const;
  /// Throws DomainError when x is outside the chart ball.
  void require_in_chart(const Vec3& x) const;

  /// Metric and derivatives up to `order` (≤ 3).
  MetricJet jet(const Vec3& x, int order) const;
  Mat3 metric(const Vec3& x) const;

 private:
  ManifoldModel() = default;
  void validate() const;
  MetricJet radial_conformal_jet(const Vec3& x, int order) const;
  MetricJet perturbed_flat_jet(const Vec3& x, int order) const;
  MetricJet finite_difference_jet(const Vec3& x, int order) const;

  MetricKind kind_ = MetricKind::Flat;
  std::string label_ = "flat";
  double chart_radius_ = 1.0;
  Vec3 chart_center_ = Vec3::Zero();
  double curvature_ = 0.0;
  double mass_ = 0.0;
  Tensor4 quadratic_ = zero_tensor4();
  Vec2 conformal_ = Vec2::Zero();
  UserMetric user_metric_;
  ExtrinsicData extrinsic_;
};

/// g_ij(x).  Throws DomainError outside the chart.
Mat3 metric_at(const ManifoldModel& model, const Vec3& x);

/// Connection, curvature tensors, K and ∇K at x.
AmbientEval curvature_at(const ManifoldModel& model, const Vec3& x, AmbientLevel level = AmbientLevel::Full);

/// K, ∇K = ∂K − ΓK − ΓK and their g-traces at x.
ExtrinsicEval extrinsic_at(const ManifoldModel& model, const Vec3& x);

/// Assembles curvature quantities from a metric jet; exposed for oracles and tests.
AmbientEval assemble_ambient(const MetricJet& jet, AmbientLevel level);

/// Fills K, ∇K, trK, |K|^2 into `eval` from the affine field (needs g_inv and, for ∇K, Γ).
void attach_extrinsic(const ExtrinsicData& data, AmbientEval& eval);

/// Rotates the model about the coordinate origin: g'(x) = R g(Rᵀx) Rᵀ, K likewise.
/// Supported for every built-in kind; user metrics are wrapped.
ManifoldModel rotate_model(const ManifoldModel& model, const Mat3& rotation);

/// Rotates a rank-3 array with one derivative slot: out[c](i,j) = R_ia R_jb R_cd in[d](a,b).
Tensor3 rotate_tensor3(const Tensor3& t, const Mat3& rotation);

/// Symmetric square root of g^{-1}; its columns form a g-orthonormal frame.
Mat3 orthonormal_frame(const Mat3& g);

}  // namespace hawking
