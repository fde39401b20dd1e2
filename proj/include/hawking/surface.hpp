#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hawking/ambient.hpp"
#include "hawking/spherical.hpp"

namespace hawking {

/// A star-shaped sphere x(ω) = center + ρ(ω) ω with ρ = Σ a_lm Y_lm.
struct SurfaceShape {
  Vec3 center = Vec3::Zero();
  int l_max = 0;
  Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(1);

  static SurfaceShape round(const Vec3& center, double radius, int l_max);
  /// Mean of ρ over the unit sphere.
  double mean_radius() const;
  double radius_at(const Vec3& omega) const;
  /// Same surface with a larger or smaller band (truncation drops modes).
  SurfaceShape with_l_max(int new_l_max) const;
  SurfaceShape scaled(double factor) const;
};

/// Text block: header comment, `center x y z`, `l_max L`, then one `l m a_lm` line per coefficient.
void write_shape(std::ostream& os, const SurfaceShape& shape);
SurfaceShape read_shape(std::istream& is);
void save_shape(const std::string& path, const SurfaceShape& shape);
SurfaceShape load_shape(const std::string& path);

/// Rigid rotation about the coordinate origin: x ↦ R x.
SurfaceShape rotate_shape(const SurfaceShape& shape, const Mat3& rotation);

/// Same surface written as a radial graph about another center (band-truncated to the same l_max).
SurfaceShape recenter_shape(const SurfaceShape& shape, const Vec3& new_center);

/// Geometry at one quadrature node.  Parameter directions are (θ, φ).
struct SurfacePoint {
  Vec3 omega, x;
  std::array<Vec3, 2> tangent;                 // ∂_θ x, ∂_φ x
  std::array<std::array<Vec3, 2>, 2> second;   // ∂_i ∂_j x
  Mat2 gamma, gamma_inv;
  double weight = 0.0;  // dμ at the node, quadrature weight included
  Vec3 nu;              // g-unit outward normal (vector)
  Vec3 nu_flat;         // g ν (covector)
  double omega_nu = 0.0;  // g(ω, ν)
  Mat2 A, A0;
  double H = 0.0;
  double A0_norm2 = 0.0;
  std::array<Mat2, 2> connection;  // [k](i, j) = Γ̂^k_ij of γ
  AmbientEval amb;
  double ric_nn = 0.0;
  double einstein_nn = 0.0;
  double k_nn = 0.0;
  double P = 0.0;
  Vec2 eta = Vec2::Zero();  // η_i = K(e_i, ν)

  Vec3 nu_E;
  Mat2 gamma_E, A_E, A0_E;
  double H_E = 0.0;
  double A0_E_norm2 = 0.0;
  double weight_E = 0.0;
};

struct SurfaceGeometry {
  SurfaceShape shape;
  GridPtr grid;
  ManifoldModel model = ManifoldModel::flat(1.0);
  std::vector<SurfacePoint> points;
  double area = 0.0;
  double area_E = 0.0;
  double R = 0.0;    // sqrt(|Σ| / 4π)
  double R_E = 0.0;  // sqrt(|Σ|_E / 4π)

  int size() const { return static_cast<int>(points.size()); }
  /// Σ_q dμ_q f_q
  double integrate(const Eigen::VectorXd& f) const;
  double integrate_euclidean(const Eigen::VectorXd& f) const;
  template <class F>
  Eigen::VectorXd sample(F&& fn) const {
    Eigen::VectorXd out(size());
    for (int q = 0; q < size(); ++q) out[q] = fn(points[q]);
    return out;
  }
  Eigen::VectorXd mean_curvature() const;
};

/// Builds all node geometry.  Throws ImmersionError for ρ ≤ 0, degenerate tangents, or nodes outside the chart.
SurfaceGeometry embed(const SurfaceShape& shape, const ManifoldModel& model, GridPtr grid);

/// Δf = γ^{ij}(∂_i∂_j f − Γ̂^k_ij ∂_k f) with spectral parameter derivatives.
Eigen::VectorXd laplace_beltrami(const SurfaceGeometry& geom, const Eigen::VectorXd& f);

/// Tangential gradient components ∂_i f in the (θ, φ) frame.
std::vector<Vec2> parameter_gradient(const SurfaceGeometry& geom, const Eigen::VectorXd& f);

struct ShapeDiagnostics {
  double R = 0.0;
  double R_E = 0.0;
  double diameter = 0.0;  // chart distance bound scaled by the largest metric eigenvalue
  Vec3 center_E = Vec3::Zero();
  double A0_E_L2 = 0.0;         // ‖Å_E‖ in L²(dμ_E)
  double H_E_deviation_L2 = 0.0;  // ‖H_E − 2/R_E‖ in L²(dμ_E)
  double normal_deviation_max = 0.0;  // max |ν − ν_E|
};

ShapeDiagnostics shape_diagnostics(const SurfaceGeometry& geom);

struct AdaptedChart {
  Vec3 origin = Vec3::Zero();   // p_0
  Vec3 offset = Vec3::Zero();   // p_0 − shape center
  Vec3 residual_mean = Vec3::Zero();  // ∫ y dμ at p_0
  double diameter = 0.0;
  double center_E_offset = 0.0;  // |a_E − p_0|
  double center_E_ratio = 0.0;   // |a_E − p_0| / d³
  int iterations = 0;
};

/// Finds p_0 with ∫ y dμ = 0, y the second-order normal coordinates about p_0.
AdaptedChart adapted_normal_chart(const ManifoldModel& model, const SurfaceGeometry& geom);

}  // namespace hawking
