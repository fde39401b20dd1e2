#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "hawking/tensor.hpp"

namespace hawking {

/// Index of the real spherical harmonic Y_lm in a coefficient vector, (l, m) lexicographic.
inline int sh_index(int l, int m) { return l * l + l + m; }
inline int sh_count(int l_max) { return (l_max + 1) * (l_max + 1); }

/// Node samples of a scalar field and its derivatives in the (θ, φ) parameters.
struct SphericalField {
  Eigen::VectorXd f, f_t, f_p, f_tt, f_tp, f_pp;
};

/// Gauss–Legendre nodes in cos θ times uniform φ; node q = i_theta · n_phi + i_phi.
/// Also carries the Legendre and trigonometric tables used by the separable transforms.
class QuadratureGrid {
 public:
  explicit QuadratureGrid(int n_theta);

  int n_theta() const { return n_theta_; }
  int n_phi() const { return n_phi_; }
  int size() const { return n_theta_ * n_phi_; }
  int exactness_degree() const { return 2 * n_theta_ - 1; }
  /// Largest harmonic degree the transforms resolve exactly.
  int band() const { return n_theta_ - 1; }

  const std::vector<Vec3>& nodes() const { return nodes_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  double theta(int q) const { return theta_[q / n_phi_]; }
  double phi(int q) const { return phi_[q % n_phi_]; }
  double sin_theta(int q) const { return sin_theta_[q / n_phi_]; }
  double cos_theta(int q) const { return cos_theta_[q / n_phi_]; }

  double integrate(const Eigen::VectorXd& samples) const;

  /// Coefficients a_lm = Σ w_q f_q Y_lm(ω_q) for l ≤ band_limit.
  Eigen::VectorXd analyze(const Eigen::VectorXd& samples, int band_limit) const;
  Eigen::VectorXd synthesize(const Eigen::VectorXd& coeffs, int l_max) const;
  SphericalField synthesize_with_derivatives(const Eigen::VectorXd& coeffs, int l_max) const;
  /// Spectral (θ, φ) derivatives of node samples, resolved at the grid band.
  SphericalField differentiate(const Eigen::VectorXd& samples) const;

  bool same_layout(const QuadratureGrid& other) const { return n_theta_ == other.n_theta_; }

 private:
  double legendre(int it, int l, int m) const { return p_(it, tri(l, m)); }
  static int tri(int l, int m) { return l * (l + 1) / 2 + m; }

  int n_theta_;
  int n_phi_;
  std::vector<double> theta_, cos_theta_, sin_theta_, theta_weights_, phi_;
  std::vector<Vec3> nodes_;
  Eigen::VectorXd weights_;
  // Normalized associated Legendre values and θ-derivatives, rows = rings, cols = (l, m ≥ 0).
  Eigen::MatrixXd p_, dp_, d2p_;
  // Trigonometric factors: trig_(i_phi, m + band) = T_m(φ), with T_0 = 1, T_m = √2 cos mφ, T_{−m} = √2 sin mφ.
  Eigen::MatrixXd trig_, dtrig_, d2trig_;
};

using GridPtr = std::shared_ptr<const QuadratureGrid>;

/// Shared, immutable grid.  n_theta ≥ 4.
GridPtr build_grid(int n_theta);

/// All real orthonormal spherical harmonics Y_lm(ω), l ≤ l_max, at one unit vector.
/// No Condon–Shortley phase.
Eigen::VectorXd real_sh_all(int l_max, const Vec3& omega);

}  // namespace hawking
