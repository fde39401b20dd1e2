#pragma once

#include <string>
#include <vector>

#include "hawking/optimizer.hpp"

namespace hawking {

/// Round shape about p whose ambient radius is r.  On the round 3-sphere centered at the origin the
/// coordinate radius is 2 tan(√κ r/2)/√κ; on every other model it is r itself (a coordinate sphere).
/// Throws DomainError when the sphere leaves the chart.
SurfaceShape geodesic_sphere_shape(const ManifoldModel& model, const Vec3& p, double r, int l_max = 0);

/// Least-squares fit of value ≈ Σ c_p R^p.
struct ExpansionFit {
  std::vector<double> radii;
  std::vector<double> values;
  std::vector<int> powers;
  Eigen::VectorXd coefficients;
  double residual = 0.0;   // RMS of the fit residual
  double condition = 0.0;  // 2-norm condition number of the column-scaled design

  bool has(int power) const;
  /// Throws FitError when `power` is not part of the model.
  double coefficient(int power) const;
};

/// Needs at least len(powers) + 2 samples with distinct positive radii; FitError otherwise or when the
/// column-scaled design is numerically rank deficient.
ExpansionFit fit_expansion(const std::vector<double>& radii, const std::vector<double>& values,
                           const std::vector<int>& powers);

/// Fits `powers`; when the RMS residual is above 10 ε·max|value| the fit is repeated with `nuisance` appended.
ExpansionFit fit_with_nuisance(const std::vector<double>& radii, const std::vector<double>& values,
                               std::vector<int> powers, int nuisance = 4);

/// Default geometric ladder, factor ≈ √2.
std::vector<double> default_radii();

/// Ambient data at one point in an orthonormal frame; traces with g.
struct PointInvariants {
  double scalar = 0.0;
  double tr_k = 0.0;
  double tr_k2 = 0.0;   // (tr K)²
  double norm_k2 = 0.0;
  /// Sc + (3/5)(trK)² + (1/5)|K|²
  double hawking_potential() const { return scalar + 0.6 * tr_k2 + 0.2 * norm_k2; }
  /// 16πρ = Sc + (trK)² − |K|²
  double energy_density16pi() const { return scalar + tr_k2 - norm_k2; }
};

PointInvariants point_invariants(const ManifoldModel& model, const Vec3& p);

/// c(L, p) = ∫ L(p, ν) dΩ in closed form: 4πα trK² + (4π/15)β(trK² + 2|K|²) + (4π/3)c₀ trK² + 4πcₜ.
/// Throws DomainError for Lagrangians with an extension term.
double c_closed_form(const LagrangianSpec& L, const PointInvariants& inv);

struct ExpansionOptions {
  bool use_minimizers = false;
  int l_max = 8;
  int n_theta = 24;
  OptimizerOptions optimizer;
  /// Admission bound on ‖Å‖²_{L²} / (r|Σ|).
  double roundness_bound = 10.0;
  /// Fit tolerance on the ratios fitted / predicted.
  double ratio_tolerance = 0.02;

  void validate() const;
};

struct ExpansionSample {
  double r = 0.0;       // requested radius
  double R = 0.0;       // area radius √(|Σ|/4π)
  double area = 0.0;
  double E = 0.0;
  double H_L = 0.0;
  double W = 0.0;
  double A0_L2_sq = 0.0;        // ‖Å‖²_{L²}
  double roundness_constant = 0.0;  // ‖Å‖² / (r|Σ|)
  Vec3 center = Vec3::Zero();
  bool admitted = true;
  std::string error;
};

struct ExpansionReport {
  Vec3 point = Vec3::Zero();
  PointInvariants invariants;
  double c_L = 0.0;
  double predicted_E3 = 0.0;  // (1/12)(Sc + (3/5)trK² + (1/5)|K|²)
  double predicted_H2 = 0.0;  // −(2π/3)Sc + c(L, p)
  std::vector<ExpansionSample> samples;
  ExpansionFit E_fit;
  ExpansionFit H_fit;
  double E3_ratio = 0.0;
  double H2_ratio = 0.0;
  double H0 = 0.0;
  double max_roundness_constant = 0.0;
  bool pass = false;  // both ratios within tolerance and H0 = 4π ± 1e-6
};

/// Evaluates E and H_L on geodesic spheres (or on area-constrained minimizers when requested) for
/// decreasing radii, fits, and compares with the predicted coefficients.  E is fitted as c₃R³ (+ c₄R⁴),
/// H_L as c₀ + c₂R² + c₃R³ (+ c₄R⁴), both in the area radius R.
ExpansionReport expansion_check(const ManifoldModel& model, const Vec3& p, const std::vector<double>& radii,
                                const LagrangianSpec& L, const ExpansionOptions& opts = {});

struct FieldGridSpec {
  Vec3 center = Vec3::Zero();
  double half_width = 0.25;
  int points_per_axis = 11;

  void validate() const;
};

struct CriticalPoint {
  Vec3 x = Vec3::Zero();
  double value = 0.0;
  Vec3 gradient = Vec3::Zero();
  Vec3 hessian_eigenvalues = Vec3::Zero();
  int negative_directions = 0;
  std::string kind;  // "maximum", "minimum", "saddle" or "degenerate"
};

/// Concentration potential Sc − (3/2π)c(L, x); for L = −¼P² this is Sc + (3/5)trK² + (1/5)|K|².
/// Gradient in chart components.
double concentration_potential(const ManifoldModel& model, const Vec3& x, const LagrangianSpec& L,
                               Vec3* gradient = nullptr);
/// 16πρ = Sc + (trK)² − |K|² with its chart gradient.
double energy_density16pi(const ManifoldModel& model, const Vec3& x, Vec3* gradient = nullptr);

struct ConcentrationField {
  FieldGridSpec grid;
  std::vector<Vec3> points;
  std::vector<double> phi;
  std::vector<double> rho;  // ρ itself, not 16πρ
  std::vector<CriticalPoint> phi_critical;
  std::vector<CriticalPoint> rho_critical;
  bool degenerate = false;  // potential constant on the grid
  Vec3 phi_argmax = Vec3::Zero();  // best sampled point
  Vec3 rho_argmax = Vec3::Zero();
  /// Smallest distance between a Φ critical point and a 16πρ critical point (∞ if either list is empty).
  double critical_separation = 0.0;
  bool critical_points_coincide = false;
};

/// Samples the potential and ρ on a cube grid and refines critical points by Newton from local minima of |∇|.
ConcentrationField concentration_field(const ManifoldModel& model, const FieldGridSpec& spec,
                                       const LagrangianSpec& L = LagrangianSpec::hawking());

struct ConcentrationRow {
  double area = 0.0;
  Vec3 center = Vec3::Zero();
  double distance = 0.0;  // to the nearest isolated potential critical point
  double H_L = 0.0;
  bool converged = false;
  std::string error;
};

struct ConcentrationExperiment {
  ConcentrationField field;
  Vec3 target = Vec3::Zero();
  bool has_target = false;
  std::vector<ConcentrationRow> rows;
  bool monotone = false;    // distances strictly decrease with the area
  bool degenerate = false;  // no isolated critical point to compare with
};

/// Runs an area scan from a round sphere at `start` and tracks the adapted centers.
ConcentrationExperiment concentration_experiment(const ManifoldModel& model, const LagrangianSpec& L,
                                                 const std::vector<double>& areas, const Vec3& start,
                                                 const FieldGridSpec& field_spec, const OptimizerOptions& opts = {},
                                                 int l_max = 12, int n_theta = 32);

}  // namespace hawking
