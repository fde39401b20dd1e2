#pragma once

#include <string>

#include "hawking/functionals.hpp"

namespace hawking {

struct VariationValues {
  double dA = 0.0;
  double dW = 0.0;
  double dL = 0.0;
  double dHL() const { return dW + dL; }
};

/// Analytic first variations for the normal speed f (node samples):
/// δA = ∫ fH, δW = −½ ∫ f(ΔH + H|Å|² + H Ric(ν,ν)), δ∫L = ∫ f d_M L(ν) − d_V L(∇f) + f L H.
VariationValues first_variation(const SurfaceGeometry& geom, const Eigen::VectorXd& f, const LagrangianSpec& L);

struct VariationReport {
  std::string f_spec;
  double step = 0.0;
  VariationValues analytic;
  VariationValues finite_difference;
  double rel_err_A = 0.0;
  double rel_err_W = 0.0;
  double rel_err_L = 0.0;
  /// Relative L² size of the radial speed discarded by the band projection.
  double projection_residual = 0.0;

  double max_rel_err() const;
};

/// Compares first_variation against a 4th-order central difference of the functionals along the
/// radial perturbation ρ + ε ψ, where ψ is f / g(ω, ν) projected to the shape band.  Relative errors use
/// max(|analytic|, 1e-3 · reference) as denominator, reference = |F| ‖f‖_∞ / R.
/// Throws StepSizeError when the step is dominated by cancellation or by truncation, or breaks the shape.
VariationReport fd_check(const SurfaceShape& shape, const ManifoldModel& model, GridPtr grid,
                         const Eigen::VectorXd& f, const LagrangianSpec& L, double step,
                         const std::string& f_spec = "custom");

struct MultiplierEstimate {
  double probe = 0.0;          // δH_L / δA for f = g(x − p_0, ν)
  double least_squares = 0.0;  // minimizer of the residual norm
  double probe_dA = 0.0;
  double probe_dHL = 0.0;
  Vec3 probe_center = Vec3::Zero();
};

/// Throws DegenerateProbeError when |δA| < 1e-12 |Σ| for the probe.
MultiplierEstimate lagrange_multiplier(const SurfaceGeometry& geom, const LagrangianSpec& L);

}  // namespace hawking
