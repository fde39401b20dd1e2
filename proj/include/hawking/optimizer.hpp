#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "hawking/functionals.hpp"

namespace hawking {

struct OptimizerOptions {
  double target_area = 4.0 * M_PI;
  int max_iters = 500;
  double grad_tol = 1e-8;  // on the projected-gradient L² norm
  double armijo_c = 1e-4;
  double shrink = 0.5;
  int max_backtracks = 60;
  double area_restore_tol = 1e-12;
  int memory = 8;  // L-BFGS pairs; 0 gives preconditioned projected gradient descent
  double translation_stiffness = 10.0;  // center preconditioner is this times R²

  void validate() const;
};

struct IterationRecord {
  int iter = 0;
  double H_L = 0.0;
  double area_defect = 0.0;  // relative
  double grad_norm = 0.0;
  double step = 0.0;
};

struct CriticalSurfaceReport {
  SurfaceShape shape;
  FunctionalReport report;
  double lambda = 0.0;  // least-squares multiplier
  double target_area = 0.0;
  int iterations = 0;
  bool converged = false;
  double grad_norm = 0.0;
  double A0_L2 = 0.0;               // ‖Å‖ in L²(dμ)
  double H_deviation_max = 0.0;     // max |H − 2/R|
  Vec3 center = Vec3::Zero();       // adapted center p_0 (dμ-mean if the adapted chart fails)
  std::string error;                // set by area_scan when a run failed
  std::vector<IterationRecord> history;
};

/// Uniform rescale ρ ↦ cρ about the shape center until the area matches the target.
SurfaceShape restore_area(const SurfaceShape& shape, const ManifoldModel& model, const GridPtr& grid,
                          double target_area, double rel_tol = 1e-12);

/// Gradients of H_L and of the area with respect to the radial SH coefficients and the center.
struct ShapeGradient {
  Eigen::VectorXd functional;
  Eigen::VectorXd area;
  Vec3 center_functional = Vec3::Zero();
  Vec3 center_area = Vec3::Zero();
};

ShapeGradient shape_gradient(const SurfaceGeometry& geom, const LagrangianSpec& L);

/// Fills the report fields that depend only on the final shape.
CriticalSurfaceReport summarize_surface(const SurfaceGeometry& geom, const LagrangianSpec& L);

/// Preconditioned projected L-BFGS over the center and the SH coefficients with an area projection after
/// every step.  Translations act through the center; the l = 1 coefficients of the initial shape are first
/// folded into the center and then held fixed.
/// Throws StallError when the line search fails and ImmersionError when the initial shape is invalid.
/// On a stall, *partial (if given) receives the last accepted iterate.
CriticalSurfaceReport minimize_area_constrained(const ManifoldModel& model, const LagrangianSpec& L,
                                                const OptimizerOptions& opts, const SurfaceShape& init,
                                                const GridPtr& grid, CriticalSurfaceReport* partial = nullptr);

/// Decreasing areas with warm starts; a failed run is retried from a round sphere and recorded in `error`.
std::vector<CriticalSurfaceReport> area_scan(const ManifoldModel& model, const LagrangianSpec& L,
                                             const std::vector<double>& areas, const OptimizerOptions& opts,
                                             const SurfaceShape& init, const GridPtr& grid);

}  // namespace hawking
