#pragma once

#include <vector>

#include "hawking/lagrangian.hpp"
#include "hawking/surface.hpp"

namespace hawking {

struct FunctionalReport {
  double area = 0.0;
  double R = 0.0;
  double R_E = 0.0;
  double W = 0.0;           // ¼ ∫ H²
  double L_integral = 0.0;  // ∫ L(x, ν)
  double H_L = 0.0;         // W + ∫ L
  double E = 0.0;           // Hawking energy, meaningful when is_hawking
  double U = 0.0;           // ½ ∫ |Å|²
  double V = 0.0;           // ∫ (Ric(ν,ν) − ½ Sc)
  double gauss_bonnet_total = 0.0;      // ∫ Gauss curvature
  double gauss_identity_defect = 0.0;   // 2W − 8π − ∫|Å|² − 2∫G(ν,ν)
  double el_residual_L2 = 0.0;          // at λ = lambda
  double lambda = 0.0;                  // least-squares multiplier
  bool is_hawking = false;
};

/// Area-constrained Euler–Lagrange coefficient fields per node.
struct ELCoefficients {
  Eigen::VectorXd Q, T;
  std::vector<Mat2> S;  // covariant tangential tensor in the (θ, φ) frame
};

struct ELResidual {
  Eigen::VectorXd residual;
  double l2 = 0.0;
};

/// The cheap part of the report: area, W, ∫L and H_L only.
struct FunctionalValues {
  double area = 0.0;
  double W = 0.0;
  double L_integral = 0.0;
  double H_L = 0.0;
};

FunctionalValues functional_values(const SurfaceGeometry& geom, const LagrangianSpec& L);

/// L and its derivatives at every node.
std::vector<LagrangianJet> lagrangian_on_surface(const SurfaceGeometry& geom, const LagrangianSpec& L);

FunctionalReport evaluate_functionals(const SurfaceGeometry& geom, const LagrangianSpec& L);

/// Q = Ric(ν,ν) − 2L − tr_Σ Hess_V L + 2 d_V L(ν), S = −2 Hess_V L|_T, T = −2 d_M L(ν) − 2 Div_Σ d_V L.
ELCoefficients el_coefficients(const SurfaceGeometry& geom, const LagrangianSpec& L);

/// Closed forms for L = −¼P²: Q = Ric(ν,ν) − ½P² + 2|η|² + 2P K(ν,ν), S = −2P K|_T + 4 η⊗η,
/// T = P tr_Σ ∇_ν K − 2 tr_Σ ∇_{η#} K − 2P Div_Σ K(ν).
ELCoefficients hawking_el_coefficients(const SurfaceGeometry& geom);

/// ΔH + H|Å|² + HQ + ⟨Å, S⟩ + 2λH + T at every node and its L²(dμ) norm.
ELResidual el_residual(const SurfaceGeometry& geom, const LagrangianSpec& L, double lambda);

/// λ minimizing the L² norm of the residual.
double least_squares_multiplier(const SurfaceGeometry& geom, const LagrangianSpec& L);

/// Density g with δ(W + ∫L)[f] = ∫ f g dμ; equals −½ × residual at λ = 0.
Eigen::VectorXd gradient_density(const SurfaceGeometry& geom, const LagrangianSpec& L);

}  // namespace hawking
