#pragma once

#include <functional>
#include <string>

#include "hawking/ambient.hpp"

namespace hawking {

/// L and its derivatives at (x, ν).  All covectors are in chart components.
struct LagrangianJet {
  double value = 0.0;
  Vec3 d_M = Vec3::Zero();      // ∇_k L with ν held parallel
  Vec3 d_V = Vec3::Zero();      // ∂L/∂V^a at V = ν
  Mat3 hess_V = Mat3::Zero();   // ∂²L/∂V^a∂V^b at V = ν
  Mat3 nabla_d_V = Mat3::Zero();  // (k, a) entry: ∇_k (d_V L)_a with ν held parallel

  LagrangianJet& operator+=(const LagrangianJet& o);
};

/// Extension term evaluated from the ambient data at a point and the unit normal there.
using LagrangianTerm = std::function<LagrangianJet(const AmbientEval& amb, const Vec3& nu)>;

/// L(x, ν) = α (trK)² + β K(ν,ν)² + c₀ trK K(ν,ν) + cₜ, plus an optional extension term.
struct LagrangianSpec {
  double alpha = 0.0;
  double beta = 0.0;
  double c0 = 0.0;
  double ct = 0.0;
  LagrangianTerm extra;
  std::string extra_label;
  /// Whether the extension term is even in ν (assumed false unless declared).
  bool extra_even = false;

  static LagrangianSpec zero() { return {}; }
  /// L = −¼ P² with P = trK − K(ν,ν).
  static LagrangianSpec hawking() { return {-0.25, -0.25, 0.5, 0.0, {}, {}, false}; }
  static LagrangianSpec family(double alpha, double beta, double c0, double ct = 0.0) {
    return {alpha, beta, c0, ct, {}, {}, false};
  }

  bool is_hawking() const;
  bool is_zero() const;
  /// Every member of the polynomial family is even in ν.
  bool is_even() const { return !extra || extra_even; }
  LagrangianJet evaluate(const AmbientEval& amb, const Vec3& nu) const;
  std::string describe() const;
};

}  // namespace hawking
