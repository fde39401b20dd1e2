#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "hawking/lagrangian.hpp"
#include "hawking/spherical.hpp"

namespace hawking {

/// Reduced fraction with a positive denominator.
struct Rational {
  long long num = 0;
  long long den = 1;

  Rational() = default;
  Rational(long long n, long long d = 1);
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const;
  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend bool operator==(const Rational& a, const Rational& b) { return a.num == b.num && a.den == b.den; }
};

/// ∫_{S²} ν_{α₁}···ν_{α_n} dΩ over the unit sphere, indices in {1, 2, 3}.
struct MomentKey {
  std::vector<int> alpha;

  /// Parses "1,1,2,2"; an empty string is the degree-0 key.
  static MomentKey parse(const std::string& text);
  std::string str() const;
};

/// Exact value `coefficient · π`.
struct ExactMoment {
  Rational coefficient;
  double value() const;
};

constexpr int kMaxMomentDegree = 6;

/// Pairing formula: odd degree vanishes, otherwise 4π/(n+1)!! times the number of index-matching pairings.
/// Throws UnsupportedDegreeError for n > 6 and DomainError for indices outside {1, 2, 3}.
ExactMoment exact_monomial_integral(const MomentKey& key);
/// Same integral by quadrature on `grid`.
double quadrature_monomial_integral(const MomentKey& key, const QuadratureGrid& grid);

/// Polynomial in the components of ν, stored by exponent triple.
class NuPolynomial {
 public:
  using Exponent = std::array<int, 3>;

  NuPolynomial() = default;
  static NuPolynomial constant(double c);
  static NuPolynomial component(int i);           // ν_i, i ∈ {0, 1, 2}
  static NuPolynomial linear(const Vec3& v);      // v·ν
  static NuPolynomial quadratic(const Mat3& m);   // νᵀ m ν

  NuPolynomial& operator+=(const NuPolynomial& o);
  friend NuPolynomial operator+(NuPolynomial a, const NuPolynomial& b) { return a += b; }
  friend NuPolynomial operator*(const NuPolynomial& a, const NuPolynomial& b);
  friend NuPolynomial operator*(double s, NuPolynomial a);

  int degree() const;
  double evaluate(const Vec3& nu) const;
  const std::map<Exponent, double>& terms() const { return terms_; }

  /// ∫_{S²} p dΩ through exact moments (UnsupportedDegreeError above degree 6).
  double integrate_exact() const;
  double integrate_quadrature(const QuadratureGrid& grid) const;

 private:
  std::map<Exponent, double> terms_;
};

/// K and ∇K at one point, expressed in an orthonormal frame there.  `nabla_k[c](a, b)` = ∇_c K_ab.
struct PointData {
  Mat3 k = Mat3::Zero();
  Tensor3 nabla_k = zero_tensor3();
  Vec3 grad_scalar = Vec3::Zero();  // ∇Sc in the same frame

  double tr_k() const { return k.trace(); }
  double norm_k2() const { return k.squaredNorm(); }
  /// ∂_c tr K, ∂_c tr K², ∂_c |K|².
  Vec3 d_tr_k() const;
  Vec3 d_tr_k2() const;
  Vec3 d_norm_k2() const;
};

/// K data and ∇Sc at chart point a, rotated into the orthonormal frame g(a)^{-1/2}.
PointData point_data(const ManifoldModel& model, const Vec3& a);

/// Integrands of the family as polynomials in ν: L, d_V L_α, d_M L_β and ∇_γ d_V L_β.
struct FamilyIntegrands {
  NuPolynomial value;
  std::array<NuPolynomial, 3> d_V;
  std::array<NuPolynomial, 3> d_M;
  std::array<std::array<NuPolynomial, 3>, 3> nabla_d_V;  // [γ][β]
};

/// Throws DomainError when L carries a non-polynomial extension term.
FamilyIntegrands family_integrands(const LagrangianSpec& L, const PointData& p);

/// c^{(α₁,…,α_k)}(F, a) = ∫ F(ν) ν_{α₁}···ν_{α_k} dΩ; indices 0-based here.
double c_moment(const NuPolynomial& F, const std::vector<int>& indices);
double c_moment_quadrature(const NuPolynomial& F, const std::vector<int>& indices, const QuadratureGrid& grid);

struct ConcentrationVectors {
  Vec3 point = Vec3::Zero();
  Vec3 V = Vec3::Zero();
  Vec3 W = Vec3::Zero();
  Vec3 V_quadrature = Vec3::Zero();
  Vec3 W_quadrature = Vec3::Zero();
  double c_L = 0.0;       // c(L, a)
  Vec3 grad_c_L = Vec3::Zero();  // ∇_a c(L, a)
};

/// V^α = −c(d_V L_α) + 2c^α(L) + c^{(α,β)}(d_V L_β),
/// W^α = (3/2π)(−c^β(∇_β d_V L_α) + 3c^{(α,β)}(d_M L_β) + c^{(α,β,γ)}(∇_γ d_V L_β)).
ConcentrationVectors concentration_vectors(const LagrangianSpec& L, const PointData& p);
ConcentrationVectors concentration_vectors(const LagrangianSpec& L, const ManifoldModel& model, const Vec3& a);

struct IdentityRow {
  std::string name;
  double exact_error = 0.0;
  double quadrature_error = 0.0;
  double exact_tolerance = 1e-10;
  double quadrature_tolerance = 1e-8;
  bool pass() const { return exact_error <= exact_tolerance && quadrature_error <= quadrature_tolerance; }
};

/// Closed-form checks of the concentration vectors over `draws` random affine K fields at a on `model`.
std::vector<IdentityRow> identity_suite(const ManifoldModel& model, const Vec3& a, int draws = 100,
                                        unsigned seed = 1);

struct MomentSuiteReport {
  int keys = 0;
  double max_quadrature_error = 0.0;
  bool contraction_consistent = true;  // Σ_γ I(…, γ, γ) = I(…) exactly for degrees 6 → 4 → 2 → 0
  bool pass() const { return max_quadrature_error <= 1e-12 && contraction_consistent; }
};

/// Every key of degree ≤ 6, exact versus quadrature on a grid with `n_theta` rings.
MomentSuiteReport moment_suite(int n_theta = 8);

}  // namespace hawking
