#include "hawking/moments.hpp"

#include <numeric>
#include <random>
#include <sstream>

#include "hawking/errors.hpp"

namespace hawking {

Rational::Rational(long long n, long long d) {
  if (d == 0) throw DomainError("rational with zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  const long long g = std::gcd(n < 0 ? -n : n, d);
  num = g ? n / g : 0;
  den = g ? d / g : 1;
}

std::string Rational::str() const {
  if (den == 1) return std::to_string(num);
  return std::to_string(num) + "/" + std::to_string(den);
}

Rational operator+(const Rational& a, const Rational& b) { return Rational(a.num * b.den + b.num * a.den, a.den * b.den); }

Rational operator*(const Rational& a, const Rational& b) { return Rational(a.num * b.num, a.den * b.den); }

MomentKey MomentKey::parse(const std::string& text) {
  MomentKey key;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      throw ParseError("moment key entry '" + item + "' is not an integer");
    }
    if (item.find_first_not_of(" \t", used) != std::string::npos)
      throw ParseError("moment key entry '" + item + "' is not an integer");
    key.alpha.push_back(v);
  }
  return key;
}

std::string MomentKey::str() const {
  std::string s = "(";
  for (std::size_t i = 0; i < alpha.size(); ++i) s += (i ? "," : "") + std::to_string(alpha[i]);
  return s + ")";
}

double ExactMoment::value() const { return coefficient.value() * M_PI; }

namespace {

void check_key(const MomentKey& key) {
  if (static_cast<int>(key.alpha.size()) > kMaxMomentDegree)
    throw UnsupportedDegreeError("moment degree " + std::to_string(key.alpha.size()) + " exceeds 6");
  for (int a : key.alpha)
    if (a < 1 || a > 3) throw DomainError("moment index " + std::to_string(a) + " outside {1, 2, 3}");
}

// Number of perfect matchings of the positions in which matched indices agree.
long long count_pairings(std::vector<int> idx) {
  if (idx.empty()) return 1;
  const int first = idx.front();
  idx.erase(idx.begin());
  long long total = 0;
  for (std::size_t j = 0; j < idx.size(); ++j) {
    if (idx[j] != first) continue;
    std::vector<int> rest = idx;
    rest.erase(rest.begin() + static_cast<long>(j));
    total += count_pairings(rest);
  }
  return total;
}

MomentKey key_from_exponent(const NuPolynomial::Exponent& e) {
  MomentKey key;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < e[i]; ++k) key.alpha.push_back(i + 1);
  return key;
}

}  // namespace

ExactMoment exact_monomial_integral(const MomentKey& key) {
  check_key(key);
  const int n = static_cast<int>(key.alpha.size());
  if (n % 2) return {Rational(0)};
  long long double_factorial = 1;
  for (int k = n + 1; k > 1; k -= 2) double_factorial *= k;
  return {Rational(4 * count_pairings(key.alpha), double_factorial)};
}

double quadrature_monomial_integral(const MomentKey& key, const QuadratureGrid& grid) {
  for (int a : key.alpha)
    if (a < 1 || a > 3) throw DomainError("moment index " + std::to_string(a) + " outside {1, 2, 3}");
  Eigen::VectorXd f(grid.size());
  for (int q = 0; q < grid.size(); ++q) {
    double v = 1.0;
    for (int a : key.alpha) v *= grid.nodes()[q][a - 1];
    f[q] = v;
  }
  return grid.integrate(f);
}

NuPolynomial NuPolynomial::constant(double c) {
  NuPolynomial p;
  if (c != 0.0) p.terms_[{0, 0, 0}] = c;
  return p;
}

NuPolynomial NuPolynomial::component(int i) {
  NuPolynomial p;
  Exponent e{0, 0, 0};
  e[i] = 1;
  p.terms_[e] = 1.0;
  return p;
}

NuPolynomial NuPolynomial::linear(const Vec3& v) {
  NuPolynomial p;
  for (int i = 0; i < 3; ++i)
    if (v[i] != 0.0) p += v[i] * component(i);
  return p;
}

NuPolynomial NuPolynomial::quadratic(const Mat3& m) {
  NuPolynomial p;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (m(i, j) != 0.0) p += m(i, j) * (component(i) * component(j));
  return p;
}

NuPolynomial& NuPolynomial::operator+=(const NuPolynomial& o) {
  for (const auto& [e, c] : o.terms_) terms_[e] += c;
  return *this;
}

NuPolynomial operator*(const NuPolynomial& a, const NuPolynomial& b) {
  NuPolynomial p;
  for (const auto& [ea, ca] : a.terms_)
    for (const auto& [eb, cb] : b.terms_) {
      const NuPolynomial::Exponent e{ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]};
      p.terms_[e] += ca * cb;
    }
  return p;
}

NuPolynomial operator*(double s, NuPolynomial a) {
  for (auto& [e, c] : a.terms_) c *= s;
  return a;
}

int NuPolynomial::degree() const {
  int d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, e[0] + e[1] + e[2]);
  return d;
}

double NuPolynomial::evaluate(const Vec3& nu) const {
  double s = 0.0;
  for (const auto& [e, c] : terms_) s += c * std::pow(nu[0], e[0]) * std::pow(nu[1], e[1]) * std::pow(nu[2], e[2]);
  return s;
}

namespace {

// Exact monomial values indexed by exponent triple, built once.
const std::array<std::array<std::array<double, 7>, 7>, 7>& exact_table() {
  static const auto table = [] {
    std::array<std::array<std::array<double, 7>, 7>, 7> t{};
    for (int a = 0; a <= 6; ++a)
      for (int b = 0; a + b <= 6; ++b)
        for (int c = 0; a + b + c <= 6; ++c) t[a][b][c] = exact_monomial_integral(key_from_exponent({a, b, c})).value();
    return t;
  }();
  return table;
}

}  // namespace

double NuPolynomial::integrate_exact() const {
  const auto& table = exact_table();
  double s = 0.0;
  for (const auto& [e, c] : terms_) {
    if (e[0] + e[1] + e[2] > kMaxMomentDegree)
      throw UnsupportedDegreeError("integrand degree " + std::to_string(e[0] + e[1] + e[2]) + " exceeds 6");
    s += c * table[e[0]][e[1]][e[2]];
  }
  return s;
}

double NuPolynomial::integrate_quadrature(const QuadratureGrid& grid) const {
  const int deg = degree();
  if (deg > grid.exactness_degree())
    throw UnsupportedDegreeError("integrand degree exceeds the grid exactness degree");
  double s = 0.0;
  std::vector<std::array<double, 3>> powers(deg + 1);
  for (int q = 0; q < grid.size(); ++q) {
    const Vec3& x = grid.nodes()[q];
    powers[0] = {1.0, 1.0, 1.0};
    for (int k = 1; k <= deg; ++k)
      for (int i = 0; i < 3; ++i) powers[k][i] = powers[k - 1][i] * x[i];
    double v = 0.0;
    for (const auto& [e, c] : terms_) v += c * powers[e[0]][0] * powers[e[1]][1] * powers[e[2]][2];
    s += grid.weights()[q] * v;
  }
  return s;
}

Vec3 PointData::d_tr_k() const {
  Vec3 v;
  for (int c = 0; c < 3; ++c) v[c] = nabla_k[c].trace();
  return v;
}

Vec3 PointData::d_tr_k2() const { return 2.0 * tr_k() * d_tr_k(); }

Vec3 PointData::d_norm_k2() const {
  Vec3 v;
  for (int c = 0; c < 3; ++c) v[c] = 2.0 * k.cwiseProduct(nabla_k[c]).sum();
  return v;
}

PointData point_data(const ManifoldModel& model, const Vec3& a) {
  model.require_in_chart(a);
  const AmbientEval amb = curvature_at(model, a, AmbientLevel::Full);
  const Mat3 F = orthonormal_frame(amb.g);
  PointData p;
  p.k = F.transpose() * amb.k * F;
  for (int c = 0; c < 3; ++c) {
    Mat3 m = Mat3::Zero();
    for (int d = 0; d < 3; ++d) m += F(d, c) * amb.nabla_k[d];
    p.nabla_k[c] = F.transpose() * m * F;
  }
  p.grad_scalar = F.transpose() * amb.grad_scalar;
  return p;
}

FamilyIntegrands family_integrands(const LagrangianSpec& L, const PointData& p) {
  if (L.extra) throw DomainError("concentration vectors need a Lagrangian in the polynomial family");
  using P = NuPolynomial;
  const double trk = p.tr_k();
  const P kvv = P::quadratic(p.k);
  const Vec3 dtr = p.d_tr_k();
  FamilyIntegrands out;
  out.value = P::constant(L.alpha * trk * trk + L.ct) + L.beta * (kvv * kvv) + (L.c0 * trk) * kvv;
  std::array<P, 3> k_nu;
  for (int b = 0; b < 3; ++b) k_nu[b] = P::linear(p.k.row(b).transpose());
  for (int b = 0; b < 3; ++b) {
    out.d_V[b] = (4.0 * L.beta) * (kvv * k_nu[b]) + (2.0 * L.c0 * trk) * k_nu[b];
    const P nkvv = P::quadratic(p.nabla_k[b]);
    out.d_M[b] = P::constant(2.0 * L.alpha * trk * dtr[b]) + (2.0 * L.beta) * (kvv * nkvv) +
                 L.c0 * (dtr[b] * kvv + trk * nkvv);
  }
  for (int g = 0; g < 3; ++g) {
    const P nkvv = P::quadratic(p.nabla_k[g]);
    for (int b = 0; b < 3; ++b) {
      const P nk_nu = P::linear(p.nabla_k[g].row(b).transpose());
      out.nabla_d_V[g][b] = (4.0 * L.beta) * (nkvv * k_nu[b] + kvv * nk_nu) +
                            (2.0 * L.c0) * (dtr[g] * k_nu[b] + trk * nk_nu);
    }
  }
  return out;
}

namespace {

NuPolynomial with_position(const NuPolynomial& F, const std::vector<int>& indices) {
  NuPolynomial p = F;
  for (int i : indices) {
    if (i < 0 || i > 2) throw DomainError("c-moment index outside {0, 1, 2}");
    p = p * NuPolynomial::component(i);
  }
  return p;
}

struct VectorsPair {
  Vec3 V, W;
};

template <class Integrate>
VectorsPair assemble(const FamilyIntegrands& I, Integrate integrate) {
  VectorsPair out{Vec3::Zero(), Vec3::Zero()};
  for (int a = 0; a < 3; ++a) {
    double v = -integrate(I.d_V[a], {}) + 2.0 * integrate(I.value, {a});
    double w = 0.0;
    for (int b = 0; b < 3; ++b) {
      v += integrate(I.d_V[b], {a, b});
      w += -integrate(I.nabla_d_V[b][a], {b}) + 3.0 * integrate(I.d_M[b], {a, b});
      for (int g = 0; g < 3; ++g) w += integrate(I.nabla_d_V[g][b], {a, b, g});
    }
    out.V[a] = v;
    out.W[a] = 3.0 / (2.0 * M_PI) * w;
  }
  return out;
}

}  // namespace

double c_moment(const NuPolynomial& F, const std::vector<int>& indices) {
  return with_position(F, indices).integrate_exact();
}

double c_moment_quadrature(const NuPolynomial& F, const std::vector<int>& indices, const QuadratureGrid& grid) {
  return with_position(F, indices).integrate_quadrature(grid);
}

ConcentrationVectors concentration_vectors(const LagrangianSpec& L, const PointData& p) {
  const FamilyIntegrands I = family_integrands(L, p);
  static const GridPtr grid = build_grid(8);
  ConcentrationVectors out;
  const auto exact = assemble(I, [](const NuPolynomial& F, const std::vector<int>& idx) { return c_moment(F, idx); });
  const auto quad = assemble(
      I, [](const NuPolynomial& F, const std::vector<int>& idx) { return c_moment_quadrature(F, idx, *grid); });
  out.V = exact.V;
  out.W = exact.W;
  out.V_quadrature = quad.V;
  out.W_quadrature = quad.W;
  out.c_L = c_moment(I.value, {});
  for (int b = 0; b < 3; ++b) out.grad_c_L[b] = c_moment(I.d_M[b], {});
  return out;
}

ConcentrationVectors concentration_vectors(const LagrangianSpec& L, const ManifoldModel& model, const Vec3& a) {
  ConcentrationVectors out = concentration_vectors(L, point_data(model, a));
  out.point = a;
  return out;
}

std::vector<IdentityRow> identity_suite(const ManifoldModel& model, const Vec3& a, int draws, unsigned seed) {
  if (draws < 1) throw DomainError("identity suite needs at least one draw");
  const PointData base = point_data(model, a);
  std::mt19937 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);

  std::vector<IdentityRow> rows = {
      {"W[trK^2] = 6 d(trK^2)"},
      {"W[K(nu,nu)^2] = (2/5) d(trK^2 + 2|K|^2)"},
      {"W[trK K(nu,nu)] = 2 d(trK^2)"},
      {"dSc - W[-P^2/4] = d(Sc + (3/5)trK^2 + (1/5)|K|^2)"},
      {"W[L] = (3/2pi) d c(L) for the family"},
      {"V = 0 for even L"},
      {"W = 0 when K is parallel"},
      {"dSc - W[-(3/4)P^2 + 2K(nu,nu)^2] = d(Sc + trK^2 - |K|^2)"},
      {"dSc - W[-(1/4)trK^2 + (5/4)K(nu,nu)^2] = d(Sc + trK^2 - |K|^2)"},
  };

  auto record = [&](IdentityRow& row, const ConcentrationVectors& cv, const Vec3& w_expected, const Vec3& v_expected,
                    bool check_v) {
    const double scale = 1.0 + w_expected.norm();
    const Vec3& got = check_v ? cv.V : cv.W;
    const Vec3& got_q = check_v ? cv.V_quadrature : cv.W_quadrature;
    const Vec3& want = check_v ? v_expected : w_expected;
    row.exact_error = std::max(row.exact_error, (got - want).norm() / scale);
    row.quadrature_error = std::max(row.quadrature_error, (got_q - want).norm() / scale);
  };

  for (int d = 0; d < draws; ++d) {
    PointData p = base;
    Mat3 k0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) k0(i, j) = n(rng);
    p.k = 0.5 * (k0 + k0.transpose());
    for (int c = 0; c < 3; ++c) {
      Mat3 m;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m(i, j) = n(rng);
      p.nabla_k[c] = 0.5 * (m + m.transpose());
    }
    const Vec3 dtr2 = p.d_tr_k2(), dnorm2 = p.d_norm_k2();
    const Vec3 zero = Vec3::Zero();

    record(rows[0], concentration_vectors(LagrangianSpec::family(1, 0, 0), p), 6.0 * dtr2, zero, false);
    record(rows[1], concentration_vectors(LagrangianSpec::family(0, 1, 0), p), 0.4 * (dtr2 + 2.0 * dnorm2), zero,
           false);
    record(rows[2], concentration_vectors(LagrangianSpec::family(0, 0, 1), p), 2.0 * dtr2, zero, false);

    const auto hawking = concentration_vectors(LagrangianSpec::hawking(), p);
    {
      ConcentrationVectors shifted = hawking;
      shifted.W = p.grad_scalar - hawking.W;
      shifted.W_quadrature = p.grad_scalar - hawking.W_quadrature;
      record(rows[3], shifted, p.grad_scalar + 0.6 * dtr2 + 0.2 * dnorm2, zero, false);
    }

    const auto L = LagrangianSpec::family(n(rng), n(rng), n(rng), n(rng));
    const auto cv = concentration_vectors(L, p);
    record(rows[4], cv, 3.0 / (2.0 * M_PI) * cv.grad_c_L, zero, false);
    record(rows[5], cv, zero, zero, true);
    record(rows[5], hawking, zero, zero, true);

    PointData parallel = p;
    parallel.nabla_k = zero_tensor3();
    record(rows[6], concentration_vectors(L, parallel), zero, zero, false);

    const std::array<LagrangianSpec, 2> corollary = {
        // −¾P² + 2K(ν,ν)² = −¾trK² + (5/4)K(ν,ν)² + (3/2)trK K(ν,ν)
        LagrangianSpec::family(-0.75, 1.25, 1.5),
        LagrangianSpec::family(-0.25, 1.25, 0.0),
    };
    for (int c = 0; c < 2; ++c) {
      ConcentrationVectors shifted = concentration_vectors(corollary[c], p);
      shifted.W = p.grad_scalar - shifted.W;
      shifted.W_quadrature = p.grad_scalar - shifted.W_quadrature;
      record(rows[7 + c], shifted, p.grad_scalar + dtr2 - dnorm2, zero, false);
    }
  }
  return rows;
}

MomentSuiteReport moment_suite(int n_theta) {
  const GridPtr grid = build_grid(n_theta);
  MomentSuiteReport rep;
  for (int n = 0; n <= kMaxMomentDegree; ++n) {
    std::vector<int> idx(n, 1);
    while (true) {
      const MomentKey key{idx};
      const double exact = exact_monomial_integral(key).value();
      rep.max_quadrature_error = std::max(rep.max_quadrature_error,
                                          std::abs(quadrature_monomial_integral(key, *grid) - exact));
      ++rep.keys;
      if (n >= 2) {
        Rational trace(0);
        for (int g = 1; g <= 3; ++g) {
          MomentKey longer = key;
          longer.alpha.resize(n - 2);
          longer.alpha.push_back(g);
          longer.alpha.push_back(g);
          trace = trace + exact_monomial_integral(longer).coefficient;
        }
        MomentKey shorter = key;
        shorter.alpha.resize(n - 2);
        if (!(trace == exact_monomial_integral(shorter).coefficient)) rep.contraction_consistent = false;
      }
      int pos = n - 1;
      while (pos >= 0 && idx[pos] == 3) idx[pos--] = 1;
      if (pos < 0) break;
      ++idx[pos];
    }
  }
  return rep;
}

}  // namespace hawking
