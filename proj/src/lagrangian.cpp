#include "hawking/lagrangian.hpp"

#include <sstream>

namespace hawking {

LagrangianJet& LagrangianJet::operator+=(const LagrangianJet& o) {
  value += o.value;
  d_M += o.d_M;
  d_V += o.d_V;
  hess_V += o.hess_V;
  nabla_d_V += o.nabla_d_V;
  return *this;
}

bool LagrangianSpec::is_hawking() const {
  return !extra && alpha == -0.25 && beta == -0.25 && c0 == 0.5 && ct == 0.0;
}

bool LagrangianSpec::is_zero() const { return !extra && alpha == 0.0 && beta == 0.0 && c0 == 0.0 && ct == 0.0; }

LagrangianJet LagrangianSpec::evaluate(const AmbientEval& amb, const Vec3& nu) const {
  LagrangianJet j;
  const double tr = amb.tr_k;
  const Vec3 kv = amb.k * nu;
  const double kvv = nu.dot(kv);

  Vec3 d_tr, d_kvv;  // ∇_k trK and (∇_k K)(ν, ν)
  Mat3 d_kv;         // (k, a): (∇_k K)_ab ν^b
  for (int k = 0; k < 3; ++k) {
    d_tr[k] = amb.g_inv.cwiseProduct(amb.nabla_k[k]).sum();
    const Vec3 row = amb.nabla_k[k] * nu;
    d_kv.row(k) = row.transpose();
    d_kvv[k] = nu.dot(row);
  }

  j.value = alpha * tr * tr + beta * kvv * kvv + c0 * tr * kvv + ct;
  j.d_M = 2.0 * alpha * tr * d_tr + 2.0 * beta * kvv * d_kvv + c0 * (kvv * d_tr + tr * d_kvv);
  const double s = 4.0 * beta * kvv + 2.0 * c0 * tr;
  j.d_V = s * kv;
  j.hess_V = 8.0 * beta * kv * kv.transpose() + s * amb.k;
  const Vec3 ds = 4.0 * beta * d_kvv + 2.0 * c0 * d_tr;
  j.nabla_d_V = ds * kv.transpose() + s * d_kv;

  if (extra) j += extra(amb, nu);
  return j;
}

std::string LagrangianSpec::describe() const {
  if (is_hawking()) return "hawking (-1/4 P^2)";
  std::ostringstream os;
  os.precision(17);
  os << "alpha=" << alpha << " beta=" << beta << " c0=" << c0 << " ct=" << ct;
  if (extra) os << " + " << (extra_label.empty() ? "extension" : extra_label);
  return os.str();
}

}  // namespace hawking
