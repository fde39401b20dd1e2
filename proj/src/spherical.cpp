#include "hawking/spherical.hpp"

#include <algorithm>
#include <cmath>

#include "hawking/errors.hpp"

namespace hawking {

namespace {

int tri(int l, int m) { return l * (l + 1) / 2 + m; }

/// Orthonormal associated Legendre functions P̄_lm(cos θ), 0 ≤ m ≤ l ≤ L, with ∫ P̄² dx = 1/2π.
Eigen::VectorXd normalized_legendre(int L, double x, double s) {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(tri(L, L) + 1);
  p[0] = 1.0 / std::sqrt(4.0 * M_PI);
  for (int m = 1; m <= L; ++m) p[tri(m, m)] = std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s * p[tri(m - 1, m - 1)];
  for (int m = 0; m < L; ++m) p[tri(m + 1, m)] = std::sqrt(2.0 * m + 3.0) * x * p[tri(m, m)];
  for (int m = 0; m <= L; ++m)
    for (int l = m + 2; l <= L; ++l) {
      const double a = std::sqrt((4.0 * l * l - 1.0) / (double(l) * l - double(m) * m));
      const double b = std::sqrt((double(l - 1) * (l - 1) - double(m) * m) / (4.0 * (l - 1) * (l - 1) - 1.0));
      p[tri(l, m)] = a * (x * p[tri(l - 1, m)] - b * p[tri(l - 2, m)]);
    }
  return p;
}

/// Gauss–Legendre nodes on [−1, 1] in descending order (θ ascending) and weights.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    double p0 = 1.0, p1 = z;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (z * p1 - p0) / (z * z - 1.0);
    x[i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

}  // namespace

QuadratureGrid::QuadratureGrid(int n_theta) : n_theta_(n_theta), n_phi_(2 * n_theta) {
  if (n_theta < 4) throw DomainError("n_theta must be at least 4");
  gauss_legendre(n_theta_, cos_theta_, theta_weights_);
  const int L = band();
  const int ntri = tri(L, L) + 1;
  theta_.resize(n_theta_);
  sin_theta_.resize(n_theta_);
  p_.resize(n_theta_, ntri);
  dp_.resize(n_theta_, ntri);
  d2p_.resize(n_theta_, ntri);
  for (int it = 0; it < n_theta_; ++it) {
    const double x = cos_theta_[it];
    const double s = std::sqrt((1.0 - x) * (1.0 + x));
    theta_[it] = std::acos(x);
    sin_theta_[it] = s;
    const Eigen::VectorXd p = normalized_legendre(L, x, s);
    for (int m = 0; m <= L; ++m)
      for (int l = m; l <= L; ++l) {
        const double pl = p[tri(l, m)];
        const double plm1 = l > m ? p[tri(l - 1, m)] : 0.0;
        const double c = std::sqrt((2.0 * l + 1.0) * (double(l) * l - double(m) * m) / (2.0 * l - 1.0));
        // dP/dθ = −sin θ dP/dx,  (1 − x²) dP/dx = c P_{l−1} − l x P_l
        const double dth = l == 0 ? 0.0 : (l * x * pl - c * plm1) / s;
        p_(it, tri(l, m)) = pl;
        dp_(it, tri(l, m)) = dth;
        d2p_(it, tri(l, m)) = -(x / s) * dth - (l * (l + 1.0) - m * m / (s * s)) * pl;
      }
  }

  phi_.resize(n_phi_);
  trig_.resize(n_phi_, 2 * L + 1);
  dtrig_.resize(n_phi_, 2 * L + 1);
  d2trig_.resize(n_phi_, 2 * L + 1);
  const double r2 = std::sqrt(2.0);
  for (int ip = 0; ip < n_phi_; ++ip) {
    const double ph = 2.0 * M_PI * ip / n_phi_;
    phi_[ip] = ph;
    for (int m = -L; m <= L; ++m) {
      const int col = m + L;
      if (m == 0) {
        trig_(ip, col) = 1.0;
        dtrig_(ip, col) = 0.0;
        d2trig_(ip, col) = 0.0;
      } else if (m > 0) {
        trig_(ip, col) = r2 * std::cos(m * ph);
        dtrig_(ip, col) = -r2 * m * std::sin(m * ph);
        d2trig_(ip, col) = -r2 * m * m * std::cos(m * ph);
      } else {
        const int k = -m;
        trig_(ip, col) = r2 * std::sin(k * ph);
        dtrig_(ip, col) = r2 * k * std::cos(k * ph);
        d2trig_(ip, col) = -r2 * k * k * std::sin(k * ph);
      }
    }
  }

  nodes_.resize(size());
  weights_.resize(size());
  for (int it = 0; it < n_theta_; ++it)
    for (int ip = 0; ip < n_phi_; ++ip) {
      const int q = it * n_phi_ + ip;
      nodes_[q] = Vec3(sin_theta_[it] * std::cos(phi_[ip]), sin_theta_[it] * std::sin(phi_[ip]), cos_theta_[it]);
      weights_[q] = theta_weights_[it] * 2.0 * M_PI / n_phi_;
    }
}

double QuadratureGrid::integrate(const Eigen::VectorXd& samples) const {
  if (samples.size() != size()) throw GridMismatchError("sample count does not match the grid");
  return weights_.dot(samples);
}

Eigen::VectorXd QuadratureGrid::analyze(const Eigen::VectorXd& samples, int band_limit) const {
  if (samples.size() != size()) throw GridMismatchError("sample count does not match the grid");
  if (band_limit > band() || band_limit < 0) throw GridMismatchError("band limit exceeds grid resolution");
  const int L = band();
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> f(
      samples.data(), n_theta_, n_phi_);
  const Eigen::MatrixXd ring = (f * trig_) * (2.0 * M_PI / n_phi_);
  Eigen::VectorXd a = Eigen::VectorXd::Zero(sh_count(band_limit));
  for (int l = 0; l <= band_limit; ++l)
    for (int m = -l; m <= l; ++m) {
      const int am = std::abs(m);
      double acc = 0.0;
      for (int it = 0; it < n_theta_; ++it) acc += theta_weights_[it] * p_(it, tri(l, am)) * ring(it, m + L);
      a[sh_index(l, m)] = acc;
    }
  return a;
}

Eigen::VectorXd QuadratureGrid::synthesize(const Eigen::VectorXd& coeffs, int l_max) const {
  if (coeffs.size() != sh_count(l_max)) throw GridMismatchError("coefficient count does not match l_max");
  if (l_max > band()) throw GridMismatchError("l_max exceeds grid resolution");
  const int L = band();
  Eigen::MatrixXd ring = Eigen::MatrixXd::Zero(n_theta_, 2 * L + 1);
  for (int l = 0; l <= l_max; ++l)
    for (int m = -l; m <= l; ++m) {
      const double a = coeffs[sh_index(l, m)];
      if (a == 0.0) continue;
      ring.col(m + L) += a * p_.col(tri(l, std::abs(m)));
    }
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> f = ring * trig_.transpose();
  return Eigen::Map<Eigen::VectorXd>(f.data(), size());
}

SphericalField QuadratureGrid::synthesize_with_derivatives(const Eigen::VectorXd& coeffs, int l_max) const {
  if (coeffs.size() != sh_count(l_max)) throw GridMismatchError("coefficient count does not match l_max");
  if (l_max > band()) throw GridMismatchError("l_max exceeds grid resolution");
  const int L = band();
  Eigen::MatrixXd r0 = Eigen::MatrixXd::Zero(n_theta_, 2 * L + 1);
  Eigen::MatrixXd r1 = r0, r2 = r0;
  for (int l = 0; l <= l_max; ++l)
    for (int m = -l; m <= l; ++m) {
      const double a = coeffs[sh_index(l, m)];
      if (a == 0.0) continue;
      const int t = tri(l, std::abs(m));
      r0.col(m + L) += a * p_.col(t);
      r1.col(m + L) += a * dp_.col(t);
      r2.col(m + L) += a * d2p_.col(t);
    }
  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  auto flat = [this](const RowMat& m) { return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(m.data(), size())); };
  SphericalField out;
  out.f = flat(r0 * trig_.transpose());
  out.f_p = flat(r0 * dtrig_.transpose());
  out.f_pp = flat(r0 * d2trig_.transpose());
  out.f_t = flat(r1 * trig_.transpose());
  out.f_tp = flat(r1 * dtrig_.transpose());
  out.f_tt = flat(r2 * trig_.transpose());
  return out;
}

SphericalField QuadratureGrid::differentiate(const Eigen::VectorXd& samples) const {
  SphericalField out = synthesize_with_derivatives(analyze(samples, band()), band());
  out.f = samples;
  return out;
}

GridPtr build_grid(int n_theta) { return std::make_shared<const QuadratureGrid>(n_theta); }

Eigen::VectorXd real_sh_all(int l_max, const Vec3& omega) {
  const Vec3 u = omega.normalized();
  const double x = std::clamp(u.z(), -1.0, 1.0);
  const double s = std::hypot(u.x(), u.y());
  const double ph = std::atan2(u.y(), u.x());
  const Eigen::VectorXd p = normalized_legendre(l_max, x, s);
  Eigen::VectorXd y(sh_count(l_max));
  const double r2 = std::sqrt(2.0);
  for (int l = 0; l <= l_max; ++l) {
    y[sh_index(l, 0)] = p[tri(l, 0)];
    for (int m = 1; m <= l; ++m) {
      y[sh_index(l, m)] = r2 * p[tri(l, m)] * std::cos(m * ph);
      y[sh_index(l, -m)] = r2 * p[tri(l, m)] * std::sin(m * ph);
    }
  }
  return y;
}

}  // namespace hawking
