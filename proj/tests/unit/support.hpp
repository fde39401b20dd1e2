#pragma once

#include <random>

#include "hawking/ambient.hpp"
#include "hawking/surface.hpp"

namespace hawking::testing {

inline Tensor4 random_quadratic(std::mt19937& rng, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Tensor4 q = zero_tensor4();
  for (auto& row : q)
    for (auto& m : row)
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) m(a, b) = u(rng);
  return q;
}

inline ExtrinsicData random_extrinsic(std::mt19937& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::array<double, 6> k0{};
  std::array<double, 18> k1{};
  for (auto& v : k0) v = u(rng);
  for (auto& v : k1) v = u(rng);
  return ExtrinsicData::from_components(k0, k1);
}

/// Round sphere plus band-limited noise with relative amplitude `noise` in degrees 1..noise_band.
inline SurfaceShape random_shape(std::mt19937& rng, const Vec3& center, double radius, int l_max, double noise,
                                 int noise_band) {
  std::normal_distribution<double> n(0.0, 1.0);
  SurfaceShape s = SurfaceShape::round(center, radius, l_max);
  const int band = std::min(noise_band, l_max);
  for (int l = 1; l <= band; ++l)
    for (int m = -l; m <= l; ++m) s.coeffs[sh_index(l, m)] = radius * noise * n(rng) / (1.0 + l);
  return s;
}

inline Mat3 random_rotation(std::mt19937& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  return q.normalized().toRotationMatrix();
}

}  // namespace hawking::testing
