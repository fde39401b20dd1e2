#pragma once

#include <array>

#include <Eigen/Dense>

namespace hawking {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Rank-3 array indexed [k](i, j).  Used for ∂_k g_ij, Γ^k_ij and ∇_k K_ij.
using Tensor3 = std::array<Mat3, 3>;

/// Rank-4 array indexed [i][j](k, l).
using Tensor4 = std::array<std::array<Mat3, 3>, 3>;

/// Rank-5 array indexed [a][b][c](i, j); only third metric derivatives use it.
using Tensor5 = std::array<std::array<std::array<Mat3, 3>, 3>, 3>;

inline Tensor3 zero_tensor3() {
  Tensor3 t;
  for (auto& m : t) m.setZero();
  return t;
}

inline Tensor4 zero_tensor4() {
  Tensor4 t;
  for (auto& row : t)
    for (auto& m : row) m.setZero();
  return t;
}

inline Tensor5 zero_tensor5() {
  Tensor5 t;
  for (auto& a : t)
    for (auto& b : a)
      for (auto& m : b) m.setZero();
  return t;
}

}  // namespace hawking
