#pragma once

#include <Eigen/Dense>
#include <complex>

namespace tdyn {

using State3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using cplx = std::complex<double>;

inline bool nearly_real(cplx z, double rel = 1e-12) {
  return std::abs(z.imag()) <= rel * std::max(1.0, std::abs(z));
}

}  // namespace tdyn
