#pragma once

#include <Eigen/Dense>

namespace cathsim::rod {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

// Skew-symmetric matrix such that hat(a) * b == a.cross(b).
Mat3 hat(const Vec3 &v);

// Inverse of hat. Throws PreconditionError when |m + m^T| >= 1e-9.
Vec3 vee(const Mat3 &m);

// Nearest rotation in the Frobenius sense (polar factor via SVD).
Mat3 orthonormalize(const Mat3 &m);

// Frobenius norm of R^T R - I.
double orthonormality_defect(const Mat3 &r);

Mat3 rotation_z(double angle_rad);

} // namespace cathsim::rod
