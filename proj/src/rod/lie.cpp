#include "cathsim/rod/lie.hpp"

#include "cathsim/errors.hpp"

#include <cmath>

namespace cathsim::rod {

Mat3 hat(const Vec3 &v)
{
    Mat3 m;
    m << 0.0, -v.z(), v.y(),
         v.z(), 0.0, -v.x(),
         -v.y(), v.x(), 0.0;
    return m;
}

Vec3 vee(const Mat3 &m)
{
    if ((m + m.transpose()).norm() >= 1e-9) {
        throw PreconditionError("vee: matrix is not skew-symmetric");
    }
    return Vec3(m(2, 1), m(0, 2), m(1, 0));
}

Mat3 orthonormalize(const Mat3 &m)
{
    Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 r = svd.matrixU() * svd.matrixV().transpose();
    if (r.determinant() < 0.0) {
        Mat3 u = svd.matrixU();
        u.col(2) *= -1.0;
        r = u * svd.matrixV().transpose();
    }
    return r;
}

double orthonormality_defect(const Mat3 &r)
{
    return (r.transpose() * r - Mat3::Identity()).norm();
}

Mat3 rotation_z(double angle_rad)
{
    return Eigen::AngleAxisd(angle_rad, Vec3::UnitZ()).toRotationMatrix();
}

} // namespace cathsim::rod
