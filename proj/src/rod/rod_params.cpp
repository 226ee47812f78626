#include "cathsim/rod/rod_params.hpp"

#include "cathsim/errors.hpp"

#include <cmath>
#include <numbers>

namespace cathsim::rod {

namespace {

bool symmetric_positive_definite(const Mat3 &m)
{
    if ((m - m.transpose()).norm() > 1e-12 * (1.0 + m.norm())) {
        return false;
    }
    Eigen::SelfAdjointEigenSolver<Mat3> eig(m);
    return eig.eigenvalues().minCoeff() > 0.0;
}

} // namespace

void RodParams::validate() const
{
    if (nodes < 2) {
        throw ParameterError("rod: at least two nodes are required");
    }
    if (!(length > 0.0)) {
        throw ParameterError("rod: length must be positive");
    }
    if (!symmetric_positive_definite(Kse) || !symmetric_positive_definite(Kbt)) {
        throw ParameterError("rod: Kse and Kbt must be symmetric positive definite");
    }
    if (!(rho > 0.0) || !(area > 0.0)) {
        throw ParameterError("rod: density and area must be positive");
    }
    for (const auto &t : tendons) {
        if (t.tension < 0.0 || !std::isfinite(t.tension)) {
            throw ParameterError("rod: tendon tensions must be finite and non-negative");
        }
    }
}

double hollow_tube_area(double outer_diameter, double second_moment)
{
    const double d4 = std::pow(outer_diameter, 4);
    const double inner4 = d4 - 64.0 * second_moment / std::numbers::pi;
    if (!(inner4 >= 0.0) || !(outer_diameter > 0.0)) {
        throw ParameterError("hollow_tube_area: second moment exceeds that of a solid section");
    }
    const double inner = std::pow(inner4, 0.25);
    return std::numbers::pi / 4.0 * (outer_diameter * outer_diameter - inner * inner);
}

RodParams make_rod_params(const RodMaterial &m, std::vector<Tendon> tendons, const Vec3 &gravity)
{
    if (!(m.youngs_modulus > 0.0) || !(m.second_moment > 0.0) || !(m.area > 0.0)) {
        throw ParameterError("make_rod_params: modulus, second moment and area must be positive");
    }
    if (!(m.poisson_ratio > -1.0 && m.poisson_ratio < 0.5 + 1e-12)) {
        throw ParameterError("make_rod_params: Poisson ratio out of range");
    }
    const double shear = m.youngs_modulus / (2.0 * (1.0 + m.poisson_ratio));
    const double polar = 2.0 * m.second_moment;

    RodParams p;
    p.length = m.length;
    p.nodes = m.nodes;
    p.rho = m.density;
    p.area = m.area;
    p.Kse = Vec3(shear * m.area, shear * m.area, m.youngs_modulus * m.area).asDiagonal();
    p.Kbt = Vec3(m.youngs_modulus * m.second_moment, m.youngs_modulus * m.second_moment,
                 shear * polar).asDiagonal();
    p.Bse = m.damping_time * p.Kse;
    p.Bbt = m.damping_time * p.Kbt;
    p.J = Vec3(m.second_moment, m.second_moment, polar).asDiagonal();
    p.gravity = gravity;
    p.tendons = std::move(tendons);
    p.validate();
    return p;
}

} // namespace cathsim::rod
