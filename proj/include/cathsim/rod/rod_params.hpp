#pragma once

#include "cathsim/rod/lie.hpp"

#include <vector>

namespace cathsim::rod {

struct Tendon
{
    Vec3 offset = Vec3::Zero(); // m, in the cross-section frame
    double tension = 0.0;       // N
};

// Shooting-method controls shared by statics and each dynamic step.
struct ShootingOptions
{
    int max_iterations = 200;
    double tolerance = 1e-8;  // N and N.m, infinity norm of the tip residual
    double fd_step = 1e-8;    // forward-difference perturbation of the base strains
};

struct RodParams
{
    double length = 0.08; // m
    int nodes = 41;

    Mat3 Kse = Mat3::Identity(); // N
    Mat3 Kbt = Mat3::Identity(); // N.m^2
    Mat3 Bse = Mat3::Zero();     // N.s
    Mat3 Bbt = Mat3::Zero();     // N.m^2.s
    Mat3 J = Mat3::Identity();   // m^4 (second moments of area)
    Mat3 drag = Mat3::Zero();    // square-law drag, N.s^2/m^3 per unit length

    double rho = 1000.0;  // kg/m^3
    double area = 1e-6;   // m^2
    Vec3 gravity = Vec3::Zero();

    Vec3 v_ref = Vec3::UnitZ();
    Vec3 u_ref = Vec3::Zero();

    std::vector<Tendon> tendons;
    ShootingOptions shooting;

    double s_step() const { return length / static_cast<double>(nodes - 1); }

    // Throws ParameterError when an invariant is broken.
    void validate() const;
};

// Isotropic material and cross section from which stiffness, damping and
// inertia matrices are assembled.
struct RodMaterial
{
    double length = 0.08;          // m
    double youngs_modulus = 1e8;   // Pa
    double poisson_ratio = 0.4;
    double second_moment = 1.9165e-12; // m^4
    double area = 2.9e-6;          // m^2
    double density = 1630.573;     // kg/m^3
    double damping_time = 0.005;   // s, B = damping_time * K
    int nodes = 41;
};

// Cross-section area of a hollow circular tube with the given outer diameter
// and second moment of area.
double hollow_tube_area(double outer_diameter, double second_moment);

RodParams make_rod_params(const RodMaterial &material, std::vector<Tendon> tendons = {},
                          const Vec3 &gravity = Vec3::Zero());

} // namespace cathsim::rod
