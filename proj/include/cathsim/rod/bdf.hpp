#pragma once

namespace cathsim::rod {

// Time semi-discretization coefficients. A time derivative is replaced by
//   y_t(i) = c0 * y(i) + c1 * y(i-1) + c2 * y(i-2) + d1 * y_t(i-1).
struct BdfCoeffs
{
    double c0 = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
    double d1 = 0.0;
    double alpha = 0.0;
    double dt = 0.0;

    bool is_static() const { return dt == 0.0; }
};

inline constexpr double kDefaultAlpha = -0.2;
inline constexpr double kDefaultTimeStep = 0.01;

// BDF-alpha family, -0.5 < alpha <= 0. alpha == 0 is BDF2.
BdfCoeffs bdf_coeffs(double dt, double alpha = kDefaultAlpha);

// One-level backward Euler written in the same form (c2 = d1 = 0).
BdfCoeffs backward_euler_coeffs(double dt);

// All-zero coefficients: the time-derivative terms vanish (statics).
BdfCoeffs static_coeffs();

} // namespace cathsim::rod
