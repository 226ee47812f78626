#include "cathsim/rod/bdf.hpp"

#include "cathsim/errors.hpp"

#include <cmath>

namespace cathsim::rod {

BdfCoeffs bdf_coeffs(double dt, double alpha)
{
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw ParameterError("bdf_coeffs: dt must be positive");
    }
    if (!(alpha > -0.5 && alpha <= 0.0)) {
        throw ParameterError("bdf_coeffs: alpha must lie in (-0.5, 0]");
    }
    BdfCoeffs c;
    c.alpha = alpha;
    c.dt = dt;
    c.c0 = (1.5 + alpha) / (dt * (1.0 + alpha));
    c.c1 = -2.0 / dt;
    c.c2 = (0.5 + alpha) / (dt * (1.0 + alpha));
    c.d1 = alpha / (1.0 + alpha);
    return c;
}

BdfCoeffs backward_euler_coeffs(double dt)
{
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw ParameterError("backward_euler_coeffs: dt must be positive");
    }
    BdfCoeffs c;
    c.dt = dt;
    c.c0 = 1.0 / dt;
    c.c1 = -1.0 / dt;
    return c;
}

BdfCoeffs static_coeffs()
{
    return BdfCoeffs{};
}

} // namespace cathsim::rod
