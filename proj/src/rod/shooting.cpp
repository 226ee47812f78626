#include "shooting.hpp"

#include "cathsim/errors.hpp"

#include <cmath>
#include <limits>

namespace cathsim::rod::detail {

namespace {

RodNode base_node(const Vec6 &x)
{
    RodNode base;
    base.v = x.head<3>();
    base.u = x.tail<3>();
    return base;
}

double residual_inf(const Vec6 &r)
{
    return r.cwiseAbs().maxCoeff();
}

// Moments are weighted by 1/L so that both halves carry force units.
double merit(const Vec6 &r, double length)
{
    return std::hypot(r.head<3>().norm(), r.tail<3>().norm() / length);
}

struct Evaluation
{
    RodState state;
    Vec6 residual;
    bool ok = false;
};

Evaluation evaluate(const RodParams &params, const BdfCoeffs &coeffs, std::span<const HistoryTerms> history,
                    const TipLoad &load, const Vec6 &x)
{
    Evaluation e;
    try {
        e.state = integrate_shape(base_node(x), params, coeffs, history);
        e.residual = tip_residual(e.state, params, coeffs, history, load);
        e.ok = e.residual.allFinite();
    } catch (const NumericalSingularityError &) {
        e.ok = false;
    }
    return e;
}

} // namespace

RodState shoot(const RodParams &params, const BdfCoeffs &coeffs, std::span<const HistoryTerms> history,
               const TipLoad &load, const Vec6 &guess)
{
    const ShootingOptions &opt = params.shooting;
    Vec6 x = guess;
    Evaluation cur = evaluate(params, coeffs, history, load, x);
    if (!cur.ok) {
        // Surface the singularity with its node index.
        integrate_shape(base_node(x), params, coeffs, history);
        throw ConvergenceError(std::numeric_limits<double>::infinity(), "shooting: initial guess is not finite");
    }

    for (int it = 0; it < opt.max_iterations; ++it) {
        if (residual_inf(cur.residual) < opt.tolerance) {
            cur.state.solver_iterations = it;
            return cur.state;
        }

        Mat6 jac;
        for (int k = 0; k < 6; ++k) {
            Vec6 xp = x;
            xp(k) += opt.fd_step;
            const Evaluation e = evaluate(params, coeffs, history, load, xp);
            if (!e.ok) {
                throw ConvergenceError(residual_inf(cur.residual), "shooting: Jacobian evaluation failed");
            }
            jac.col(k) = (e.residual - cur.residual) / opt.fd_step;
        }
        const Eigen::FullPivLU<Mat6> lu(jac);
        if (!lu.isInvertible()) {
            throw ConvergenceError(residual_inf(cur.residual), "shooting: singular Jacobian");
        }
        const Vec6 dx = lu.solve(-cur.residual);

        const double m0 = merit(cur.residual, params.length);
        double step = 1.0;
        bool accepted = false;
        for (int halving = 0; halving < 30; ++halving, step *= 0.5) {
            Evaluation trial = evaluate(params, coeffs, history, load, x + step * dx);
            if (trial.ok && merit(trial.residual, params.length) < m0) {
                x += step * dx;
                cur = std::move(trial);
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            throw ConvergenceError(residual_inf(cur.residual), "shooting: line search stalled");
        }
    }
    if (residual_inf(cur.residual) < opt.tolerance) {
        cur.state.solver_iterations = opt.max_iterations;
        return cur.state;
    }
    throw ConvergenceError(residual_inf(cur.residual), "shooting: no convergence within the iteration limit");
}

} // namespace cathsim::rod::detail
