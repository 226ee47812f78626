#include "cathsim/errors.hpp"
#include "cathsim/rod/cosserat.hpp"
#include "shooting.hpp"

#include <vector>

namespace cathsim::rod {

namespace {

Vec6 reference_strains(const RodParams &params)
{
    Vec6 x;
    x << params.v_ref, params.u_ref;
    return x;
}

RodParams scaled_loads(const RodParams &params, double k)
{
    RodParams p = params;
    p.gravity *= k;
    for (auto &t : p.tendons) {
        t.tension *= k;
    }
    return p;
}

// Rest history: the rod has been sitting in this configuration forever.
void seed_rest_history(RodState &state)
{
    state.history.resize(state.nodes.size());
    for (std::size_t i = 0; i < state.nodes.size(); ++i) {
        NodeKinematics k = state.kinematics(i);
        state.history[i].prev = k;
        state.history[i].prev2 = k;
        state.history[i].prev_rate = NodeKinematics{};
    }
    state.history_depth = 0;
}

} // namespace

RodState solve_static(const RodParams &params, const TipLoad &load, const std::optional<Vec6> &initial_guess)
{
    params.validate();
    const BdfCoeffs coeffs = static_coeffs();
    const Vec6 guess = initial_guess.value_or(reference_strains(params));

    RodState state;
    try {
        state = detail::shoot(params, coeffs, {}, load, guess);
    } catch (const ConvergenceError &first_failure) {
        // Load continuation from the unloaded rod.
        bool solved = false;
        for (int pieces : {4, 16, 64}) {
            try {
                Vec6 x = reference_strains(params);
                for (int k = 1; k <= pieces; ++k) {
                    const double frac = static_cast<double>(k) / pieces;
                    TipLoad partial{frac * load.force, frac * load.moment};
                    state = detail::shoot(scaled_loads(params, frac), coeffs, {}, partial, x);
                    x = state.base_strains;
                }
                solved = true;
                break;
            } catch (const ConvergenceError &) {
            }
        }
        if (!solved) {
            throw ConvergenceError(first_failure.residual(), "solve_static: shooting failed even with load continuation");
        }
    }
    seed_rest_history(state);
    return state;
}

RodState step_dynamics(const RodState &state, const RodParams &params, const BdfCoeffs &coeffs,
                       const TipLoad &load)
{
    if (coeffs.is_static()) {
        throw ParameterError("step_dynamics: time step must be positive");
    }
    if (state.history.size() != state.nodes.size() ||
        state.nodes.size() != static_cast<std::size_t>(params.nodes)) {
        throw PreconditionError("step_dynamics: state history is not populated for this grid");
    }

    const BdfCoeffs used = state.history_depth < 2 ? backward_euler_coeffs(coeffs.dt) : coeffs;

    std::vector<HistoryTerms> hist(state.nodes.size());
    for (std::size_t i = 0; i < hist.size(); ++i) {
        hist[i] = history_terms(state.history[i], used);
    }

    RodState next;
    try {
        next = detail::shoot(params, used, hist, load, state.base_strains);
    } catch (const ConvergenceError &e) {
        throw ConvergenceError(e.residual(), "step_dynamics: shooting failed within the step");
    }

    next.history.resize(next.nodes.size());
    for (std::size_t i = 0; i < next.nodes.size(); ++i) {
        const NodeKinematics k = next.kinematics(i);
        next.history[i].prev2 = state.history[i].prev;
        next.history[i].prev = k;
        next.history[i].prev_rate = used.c0 * k + hist[i];
    }
    next.history_depth = std::min(state.history_depth + 1, 2);
    next.time = state.time + coeffs.dt;
    return next;
}

} // namespace cathsim::rod
