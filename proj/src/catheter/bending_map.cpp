#include "cathsim/catheter/bending_map.hpp"

#include "cathsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cathsim::catheter {

void BendingMapConfig::validate() const
{
    if (!(gain_right > 0.0) || !(gain_left > 0.0)) {
        throw ParameterError("bending map: gains must be positive");
    }
    if (!(dead_zone_half_width >= 0.0) || !(backlash_play >= 0.0)) {
        throw ParameterError("bending map: dead zone and play must be non-negative");
    }
    if (!(max_knob > 0.0)) {
        throw ParameterError("bending map: max_knob must be positive");
    }
}

BendingMapConfig BendingMapConfig::ideal(double gain)
{
    BendingMapConfig cfg;
    cfg.dead_zone_half_width = 0.0;
    cfg.backlash_play = 0.0;
    cfg.gain_right = gain;
    cfg.gain_left = gain;
    return cfg;
}

double ActuationState::rotation_mod360() const
{
    double r = std::fmod(rotation_deg, 360.0);
    return r < 0.0 ? r + 360.0 : r;
}

double dead_zone(double knob_deg, double half_width)
{
    if (knob_deg > half_width) {
        return knob_deg - half_width;
    }
    if (knob_deg < -half_width) {
        return knob_deg + half_width;
    }
    return 0.0;
}

double play_operator(double input, double previous_output, double play)
{
    const double half = 0.5 * play;
    return std::clamp(previous_output, input - half, input + half);
}

double advance_knob(double knob_deg, ActuationState &state, const BendingMapConfig &cfg)
{
    if (!std::isfinite(knob_deg) || std::abs(knob_deg) > cfg.max_knob + 1e-12) {
        throw LimitError("knob command outside +/- max_knob");
    }
    const double shaved = dead_zone(knob_deg, cfg.dead_zone_half_width);
    state.hysteresis_memory = play_operator(shaved, state.hysteresis_memory, cfg.backlash_play);
    state.knob_deg = knob_deg;
    return state.hysteresis_memory;
}

double tip_angle_from_effective(double effective_knob_deg, const BendingMapConfig &cfg)
{
    return effective_knob_deg >= 0.0 ? cfg.gain_right * effective_knob_deg : cfg.gain_left * effective_knob_deg;
}

double knob_to_tip_angle(double knob_deg, ActuationState &state, const BendingMapConfig &cfg)
{
    return tip_angle_from_effective(advance_knob(knob_deg, state, cfg), cfg);
}

std::vector<double> bending_sweep_protocol(double max_knob, double resolution, bool right_first)
{
    if (!(resolution > 0.0) || !(max_knob > 0.0)) {
        throw ParameterError("bending_sweep_protocol: resolution and max_knob must be positive");
    }
    const int steps = static_cast<int>(std::round(max_knob / resolution));
    std::vector<double> out;
    auto half_cycle = [&](double sign) {
        for (int i = 0; i <= steps; ++i) {
            out.push_back(sign * i * resolution);
        }
        for (int i = steps - 1; i >= 0; --i) {
            out.push_back(sign * i * resolution);
        }
    };
    half_cycle(right_first ? 1.0 : -1.0);
    half_cycle(right_first ? -1.0 : 1.0);
    return out;
}

std::vector<BendingSample> simulate_sweep(std::span<const double> knobs, const BendingMapConfig &cfg)
{
    ActuationState state;
    std::vector<BendingSample> out;
    out.reserve(knobs.size());
    double last = 0.0;
    for (double k : knobs) {
        const int dir = k > last ? 1 : (k < last ? -1 : (out.empty() ? 1 : out.back().direction));
        out.push_back({k, knob_to_tip_angle(k, state, cfg), dir});
        last = k;
    }
    return out;
}

namespace {

constexpr double kTipThreshold = 3.0;

struct FitResult
{
    double sse = std::numeric_limits<double>::infinity();
    double gain_right = 0.0;
    double gain_left = 0.0;
};

FitResult fit_gains(std::span<const BendingSample> samples, double dz, double play)
{
    FitResult fit;
    if (dz < 0.0 || play < 0.0) {
        return fit;
    }
    std::vector<double> eff(samples.size());
    double y = 0.0;
    double syy_r = 0.0, syt_r = 0.0, syy_l = 0.0, syt_l = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        y = play_operator(dead_zone(samples[i].knob_deg, dz), y, play);
        eff[i] = y;
        if (y > 0.0) {
            syy_r += y * y;
            syt_r += y * samples[i].tip_deg;
        } else if (y < 0.0) {
            syy_l += y * y;
            syt_l += y * samples[i].tip_deg;
        }
    }
    fit.gain_right = syy_r > 0.0 ? syt_r / syy_r : 0.0;
    fit.gain_left = syy_l > 0.0 ? syt_l / syy_l : 0.0;
    double sse = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double pred = eff[i] >= 0.0 ? fit.gain_right * eff[i] : fit.gain_left * eff[i];
        const double r = samples[i].tip_deg - pred;
        sse += r * r;
    }
    fit.sse = sse;
    return fit;
}

} // namespace

BendingMapConfig calibrate_bending_map(std::span<const BendingSample> samples, double max_knob)
{
    std::size_t right = 0, left = 0;
    for (const auto &s : samples) {
        if (!std::isfinite(s.knob_deg) || !std::isfinite(s.tip_deg)) {
            throw CalibrationError("calibrate_bending_map: non-finite sample");
        }
        if (std::abs(s.knob_deg) > max_knob + 1e-9) {
            throw CalibrationError("calibrate_bending_map: knob sample beyond max_knob");
        }
        if (s.tip_deg >= kTipThreshold) {
            ++right;
        } else if (s.tip_deg <= -kTipThreshold) {
            ++left;
        }
    }
    if (right < 2 || left < 2) {
        throw CalibrationError("calibrate_bending_map: need at least two samples per side outside the dead zone");
    }

    // Coarse grid over (dead zone, play), gains solved in closed form.
    const double grid = 0.25;
    double best_dz = 0.0, best_play = 0.0;
    FitResult best;
    for (double dz = 0.0; dz < max_knob; dz += grid) {
        for (double play = 0.0; play <= 2.0 * max_knob; play += grid) {
            const FitResult f = fit_gains(samples, dz, play);
            if (f.sse < best.sse) {
                best = f;
                best_dz = dz;
                best_play = play;
            }
        }
    }

    // Compass search refinement.
    double step = grid;
    while (step > 1e-9) {
        bool improved = false;
        const double cand[4][2] = {{step, 0.0}, {-step, 0.0}, {0.0, step}, {0.0, -step}};
        for (const auto &c : cand) {
            const FitResult f = fit_gains(samples, best_dz + c[0], best_play + c[1]);
            if (f.sse < best.sse) {
                best = f;
                best_dz += c[0];
                best_play += c[1];
                improved = true;
                break;
            }
        }
        if (!improved) {
            step *= 0.5;
        }
    }

    BendingMapConfig cfg;
    cfg.dead_zone_half_width = best_dz;
    cfg.backlash_play = best_play;
    cfg.gain_right = best.gain_right;
    cfg.gain_left = best.gain_left;
    cfg.max_knob = max_knob;
    if (!(cfg.gain_right > 0.0) || !(cfg.gain_left > 0.0)) {
        throw CalibrationError("calibrate_bending_map: fitted gains are not positive");
    }
    return cfg;
}

} // namespace cathsim::catheter
