#pragma once

#include <span>
#include <vector>

namespace cathsim::catheter {

// Knob-to-tip bending nonlinearity: a dead zone that shaves the knob angle,
// followed by a play (backlash) operator, followed by a side-dependent gain.
struct BendingMapConfig
{
    double dead_zone_half_width = 10.0; // deg of knob
    double backlash_play = 8.0;         // deg, full width of the play band
    double gain_right = 4.73;           // deg tip per deg effective knob (positive side)
    double gain_left = 4.30;            // deg tip per deg effective knob (negative side)
    double max_knob = 35.0;             // deg

    void validate() const;

    static BendingMapConfig ideal(double gain = 4.5);
};

// Follower actuation tuple (translation, rotation, bending).
struct ActuationTuple
{
    double translation_mm = 0.0;
    double rotation_deg = 0.0;
    double knob_deg = 0.0;

    bool operator==(const ActuationTuple &) const = default;
};

struct ActuationState
{
    double translation_mm = 0.0;
    double rotation_deg = 0.0;
    double knob_deg = 0.0;
    // Output of the play operator (deg of effective knob). Zero when virgin.
    double hysteresis_memory = 0.0;

    ActuationTuple tuple() const { return {translation_mm, rotation_deg, knob_deg}; }
    double rotation_mod360() const;

    bool operator==(const ActuationState &) const = default;
};

double dead_zone(double knob_deg, double half_width);

// Play operator with band [input - play/2, input + play/2].
double play_operator(double input, double previous_output, double play);

// Updates the hysteresis memory of `state` (and its knob) and returns the
// effective knob angle that drives the tendons. Throws LimitError when
// |knob| > max_knob.
double advance_knob(double knob_deg, ActuationState &state, const BendingMapConfig &cfg);

double tip_angle_from_effective(double effective_knob_deg, const BendingMapConfig &cfg);

// Path-dependent tip angle (deg) for a new knob command.
double knob_to_tip_angle(double knob_deg, ActuationState &state, const BendingMapConfig &cfg);

// One bending-sweep observation, in sweep order.
struct BendingSample
{
    double knob_deg = 0.0;
    double tip_deg = 0.0;
    int direction = 1; // +1 knob increasing, -1 knob decreasing
};

// Least-squares fit of the bending map to an ordered sweep. Samples are
// replayed through the model from a virgin state. Throws CalibrationError
// unless each bending side has at least two samples with |tip| >= 3 deg.
BendingMapConfig calibrate_bending_map(std::span<const BendingSample> samples, double max_knob = 35.0);

// Sweep protocol used for bending characterization: right 0 -> max -> 0,
// then left 0 -> -max -> 0 (or the mirrored order), at `resolution` deg.
std::vector<double> bending_sweep_protocol(double max_knob, double resolution, bool right_first);

std::vector<BendingSample> simulate_sweep(std::span<const double> knobs, const BendingMapConfig &cfg);

} // namespace cathsim::catheter
