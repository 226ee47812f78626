#pragma once

#include "cathsim/catheter/bending_map.hpp"
#include "cathsim/rod/cosserat.hpp"

#include <optional>
#include <utility>

namespace cathsim::catheter {

using rod::Mat3;
using rod::Vec3;
using rod::Vec6;

inline constexpr double kGravity = 9.81; // m/s^2

// Geometric and material constants of the catheter's active section.
struct CatheterSpec
{
    double active_length = 0.08;          // m
    double outer_diameter = 0.002667;     // m
    double second_moment = 1.9165e-12;    // m^4
    double density = 1630.573;            // kg/m^3
    double linear_stiffness = 3.01;       // N/m, tip force per tip displacement
    double youngs_modulus = 1.7347e8;     // Pa, calibrated against the first loading case
    double poisson_ratio = 0.4;
    double area = 2.91719e-6;             // m^2, hollow section matching d_o and I
    double insertion_length = 0.115;      // m
    double tendon_offset_radius = 0.9e-3; // m

    // Tendon tension per degree of effective knob on the right side (N/deg).
    // Zero selects the closed-form constant-curvature value.
    double knob_tension_gain = 0.0;

    bool gravity_enabled = true;
    bool marker_enabled = false;
    double marker_mass = 0.002; // kg

    int nodes = 41;
    rod::ShootingOptions shooting;

    void validate() const;
    rod::RodMaterial material() const;

    // Constant-curvature estimate of knob_tension_gain for the given map:
    // tip angle = tau r L / (E I) must equal gain_right * effective knob.
    double closed_form_knob_gain(const BendingMapConfig &cfg) const;
    double effective_knob_gain(const BendingMapConfig &cfg) const;
};

// Tendon tensions (tau1, tau2) for an effective knob angle. Positive angles
// load tendon 1 (at +y), negative angles load tendon 2 (at -y); the left
// side is scaled by gain_left / gain_right.
std::pair<double, double> knob_to_tensions(double effective_knob_deg, const CatheterSpec &spec,
                                           const BendingMapConfig &cfg);

// Rod parameters in the catheter frame (before shaft rotation) with
// gravity expressed in that frame for the given shaft rotation.
rod::RodParams rod_params_for(const ActuationState &act, const CatheterSpec &spec, const BendingMapConfig &cfg);

struct TipPose
{
    Vec3 position_cm = Vec3::Zero(); // follower workspace frame
    Mat3 orientation = Mat3::Identity();
    double bend_angle_deg = 0.0;     // signed angle of the tip tangent in the bending plane
    Vec6 base_strains = Vec6::Zero();
};

// Quasi-static pose: Translate_z(T) o Rotate_z(R) o rod shape. Pure given
// the actuation snapshot; `warm_start` only speeds the shooting solve.
TipPose forward_kinematics(const ActuationState &act, const CatheterSpec &spec, const BendingMapConfig &cfg,
                           const std::optional<Vec6> &warm_start = std::nullopt);

// Signed tip angle (deg) of a solved rod in its own y-z bending plane.
double rod_tip_angle_deg(const rod::RodState &state);

// Finds knob_tension_gain such that, with gravity off, the rod-solver tip
// angle at `knob_deg` (from a virgin state) equals `target_tip_deg`.
double calibrate_knob_tension(const CatheterSpec &spec, const BendingMapConfig &cfg, double knob_deg,
                              double target_tip_deg);

// Owner of the path-dependent actuation state. Single writer.
class CatheterModel
{
public:
    CatheterModel() = default;
    CatheterModel(CatheterSpec spec, BendingMapConfig cfg);

    // Applies an already-clamped actuation tuple; knob limits are enforced by
    // the bending map.
    const ActuationState &apply(const ActuationTuple &target);

    TipPose tip_pose();

    const ActuationState &state() const { return state_; }
    const CatheterSpec &spec() const { return spec_; }
    const BendingMapConfig &bending() const { return cfg_; }
    void reset();

private:
    CatheterSpec spec_;
    BendingMapConfig cfg_;
    ActuationState state_;
};

} // namespace cathsim::catheter
