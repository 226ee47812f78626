#include "cathsim/catheter/catheter_model.hpp"

#include "cathsim/errors.hpp"

#include <cmath>
#include <numbers>

namespace cathsim::catheter {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

} // namespace

void CatheterSpec::validate() const
{
    if (!(active_length > 0.0) || !(outer_diameter > 0.0) || !(second_moment > 0.0) || !(density > 0.0) ||
        !(linear_stiffness > 0.0) || !(youngs_modulus > 0.0) || !(area > 0.0) || !(insertion_length > 0.0) ||
        !(tendon_offset_radius > 0.0)) {
        throw ParameterError("catheter spec: all geometric and material constants must be positive");
    }
    if (!(tendon_offset_radius < 0.5 * outer_diameter)) {
        throw ParameterError("catheter spec: tendon offset must lie inside the shaft");
    }
    if (knob_tension_gain < 0.0 || marker_mass < 0.0) {
        throw ParameterError("catheter spec: knob tension gain and marker mass must be non-negative");
    }
    if (nodes < 2) {
        throw ParameterError("catheter spec: at least two rod nodes are required");
    }
}

rod::RodMaterial CatheterSpec::material() const
{
    rod::RodMaterial m;
    m.length = active_length;
    m.youngs_modulus = youngs_modulus;
    m.poisson_ratio = poisson_ratio;
    m.second_moment = second_moment;
    m.area = area;
    m.density = density;
    m.nodes = nodes;
    return m;
}

double CatheterSpec::closed_form_knob_gain(const BendingMapConfig &cfg) const
{
    const double ei = youngs_modulus * second_moment;
    return cfg.gain_right * kDegToRad * ei / (tendon_offset_radius * active_length);
}

double CatheterSpec::effective_knob_gain(const BendingMapConfig &cfg) const
{
    return knob_tension_gain > 0.0 ? knob_tension_gain : closed_form_knob_gain(cfg);
}

std::pair<double, double> knob_to_tensions(double effective_knob_deg, const CatheterSpec &spec,
                                           const BendingMapConfig &cfg)
{
    const double k = spec.effective_knob_gain(cfg);
    if (effective_knob_deg > 0.0) {
        return {k * effective_knob_deg, 0.0};
    }
    if (effective_knob_deg < 0.0) {
        return {0.0, k * (cfg.gain_left / cfg.gain_right) * -effective_knob_deg};
    }
    return {0.0, 0.0};
}

rod::RodParams rod_params_for(const ActuationState &act, const CatheterSpec &spec, const BendingMapConfig &cfg)
{
    const auto [tau1, tau2] = knob_to_tensions(act.hysteresis_memory, spec, cfg);
    const double r = spec.tendon_offset_radius;
    std::vector<rod::Tendon> tendons{{Vec3(0.0, r, 0.0), tau1}, {Vec3(0.0, -r, 0.0), tau2}};
    Vec3 gravity = Vec3::Zero();
    if (spec.gravity_enabled) {
        const Mat3 shaft = rod::rotation_z(act.rotation_deg * kDegToRad);
        gravity = shaft.transpose() * Vec3(0.0, -kGravity, 0.0);
    }
    rod::RodParams p = rod::make_rod_params(spec.material(), std::move(tendons), gravity);
    p.shooting = spec.shooting;
    return p;
}

double rod_tip_angle_deg(const rod::RodState &state)
{
    const Vec3 t = state.tip().R.col(2);
    return std::atan2(t.y(), t.z()) / kDegToRad;
}

TipPose forward_kinematics(const ActuationState &act, const CatheterSpec &spec, const BendingMapConfig &cfg,
                           const std::optional<Vec6> &warm_start)
{
    const rod::RodParams params = rod_params_for(act, spec, cfg);
    rod::TipLoad load;
    if (spec.marker_enabled) {
        load.force = spec.marker_mass * params.gravity;
    }
    const rod::RodState shape = rod::solve_static(params, load, warm_start);

    const Mat3 shaft = rod::rotation_z(act.rotation_deg * kDegToRad);
    const Vec3 feed(0.0, 0.0, act.translation_mm * 1e-3);

    TipPose pose;
    pose.position_cm = 100.0 * (shaft * shape.tip().p + feed);
    pose.orientation = shaft * shape.tip().R;
    pose.bend_angle_deg = rod_tip_angle_deg(shape);
    pose.base_strains = shape.base_strains;
    return pose;
}

double calibrate_knob_tension(const CatheterSpec &spec, const BendingMapConfig &cfg, double knob_deg,
                              double target_tip_deg)
{
    ActuationState act;
    const double eff = advance_knob(knob_deg, act, cfg);
    if (eff == 0.0) {
        throw CalibrationError("calibrate_knob_tension: knob lies inside the dead zone");
    }
    CatheterSpec s = spec;
    s.gravity_enabled = false;
    s.marker_enabled = false;

    auto angle_at = [&](double gain) {
        s.knob_tension_gain = gain;
        return std::abs(forward_kinematics(act, s, cfg).bend_angle_deg);
    };

    const double target = std::abs(target_tip_deg);
    double k0 = spec.closed_form_knob_gain(cfg) * target / std::abs(tip_angle_from_effective(eff, cfg));
    double f0 = angle_at(k0) - target;
    double k1 = k0 * 1.02;
    double f1 = angle_at(k1) - target;
    for (int it = 0; it < 50 && std::abs(f1) > 1e-6; ++it) {
        if (f1 == f0) {
            break;
        }
        const double k2 = k1 - f1 * (k1 - k0) / (f1 - f0);
        k0 = k1;
        f0 = f1;
        k1 = k2 > 0.0 ? k2 : 0.5 * k1;
        f1 = angle_at(k1) - target;
    }
    if (std::abs(f1) > 1e-3) {
        throw CalibrationError("calibrate_knob_tension: secant iteration did not converge");
    }
    return k1;
}

CatheterModel::CatheterModel(CatheterSpec spec, BendingMapConfig cfg)
    : spec_(spec), cfg_(cfg)
{
    spec_.validate();
    cfg_.validate();
}

const ActuationState &CatheterModel::apply(const ActuationTuple &target)
{
    advance_knob(target.knob_deg, state_, cfg_);
    state_.translation_mm = target.translation_mm;
    state_.rotation_deg = target.rotation_deg;
    return state_;
}

// Always a cold solve: warm starting from the previous pose makes the result
// depend on solver history at the 1e-8 level.
TipPose CatheterModel::tip_pose()
{
    return forward_kinematics(state_, spec_, cfg_);
}

void CatheterModel::reset()
{
    state_ = ActuationState{};
}

} // namespace cathsim::catheter
