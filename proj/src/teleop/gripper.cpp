#include "cathsim/teleop/gripper.hpp"

namespace cathsim::teleop {

namespace {

GripperState with_phase(GripperPhase p, double timer = 0.0)
{
    GripperState s;
    s.phase = p;
    s.overlap_timer_ms = timer;
    s.cart_gripper = p != GripperPhase::StaticOnly;
    s.static_gripper = p != GripperPhase::CartOnly;
    return s;
}

} // namespace

GripperState gripper_schedule(bool handler_translating, GripperState state, double dt_ms, const GripperConfig &cfg)
{
    switch (state.phase) {
    case GripperPhase::StaticOnly:
        if (handler_translating) {
            return cfg.overlap_ms > 0.0 ? with_phase(GripperPhase::HandoffToCart) : with_phase(GripperPhase::CartOnly);
        }
        return with_phase(GripperPhase::StaticOnly);

    case GripperPhase::HandoffToCart:
        if (!handler_translating) {
            // Static never let go; just reopen the cart.
            return with_phase(GripperPhase::StaticOnly);
        }
        if (state.overlap_timer_ms + dt_ms >= cfg.overlap_ms) {
            return with_phase(GripperPhase::CartOnly);
        }
        return with_phase(GripperPhase::HandoffToCart, state.overlap_timer_ms + dt_ms);

    case GripperPhase::CartOnly:
        if (!handler_translating) {
            return cfg.overlap_ms > 0.0 ? with_phase(GripperPhase::HandoffToStatic)
                                        : with_phase(GripperPhase::StaticOnly);
        }
        return with_phase(GripperPhase::CartOnly);

    case GripperPhase::HandoffToStatic:
        if (handler_translating) {
            return with_phase(GripperPhase::CartOnly);
        }
        if (state.overlap_timer_ms + dt_ms >= cfg.overlap_ms) {
            return with_phase(GripperPhase::StaticOnly);
        }
        return with_phase(GripperPhase::HandoffToStatic, state.overlap_timer_ms + dt_ms);
    }
    return with_phase(GripperPhase::StaticOnly);
}

} // namespace cathsim::teleop
