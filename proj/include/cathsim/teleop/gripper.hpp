#pragma once

namespace cathsim::teleop {

enum class GripperPhase
{
    StaticOnly,
    HandoffToCart,
    CartOnly,
    HandoffToStatic,
};

struct GripperConfig
{
    double overlap_ms = 50.0;
};

// cart_gripper is gripper A (moves with the feeder), static_gripper is B.
struct GripperState
{
    GripperPhase phase = GripperPhase::StaticOnly;
    bool cart_gripper = false;
    bool static_gripper = true;
    double overlap_timer_ms = 0.0;

    bool operator==(const GripperState &) const = default;
};

// Advances the grip-insert-release schedule by dt_ms. The cart takes the
// catheter while the handler translates; every handoff keeps both grippers
// closed for overlap_ms.
GripperState gripper_schedule(bool handler_translating, GripperState state, double dt_ms,
                              const GripperConfig &cfg = {});

} // namespace cathsim::teleop
