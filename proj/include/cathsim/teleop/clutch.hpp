#pragma once

#include "cathsim/catheter/bending_map.hpp"
#include "cathsim/teleop/wire.hpp"

#include <cstdint>

namespace cathsim::teleop {

struct ClutchConfig
{
    double follower_range_mm = 115.0;
    double travel_ratio = 3.0; // follower range over master track length

    double master_track_mm() const { return follower_range_mm / travel_ratio; }
};

// Handle motion since the previous sample.
struct InputDelta
{
    double translation_mm = 0.0;
    double rotation_deg = 0.0;
    double knob_deg = 0.0;
};

// Master-side bookkeeping. The outgoing setpoint is handle - offset for
// translation and rotation; the knob is absolute and never clutched.
struct ClutchState
{
    bool engaged = true;
    double master_offset_mm = 0.0;
    double master_offset_deg = 0.0;
    double master_travel_mm = 0.0; // handle position in [0, master_track_mm]
    double master_rotation_deg = 0.0;
    double knob_deg = 0.0;

    catheter::ActuationTuple command() const
    {
        return {master_travel_mm - master_offset_mm, master_rotation_deg - master_offset_deg, knob_deg};
    }
};

// Applies one handle delta and returns the outgoing absolute setpoint. The
// translation delta is limited by the handle track; `realized` (if given)
// receives the delta actually applied.
catheter::ActuationTuple master_apply(const InputDelta &delta, ClutchState &clutch, const ClutchConfig &cfg = {},
                                      InputDelta *realized = nullptr);

// Pedal pressed = engaged. Toggling never moves the setpoint.
void set_pedal(ClutchState &clutch, bool engaged);

// Master event loop state: clutch plus the outgoing sequence counter.
class MasterSession
{
public:
    explicit MasterSession(ClutchConfig cfg = {}) : cfg_(cfg) {}

    WireMessage step(const InputDelta &delta, std::uint64_t timestamp_us);
    // Re-sends the current setpoint with a fresh sequence number.
    WireMessage repeat(std::uint64_t timestamp_us);
    void set_pedal(bool engaged) { teleop::set_pedal(clutch_, engaged); }

    const ClutchState &clutch() const { return clutch_; }
    std::uint32_t last_seq() const { return seq_; }

private:
    ClutchConfig cfg_;
    ClutchState clutch_;
    std::uint32_t seq_ = 0;
};

} // namespace cathsim::teleop
