#include "cathsim/teleop/clutch.hpp"

#include <algorithm>

namespace cathsim::teleop {

catheter::ActuationTuple master_apply(const InputDelta &delta, ClutchState &clutch, const ClutchConfig &cfg,
                                      InputDelta *realized)
{
    const double before = clutch.master_travel_mm;
    clutch.master_travel_mm = std::clamp(before + delta.translation_mm, 0.0, cfg.master_track_mm());
    const double moved = clutch.master_travel_mm - before;

    clutch.master_rotation_deg += delta.rotation_deg;
    if (!clutch.engaged) {
        // Handle moves freely; the offsets absorb it.
        clutch.master_offset_mm += moved;
        clutch.master_offset_deg += delta.rotation_deg;
    }
    clutch.knob_deg += delta.knob_deg;

    if (realized) {
        *realized = {moved, delta.rotation_deg, delta.knob_deg};
    }
    return clutch.command();
}

void set_pedal(ClutchState &clutch, bool engaged) { clutch.engaged = engaged; }

WireMessage MasterSession::step(const InputDelta &delta, std::uint64_t timestamp_us)
{
    const auto cmd = master_apply(delta, clutch_, cfg_);
    return make_command(++seq_, timestamp_us, cmd, clutch_.engaged ? flag::kPedal : 0);
}

WireMessage MasterSession::repeat(std::uint64_t timestamp_us)
{
    return make_command(++seq_, timestamp_us, clutch_.command(), clutch_.engaged ? flag::kPedal : 0);
}

} // namespace cathsim::teleop
