#include "cathsim/teleop/follower.hpp"

#include <algorithm>
#include <cmath>

namespace cathsim::teleop {

ClampResult clamp_to_limits(const catheter::ActuationTuple &cmd, const FollowerLimits &limits)
{
    ClampResult r;
    r.achieved = cmd;
    r.achieved.translation_mm = std::clamp(cmd.translation_mm, 0.0, limits.max_translation_mm);
    r.achieved.knob_deg = std::clamp(cmd.knob_deg, -limits.max_knob_deg, limits.max_knob_deg);
    r.clamped = r.achieved.translation_mm != cmd.translation_mm || r.achieved.knob_deg != cmd.knob_deg;
    return r;
}

FollowerSession::FollowerSession(catheter::CatheterModel model, FollowerLimits limits, GripperConfig gripper)
    : model_(std::move(model)), limits_(limits), gripper_cfg_(gripper)
{
    limits_.max_knob_deg = std::min(limits_.max_knob_deg, model_.bending().max_knob);
}

std::optional<WireMessage> FollowerSession::apply(const WireMessage &cmd, std::uint64_t now_us,
                                                  const std::string &source)
{
    auto it = last_seq_.find(source);
    if (it != last_seq_.end()) {
        if (cmd.seq == it->second) {
            ++counters_.duplicates;
            return std::nullopt;
        }
        if (cmd.seq < it->second) {
            ++counters_.stale;
            return std::nullopt;
        }
    }
    last_seq_[source] = cmd.seq;
    ++counters_.accepted;

    const ClampResult c = clamp_to_limits(tuple_of(cmd), limits_);
    if (c.clamped) {
        ++counters_.clamped;
    }
    const double previous_t = model_.state().translation_mm;
    model_.apply(c.achieved);

    // Gripper timing follows the master's command clock, so a replayed stream
    // schedules the same way whatever the transport delay.
    const std::uint64_t t = cmd.timestamp_us;
    const double dt_ms = last_time_us_ && t > *last_time_us_ ? (t - *last_time_us_) / 1000.0 : 0.0;
    last_time_us_ = t;
    const bool translating = std::abs(c.achieved.translation_mm - previous_t) > 1e-9;
    gripper_ = gripper_schedule(translating, gripper_, dt_ms, gripper_cfg_);

    std::uint8_t flags = cmd.flags & flag::kPedal;
    flags |= gripper_.cart_gripper ? flag::kGripperCart : 0;
    flags |= gripper_.static_gripper ? flag::kGripperStatic : 0;
    flags |= c.clamped ? flag::kLimitClamped : 0;
    last_flags_ = flags;

    WireMessage status = make_command(cmd.seq, now_us, model_.state().tuple(), flags);
    status.type = MsgType::Status;
    return status;
}

} // namespace cathsim::teleop
