#pragma once

#include "cathsim/catheter/catheter_model.hpp"
#include "cathsim/teleop/gripper.hpp"
#include "cathsim/teleop/wire.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>

namespace cathsim::teleop {

struct FollowerLimits
{
    double max_translation_mm = 115.0;
    double max_knob_deg = 35.0;
};

struct FollowerCounters
{
    std::uint64_t accepted = 0;
    std::uint64_t duplicates = 0;
    std::uint64_t stale = 0;
    std::uint64_t clamped = 0;
    std::uint64_t rejected_frames = 0;
};

struct ClampResult
{
    catheter::ActuationTuple achieved;
    bool clamped = false;
};

ClampResult clamp_to_limits(const catheter::ActuationTuple &cmd, const FollowerLimits &limits);

// Follower event loop state. The only writer of the catheter's actuation.
class FollowerSession
{
public:
    FollowerSession(catheter::CatheterModel model = {}, FollowerLimits limits = {}, GripperConfig gripper = {});

    // Applies a decoded command from `source`. Returns the status reply, or
    // nothing when the command is a duplicate or stale (seq <= last seen).
    // `now_us` stamps the reply; the gripper is timed by the command stamps.
    std::optional<WireMessage> apply(const WireMessage &cmd, std::uint64_t now_us, const std::string &source = {});

    const catheter::ActuationState &state() const { return model_.state(); }
    catheter::TipPose tip_pose() { return model_.tip_pose(); }
    const GripperState &gripper() const { return gripper_; }
    const FollowerCounters &counters() const { return counters_; }
    FollowerCounters &counters() { return counters_; }
    const catheter::CatheterModel &model() const { return model_; }
    std::uint8_t last_flags() const { return last_flags_; }

private:
    catheter::CatheterModel model_;
    FollowerLimits limits_;
    GripperConfig gripper_cfg_;
    GripperState gripper_;
    FollowerCounters counters_;
    std::map<std::string, std::uint32_t> last_seq_;
    std::optional<std::uint64_t> last_time_us_;
    std::uint8_t last_flags_ = 0;
};

} // namespace cathsim::teleop
