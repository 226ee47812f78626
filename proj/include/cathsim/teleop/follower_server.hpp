#pragma once

#include "cathsim/teleop/broadcast_queue.hpp"
#include "cathsim/teleop/follower.hpp"
#include "cathsim/teleop/transport.hpp"

#include <atomic>
#include <memory>
#include <mutex>
#include <thread>

namespace cathsim::teleop {

// One follower state change, as seen by observers.
struct FollowerEvent
{
    std::uint64_t id = 0;
    WireMessage status;
    catheter::ActuationState state;
    GripperState gripper;
    catheter::Vec3 tip_cm = catheter::Vec3::Zero();
    double bend_angle_deg = 0.0;
    FollowerCounters counters;
};

struct FollowerServerOptions
{
    bool compute_tip_pose = true;
    std::chrono::milliseconds poll{20};
};

// Runs a FollowerSession on its own thread: answers pings, applies
// commands, replies with status and publishes events. Stop is idempotent.
class FollowerServer
{
public:
    FollowerServer(std::unique_ptr<DatagramChannel> channel, FollowerSession session,
                   FollowerServerOptions opts = {});
    ~FollowerServer();
    FollowerServer(const FollowerServer &) = delete;
    FollowerServer &operator=(const FollowerServer &) = delete;

    void start();
    void stop();

    PeerAddress address() const { return address_; }
    BroadcastQueue<FollowerEvent> &events() { return events_; }

    // Snapshot taken after the most recent accepted command.
    catheter::ActuationState state() const;
    FollowerCounters counters() const;

private:
    void loop();

    std::unique_ptr<DatagramChannel> channel_;
    FollowerSession session_;
    FollowerServerOptions opts_;
    PeerAddress address_;
    BroadcastQueue<FollowerEvent> events_;
    mutable std::mutex snapshot_mu_;
    catheter::ActuationState state_snapshot_;
    FollowerCounters counters_snapshot_;
    std::atomic<bool> running_{false};
    std::thread thread_;
};

} // namespace cathsim::teleop
