#pragma once

#include "cathsim/teleop/follower_server.hpp"

#include <chrono>
#include <cstdint>
#include <memory>

namespace cathsim::scenario {

using catheter::ActuationTuple;
using catheter::Vec3;

struct SystemResponse
{
    ActuationTuple achieved;
    Vec3 tip_cm = Vec3::Zero();
    std::uint8_t flags = 0;
};

// What a scenario drives: an absolute setpoint in, the follower's achieved
// actuation and tip position out.
class SystemHandle
{
public:
    virtual ~SystemHandle() = default;
    virtual SystemResponse command(const ActuationTuple &setpoint, std::uint64_t time_us) = 0;
};

// Follower session in the caller's thread. Commands are still encoded and
// decoded so the wire format is exercised.
class InProcessSystem final : public SystemHandle
{
public:
    explicit InProcessSystem(teleop::FollowerSession session);

    SystemResponse command(const ActuationTuple &setpoint, std::uint64_t time_us) override;
    const teleop::FollowerSession &session() const { return session_; }

private:
    teleop::FollowerSession session_;
    std::uint32_t seq_ = 0;
};

struct LinkedSystemOptions
{
    std::chrono::milliseconds reply_timeout{100};
    int max_consecutive_losses = 20;
};

// Master side of a datagram link to a FollowerServer running in this
// process; the tip pose is read from the server's event stream. Lost
// commands are re-sent with a fresh seq. Throws LinkError after
// max_consecutive_losses unanswered sends.
class LinkedSystem final : public SystemHandle
{
public:
    LinkedSystem(std::unique_ptr<teleop::DatagramChannel> channel, teleop::FollowerServer &server,
                 LinkedSystemOptions opts = {});

    SystemResponse command(const ActuationTuple &setpoint, std::uint64_t time_us) override;
    std::uint64_t resends() const { return resends_; }

private:
    std::unique_ptr<teleop::DatagramChannel> channel_;
    teleop::FollowerServer &server_;
    LinkedSystemOptions opts_;
    std::uint32_t seq_ = 0;
    std::uint64_t last_event_ = 0;
    std::uint64_t resends_ = 0;
};

} // namespace cathsim::scenario
