#pragma once

#include "cathsim/teleop/clutch.hpp"
#include "cathsim/teleop/follower_server.hpp"

#include <atomic>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

namespace httplib {
class Server;
}

namespace cathsim::app {

// One NDJSON line of the observer stream.
std::string bridge_event_json(const teleop::FollowerEvent &ev, const teleop::ClutchState &clutch);

// HTTP observer bridge in front of a FollowerServer:
//   GET  /events?after=N  NDJSON stream of follower events with id > N
//   GET  /state           latest event and master clutch state
//   POST /command         {"pedal": bool} and/or {"delta": {"T_mm","R_deg","B_deg"}}
// Console commands go through a master session and reach the follower as
// ordinary datagrams.
class Bridge
{
public:
    Bridge(teleop::FollowerServer &server, std::unique_ptr<teleop::DatagramChannel> master_channel,
           teleop::ClutchConfig clutch = {});
    ~Bridge();
    Bridge(const Bridge &) = delete;
    Bridge &operator=(const Bridge &) = delete;

    // Throws LinkError when the port cannot be bound.
    void start(const std::string &host, std::uint16_t port);
    void stop();
    std::uint16_t port() const { return port_; }

    // JSON body in, JSON reply out; the POST /command handler.
    std::string handle_command(const std::string &body);

private:
    teleop::FollowerServer &server_;
    std::unique_ptr<teleop::DatagramChannel> channel_;
    std::mutex master_mu_;
    teleop::MasterSession master_;
    std::unique_ptr<httplib::Server> http_;
    std::thread thread_;
    std::atomic<bool> running_{false};
    std::uint16_t port_ = 0;
};

} // namespace cathsim::app
