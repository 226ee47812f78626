#pragma once

#include "cathsim/teleop/transport.hpp"

#include <chrono>
#include <cstddef>
#include <string>
#include <vector>

namespace cathsim::teleop {

struct RttStats
{
    std::size_t sent = 0;
    std::size_t received = 0;
    std::size_t lost = 0;
    double min_us = 0.0;
    double median_us = 0.0;
    double max_us = 0.0;
    double mean_us = 0.0;
    bool degraded = false; // more than 10% lost
    std::string warning;
};

// Sends n pings one at a time, matching pongs by seq. Pings without a pong
// within `timeout` count as lost. Throws EmptyInputError for n == 0.
RttStats measure_rtt(DatagramChannel &channel, const PeerAddress &follower, std::size_t n,
                     std::chrono::milliseconds timeout = std::chrono::milliseconds(200));

// Order statistics over already-measured samples (µs).
RttStats summarize_rtt(std::vector<double> samples_us, std::size_t sent);

} // namespace cathsim::teleop
