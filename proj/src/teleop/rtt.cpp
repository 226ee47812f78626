#include "cathsim/teleop/rtt.hpp"

#include "cathsim/errors.hpp"
#include "cathsim/teleop/wire.hpp"

#include <algorithm>
#include <numeric>

namespace cathsim::teleop {

RttStats summarize_rtt(std::vector<double> samples_us, std::size_t sent)
{
    RttStats s;
    s.sent = sent;
    s.received = samples_us.size();
    s.lost = sent - s.received;
    if (!samples_us.empty()) {
        std::sort(samples_us.begin(), samples_us.end());
        const std::size_t n = samples_us.size();
        s.min_us = samples_us.front();
        s.max_us = samples_us.back();
        s.median_us = n % 2 ? samples_us[n / 2] : 0.5 * (samples_us[n / 2 - 1] + samples_us[n / 2]);
        s.mean_us = std::accumulate(samples_us.begin(), samples_us.end(), 0.0) / n;
    }
    if (sent > 0 && static_cast<double>(s.lost) > 0.1 * static_cast<double>(sent)) {
        s.degraded = true;
        s.warning = "degraded link: " + std::to_string(s.lost) + " of " + std::to_string(sent) + " pings lost";
    }
    return s;
}

RttStats measure_rtt(DatagramChannel &channel, const PeerAddress &follower, std::size_t n,
                     std::chrono::milliseconds timeout)
{
    if (n == 0) {
        throw EmptyInputError("measure_rtt: n must be positive");
    }
    using Clock = std::chrono::steady_clock;
    std::vector<double> samples;
    samples.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        WireMessage ping;
        ping.type = MsgType::Ping;
        ping.seq = static_cast<std::uint32_t>(i + 1);
        const auto t0 = Clock::now();
        ping.timestamp_us = std::chrono::duration_cast<std::chrono::microseconds>(t0.time_since_epoch()).count();
        const Frame f = encode(ping);
        channel.send_to(f, follower);

        const auto deadline = t0 + timeout;
        while (true) {
            const auto now = Clock::now();
            if (now >= deadline) {
                break;
            }
            auto d = channel.receive(std::chrono::duration_cast<std::chrono::microseconds>(deadline - now));
            if (!d) {
                break;
            }
            try {
                const WireMessage m = decode(d->bytes);
                if (m.type == MsgType::Pong && m.seq == ping.seq) {
                    samples.push_back(std::chrono::duration<double, std::micro>(Clock::now() - t0).count());
                    break;
                }
            } catch (const ProtocolError &) {
                // Late or corrupted replies are ignored.
            }
        }
    }
    return summarize_rtt(std::move(samples), n);
}

} // namespace cathsim::teleop
