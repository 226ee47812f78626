#include "cathsim/scenario/system.hpp"

#include "cathsim/errors.hpp"

namespace cathsim::scenario {

InProcessSystem::InProcessSystem(teleop::FollowerSession session) : session_(std::move(session)) {}

SystemResponse InProcessSystem::command(const ActuationTuple &setpoint, std::uint64_t time_us)
{
    const teleop::Frame frame = teleop::encode(teleop::make_command(++seq_, time_us, setpoint, teleop::flag::kPedal));
    const auto status = session_.apply(teleop::decode(frame), time_us);
    if (!status) {
        throw LinkError("in-process follower dropped a fresh command");
    }
    SystemResponse r;
    r.achieved = teleop::tuple_of(*status);
    r.flags = status->flags;
    r.tip_cm = session_.tip_pose().position_cm;
    return r;
}

LinkedSystem::LinkedSystem(std::unique_ptr<teleop::DatagramChannel> channel, teleop::FollowerServer &server,
                           LinkedSystemOptions opts)
    : channel_(std::move(channel)), server_(server), opts_(opts), last_event_(server.events().last_id())
{
}

SystemResponse LinkedSystem::command(const ActuationTuple &setpoint, std::uint64_t time_us)
{
    using Clock = std::chrono::steady_clock;
    for (int attempt = 0; attempt < opts_.max_consecutive_losses; ++attempt) {
        const std::uint32_t seq = ++seq_;
        const teleop::Frame frame = teleop::encode(teleop::make_command(seq, time_us, setpoint, teleop::flag::kPedal));
        channel_->send_to(frame, server_.address());
        if (attempt > 0) {
            ++resends_;
        }

        const auto deadline = Clock::now() + opts_.reply_timeout;
        while (Clock::now() < deadline) {
            const auto left = std::chrono::duration_cast<std::chrono::microseconds>(deadline - Clock::now());
            auto d = channel_->receive(left);
            if (!d) {
                break;
            }
            teleop::WireMessage status;
            try {
                status = teleop::decode(d->bytes);
            } catch (const ProtocolError &) {
                continue;
            }
            if (status.type != teleop::MsgType::Status || status.seq != seq) {
                continue; // late reply to an earlier attempt
            }
            // The server publishes the event before replying.
            for (const auto &ev : server_.events().read_after(last_event_)) {
                last_event_ = ev.id;
                if (ev.status.seq == seq) {
                    SystemResponse r;
                    r.achieved = teleop::tuple_of(status);
                    r.flags = status.flags;
                    r.tip_cm = ev.tip_cm;
                    return r;
                }
            }
            throw LinkError("status received without a matching follower event");
        }
    }
    throw LinkError("link lost: " + std::to_string(opts_.max_consecutive_losses) + " consecutive commands unanswered");
}

} // namespace cathsim::scenario
