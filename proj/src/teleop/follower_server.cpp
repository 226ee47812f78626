#include "cathsim/teleop/follower_server.hpp"

#include "cathsim/errors.hpp"

#include <chrono>

namespace cathsim::teleop {

namespace {

std::uint64_t now_us()
{
    using namespace std::chrono;
    return duration_cast<microseconds>(steady_clock::now().time_since_epoch()).count();
}

} // namespace

FollowerServer::FollowerServer(std::unique_ptr<DatagramChannel> channel, FollowerSession session,
                               FollowerServerOptions opts)
    : channel_(std::move(channel)), session_(std::move(session)), opts_(opts), address_(channel_->local_address()),
      state_snapshot_(session_.state())
{
}

FollowerServer::~FollowerServer() { stop(); }

void FollowerServer::start()
{
    if (running_.exchange(true)) {
        return;
    }
    thread_ = std::thread([this] { loop(); });
}

void FollowerServer::stop()
{
    running_ = false;
    if (thread_.joinable()) {
        thread_.join();
    }
    events_.close();
}

catheter::ActuationState FollowerServer::state() const
{
    std::lock_guard lock(snapshot_mu_);
    return state_snapshot_;
}

FollowerCounters FollowerServer::counters() const
{
    std::lock_guard lock(snapshot_mu_);
    return counters_snapshot_;
}

void FollowerServer::loop()
{
    while (running_) {
        auto d = channel_->receive(opts_.poll);
        if (!d) {
            continue;
        }
        WireMessage msg;
        try {
            msg = decode(d->bytes);
        } catch (const ProtocolError &) {
            ++session_.counters().rejected_frames;
            std::lock_guard lock(snapshot_mu_);
            counters_snapshot_ = session_.counters();
            continue;
        }

        if (msg.type == MsgType::Ping) {
            WireMessage pong = msg;
            pong.type = MsgType::Pong;
            const Frame f = encode(pong);
            channel_->send_to(f, d->from);
            continue;
        }
        if (msg.type != MsgType::Command) {
            continue;
        }

        const auto status = session_.apply(msg, now_us(), d->from.str());
        {
            std::lock_guard lock(snapshot_mu_);
            state_snapshot_ = session_.state();
            counters_snapshot_ = session_.counters();
        }
        if (!status) {
            continue;
        }

        FollowerEvent ev;
        ev.status = *status;
        ev.state = session_.state();
        ev.gripper = session_.gripper();
        ev.counters = session_.counters();
        if (opts_.compute_tip_pose) {
            try {
                const catheter::TipPose pose = session_.tip_pose();
                ev.tip_cm = pose.position_cm;
                ev.bend_angle_deg = pose.bend_angle_deg;
            } catch (const Error &) {
                // Keep serving; the event carries a zero pose.
            }
        }
        // Publish before replying so a master that saw the status can find
        // the matching event.
        events_.publish(std::move(ev), [](FollowerEvent &e, std::uint64_t id) { e.id = id; });
        const Frame f = encode(*status);
        channel_->send_to(f, d->from);
    }
}

} // namespace cathsim::teleop
