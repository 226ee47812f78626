#include "cathsim/app/bridge.hpp"

#include "cathsim/errors.hpp"

#include <httplib.h>
#include <json.hpp>

#include <chrono>

namespace cathsim::app {

using nlohmann::json;

namespace {

std::uint64_t now_us()
{
    using namespace std::chrono;
    return duration_cast<microseconds>(steady_clock::now().time_since_epoch()).count();
}

json clutch_json(const teleop::ClutchState &c)
{
    return {{"engaged", c.engaged},
            {"offset_mm", c.master_offset_mm},
            {"offset_deg", c.master_offset_deg},
            {"travel_mm", c.master_travel_mm},
            {"knob_deg", c.knob_deg}};
}

} // namespace

std::string bridge_event_json(const teleop::FollowerEvent &ev, const teleop::ClutchState &clutch)
{
    const auto &s = ev.status;
    json j{
        {"id", ev.id},
        {"seq", s.seq},
        {"t_us", s.timestamp_us},
        {"T_mm", teleop::from_fixed_milli(s.translation_um)},
        {"R_deg", teleop::from_fixed_milli(s.rotation_mdeg)},
        {"B_deg", teleop::from_fixed_milli(s.knob_mdeg)},
        {"flags", s.flags},
        {"pedal", (s.flags & teleop::flag::kPedal) != 0},
        {"gripper_cart", ev.gripper.cart_gripper},
        {"gripper_static", ev.gripper.static_gripper},
        {"limit_clamped", (s.flags & teleop::flag::kLimitClamped) != 0},
        {"tip_cm", {ev.tip_cm.x(), ev.tip_cm.y(), ev.tip_cm.z()}},
        {"bend_deg", ev.bend_angle_deg},
        {"effective_knob_deg", ev.state.hysteresis_memory},
        {"clutch", clutch_json(clutch)},
    };
    return j.dump();
}

Bridge::Bridge(teleop::FollowerServer &server, std::unique_ptr<teleop::DatagramChannel> master_channel,
               teleop::ClutchConfig clutch)
    : server_(server), channel_(std::move(master_channel)), master_(clutch)
{
}

Bridge::~Bridge() { stop(); }

std::string Bridge::handle_command(const std::string &body)
{
    json req;
    try {
        req = json::parse(body);
    } catch (const json::parse_error &e) {
        throw ParseError(1, std::string("bridge command: ") + e.what());
    }
    if (!req.is_object()) {
        throw ParseError(1, "bridge command: expected an object");
    }
    std::lock_guard lock(master_mu_);
    if (req.contains("pedal")) {
        master_.set_pedal(req.at("pedal").get<bool>());
    }
    teleop::InputDelta d;
    if (req.contains("delta")) {
        const json &jd = req.at("delta");
        d.translation_mm = jd.value("T_mm", 0.0);
        d.rotation_deg = jd.value("R_deg", 0.0);
        d.knob_deg = jd.value("B_deg", 0.0);
    }
    const teleop::WireMessage cmd = master_.step(d, now_us());
    const teleop::Frame f = teleop::encode(cmd);
    channel_->send_to(f, server_.address());
    const auto t = teleop::tuple_of(cmd);
    return json{{"seq", cmd.seq},
                {"command", {{"T_mm", t.translation_mm}, {"R_deg", t.rotation_deg}, {"B_deg", t.knob_deg}}},
                {"clutch", clutch_json(master_.clutch())}}
        .dump();
}

void Bridge::start(const std::string &host, std::uint16_t port)
{
    http_ = std::make_unique<httplib::Server>();
    running_ = true;

    http_->Get("/events", [this](const httplib::Request &req, httplib::Response &res) {
        std::uint64_t after = 0;
        if (req.has_param("after")) {
            after = std::stoull(req.get_param_value("after"));
        }
        res.set_chunked_content_provider("application/x-ndjson",
                                         [this, after](std::size_t, httplib::DataSink &sink) mutable {
                                             while (running_) {
                                                 const auto evs = server_.events().read_after(
                                                     after, std::chrono::milliseconds(200));
                                                 teleop::ClutchState clutch;
                                                 {
                                                     std::lock_guard lock(master_mu_);
                                                     clutch = master_.clutch();
                                                 }
                                                 for (const auto &ev : evs) {
                                                     const std::string line = bridge_event_json(ev, clutch) + "\n";
                                                     if (!sink.write(line.data(), line.size())) {
                                                         return false;
                                                     }
                                                     after = ev.id;
                                                 }
                                                 if (!evs.empty()) {
                                                     return true;
                                                 }
                                                 if (server_.events().closed()) {
                                                     break;
                                                 }
                                             }
                                             sink.done();
                                             return true;
                                         });
    });

    http_->Get("/state", [this](const httplib::Request &, httplib::Response &res) {
        const auto last = server_.events().last_id();
        const auto evs = last ? server_.events().read_after(last - 1) : std::vector<teleop::FollowerEvent>{};
        teleop::ClutchState clutch;
        {
            std::lock_guard lock(master_mu_);
            clutch = master_.clutch();
        }
        json j{{"last_event_id", last}, {"clutch", clutch_json(clutch)}};
        if (!evs.empty()) {
            j["event"] = json::parse(bridge_event_json(evs.back(), clutch));
        }
        res.set_content(j.dump(), "application/json");
    });

    http_->Post("/command", [this](const httplib::Request &req, httplib::Response &res) {
        try {
            res.set_content(handle_command(req.body), "application/json");
        } catch (const std::exception &e) {
            res.status = 400;
            res.set_content(json{{"error", e.what()}}.dump(), "application/json");
        }
    });

    if (port == 0) {
        port_ = static_cast<std::uint16_t>(http_->bind_to_any_port(host));
        if (port_ == 0) {
            throw LinkError("bridge: cannot bind " + host);
        }
    } else {
        if (!http_->bind_to_port(host, port)) {
            throw LinkError("bridge: cannot bind " + host + ":" + std::to_string(port));
        }
        port_ = port;
    }
    thread_ = std::thread([this] { http_->listen_after_bind(); });
}

void Bridge::stop()
{
    running_ = false;
    if (http_) {
        http_->stop();
    }
    if (thread_.joinable()) {
        thread_.join();
    }
}

} // namespace cathsim::app
