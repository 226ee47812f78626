#pragma once

#include "cathsim/catheter/catheter_model.hpp"
#include "cathsim/characterization/characterization.hpp"
#include "cathsim/scenario/runner.hpp"
#include "cathsim/teleop/follower.hpp"
#include "cathsim/teleop/transport.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace cathsim::app {

enum class Transport
{
    InProcess,
    Simulated,
    Udp,
};

struct LinkConfig
{
    std::string host = "127.0.0.1";
    std::uint16_t port = teleop::kDefaultFollowerPort;
    std::uint16_t bridge_port = 47002; // 0 disables the bridge
    double command_rate_hz = 100.0;
    double status_rate_hz = 100.0;
    Transport transport = Transport::InProcess;
    double delay_ms = 0.0;
    double jitter_ms = 0.0;
    double loss = 0.0;
    int reply_timeout_ms = 100;
    int max_consecutive_losses = 20;
};

struct ScenarioConfig
{
    scenario::ScenarioParams params;
    double sample_rate_hz = 250.0;
    double noise_std_cm = 0.0;
    int approach_cycles = 5;
};

struct SimConfig
{
    catheter::CatheterSpec catheter;
    catheter::BendingMapConfig bending;
    double ideal_gain = 4.5; // gain of the memoryless reference map
    teleop::FollowerLimits limits;
    teleop::GripperConfig gripper;
    LinkConfig link;
    ScenarioConfig scenario;
    std::optional<double> unloading_play_mm;
    std::string output_dir = "out";
    std::uint64_t seed = 1;

    // Disables dead zone, play, side asymmetry, gravity and the marker.
    void make_ideal();
    catheter::BendingMapConfig ideal_bending() const;
    scenario::RunOptions run_options() const;
};

nlohmann::json to_json(const SimConfig &cfg);

// Every key must exist in the default document, with a matching type.
// Throws ConfigError naming the offending key path.
SimConfig from_json(const nlohmann::json &doc);

// Applies RFC 7386 merge patches in order, validating each.
SimConfig load_config(const std::vector<std::string> &paths);
SimConfig apply_overlays(const std::vector<nlohmann::json> &patches);

void write_json_file(const std::string &path, const nlohmann::json &doc);

} // namespace cathsim::app
