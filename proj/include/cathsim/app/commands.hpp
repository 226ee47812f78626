#pragma once

#include "cathsim/app/config.hpp"

#include <atomic>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace cathsim::app {

// Flags shared by every subcommand.
struct CommonOptions
{
    std::vector<std::string> configs; // applied in order; CATHSIM_CONFIG when empty
    std::optional<int> reps;
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    bool ideal = false;
};

SimConfig resolve_config(const CommonOptions &opts);

// Owns whatever the configured transport needs. Destroys the handle before
// the server it talks to.
struct SystemBundle
{
    std::unique_ptr<teleop::FollowerServer> server;
    std::unique_ptr<scenario::SystemHandle> handle;

    SystemBundle() = default;
    SystemBundle(SystemBundle &&) = default;
    SystemBundle &operator=(SystemBundle &&) = default;
    ~SystemBundle();
};

SystemBundle make_system(const SimConfig &cfg);

// knob_deg,tip_deg[,direction]; throws ParseError.
std::vector<catheter::BendingSample> read_bending_samples_csv(std::istream &in);

// Exit codes: 0 ok, 1 runtime failure, 2 bad configuration or input.
int cmd_characterize(const CommonOptions &opts, const std::string &fixture, std::ostream &out, std::ostream &err);
int cmd_calibrate(const CommonOptions &opts, const std::string &samples_csv, bool synthetic, std::ostream &out,
                  std::ostream &err);
int cmd_track(const CommonOptions &opts, const std::string &kind, std::ostream &out, std::ostream &err);
int cmd_approach(const CommonOptions &opts, std::ostream &out, std::ostream &err);
// Runs until `stop` becomes true.
int cmd_serve(const CommonOptions &opts, const std::atomic<bool> &stop, std::ostream &out, std::ostream &err);
int cmd_rtt(const CommonOptions &opts, const std::string &peer, std::size_t count, std::ostream &out,
            std::ostream &err);

} // namespace cathsim::app
