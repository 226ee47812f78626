// cathsim: command-line front end of the catheter robot twin.

#include "cathsim/app/commands.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <csignal>
#include <iostream>

namespace {

std::atomic<bool> g_stop{false};

extern "C" void on_signal(int) { g_stop = true; }

} // namespace

int main(int argc, char **argv)
{
    using namespace cathsim::app;

    CLI::App app{"Desk-scale digital twin of a 3-DOF master-follower catheter robot"};
    app.require_subcommand(1);
    app.fallthrough();

    CommonOptions common;
    int reps = 0;
    std::string out_dir;
    std::uint64_t seed = 0;
    app.add_option("--config", common.configs, "JSON config or overlay; repeat to layer (env CATHSIM_CONFIG)");
    auto *reps_opt = app.add_option("--reps", reps, "Repetitions (tracking) or cycles (approach)");
    auto *out_opt = app.add_option("--out", out_dir, "Output directory");
    auto *seed_opt = app.add_option("--seed", seed, "Seed for every random draw");
    app.add_flag("--ideal", common.ideal, "Disable dead zone, play, side asymmetry and gravity");

    std::string fixture = std::string(CATHSIM_DATA_DIR) + "/table3.csv";
    auto *characterize = app.add_subcommand("characterize", "Loading-unloading characterization");
    characterize->add_option("fixture", fixture, "Load-case CSV")->check(CLI::ExistingFile);

    std::string samples;
    bool synthetic = false;
    auto *calibrate = app.add_subcommand("calibrate", "Fit the knob-to-tip bending map");
    auto *samples_opt = calibrate->add_option("samples", samples, "knob_deg,tip_deg[,direction] CSV");
    calibrate->add_flag("--synthetic", synthetic, "Fit a 5 deg sweep generated by the configured map")
        ->excludes(samples_opt);

    std::string kind;
    auto *track = app.add_subcommand("track", "Open-loop path tracking");
    track->add_option("kind", kind, "circular | infinity | spiral")
        ->required()
        ->check(CLI::IsMember({"circular", "infinity", "spiral"}));

    auto *approach = app.add_subcommand("approach", "Successive approaching of the target points");
    auto *serve = app.add_subcommand("serve", "Follower on the datagram port plus the observer bridge");

    std::string peer;
    std::size_t count = 10000;
    auto *rtt = app.add_subcommand("rtt", "Round-trip latency against a running follower");
    rtt->add_option("--peer", peer, "host[:port] of the follower");
    rtt->add_option("-n,--count", count, "Number of pings")->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    if (*reps_opt) {
        common.reps = reps;
    }
    if (*out_opt) {
        common.out_dir = out_dir;
    }
    if (*seed_opt) {
        common.seed = seed;
    }

    if (*characterize) {
        return cmd_characterize(common, fixture, std::cout, std::cerr);
    }
    if (*calibrate) {
        if (!synthetic && samples.empty()) {
            std::cerr << "calibrate: give a samples CSV or --synthetic\n";
            return 2;
        }
        return cmd_calibrate(common, samples, synthetic, std::cout, std::cerr);
    }
    if (*track) {
        return cmd_track(common, kind, std::cout, std::cerr);
    }
    if (*approach) {
        return cmd_approach(common, std::cout, std::cerr);
    }
    if (*serve) {
        std::signal(SIGINT, on_signal);
        std::signal(SIGTERM, on_signal);
        return cmd_serve(common, g_stop, std::cout, std::cerr);
    }
    if (*rtt) {
        return cmd_rtt(common, peer, count, std::cout, std::cerr);
    }
    return 2;
}
