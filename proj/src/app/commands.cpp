#include "cathsim/app/commands.hpp"

#include "cathsim/app/bridge.hpp"
#include "cathsim/errors.hpp"
#include "cathsim/scenario/trajectory_io.hpp"
#include "cathsim/teleop/rtt.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

namespace cathsim::app {

namespace fs = std::filesystem;
using nlohmann::json;

SimConfig resolve_config(const CommonOptions &opts)
{
    std::vector<std::string> paths = opts.configs;
    if (paths.empty()) {
        if (const char *env = std::getenv("CATHSIM_CONFIG"); env && *env) {
            paths.emplace_back(env);
        }
    }
    SimConfig cfg = load_config(paths);
    if (opts.reps) {
        if (*opts.reps < 1) {
            throw ConfigError("--reps must be >= 1");
        }
        cfg.scenario.params.repetitions = *opts.reps;
        cfg.scenario.approach_cycles = *opts.reps;
    }
    if (opts.out_dir) {
        cfg.output_dir = *opts.out_dir;
    }
    if (opts.seed) {
        cfg.seed = *opts.seed;
    }
    if (opts.ideal) {
        cfg.make_ideal();
    }
    return cfg;
}

SystemBundle::~SystemBundle()
{
    handle.reset();
    if (server) {
        server->stop();
    }
}

namespace {

teleop::FollowerSession make_session(const SimConfig &cfg)
{
    return teleop::FollowerSession(catheter::CatheterModel(cfg.catheter, cfg.bending), cfg.limits, cfg.gripper);
}

fs::path prepare_out(const SimConfig &cfg)
{
    fs::path dir(cfg.output_dir);
    fs::create_directories(dir);
    return dir;
}

std::ofstream open_out(const fs::path &p)
{
    std::ofstream f(p);
    if (!f) {
        throw Error("cannot write " + p.string());
    }
    return f;
}

// Runs `body`, mapping exceptions onto exit codes.
template <typename F>
int guarded(std::ostream &err, F &&body)
{
    try {
        return body();
    } catch (const ConfigError &e) {
        err << "config error: " << e.what() << '\n';
        return 2;
    } catch (const ParseError &e) {
        err << "parse error: " << e.what() << '\n';
        return 2;
    } catch (const ParameterError &e) {
        err << "parameter error: " << e.what() << '\n';
        return 2;
    } catch (const Error &e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace

SystemBundle make_system(const SimConfig &cfg)
{
    SystemBundle b;
    const scenario::LinkedSystemOptions lopts{std::chrono::milliseconds(cfg.link.reply_timeout_ms),
                                              cfg.link.max_consecutive_losses};
    switch (cfg.link.transport) {
    case Transport::InProcess:
        b.handle = std::make_unique<scenario::InProcessSystem>(make_session(cfg));
        break;
    case Transport::Simulated: {
        teleop::LinkImpairment imp{cfg.link.delay_ms, cfg.link.jitter_ms, cfg.link.loss, cfg.seed};
        teleop::LinkImpairment back = imp;
        back.seed = cfg.seed + 1;
        auto [master, follower] = teleop::make_simulated_link(imp, back);
        b.server = std::make_unique<teleop::FollowerServer>(std::move(follower), make_session(cfg));
        b.server->start();
        b.handle = std::make_unique<scenario::LinkedSystem>(std::move(master), *b.server, lopts);
        break;
    }
    case Transport::Udp: {
        auto follower = std::make_unique<teleop::UdpChannel>(cfg.link.host, 0);
        auto master = std::make_unique<teleop::UdpChannel>(cfg.link.host, 0);
        b.server = std::make_unique<teleop::FollowerServer>(std::move(follower), make_session(cfg));
        b.server->start();
        b.handle = std::make_unique<scenario::LinkedSystem>(std::move(master), *b.server, lopts);
        break;
    }
    }
    return b;
}

std::vector<catheter::BendingSample> read_bending_samples_csv(std::istream &in)
{
    std::vector<catheter::BendingSample> out;
    std::string line;
    std::size_t line_no = 0;
    bool header = false;
    double last = 0.0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() || line.front() == '#') {
            continue;
        }
        if (!header) {
            if (line.rfind("knob_deg,tip_deg", 0) != 0) {
                throw ParseError(line_no, "expected header knob_deg,tip_deg[,direction]");
            }
            header = true;
            continue;
        }
        std::stringstream ss(line);
        std::string a, b, c;
        std::getline(ss, a, ',');
        std::getline(ss, b, ',');
        std::getline(ss, c, ',');
        catheter::BendingSample s;
        try {
            std::size_t pa = 0, pb = 0;
            s.knob_deg = std::stod(a, &pa);
            s.tip_deg = std::stod(b, &pb);
            if (pa != a.size() || pb != b.size()) {
                throw std::invalid_argument("trailing characters");
            }
            s.direction = c.empty() ? (s.knob_deg >= last ? 1 : -1) : std::stoi(c);
        } catch (const std::logic_error &) {
            throw ParseError(line_no, "malformed bending sample '" + line + "'");
        }
        last = s.knob_deg;
        out.push_back(s);
    }
    if (out.empty()) {
        throw ParseError(line_no, "no bending samples");
    }
    return out;
}

int cmd_characterize(const CommonOptions &opts, const std::string &fixture, std::ostream &out, std::ostream &err)
{
    return guarded(err, [&] {
        const SimConfig cfg = resolve_config(opts);
        std::ifstream in(fixture);
        if (!in) {
            throw ConfigError("cannot open fixture '" + fixture + "'");
        }
        const auto cases = characterization::read_load_cases_csv(in);

        rod::RodMaterial material = cfg.catheter.material();
        characterization::CharacterizationConfig ccfg;
        ccfg.play_mm = cfg.unloading_play_mm;

        bool has_disp = false, has_targets = false;
        const characterization::LoadCase *first = nullptr;
        for (const auto &c : cases) {
            has_disp = has_disp || c.tip_loading_mm > 0.0;
            has_targets = has_targets || (c.sim_target_mm && *c.sim_target_mm > 0.0);
            if (!first && c.force_n > 0.0 && (c.tip_loading_mm > 0.0 || c.sim_target_mm.value_or(0.0) > 0.0)) {
                first = &c;
            }
        }
        if (has_targets) {
            ccfg.mode = characterization::CharacterizationConfig::Mode::PerCaseTargets;
        } else if (first) {
            material.youngs_modulus = characterization::calibrate_E(*first, material);
        }
        const auto result = characterization::run_characterization(cases, material, ccfg);

        const fs::path dir = prepare_out(cfg);
        {
            auto f = open_out(dir / "characterization.csv");
            characterization::write_result_table(f, cases, result);
        }
        {
            auto f = open_out(dir / "characterization.json");
            f << characterization::result_to_json(result) << '\n';
        }
        write_json_file((dir / "characterize_overlay.json").string(),
                        json{{"catheter", {{"youngs_modulus_pa", result.calibrated_E}}}});

        characterization::write_result_table(out, cases, result);
        out << std::setprecision(6);
        if (has_disp) {
            out << "trend slope: " << result.trend_slope << " N/m\n";
            out << "hysteresis residual: " << result.measured_residual_mm << " mm\n";
        }
        out << "calibrated E: " << result.calibrated_E << " Pa\n";
        out << "wrote " << (dir / "characterization.csv").string() << ", characterization.json, "
            << "characterize_overlay.json\n";
        return 0;
    });
}

int cmd_calibrate(const CommonOptions &opts, const std::string &samples_csv, bool synthetic, std::ostream &out,
                  std::ostream &err)
{
    return guarded(err, [&] {
        const SimConfig cfg = resolve_config(opts);
        std::vector<catheter::BendingSample> samples;
        if (synthetic) {
            const auto knobs = catheter::bending_sweep_protocol(cfg.bending.max_knob, 5.0, true);
            samples = catheter::simulate_sweep(knobs, cfg.bending);
        } else {
            std::ifstream in(samples_csv);
            if (!in) {
                throw ConfigError("cannot open samples '" + samples_csv + "'");
            }
            samples = read_bending_samples_csv(in);
        }
        const auto fitted = catheter::calibrate_bending_map(samples, cfg.bending.max_knob);
        const json overlay{{"bending",
                            {{"dead_zone_deg", fitted.dead_zone_half_width},
                             {"play_deg", fitted.backlash_play},
                             {"gain_right", fitted.gain_right},
                             {"gain_left", fitted.gain_left}}}};
        const fs::path dir = prepare_out(cfg);
        write_json_file((dir / "calibrate_overlay.json").string(), overlay);
        out << std::setprecision(6) << "dead zone half width: " << fitted.dead_zone_half_width << " deg\n"
            << "play: " << fitted.backlash_play << " deg\n"
            << "gain right: " << fitted.gain_right << "\n"
            << "gain left: " << fitted.gain_left << "\n"
            << "wrote " << (dir / "calibrate_overlay.json").string() << '\n';
        return 0;
    });
}

int cmd_track(const CommonOptions &opts, const std::string &kind_name, std::ostream &out, std::ostream &err)
{
    return guarded(err, [&] {
        const SimConfig cfg = resolve_config(opts);
        const scenario::PathKind kind = scenario::parse_path_kind(kind_name);
        if (kind == scenario::PathKind::Approaching) {
            throw ParameterError("track: use the approach subcommand for approaching");
        }
        const scenario::ScenarioProgram program = scenario::gen_path(kind, cfg.scenario.params);
        const fs::path dir = prepare_out(cfg);
        const std::string stem = "track_" + program.name;

        scenario::TrajectoryLog log;
        {
            SystemBundle system = make_system(cfg);
            try {
                log = scenario::run_scenario(program, *system.handle, cfg.run_options());
            } catch (const scenario::ScenarioAbortedError &e) {
                auto f = open_out(dir / (stem + "_partial.csv"));
                scenario::write_log_csv(f, e.partial());
                throw;
            }
        }
        const auto reference = scenario::ideal_reference(program, cfg.catheter, cfg.ideal_bending());
        const auto report = scenario::compute_errors(log, reference);

        {
            auto f = open_out(dir / (stem + ".csv"));
            scenario::write_log_csv(f, log);
        }
        {
            auto f = open_out(dir / (stem + "_reference.csv"));
            f << "tip_x_cm,tip_y_cm,tip_z_cm\n" << std::setprecision(17);
            for (const auto &p : reference) {
                f << p.x() << ',' << p.y() << ',' << p.z() << '\n';
            }
        }
        json j = json::parse(scenario::error_report_to_json(program.name, report));
        if (kind == scenario::PathKind::Infinity) {
            const auto &seg = program.segments;
            const auto gap = scenario::two_path_gap(log.rep(0), seg[0].target, seg[1].target);
            j["two_path_gap_cm"] = {{"mean", gap.mean_cm}, {"max", gap.max_cm}, {"pairs", gap.pairs}};
        }
        write_json_file((dir / (stem + "_errors.json")).string(), j);
        {
            auto f = open_out(dir / (stem + "_errors.txt"));
            scenario::write_error_report(f, program.name, report);
        }

        scenario::write_error_report(out, program.name, report);
        if (j.contains("two_path_gap_cm")) {
            out << "two-path gap (subpath 2): mean " << j["two_path_gap_cm"]["mean"].get<double>() << " cm, max "
                << j["two_path_gap_cm"]["max"].get<double>() << " cm\n";
        }
        out << "wrote " << (dir / (stem + ".csv")).string() << " (" << log.samples.size() << " samples, "
            << log.repetitions() << " reps)\n";
        return 0;
    });
}

int cmd_approach(const CommonOptions &opts, std::ostream &out, std::ostream &err)
{
    return guarded(err, [&] {
        const SimConfig cfg = resolve_config(opts);
        const fs::path dir = prepare_out(cfg);
        scenario::ApproachResult result;
        {
            SystemBundle system = make_system(cfg);
            result = scenario::run_approaching(scenario::approaching_targets(), cfg.scenario.approach_cycles,
                                               *system.handle, cfg.run_options(), cfg.scenario.params.step_mm,
                                               cfg.scenario.params.step_deg);
        }
        {
            auto f = open_out(dir / "approach.csv");
            scenario::write_log_csv(f, result.log);
        }
        {
            auto f = open_out(dir / "approach_stats.txt");
            scenario::write_approach_stats(f, result.stats);
        }
        {
            auto f = open_out(dir / "approach_stats.json");
            f << scenario::approach_stats_to_json(result.stats) << '\n';
        }
        scenario::write_approach_stats(out, result.stats);
        return 0;
    });
}

int cmd_serve(const CommonOptions &opts, const std::atomic<bool> &stop, std::ostream &out, std::ostream &err)
{
    return guarded(err, [&] {
        const SimConfig cfg = resolve_config(opts);
        const fs::path dir = prepare_out(cfg);

        auto channel = std::make_unique<teleop::UdpChannel>(cfg.link.host, cfg.link.port);
        teleop::FollowerServer server(std::move(channel), make_session(cfg));
        server.start();

        std::unique_ptr<Bridge> bridge;
        if (cfg.link.bridge_port != 0) {
            teleop::ClutchConfig clutch;
            clutch.follower_range_mm = cfg.limits.max_translation_mm;
            bridge = std::make_unique<Bridge>(server, std::make_unique<teleop::UdpChannel>(cfg.link.host, 0), clutch);
            bridge->start(cfg.link.host, cfg.link.bridge_port);
        }

        // Log writer: drains the event stream into an NDJSON file.
        std::ofstream log = open_out(dir / "serve_events.ndjson");
        std::atomic<bool> writer_stop{false};
        std::thread writer([&] {
            std::uint64_t last = 0;
            while (true) {
                const bool finishing = writer_stop.load();
                for (const auto &ev : server.events().read_after(last, std::chrono::milliseconds(100))) {
                    log << bridge_event_json(ev, teleop::ClutchState{}) << '\n';
                    last = ev.id;
                }
                if (finishing) {
                    break;
                }
            }
        });

        out << "follower listening on " << server.address().str();
        if (bridge) {
            out << ", bridge on http://" << cfg.link.host << ':' << bridge->port();
        }
        out << std::endl;

        while (!stop.load()) {
            std::this_thread::sleep_for(std::chrono::milliseconds(50));
        }

        if (bridge) {
            bridge->stop();
        }
        server.stop();
        writer_stop = true;
        writer.join();
        log.flush();
        const auto c = server.counters();
        out << "shutdown: accepted " << c.accepted << ", duplicates " << c.duplicates << ", stale " << c.stale
            << ", clamped " << c.clamped << ", rejected frames " << c.rejected_frames << std::endl;
        return 0;
    });
}

int cmd_rtt(const CommonOptions &opts, const std::string &peer, std::size_t count, std::ostream &out,
            std::ostream &err)
{
    return guarded(err, [&] {
        const SimConfig cfg = resolve_config(opts);
        const teleop::PeerAddress to =
            teleop::parse_peer(peer.empty() ? cfg.link.host : peer, cfg.link.port);
        teleop::UdpChannel channel("0.0.0.0", 0);
        const auto s = teleop::measure_rtt(channel, to, count,
                                           std::chrono::milliseconds(std::max(cfg.link.reply_timeout_ms, 1)));
        out << std::fixed << std::setprecision(1) << "rtt to " << to.str() << ": sent " << s.sent << ", received "
            << s.received << ", lost " << s.lost << "\n"
            << "min " << s.min_us << " us, median " << s.median_us << " us, mean " << s.mean_us << " us, max "
            << s.max_us << " us\n";
        if (s.degraded) {
            err << "warning: " << s.warning << '\n';
        }
        return s.received > 0 ? 0 : 1;
    });
}

} // namespace cathsim::app
