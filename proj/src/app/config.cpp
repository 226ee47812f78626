#include "cathsim/app/config.hpp"

#include "cathsim/errors.hpp"

#include <fstream>

namespace cathsim::app {

using nlohmann::json;

namespace {

const char *transport_name(Transport t)
{
    switch (t) {
    case Transport::InProcess:
        return "inprocess";
    case Transport::Simulated:
        return "simulated";
    case Transport::Udp:
        return "udp";
    }
    return "?";
}

Transport parse_transport(const std::string &s)
{
    if (s == "inprocess") {
        return Transport::InProcess;
    }
    if (s == "simulated") {
        return Transport::Simulated;
    }
    if (s == "udp") {
        return Transport::Udp;
    }
    throw ConfigError("link.transport: expected inprocess, simulated or udp, got '" + s + "'");
}

bool compatible(const json &def, const json &val)
{
    if (def.is_null()) {
        return val.is_null() || val.is_number();
    }
    if (def.is_number()) {
        return val.is_number();
    }
    return def.type() == val.type();
}

// Checks keys and leaf types of `doc` against the defaults.
void check_schema(const json &def, const json &doc, const std::string &path)
{
    if (!doc.is_object()) {
        throw ConfigError((path.empty() ? std::string("config") : path) + ": expected an object");
    }
    for (const auto &[key, val] : doc.items()) {
        const std::string here = path.empty() ? key : path + "." + key;
        if (!def.contains(key)) {
            throw ConfigError("unknown config key '" + here + "'");
        }
        const json &d = def.at(key);
        if (d.is_object()) {
            check_schema(d, val, here);
        } else if (!val.is_null() || def.at(key).is_null()) {
            if (!compatible(d, val)) {
                throw ConfigError("config key '" + here + "': expected " + std::string(d.type_name()) + ", got " +
                                  val.type_name());
            }
        }
        // null for a non-nullable key deletes it in the merge patch, which
        // falls back to the default.
    }
}

const json &defaults()
{
    static const json d = to_json(SimConfig{});
    return d;
}

template <typename T>
void read(const json &j, const char *key, T &out)
{
    if (j.contains(key) && !j.at(key).is_null()) {
        out = j.at(key).get<T>();
    }
}

} // namespace

void SimConfig::make_ideal()
{
    bending = ideal_bending();
    catheter.gravity_enabled = false;
    catheter.marker_enabled = false;
}

catheter::BendingMapConfig SimConfig::ideal_bending() const
{
    catheter::BendingMapConfig b = catheter::BendingMapConfig::ideal(ideal_gain);
    b.max_knob = bending.max_knob;
    return b;
}

scenario::RunOptions SimConfig::run_options() const
{
    scenario::RunOptions o;
    o.command_rate_hz = link.command_rate_hz;
    o.sample_rate_hz = scenario.sample_rate_hz;
    o.noise_std_cm = scenario.noise_std_cm;
    o.seed = seed;
    return o;
}

json to_json(const SimConfig &c)
{
    const auto &k = c.catheter;
    json j;
    j["catheter"] = {
        {"active_length_m", k.active_length},
        {"outer_diameter_m", k.outer_diameter},
        {"second_moment_m4", k.second_moment},
        {"density_kg_m3", k.density},
        {"linear_stiffness_n_per_m", k.linear_stiffness},
        {"youngs_modulus_pa", k.youngs_modulus},
        {"poisson_ratio", k.poisson_ratio},
        {"area_m2", k.area},
        {"insertion_length_m", k.insertion_length},
        {"tendon_offset_m", k.tendon_offset_radius},
        {"knob_tension_gain_n_per_deg", k.knob_tension_gain},
        {"gravity", k.gravity_enabled},
        {"marker", k.marker_enabled},
        {"marker_mass_kg", k.marker_mass},
    };
    j["bending"] = {
        {"dead_zone_deg", c.bending.dead_zone_half_width},
        {"play_deg", c.bending.backlash_play},
        {"gain_right", c.bending.gain_right},
        {"gain_left", c.bending.gain_left},
        {"max_knob_deg", c.bending.max_knob},
        {"ideal_gain", c.ideal_gain},
    };
    j["rod"] = {
        {"nodes", k.nodes},
        {"max_iterations", k.shooting.max_iterations},
        {"tolerance", k.shooting.tolerance},
        {"fd_step", k.shooting.fd_step},
    };
    j["follower"] = {
        {"max_translation_mm", c.limits.max_translation_mm},
        {"max_knob_deg", c.limits.max_knob_deg},
        {"gripper_overlap_ms", c.gripper.overlap_ms},
    };
    j["link"] = {
        {"host", c.link.host},
        {"port", c.link.port},
        {"bridge_port", c.link.bridge_port},
        {"command_rate_hz", c.link.command_rate_hz},
        {"status_rate_hz", c.link.status_rate_hz},
        {"transport", transport_name(c.link.transport)},
        {"delay_ms", c.link.delay_ms},
        {"jitter_ms", c.link.jitter_ms},
        {"loss", c.link.loss},
        {"reply_timeout_ms", c.link.reply_timeout_ms},
        {"max_consecutive_losses", c.link.max_consecutive_losses},
    };
    const auto &p = c.scenario.params;
    j["scenario"] = {
        {"reps", p.repetitions},
        {"base_translation_mm", p.base_translation_mm},
        {"circular_bend_deg", p.circular_bend_deg},
        {"infinity_bend_deg", p.infinity_bend_deg},
        {"spiral_bend_deg", p.spiral_bend_deg},
        {"spiral_advance_mm", p.spiral_advance_mm},
        {"step_mm", p.step_mm},
        {"step_deg", p.step_deg},
        {"sample_rate_hz", c.scenario.sample_rate_hz},
        {"noise_std_cm", c.scenario.noise_std_cm},
        {"approach_cycles", c.scenario.approach_cycles},
    };
    j["characterization"] = {{"unloading_play_mm", c.unloading_play_mm ? json(*c.unloading_play_mm) : json(nullptr)}};
    j["output_dir"] = c.output_dir;
    j["seed"] = c.seed;
    return j;
}

SimConfig from_json(const json &doc)
{
    check_schema(defaults(), doc, "");
    json full = defaults();
    full.merge_patch(doc);

    SimConfig c;
    try {
        auto &k = c.catheter;
        const json &jc = full.at("catheter");
        read(jc, "active_length_m", k.active_length);
        read(jc, "outer_diameter_m", k.outer_diameter);
        read(jc, "second_moment_m4", k.second_moment);
        read(jc, "density_kg_m3", k.density);
        read(jc, "linear_stiffness_n_per_m", k.linear_stiffness);
        read(jc, "youngs_modulus_pa", k.youngs_modulus);
        read(jc, "poisson_ratio", k.poisson_ratio);
        read(jc, "area_m2", k.area);
        read(jc, "insertion_length_m", k.insertion_length);
        read(jc, "tendon_offset_m", k.tendon_offset_radius);
        read(jc, "knob_tension_gain_n_per_deg", k.knob_tension_gain);
        read(jc, "gravity", k.gravity_enabled);
        read(jc, "marker", k.marker_enabled);
        read(jc, "marker_mass_kg", k.marker_mass);

        const json &jb = full.at("bending");
        read(jb, "dead_zone_deg", c.bending.dead_zone_half_width);
        read(jb, "play_deg", c.bending.backlash_play);
        read(jb, "gain_right", c.bending.gain_right);
        read(jb, "gain_left", c.bending.gain_left);
        read(jb, "max_knob_deg", c.bending.max_knob);
        read(jb, "ideal_gain", c.ideal_gain);

        const json &jr = full.at("rod");
        read(jr, "nodes", k.nodes);
        read(jr, "max_iterations", k.shooting.max_iterations);
        read(jr, "tolerance", k.shooting.tolerance);
        read(jr, "fd_step", k.shooting.fd_step);

        const json &jf = full.at("follower");
        read(jf, "max_translation_mm", c.limits.max_translation_mm);
        read(jf, "max_knob_deg", c.limits.max_knob_deg);
        read(jf, "gripper_overlap_ms", c.gripper.overlap_ms);

        const json &jl = full.at("link");
        read(jl, "host", c.link.host);
        read(jl, "port", c.link.port);
        read(jl, "bridge_port", c.link.bridge_port);
        read(jl, "command_rate_hz", c.link.command_rate_hz);
        read(jl, "status_rate_hz", c.link.status_rate_hz);
        c.link.transport = parse_transport(jl.at("transport").get<std::string>());
        read(jl, "delay_ms", c.link.delay_ms);
        read(jl, "jitter_ms", c.link.jitter_ms);
        read(jl, "loss", c.link.loss);
        read(jl, "reply_timeout_ms", c.link.reply_timeout_ms);
        read(jl, "max_consecutive_losses", c.link.max_consecutive_losses);

        const json &js = full.at("scenario");
        auto &p = c.scenario.params;
        read(js, "reps", p.repetitions);
        read(js, "base_translation_mm", p.base_translation_mm);
        read(js, "circular_bend_deg", p.circular_bend_deg);
        read(js, "infinity_bend_deg", p.infinity_bend_deg);
        read(js, "spiral_bend_deg", p.spiral_bend_deg);
        read(js, "spiral_advance_mm", p.spiral_advance_mm);
        read(js, "step_mm", p.step_mm);
        read(js, "step_deg", p.step_deg);
        read(js, "sample_rate_hz", c.scenario.sample_rate_hz);
        read(js, "noise_std_cm", c.scenario.noise_std_cm);
        read(js, "approach_cycles", c.scenario.approach_cycles);

        const json &jch = full.at("characterization");
        if (jch.contains("unloading_play_mm") && !jch.at("unloading_play_mm").is_null()) {
            c.unloading_play_mm = jch.at("unloading_play_mm").get<double>();
        }
        read(full, "output_dir", c.output_dir);
        read(full, "seed", c.seed);
    } catch (const json::exception &e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    try {
        c.catheter.validate();
        c.bending.validate();
    } catch (const ParameterError &e) {
        throw ConfigError(e.what());
    }
    if (!(c.link.command_rate_hz > 0.0) || !(c.scenario.sample_rate_hz > 0.0) || c.link.loss < 0.0 ||
        c.link.loss > 1.0 || c.link.delay_ms < 0.0 || c.link.jitter_ms < 0.0) {
        throw ConfigError("link/scenario: rates must be positive, delays non-negative, loss within [0, 1]");
    }
    if (c.scenario.params.repetitions < 1 || c.scenario.approach_cycles < 1) {
        throw ConfigError("scenario: reps and approach_cycles must be >= 1");
    }
    return c;
}

SimConfig apply_overlays(const std::vector<json> &patches)
{
    json merged = json::object();
    for (const auto &p : patches) {
        check_schema(defaults(), p, "");
        merged.merge_patch(p);
    }
    return from_json(merged);
}

SimConfig load_config(const std::vector<std::string> &paths)
{
    std::vector<json> patches;
    for (const auto &path : paths) {
        std::ifstream in(path);
        if (!in) {
            throw ConfigError("cannot open config '" + path + "'");
        }
        try {
            patches.push_back(json::parse(in));
        } catch (const json::parse_error &e) {
            throw ConfigError(path + ": " + e.what());
        }
    }
    return apply_overlays(patches);
}

void write_json_file(const std::string &path, const json &doc)
{
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write '" + path + "'");
    }
    out << doc.dump(2) << '\n';
}

} // namespace cathsim::app
