#include "cathsim/scenario/program.hpp"

#include "cathsim/errors.hpp"

#include <algorithm>
#include <cmath>

namespace cathsim::scenario {

PathKind parse_path_kind(const std::string &name)
{
    if (name == "approaching" || name == "approach") {
        return PathKind::Approaching;
    }
    if (name == "circular") {
        return PathKind::Circular;
    }
    if (name == "infinity") {
        return PathKind::Infinity;
    }
    if (name == "spiral") {
        return PathKind::Spiral;
    }
    throw ParameterError("unknown path kind '" + name + "'");
}

std::string to_string(PathKind kind)
{
    switch (kind) {
    case PathKind::Approaching:
        return "approaching";
    case PathKind::Circular:
        return "circular";
    case PathKind::Infinity:
        return "infinity";
    case PathKind::Spiral:
        return "spiral";
    }
    return "?";
}

ScenarioProgram gen_path(PathKind kind, const ScenarioParams &p)
{
    if (!(p.step_mm > 0.0) || !(p.step_deg > 0.0) || p.repetitions < 1) {
        throw ParameterError("gen_path: steps must be positive and repetitions >= 1");
    }
    ScenarioProgram prog;
    prog.name = to_string(kind);
    prog.repetitions = p.repetitions;
    const double t0 = p.base_translation_mm;

    std::vector<ActuationTuple> waypoints;
    switch (kind) {
    case PathKind::Circular: {
        const double b = p.circular_bend_deg;
        prog.init = {t0, 0.0, b};
        waypoints = {{t0, 360.0, b}, {t0, 0.0, b}};
        break;
    }
    case PathKind::Infinity: {
        // Relative increments R+90, B-60, R-90, B+30, then retraced in
        // reverse so the cycle closes.
        const double b = p.infinity_bend_deg;
        prog.init = {t0, 0.0, b};
        const double steps[4][2] = {{90.0, 0.0}, {0.0, -2.0 * b}, {-90.0, 0.0}, {0.0, b}};
        ActuationTuple cur = prog.init;
        for (const auto &s : steps) {
            cur.rotation_deg += s[0];
            cur.knob_deg += s[1];
            waypoints.push_back(cur);
        }
        for (int i = 3; i >= 0; --i) {
            cur.rotation_deg -= steps[i][0];
            cur.knob_deg -= steps[i][1];
            waypoints.push_back(cur);
        }
        break;
    }
    case PathKind::Spiral: {
        const double b = p.spiral_bend_deg;
        prog.init = {t0, 0.0, b};
        waypoints = {{t0 + p.spiral_advance_mm, 360.0, b}, {t0, 0.0, b}};
        break;
    }
    case PathKind::Approaching:
        throw ParameterError("gen_path: approaching is target-driven, use approaching_targets()");
    }
    for (const auto &w : waypoints) {
        prog.segments.push_back({w, p.step_mm, p.step_deg});
    }
    return prog;
}

std::vector<ActuationTuple> interpolate(const ActuationTuple &from, const ActuationTuple &to, double step_mm,
                                        double step_deg)
{
    const double dt = to.translation_mm - from.translation_mm;
    const double dr = to.rotation_deg - from.rotation_deg;
    const double db = to.knob_deg - from.knob_deg;
    const double n_real = std::max({std::abs(dt) / step_mm, std::abs(dr) / step_deg, std::abs(db) / step_deg});
    // Tolerate round-off so that 360/1 gives 360 points, not 361.
    const int n = std::max(1, static_cast<int>(std::ceil(n_real - 1e-9)));
    std::vector<ActuationTuple> out;
    out.reserve(n);
    for (int k = 1; k <= n; ++k) {
        const double a = static_cast<double>(k) / n;
        out.push_back({from.translation_mm + a * dt, from.rotation_deg + a * dr, from.knob_deg + a * db});
    }
    out.back() = to;
    return out;
}

std::vector<ActuationTuple> expand(const ScenarioProgram &program)
{
    std::vector<ActuationTuple> out{program.init};
    ActuationTuple cur = program.init;
    for (const auto &s : program.segments) {
        const auto pts = interpolate(cur, s.target, s.step_mm, s.step_deg);
        out.insert(out.end(), pts.begin(), pts.end());
        cur = s.target;
    }
    return out;
}

std::vector<ActuationTuple> approaching_targets()
{
    return {{0.0, 0.0, 0.0}, {55.0, 0.0, 25.0}, {10.0, -90.0, 0.0}, {0.0, 0.0, -50.0}, {20.0, 90.0, 0.0},
            {25.0, 90.0, 0.0}};
}

} // namespace cathsim::scenario
