#pragma once

#include "cathsim/catheter/bending_map.hpp"

#include <string>
#include <vector>

namespace cathsim::scenario {

using catheter::ActuationTuple;

enum class PathKind
{
    Approaching,
    Circular,
    Infinity,
    Spiral,
};

// Throws ParameterError for an unknown name.
PathKind parse_path_kind(const std::string &name);
std::string to_string(PathKind kind);

struct Segment
{
    ActuationTuple target;
    double step_mm = 0.5;
    double step_deg = 1.0;
};

struct ScenarioProgram
{
    std::string name;
    ActuationTuple init;
    std::vector<Segment> segments;
    int repetitions = 5;

    ActuationTuple end() const { return segments.empty() ? init : segments.back().target; }
};

struct ScenarioParams
{
    double base_translation_mm = 55.0;
    double circular_bend_deg = 25.0;
    double infinity_bend_deg = 30.0;
    double spiral_bend_deg = 30.0;
    double spiral_advance_mm = 45.0;
    double step_mm = 0.5;
    double step_deg = 1.0;
    int repetitions = 5;
};

// Full-cycle tracking programs (circular, infinity, spiral). Approaching is
// target-driven and rejected here with ParameterError.
ScenarioProgram gen_path(PathKind kind, const ScenarioParams &params = {});

// Linear interpolation from `from` to `to` with no axis moving more than
// one step per point. Excludes `from`, includes `to`.
std::vector<ActuationTuple> interpolate(const ActuationTuple &from, const ActuationTuple &to, double step_mm,
                                        double step_deg);

// Dense setpoints of one repetition: init followed by every segment.
std::vector<ActuationTuple> expand(const ScenarioProgram &program);

// Home plus the five approaching targets, as (T mm, R deg, B deg).
std::vector<ActuationTuple> approaching_targets();

} // namespace cathsim::scenario
