#pragma once

#include "cathsim/catheter/catheter_model.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace cathsim::scenario {

using catheter::ActuationTuple;
using catheter::Vec3;

struct TrajectorySample
{
    int rep = 0;
    double t_s = 0.0;
    ActuationTuple cmd;
    Vec3 tip_cm = Vec3::Zero();
    std::uint8_t flags = 0;
};

struct TrajectoryLog
{
    std::vector<TrajectorySample> samples;
    double sample_rate_hz = 250.0;

    int repetitions() const;
    std::vector<TrajectorySample> rep(int index) const;
};

enum class Plane
{
    XY,
    XZ,
    YZ,
};

inline constexpr std::array<Plane, 3> kPlanes{Plane::XY, Plane::XZ, Plane::YZ};
const char *plane_name(Plane p);

struct PlaneError
{
    double mee_cm = 0.0; // mean L2 norm of the planar error
    double mae_cm = 0.0; // mean L1 norm of the planar error
    std::size_t samples = 0;
};

using PlaneErrors = std::array<PlaneError, 3>; // indexed like kPlanes

struct ErrorReport
{
    PlaneErrors pooled;
    std::vector<int> reps;
    std::vector<PlaneErrors> per_rep;
};

// Nearest-point planar errors of every sample against the reference
// polyline (projected onto each plane). Throws EmptyInputError for an empty
// log and PreconditionError for fewer than two reference points.
ErrorReport compute_errors(const TrajectoryLog &log, const std::vector<Vec3> &reference);

// Error vector from a 2D point to the nearest point of a 2D polyline.
Eigen::Vector2d nearest_point_error(const Eigen::Vector2d &point, const std::vector<Eigen::Vector2d> &polyline);

struct ApproachStats
{
    std::vector<ActuationTuple> targets;
    std::vector<Vec3> mean_cm;
    std::vector<Vec3> std_cm; // sample standard deviation over cycles
    std::vector<bool> clamped;
    int cycles = 0;
};

struct TwoPathGap
{
    double mean_cm = 0.0;
    double max_cm = 0.0;
    std::size_t pairs = 0;
};

// Pairs samples of one rep whose commanded tuples coincide between the
// segment from `a` to `b` and the later segment from `b` to `a`, and
// reports the tip distance between the two traversals.
TwoPathGap two_path_gap(const std::vector<TrajectorySample> &rep, const ActuationTuple &a, const ActuationTuple &b);

} // namespace cathsim::scenario
