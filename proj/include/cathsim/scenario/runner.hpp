#pragma once

#include "cathsim/errors.hpp"
#include "cathsim/scenario/metrics.hpp"
#include "cathsim/scenario/program.hpp"
#include "cathsim/scenario/system.hpp"

#include <cstdint>
#include <optional>

namespace cathsim::scenario {

struct RunOptions
{
    double command_rate_hz = 100.0;
    double sample_rate_hz = 250.0;
    bool setup_move = true;    // unlogged move from the current pose to the program's init
    double noise_std_cm = 0.0; // additive Gaussian noise on logged tip positions
    std::uint64_t seed = 1;
};

// A repetition stopped on link loss; carries everything logged so far.
class ScenarioAbortedError : public LinkError
{
public:
    ScenarioAbortedError(const std::string &what, TrajectoryLog partial)
        : LinkError(what), partial_(std::move(partial))
    {
    }

    const TrajectoryLog &partial() const noexcept { return partial_; }

private:
    TrajectoryLog partial_;
};

// Streams every repetition at the command rate and samples the tip at the
// sample rate on simulated time. The system keeps its hysteresis memory
// across repetitions.
TrajectoryLog run_scenario(const ScenarioProgram &program, SystemHandle &system, const RunOptions &opts = {});

struct ApproachResult
{
    TrajectoryLog log;
    ApproachStats stats;
};

// Visits the targets successively, `cycles` times. Throws
// PreconditionError for an empty target list or cycles < 1.
ApproachResult run_approaching(const std::vector<ActuationTuple> &targets, int cycles, SystemHandle &system,
                               const RunOptions &opts = {}, double step_mm = 0.5, double step_deg = 1.0);

// Tip trace of one repetition on a memoryless, gravity-free catheter; the
// reference path for compute_errors.
std::vector<Vec3> ideal_reference(const ScenarioProgram &program, const catheter::CatheterSpec &spec,
                                  const catheter::BendingMapConfig &ideal_map);

} // namespace cathsim::scenario
