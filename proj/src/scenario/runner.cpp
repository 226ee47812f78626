#include "cathsim/scenario/runner.hpp"

#include <cmath>
#include <random>

namespace cathsim::scenario {

namespace {

class Streamer
{
public:
    Streamer(SystemHandle &system, const RunOptions &opts, TrajectoryLog &log)
        : system_(system), opts_(opts), log_(log), rng_(opts.seed), noise_(0.0, opts.noise_std_cm)
    {
        if (!(opts.command_rate_hz > 0.0) || !(opts.sample_rate_hz > 0.0) || opts.noise_std_cm < 0.0) {
            throw ParameterError("run options: rates must be positive and noise non-negative");
        }
    }

    void begin_rep(int rep)
    {
        rep_ = rep;
        k_ = 0;
        next_sample_ = 0;
    }

    // Sends command k of the rep (issued at k / command_rate) and logs the
    // samples that fall before the next command.
    SystemResponse send(const ActuationTuple &cmd, bool last)
    {
        const double t_cmd = k_ / opts_.command_rate_hz;
        const auto t_us = static_cast<std::uint64_t>(std::llround((clock_s_ + t_cmd) * 1e6));
        SystemResponse r;
        try {
            r = system_.command(cmd, t_us);
        } catch (const LinkError &e) {
            throw ScenarioAbortedError(std::string("rep ") + std::to_string(rep_) + " aborted: " + e.what(), log_);
        }
        const double t_next = (k_ + 1) / opts_.command_rate_hz;
        while (true) {
            const double t = next_sample_ / opts_.sample_rate_hz;
            if (last ? t > t_cmd + 1e-12 : t >= t_next - 1e-12) {
                break;
            }
            TrajectorySample s;
            s.rep = rep_;
            s.t_s = t;
            s.cmd = cmd;
            s.tip_cm = r.tip_cm;
            if (opts_.noise_std_cm > 0.0) {
                s.tip_cm += Vec3(noise_(rng_), noise_(rng_), noise_(rng_));
            }
            s.flags = r.flags;
            log_.samples.push_back(s);
            ++next_sample_;
        }
        ++k_;
        return r;
    }

    void end_rep() { clock_s_ += k_ / opts_.command_rate_hz; }

    // Unlogged, still advances the follower clock.
    void move_unlogged(const std::vector<ActuationTuple> &pts)
    {
        try {
            for (const auto &p : pts) {
                clock_s_ += 1.0 / opts_.command_rate_hz;
                system_.command(p, static_cast<std::uint64_t>(std::llround(clock_s_ * 1e6)));
            }
        } catch (const LinkError &e) {
            throw ScenarioAbortedError(std::string("setup move aborted: ") + e.what(), log_);
        }
    }

private:
    SystemHandle &system_;
    const RunOptions &opts_;
    TrajectoryLog &log_;
    std::mt19937_64 rng_;
    std::normal_distribution<double> noise_;
    int rep_ = 0;
    long k_ = 0;
    long next_sample_ = 0;
    double clock_s_ = 0.0;
};

} // namespace

TrajectoryLog run_scenario(const ScenarioProgram &program, SystemHandle &system, const RunOptions &opts)
{
    if (program.repetitions < 1) {
        throw ParameterError("run_scenario: repetitions must be >= 1");
    }
    TrajectoryLog log;
    log.sample_rate_hz = opts.sample_rate_hz;
    Streamer st(system, opts, log);
    const std::vector<ActuationTuple> pts = expand(program);

    if (opts.setup_move) {
        // From home (actuation zero) to the program's initial tuple.
        const double step_mm = program.segments.empty() ? 0.5 : program.segments.front().step_mm;
        const double step_deg = program.segments.empty() ? 1.0 : program.segments.front().step_deg;
        st.move_unlogged(interpolate(ActuationTuple{}, program.init, step_mm, step_deg));
    }
    for (int rep = 0; rep < program.repetitions; ++rep) {
        st.begin_rep(rep);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            st.send(pts[i], i + 1 == pts.size());
        }
        st.end_rep();
    }
    return log;
}

ApproachResult run_approaching(const std::vector<ActuationTuple> &targets, int cycles, SystemHandle &system,
                               const RunOptions &opts, double step_mm, double step_deg)
{
    if (targets.empty() || cycles < 1) {
        throw PreconditionError("run_approaching: need at least one target and one cycle");
    }
    ApproachResult out;
    out.log.sample_rate_hz = opts.sample_rate_hz;
    Streamer st(system, opts, out.log);

    std::vector<std::vector<Vec3>> reached(targets.size());
    std::vector<bool> clamped(targets.size(), false);
    ActuationTuple cur{};
    for (int c = 0; c < cycles; ++c) {
        st.begin_rep(c);
        SystemResponse r = st.send(cur, false);
        for (std::size_t i = 0; i < targets.size(); ++i) {
            const auto pts = interpolate(cur, targets[i], step_mm, step_deg);
            for (std::size_t k = 0; k < pts.size(); ++k) {
                r = st.send(pts[k], i + 1 == targets.size() && k + 1 == pts.size());
            }
            reached[i].push_back(r.tip_cm);
            clamped[i] = clamped[i] || (r.flags & teleop::flag::kLimitClamped);
            cur = targets[i];
        }
        st.end_rep();
    }

    out.stats.targets = targets;
    out.stats.cycles = cycles;
    out.stats.clamped = clamped;
    for (const auto &pts : reached) {
        // Welford, so identical visits give exactly zero spread.
        Vec3 mean = Vec3::Zero();
        Vec3 var = Vec3::Zero();
        double n = 0.0;
        for (const auto &p : pts) {
            n += 1.0;
            const Vec3 d = p - mean;
            mean += d / n;
            var += d.cwiseProduct(p - mean);
        }
        const double denom = pts.size() > 1 ? static_cast<double>(pts.size() - 1) : 1.0;
        out.stats.mean_cm.push_back(mean);
        out.stats.std_cm.push_back((var / denom).cwiseSqrt());
    }
    return out;
}

std::vector<Vec3> ideal_reference(const ScenarioProgram &program, const catheter::CatheterSpec &spec,
                                  const catheter::BendingMapConfig &ideal_map)
{
    catheter::CatheterSpec s = spec;
    s.gravity_enabled = false;
    s.marker_enabled = false;
    catheter::CatheterModel model(s, ideal_map);
    std::vector<Vec3> out;
    for (const auto &p : expand(program)) {
        model.apply(p);
        out.push_back(model.tip_pose().position_cm);
    }
    return out;
}

} // namespace cathsim::scenario
